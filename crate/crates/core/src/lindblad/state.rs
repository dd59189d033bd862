use std::fmt;
use std::str::FromStr;

use nalgebra::{SVector, Vector4};

use super::{Mat4, C64};
use crate::error::{Error, Result};

/// Tolerances used when accepting a matrix as a physical state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    /// Smallest eigenvalue allowed (a negative number).
    pub min_eigenvalue: f64,
}

impl Default for StateTolerance {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            trace: 1e-12,
            min_eigenvalue: -1e-10,
        }
    }
}

/// Two-qubit density matrix in the |gg⟩, |ge⟩, |eg⟩, |ee⟩ basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat4);

/// The X-shape view of a state: populations, ρ₂₃ (|ge⟩⟨eg|), ρ₁₄
/// (|gg⟩⟨ee|), and the Frobenius norm of every other off-diagonal entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XComponents {
    pub populations: [f64; 4],
    pub inner: C64,
    pub outer: C64,
    pub off_x_residual: f64,
}

impl DensityMatrix {
    /// Accepts `m` if it passes [`StateTolerance::default`].
    pub fn new(m: Mat4) -> Result<Self> {
        Self::with_tolerance(m, StateTolerance::default())
    }

    pub fn with_tolerance(m: Mat4, tol: StateTolerance) -> Result<Self> {
        let state = Self(m);
        state.check(tol)?;
        Ok(state)
    }

    /// Wraps without checking. For solver output that is validated later
    /// along the trajectory, and for deliberately unphysical test inputs.
    pub fn from_matrix_unchecked(m: Mat4) -> Self {
        Self(m)
    }

    pub fn check(&self, tol: StateTolerance) -> Result<()> {
        if self.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = self.hermiticity_error();
        if herm > tol.hermiticity {
            return Err(Error::InvalidState(format!("hermiticity error {herm:e}")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue();
        if min < tol.min_eigenvalue {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// ρ_L ⊗ ρ_R with each qubit diagonal: excited-state populations `n_l`, `n_r`.
    pub fn thermal_product(n_l: f64, n_r: f64) -> Self {
        let left = [1.0 - n_l, n_l];
        let right = [1.0 - n_r, n_r];
        let d = Vector4::new(
            C64::from(left[0] * right[0]),
            C64::from(left[0] * right[1]),
            C64::from(left[1] * right[0]),
            C64::from(left[1] * right[1]),
        );
        Self(Mat4::from_diagonal(&d))
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat4::identity() * C64::from(0.25))
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) amplitude vector.
    pub fn pure(psi: Vector4<C64>) -> Self {
        let psi = psi / C64::from(psi.norm());
        Self(psi * psi.adjoint())
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat4 {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).camax()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let h = (self.0 + self.0.adjoint()) * C64::from(0.5);
        let mut ev: [f64; 4] = h.symmetric_eigenvalues().into();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Column-stacked vector.
    pub fn vectorize(&self) -> SVector<C64, 16> {
        SVector::from_column_slice(self.0.as_slice())
    }

    pub fn devectorize(v: &SVector<C64, 16>) -> Self {
        Self(Mat4::from_column_slice(v.as_slice()))
    }

    /// ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = self.0 - other.0;
        let h = (diff + diff.adjoint()) * C64::from(0.5);
        0.5 * h.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
    }

    /// (ρ + ρ†)/2 rescaled to unit trace.
    pub fn hermitian_normalized(&self) -> Self {
        let h = (self.0 + self.0.adjoint()) * C64::from(0.5);
        let tr = h.trace().re;
        Self(h / C64::from(tr))
    }

    pub fn x_components(&self) -> XComponents {
        let m = &self.0;
        let mut residual = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let on_x = i == j || i + j == 3;
                if !on_x {
                    residual += m[(i, j)].norm_sqr();
                }
            }
        }
        XComponents {
            populations: [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re],
            inner: m[(1, 2)],
            outer: m[(0, 3)],
            off_x_residual: residual.sqrt(),
        }
    }

    /// 4×4 text grid, row-major, one row per line, fields `re+imj`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..4 {
            let row: Vec<String> = (0..4).map(|j| format_complex(self.0[(i, j)])).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output and validates the result.
    pub fn parse_text(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if rows.len() != 4 {
            return Err(Error::InvalidState(format!("expected 4 rows, found {}", rows.len())));
        }
        let mut m = Mat4::zeros();
        for (i, row) in rows.iter().enumerate() {
            let fields: Vec<&str> = row.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::InvalidState(format!(
                    "row {}: expected 4 fields, found {}",
                    i + 1,
                    fields.len()
                )));
            }
            for (j, f) in fields.iter().enumerate() {
                m[(i, j)] = parse_complex(f)
                    .ok_or_else(|| Error::InvalidState(format!("row {}, column {}: cannot parse `{f}`", i + 1, j + 1)))?;
            }
        }
        Self::new(m)
    }
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for DensityMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

pub(crate) fn format_complex(z: C64) -> String {
    format!("{:e}{:+e}j", z.re, z.im)
}

pub(crate) fn parse_complex(s: &str) -> Option<C64> {
    let body = s.strip_suffix('j')?;
    let bytes = body.as_bytes();
    // Split at the last sign that is not a leading sign or an exponent sign.
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))?;
    let re = body[..split].parse().ok()?;
    let im = body[split..].parse().ok()?;
    Some(C64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> DensityMatrix {
        DensityMatrix::pure(Vector4::new(C64::from(0.0), C64::from(1.0), C64::from(1.0), C64::from(0.0)))
    }

    #[test]
    fn product_state_has_no_coherence() {
        let x = DensityMatrix::thermal_product(0.3, 0.1).x_components();
        assert_eq!(x.inner, C64::from(0.0));
        assert_eq!(x.outer, C64::from(0.0));
        assert_eq!(x.off_x_residual, 0.0);
        assert!((x.populations.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_inner_coherence() {
        let x = bell().x_components();
        assert!((x.inner - C64::from(0.5)).norm() < 1e-15);
        assert!(x.off_x_residual < 1e-15);
    }

    #[test]
    fn text_round_trip() {
        let m = Mat4::from_fn(|i, j| {
            if i == j {
                C64::from(0.25)
            } else if i < j {
                C64::new(0.01 * (i + j) as f64, -1e-3 * j as f64)
            } else {
                C64::new(0.01 * (i + j) as f64, 1e-3 * i as f64)
            }
        });
        let rho = DensityMatrix::new(m).unwrap();
        let text = rho.to_text();
        assert_eq!(text.lines().count(), 4);
        let back: DensityMatrix = text.parse().unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn parse_complex_forms() {
        assert_eq!(parse_complex("1e-3-2.5e2j"), Some(C64::new(1e-3, -250.0)));
        assert_eq!(parse_complex("-0.5+0j"), Some(C64::new(-0.5, 0.0)));
        assert_eq!(parse_complex("2.5e-1+0e0j"), Some(C64::new(0.25, 0.0)));
        assert_eq!(parse_complex("0.5"), None);
    }

    #[test]
    fn rejects_unphysical() {
        let mut m = Mat4::identity() * C64::from(0.25);
        m[(0, 1)] = C64::from(0.1);
        assert!(DensityMatrix::new(m).is_err());
        let m = Mat4::identity() * C64::from(0.3);
        assert!(DensityMatrix::new(m).is_err());
        let m = Mat4::from_diagonal(&Vector4::new(
            C64::from(1.1),
            C64::from(-0.1),
            C64::from(0.0),
            C64::from(0.0),
        ));
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let a = DensityMatrix::thermal_product(0.0, 0.0);
        let b = DensityMatrix::thermal_product(1.0, 1.0);
        assert!((a.trace_distance(&b) - 1.0).abs() < 1e-14);
        assert!(a.trace_distance(&a) < 1e-15);
    }

    #[test]
    fn vectorization_is_column_stacking() {
        let mut m = Mat4::zeros();
        m[(1, 2)] = C64::from(1.0);
        let v = DensityMatrix::from_matrix_unchecked(m).vectorize();
        assert_eq!(v[1 + 4 * 2], C64::from(1.0));
        assert_eq!(DensityMatrix::devectorize(&v).into_matrix(), m);
    }
}
