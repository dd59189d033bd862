use nalgebra::{SVector, Schur};

use super::{expm, DensityMatrix, Mat16, C64};

/// Generator acting on column-stacked density matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator(Mat16);

impl Superoperator {
    pub fn new(m: Mat16) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat16 {
        &self.0
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::devectorize(&(self.0 * rho.vectorize()))
    }

    pub fn apply_vec(&self, v: &SVector<C64, 16>) -> SVector<C64, 16> {
        self.0 * v
    }

    /// Largest modulus among the entries.
    pub fn max_entry(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max over columns of |vec(1)† L|: zero for a trace-preserving generator.
    pub fn trace_row_residual(&self) -> f64 {
        (0..16)
            .map(|col| (0..4).map(|i| self.0[(5 * i, col)]).sum::<C64>().norm())
            .fold(0.0, f64::max)
    }

    /// Singular values of L scaled by its largest entry, ascending.
    pub fn relative_singular_values(&self) -> Vec<f64> {
        let scale = self.max_entry();
        if scale == 0.0 {
            return vec![0.0; 16];
        }
        let mut sv: Vec<f64> = (self.0 / C64::from(scale)).singular_values().iter().copied().collect();
        sv.sort_by(f64::total_cmp);
        sv
    }

    /// Number of singular values below `rel_tol` times the largest entry.
    pub fn kernel_dimension(&self, rel_tol: f64) -> usize {
        self.relative_singular_values().into_iter().filter(|&s| s <= rel_tol).count()
    }

    /// Eigenvalues via complex Schur decomposition.
    pub fn spectrum(&self) -> Vec<C64> {
        let schur = Schur::new(self.0);
        let (_, t) = schur.unpack();
        (0..16).map(|k| t[(k, k)]).collect()
    }

    /// exp(L t).
    pub fn propagator(&self, t: f64) -> Mat16 {
        expm(&(self.0 * C64::from(t)))
    }
}
