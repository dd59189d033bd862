//! Two-qubit Hamiltonian, local Lindblad generator, propagation and steady
//! states.
//!
//! Basis: |gg⟩, |ge⟩, |eg⟩, |ee⟩ with the left (hot) qubit as the first
//! tensor factor, so index = 2·left + right. Vectorization stacks columns:
//! `vec[i + 4j] = ρ[i, j]`, hence vec(AρB) = (Bᵀ ⊗ A) vec(ρ).
//!
//! Energies and rates are in Hz and enter the generator on the same footing,
//! −i[H, ·] + Σ γ D[·], with time in seconds.

mod expm;
mod solve;
mod state;
mod superop;

use nalgebra::{Complex, SMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use expm::expm;
pub use solve::{
    evolve, evolve_rk4, steady_state, steady_state_with_residual, write_trajectory_csv, RK4_STEP_FRACTION,
};
pub use state::{DensityMatrix, StateTolerance, XComponents};
pub use superop::Superoperator;

pub type C64 = Complex<f64>;
pub type Mat4 = SMatrix<C64, 4, 4>;
pub type Mat16 = SMatrix<C64, 16, 16>;

/// Which bath / qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// The numbers that fully determine the generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    /// Left (hot) qubit energy, Hz.
    pub eps_l: f64,
    /// Right (cold) qubit energy, Hz.
    pub eps_r: f64,
    /// Flip-flop coupling, Hz.
    pub g: f64,
    /// Left bare rate, Hz.
    pub gamma_l: f64,
    /// Right bare rate, Hz.
    pub gamma_r: f64,
    /// Left bath occupation.
    pub n_l: f64,
    /// Right bath occupation.
    pub n_r: f64,
    /// Optional S^z S^z dipolar term (Hz), off in the engine model. Acts as
    /// zz·|ee⟩⟨ee| since S^z = −σ⁺σ⁻ on the {|0⟩, |−1⟩} qubit.
    #[serde(default)]
    pub zz: f64,
}

/// γ⁺ (bath → qubit excitation) and γ⁻ (relaxation) for each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathRates {
    pub up_l: f64,
    pub down_l: f64,
    pub up_r: f64,
    pub down_r: f64,
}

impl EngineParams {
    /// Two resonant qubits with equal bare rates.
    pub fn resonant(eps: f64, g: f64, gamma: f64, n_l: f64, n_r: f64) -> Self {
        Self {
            eps_l: eps,
            eps_r: eps,
            g,
            gamma_l: gamma,
            gamma_r: gamma,
            n_l,
            n_r,
            zz: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("eps_l", self.eps_l),
            ("eps_r", self.eps_r),
            ("g", self.g),
            ("gamma_l", self.gamma_l),
            ("gamma_r", self.gamma_r),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} = {v} must be a nonnegative number")));
            }
        }
        for (name, n) in [("n_l", self.n_l), ("n_r", self.n_r)] {
            if !(0.0..=1.0).contains(&n) {
                return Err(Error::InvalidParams(format!("{name} = {n} outside [0, 1]")));
            }
        }
        if !self.zz.is_finite() {
            return Err(Error::InvalidParams(format!("zz = {} must be finite", self.zz)));
        }
        Ok(())
    }

    pub fn rates(&self) -> BathRates {
        BathRates {
            up_l: self.gamma_l * self.n_l,
            down_l: self.gamma_l * (1.0 - self.n_l),
            up_r: self.gamma_r * self.n_r,
            down_r: self.gamma_r * (1.0 - self.n_r),
        }
    }

    /// Multiplies every energy and rate by `lambda`; occupations unchanged.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            eps_l: self.eps_l * lambda,
            eps_r: self.eps_r * lambda,
            g: self.g * lambda,
            gamma_l: self.gamma_l * lambda,
            gamma_r: self.gamma_r * lambda,
            zz: self.zz * lambda,
            ..*self
        }
    }

    /// Largest energy or rate, a natural frequency scale for tolerances.
    pub fn scale(&self) -> f64 {
        [self.eps_l, self.eps_r, self.g, self.gamma_l, self.gamma_r, self.zz.abs()]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// σ⁺ = |e⟩⟨g| on one qubit, embedded in the two-qubit space.
pub fn raising(side: Side) -> Mat4 {
    let mut m = Mat4::zeros();
    match side {
        // |e r⟩⟨g r|: index 2 + r ← r
        Side::Left => {
            m[(2, 0)] = c(1.0);
            m[(3, 1)] = c(1.0);
        }
        // |l e⟩⟨l g|: index 2l + 1 ← 2l
        Side::Right => {
            m[(1, 0)] = c(1.0);
            m[(3, 2)] = c(1.0);
        }
    }
    m
}

pub fn lowering(side: Side) -> Mat4 {
    raising(side).adjoint()
}

/// H = ε_L σ⁺_Lσ⁻_L + ε_R σ⁺_Rσ⁻_R + g(σ⁺_Lσ⁻_R + σ⁻_Lσ⁺_R) [+ zz |ee⟩⟨ee|], Hz.
pub fn build_hamiltonian(p: &EngineParams) -> Mat4 {
    let mut h = Mat4::zeros();
    h[(1, 1)] = c(p.eps_r);
    h[(2, 2)] = c(p.eps_l);
    h[(3, 3)] = c(p.eps_l + p.eps_r + p.zz);
    h[(1, 2)] = c(p.g);
    h[(2, 1)] = c(p.g);
    h
}

/// D[A]ρ = AρA† − ½{A†A, ρ}, as a 16×16 column-stacking superoperator.
pub fn dissipator(a: &Mat4) -> Mat16 {
    let id = Mat4::identity();
    let ada = a.adjoint() * a;
    a.conjugate().kronecker(a) - (id.kronecker(&ada) + ada.transpose().kronecker(&id)) * c(0.5)
}

/// −i[H, ·] as a superoperator.
pub fn commutator_super(h: &Mat4) -> Mat16 {
    let id = Mat4::identity();
    (id.kronecker(h) - h.transpose().kronecker(&id)) * C64::new(0.0, -1.0)
}

/// The dissipative part belonging to one bath.
pub fn bath_dissipator(p: &EngineParams, side: Side) -> Mat16 {
    let r = p.rates();
    let (up, down) = match side {
        Side::Left => (r.up_l, r.down_l),
        Side::Right => (r.up_r, r.down_r),
    };
    dissipator(&raising(side)) * c(up) + dissipator(&lowering(side)) * c(down)
}

pub fn build_liouvillian(p: &EngineParams) -> Superoperator {
    let h = build_hamiltonian(p);
    Superoperator::new(
        commutator_super(&h) + bath_dissipator(p, Side::Left) + bath_dissipator(p, Side::Right),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EngineParams {
        EngineParams::resonant(1.1e6, 56e3, 250e3, 0.5, 0.0)
    }

    #[test]
    fn uncoupled_hamiltonian_is_diagonal() {
        let p = EngineParams {
            g: 0.0,
            eps_l: 3.0,
            eps_r: 2.0,
            ..sample()
        };
        let h = build_hamiltonian(&p);
        let expected = Mat4::from_diagonal(&nalgebra::Vector4::new(c(0.0), c(2.0), c(3.0), c(5.0)));
        assert_eq!(h, expected);
    }

    #[test]
    fn flip_flop_element() {
        let h = build_hamiltonian(&sample());
        // ⟨ge|H|eg⟩
        assert_eq!(h[(1, 2)], c(56e3));
        // H from ladder operators agrees with the direct construction.
        let (pl, pr) = (raising(Side::Left), raising(Side::Right));
        let (ml, mr) = (lowering(Side::Left), lowering(Side::Right));
        let p = sample();
        let from_ops = pl * ml * c(p.eps_l) + pr * mr * c(p.eps_r) + (pl * mr + ml * pr) * c(p.g);
        assert!((from_ops - h).norm() < 1e-12);
    }

    #[test]
    fn resonant_spectrum() {
        // Block diagonalization: {0, ε − g, ε + g, 2ε}.
        let (eps, g) = (1.1e6, 70e3);
        let h = build_hamiltonian(&EngineParams::resonant(eps, g, 1.0, 0.5, 0.5));
        let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let expected = [0.0, eps - g, eps + g, 2.0 * eps];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-6, "{ev:?}");
        }
    }

    #[test]
    fn ladder_operators_act_on_the_right_factor() {
        // σ⁺_L |g e⟩ = |e e⟩
        let v = raising(Side::Left) * nalgebra::Vector4::new(c(0.0), c(1.0), c(0.0), c(0.0));
        assert_eq!(v[3], c(1.0));
        let v = raising(Side::Right) * nalgebra::Vector4::new(c(0.0), c(0.0), c(1.0), c(0.0));
        assert_eq!(v[3], c(1.0));
    }

    #[test]
    fn rates_sum_to_bare_rate() {
        let p = EngineParams::resonant(1.0, 0.1, 3.0, 0.3, 0.9);
        let r = p.rates();
        assert!((r.up_l + r.down_l - 3.0).abs() < 1e-15);
        assert!((r.up_r + r.down_r - 3.0).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(sample().validate().is_ok());
        assert!(EngineParams { n_l: 1.2, ..sample() }.validate().is_err());
        assert!(EngineParams { gamma_r: -1.0, ..sample() }.validate().is_err());
        assert!(EngineParams { g: f64::NAN, ..sample() }.validate().is_err());
    }
}
