//! Concurrence and heat currents for two-qubit engine states.

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{build_hamiltonian, lowering, raising, DensityMatrix, EngineParams, Mat4, Side, C64};
use crate::nvphys::constants::HBAR;

/// Largest off-X residual accepted by [`concurrence_x`].
pub const X_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// |ρ₂₃| − √(ρ₁₁ρ₄₄) attains the maximum (single-excitation coherence).
    Inner,
    /// |ρ₁₄| − √(ρ₂₂ρ₃₃) attains the maximum.
    Outer,
    Separable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GeneralEigenvalue,
    XClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcurrenceResult {
    pub value: f64,
    pub branch: Branch,
    pub method: Method,
}

fn x_branches(rho: &DensityMatrix) -> (f64, f64) {
    let x = rho.x_components();
    let [p11, p22, p33, p44] = x.populations.map(|p| p.max(0.0));
    (x.inner.norm() - (p11 * p44).sqrt(), x.outer.norm() - (p22 * p33).sqrt())
}

fn hermitian_eigen(m: Mat4, what: &str) -> Result<SymmetricEigen<C64, nalgebra::U4>> {
    SymmetricEigen::try_new(m, f64::EPSILON, 10_000).ok_or_else(|| Error::EigenFailure {
        matrix: format!("{what}: {m}"),
    })
}

/// Wootters concurrence from the spectrum of √ρ ρ̃ √ρ, where
/// ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y).
///
/// The Hermitian product has the same eigenvalues as ρρ̃ but its spectrum is
/// guaranteed real under floating point.
pub fn concurrence_general(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    let m = rho.matrix();
    let herm = (m + m.adjoint()) * C64::from(0.5);

    let eig = hermitian_eigen(herm, "density matrix")?;
    let sqrt_vals = eig.eigenvalues.map(|l| C64::from(l.max(0.0).sqrt()));
    let sqrt_rho = eig.eigenvectors * Mat4::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();

    let mut yy = Mat4::zeros();
    yy[(0, 3)] = C64::from(-1.0);
    yy[(1, 2)] = C64::from(1.0);
    yy[(2, 1)] = C64::from(1.0);
    yy[(3, 0)] = C64::from(-1.0);
    let flipped = yy * herm.conjugate() * yy;

    let r = sqrt_rho * flipped * sqrt_rho;
    let r = (r + r.adjoint()) * C64::from(0.5);
    let mut lambdas: Vec<f64> = hermitian_eigen(r, "sqrt(rho) rho~ sqrt(rho)")?
        .eigenvalues
        .iter()
        .map(|&mu| mu.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));

    let value = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0);
    let branch = if value == 0.0 {
        Branch::Separable
    } else {
        let (inner, outer) = x_branches(rho);
        if inner >= outer {
            Branch::Inner
        } else {
            Branch::Outer
        }
    };
    Ok(ConcurrenceResult {
        value,
        branch,
        method: Method::GeneralEigenvalue,
    })
}

/// Closed form for X-shaped states:
/// C = 2·max(0, |ρ₂₃| − √(ρ₁₁ρ₄₄), |ρ₁₄| − √(ρ₂₂ρ₃₃)).
pub fn concurrence_x(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    let residual = rho.x_components().off_x_residual;
    if residual > X_TOLERANCE {
        return Err(Error::NotXShaped {
            residual,
            tolerance: X_TOLERANCE,
        });
    }
    let (inner, outer) = x_branches(rho);
    let best = inner.max(outer);
    let (value, branch) = if best > 0.0 {
        let branch = if inner >= outer { Branch::Inner } else { Branch::Outer };
        ((2.0 * best).min(1.0), branch)
    } else {
        (0.0, Branch::Separable)
    };
    Ok(ConcurrenceResult {
        value,
        branch,
        method: Method::XClosedForm,
    })
}

/// Closed form when the state is X-shaped, Wootters otherwise.
pub fn concurrence(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    if rho.x_components().off_x_residual <= X_TOLERANCE {
        concurrence_x(rho)
    } else {
        concurrence_general(rho)
    }
}

fn apply_dissipator(a: &Mat4, rho: &Mat4) -> Mat4 {
    let ad = a.adjoint();
    let ada = ad * a;
    a * rho * ad - (ada * rho + rho * ada) * C64::from(0.5)
}

/// Energy flow from one bath into the system, Tr(H · D_side[ρ]), in Hz².
///
/// Positive means the bath injects energy. Multiply by 2πħ for watts
/// (see [`to_attowatts`]).
pub fn heat_current(p: &EngineParams, rho: &DensityMatrix, side: Side) -> f64 {
    let r = p.rates();
    let (up, down) = match side {
        Side::Left => (r.up_l, r.down_l),
        Side::Right => (r.up_r, r.down_r),
    };
    let m = rho.matrix();
    let d = apply_dissipator(&raising(side), m) * C64::from(up) + apply_dissipator(&lowering(side), m) * C64::from(down);
    (build_hamiltonian(p) * d).trace().re
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatCurrents {
    pub left: f64,
    pub right: f64,
}

pub fn heat_currents(p: &EngineParams, rho: &DensityMatrix) -> HeatCurrents {
    HeatCurrents {
        left: heat_current(p, rho, Side::Left),
        right: heat_current(p, rho, Side::Right),
    }
}

/// Hz² (energy in Hz per second) to attojoule per second: P = h·J.
pub fn to_attowatts(current_hz2: f64) -> f64 {
    2.0 * std::f64::consts::PI * HBAR * current_hz2 * 1e18
}
