use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nvphys::{
    coupling_window_check, cross_relaxation_field, diffusion_constant, diffusion_time, dipolar_coupling,
    gamma1_scaled, gamma2_scaled, qubit_energy, PhysicalConstants, WindowVerdict, DEFAULT_MARGIN,
};

/// Required ratio for each "≫" timescale criterion.
pub const TIMESCALE_FACTOR: f64 = 100.0;
/// Engine settling time in units of 1/Γ.
pub const ENGINE_TIME_OVER_GAMMA: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeasibilityInput {
    pub concentration_percent: f64,
    /// NV–NV distance, m.
    pub r_m: f64,
    /// Angle between the NV axis and the NV–NV vector, rad.
    pub theta_rad: f64,
    /// Distance the polarization gradient must survive, m.
    pub d_sep_m: f64,
    pub margin: f64,
    /// Nuclear spin-lattice rate, Hz.
    pub spin_lattice_hz: f64,
}

impl Default for FeasibilityInput {
    fn default() -> Self {
        Self {
            concentration_percent: 1.1,
            r_m: 10e-9,
            theta_rad: 0.0,
            d_sep_m: 20e-9,
            margin: DEFAULT_MARGIN,
            spin_lattice_hz: 150.0,
        }
    }
}

/// A "≫" comparison: passes when `ratio ≥ required`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Criterion {
    pub passed: bool,
    pub ratio: f64,
    pub required: f64,
}

impl Criterion {
    fn at_least(ratio: f64, required: f64) -> Self {
        Self {
            passed: ratio >= required,
            ratio,
            required,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub input: FeasibilityInput,
    pub b_cr_t: f64,
    pub eps_hz: f64,
    /// Signed dipolar coupling; the window uses its magnitude.
    pub g_hz: f64,
    pub gamma1_hz: f64,
    pub gamma2_hz: f64,
    pub engine_time_s: f64,
    pub diffusion_constant_nm2_s: f64,
    /// `None` when the diffusion constant vanishes.
    pub diffusion_time_s: Option<f64>,
    pub window: WindowVerdict,
    /// Diffusion time over engine time.
    pub diffusion: Criterion,
    /// Γ over Γ_SL.
    pub spin_lattice: Criterion,
}

impl FeasibilityReport {
    pub fn all_passed(&self) -> bool {
        self.window.passed() && self.diffusion.passed && self.spin_lattice.passed
    }
}

/// Failures of the physical criteria are encoded in the report; only
/// malformed inputs are errors.
pub fn feasibility_report(input: &FeasibilityInput) -> Result<FeasibilityReport> {
    let c = PhysicalConstants::carbon13();
    let bad = |name: &'static str, value: f64, reason: &'static str| Error::InvalidInput { name, value, reason };
    if !(input.concentration_percent >= 0.0 && input.concentration_percent <= 100.0) {
        return Err(bad("concentration_percent", input.concentration_percent, "must lie in [0, 100]"));
    }
    if !(input.d_sep_m >= 0.0 && input.d_sep_m.is_finite()) {
        return Err(bad("d_sep_m", input.d_sep_m, "must be nonnegative"));
    }
    if !(input.margin > 0.0) {
        return Err(bad("margin", input.margin, "must be positive"));
    }
    if !(input.spin_lattice_hz >= 0.0) {
        return Err(bad("spin_lattice_hz", input.spin_lattice_hz, "must be nonnegative"));
    }

    let b_cr = cross_relaxation_field(&c);
    let eps = qubit_energy(&c, b_cr)?;
    let g = dipolar_coupling(&c, input.r_m, input.theta_rad)?;
    let gamma1 = gamma1_scaled(input.concentration_percent);
    let gamma2 = gamma2_scaled(input.concentration_percent);
    let engine_time = ENGINE_TIME_OVER_GAMMA / gamma1;
    let d = diffusion_constant(input.concentration_percent);
    let diffusion_time_s = match diffusion_time(input.d_sep_m * 1e9, d) {
        Ok(t) => Some(t),
        Err(Error::NoDiffusion) => None,
        Err(e) => return Err(e),
    };
    let diffusion = match diffusion_time_s {
        Some(t) => Criterion::at_least(t / engine_time, TIMESCALE_FACTOR),
        // No bath at all: no diffusion, but also no engine.
        None => Criterion::at_least(0.0, TIMESCALE_FACTOR),
    };

    Ok(FeasibilityReport {
        input: *input,
        b_cr_t: b_cr,
        eps_hz: eps,
        g_hz: g,
        gamma1_hz: gamma1,
        gamma2_hz: gamma2,
        engine_time_s: engine_time,
        diffusion_constant_nm2_s: d,
        diffusion_time_s,
        window: coupling_window_check(g, eps, gamma1, input.margin),
        diffusion,
        spin_lattice: Criterion::at_least(gamma1 / input.spin_lattice_hz, TIMESCALE_FACTOR),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_abundance_defaults() {
        let r = feasibility_report(&FeasibilityInput::default()).unwrap();
        assert!((r.engine_time_s - 4e-4).abs() < 1e-15);
        let t = r.diffusion_time_s.unwrap();
        assert!((t - 586.8).abs() < 1.0, "{t}");
        assert!(r.diffusion.passed);
        assert!(r.spin_lattice.passed);
        assert!((r.spin_lattice.ratio - 250e3 / 150.0).abs() < 1e-9);
        // 26 kHz sits below Γ = 250 kHz.
        assert!(matches!(r.window, WindowVerdict::BelowRelaxation { .. }));
        assert!(!r.all_passed());
    }

    #[test]
    fn magic_angle_reports_no_coupling() {
        let input = FeasibilityInput {
            theta_rad: (1.0 / 3.0_f64.sqrt()).acos(),
            ..FeasibilityInput::default()
        };
        let r = feasibility_report(&input).unwrap();
        assert_eq!(r.window, WindowVerdict::NoCoupling);
    }

    #[test]
    fn short_distance_passes_window() {
        // |g| ∝ r⁻³: 4 nm gives ~406 kHz, inside [Γ, ε/2].
        let input = FeasibilityInput {
            r_m: 4e-9,
            margin: 2.0,
            ..FeasibilityInput::default()
        };
        let r = feasibility_report(&input).unwrap();
        assert!(r.window.passed(), "{:?}", r.window);
        assert!(r.all_passed());
    }

    #[test]
    fn zero_concentration_fails_diffusion_without_error() {
        let input = FeasibilityInput {
            concentration_percent: 0.0,
            ..FeasibilityInput::default()
        };
        let r = feasibility_report(&input).unwrap();
        assert_eq!(r.diffusion_time_s, None);
        assert!(!r.diffusion.passed);
    }

    #[test]
    fn rejects_malformed_geometry() {
        let input = FeasibilityInput {
            r_m: -1.0,
            ..FeasibilityInput::default()
        };
        assert!(feasibility_report(&input).is_err());
    }
}
