//! NV-center and nuclear-bath physics: every engine parameter is derived
//! here, and nothing downstream reaches for a raw constant.
//!
//! Units are ordinary frequency throughout (see [`constants`]).

pub mod constants;
pub mod geometry;
pub mod registry;

use serde::Serialize;

pub use constants::{PhysicalConstants, Temperature};
pub use geometry::{abundance_to_density, density_to_abundance, GeometryConfig};
pub use registry::{Concentration, ConcentrationUnit, NucleusRecord, Registry};

use crate::error::{require_finite, Error, Result};
use constants::angular;
use geometry::NATURAL_ABUNDANCE_PERCENT;

/// Cross-relaxation bare rate measured at natural abundance, Hz.
pub const GAMMA1_REF_HZ: f64 = 250e3;
/// NV decoherence rate at natural abundance, Hz.
pub const GAMMA2_REF_HZ: f64 = 1.5e3;
/// ¹³C spin-diffusion constant of a fully enriched crystal, nm²/s.
pub const DIFFUSION_FULL_ENRICHMENT_NM2_S: f64 = 6.5;
/// Multiplicity factor of spin-1/2 reservoir spins in the field-noise sum.
pub const SPIN_MULTIPLICITY: f64 = 0.25;
/// Default "≪" factor of the coupling window.
pub const DEFAULT_MARGIN: f64 = 10.0;

/// Energy of the NV |0⟩ ↔ |−1⟩ transition under an aligned field, Hz.
pub fn qubit_energy(c: &PhysicalConstants, b_par: f64) -> Result<f64> {
    require_finite("b_par", b_par)?;
    if b_par < 0.0 {
        return Err(Error::InvalidInput {
            name: "b_par",
            value: b_par,
            reason: "field must be nonnegative",
        });
    }
    let energy_hz = c.d - c.gamma_e * b_par;
    if energy_hz < 0.0 {
        return Err(Error::PastAnticrossing { b_par, energy_hz });
    }
    Ok(energy_hz)
}

/// Nuclear Zeeman energy, Hz.
pub fn nuclear_energy(c: &PhysicalConstants, b_par: f64) -> f64 {
    c.gamma_n * b_par
}

/// Field at which the NV transition is resonant with the nuclear spins, T.
pub fn cross_relaxation_field(c: &PhysicalConstants) -> f64 {
    c.d / (c.gamma_e + c.gamma_n)
}

/// Signed flip-flop coupling between two NV electron spins, Hz.
///
/// Evaluates μ₀γ_e²ħ/(4πr³) · (1 − 3cos²θ)/4 with angular γ_e and converts
/// the resulting angular frequency back to Hz. The engine uses the magnitude.
pub fn dipolar_coupling(c: &PhysicalConstants, r: f64, theta: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput {
            name: "r",
            value: r,
            reason: "distance must be positive",
        });
    }
    require_finite("theta", theta)?;
    let gamma_e = angular(c.gamma_e);
    let prefactor = c.mu0_over_4pi * gamma_e * gamma_e * c.hbar / r.powi(3);
    let mut angular_term = (1.0 - 3.0 * theta.cos().powi(2)) / 4.0;
    // cos² of the magic angle is 1/3 only to rounding; snap it to zero.
    if angular_term.abs() <= 4.0 * f64::EPSILON {
        angular_term = 0.0;
    }
    Ok(prefactor * angular_term / angular(1.0))
}

/// Outcome of checking Γ_CR ≤ g ≪ ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WindowVerdict {
    Pass,
    /// g vanishes (e.g. magic-angle geometry).
    NoCoupling,
    /// Γ_CR ≤ g is violated.
    BelowRelaxation { g: f64, gamma_cr: f64 },
    /// g ≤ ε / margin is violated.
    NotWeak { g: f64, eps: f64, margin: f64 },
}

impl WindowVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, WindowVerdict::Pass)
    }
}

pub fn coupling_window_check(g: f64, eps: f64, gamma_cr: f64, margin: f64) -> WindowVerdict {
    let g = g.abs();
    if g == 0.0 {
        WindowVerdict::NoCoupling
    } else if gamma_cr > g {
        WindowVerdict::BelowRelaxation { g, gamma_cr }
    } else if g > eps / margin {
        WindowVerdict::NotWeak { g, eps, margin }
    } else {
        WindowVerdict::Pass
    }
}

/// Mean squared transverse field from the nuclear shell, T².
///
/// Closed form of the shell integral: C_S (μ₀γ_nħ/4π)² · 7π/(2R_min³) · n_C,
/// with the nuclear magnetic moment built from angular γ_n.
pub fn b_rms_squared(c: &PhysicalConstants, geom: &GeometryConfig) -> Result<f64> {
    if !(geom.r_min > 0.0) {
        return Err(Error::InvalidInput {
            name: "r_min",
            value: geom.r_min,
            reason: "must be positive",
        });
    }
    let moment = c.mu0_over_4pi * angular(c.gamma_n) * c.hbar;
    Ok(SPIN_MULTIPLICITY * moment * moment * 7.0 * std::f64::consts::PI
        / (2.0 * geom.r_min.powi(3))
        * geom.n_c)
}

/// Lorentzian spectral density centered on the nuclear energy, seconds.
pub fn spectral_density(eps: f64, eps_n: f64, gamma2: f64) -> Result<f64> {
    if !(gamma2 > 0.0) {
        return Err(Error::InvalidInput {
            name: "gamma2",
            value: gamma2,
            reason: "linewidth must be positive",
        });
    }
    let detuning = (eps - eps_n) / gamma2;
    Ok(1.0 / gamma2 / (1.0 + detuning * detuning))
}

/// On-resonance cross-relaxation rate from the nuclear field noise, Hz.
///
/// An order-of-magnitude estimator only: the engine always runs on
/// [`gamma1_scaled`]. With all quantities in ordinary frequency this is
/// 3γ_e²⟨B²⟩/Γ₂, the 2π factors cancelling between numerator and Γ₂.
pub fn cross_relaxation_rate_microscopic(
    c: &PhysicalConstants,
    geom: &GeometryConfig,
    gamma2: f64,
) -> Result<f64> {
    let b2 = b_rms_squared(c, geom)?;
    let peak = spectral_density(0.0, 0.0, gamma2)?;
    Ok(3.0 * c.gamma_e * c.gamma_e * b2 * peak)
}

/// Comparison of the microscopic estimator against the measured anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateConsistency {
    pub microscopic_hz: f64,
    pub operational_hz: f64,
    pub ratio: f64,
    /// Within one order of magnitude. Informational, never enforced.
    pub within_order_of_magnitude: bool,
}

pub fn rate_consistency_report(
    c: &PhysicalConstants,
    geom: &GeometryConfig,
    gamma2: f64,
) -> Result<RateConsistency> {
    let microscopic_hz = cross_relaxation_rate_microscopic(c, geom, gamma2)?;
    let operational_hz = gamma1_scaled(density_to_abundance(geom.n_c));
    let ratio = microscopic_hz / operational_hz;
    Ok(RateConsistency {
        microscopic_hz,
        operational_hz,
        ratio,
        within_order_of_magnitude: (0.1..=10.0).contains(&ratio),
    })
}

/// Cross-relaxation bare rate Γ₁ for a ¹³C abundance in percent, Hz.
pub fn gamma1_scaled(abundance_percent: f64) -> f64 {
    abundance_percent / NATURAL_ABUNDANCE_PERCENT * GAMMA1_REF_HZ
}

/// NV decoherence rate Γ₂ for a ¹³C abundance in percent, Hz.
pub fn gamma2_scaled(abundance_percent: f64) -> f64 {
    abundance_percent / NATURAL_ABUNDANCE_PERCENT * GAMMA2_REF_HZ
}

/// Boltzmann polarization p = p↓ − p↑ = tanh(ε_n / 2k_BT) of a nuclear
/// spin of energy `eps_n` (Hz) at temperature `t_hz` (k_BT/h, Hz).
///
/// `t_hz = 0` is the fully polarized limit; an infinite temperature gives 0.
pub fn polarization_from_temperature(eps_n: f64, t_hz: f64) -> f64 {
    if t_hz == 0.0 {
        return if eps_n < 0.0 { -1.0 } else { 1.0 };
    }
    (eps_n / (2.0 * t_hz)).tanh()
}

/// Bath occupation n_F = (1 − p)/2 for a polarization p.
pub fn occupation_from_polarization(p: f64) -> f64 {
    (1.0 - p) / 2.0
}

/// Fermi occupation of a bath at energy `eps` (Hz) and temperature.
pub fn fermi_occupation(c: &PhysicalConstants, eps: f64, t: Temperature) -> f64 {
    occupation_from_polarization(polarization_from_temperature(eps, t.as_hz(c)))
}

/// ¹³C spin-diffusion constant, nm²/s, with square-root abundance scaling.
pub fn diffusion_constant(abundance_percent: f64) -> f64 {
    (abundance_percent / 100.0).sqrt() * DIFFUSION_FULL_ENRICHMENT_NM2_S
}

/// Time for polarization to diffuse over `d_nm`, seconds.
pub fn diffusion_time(d_nm: f64, diffusion_nm2_s: f64) -> Result<f64> {
    if diffusion_nm2_s == 0.0 {
        return Err(Error::NoDiffusion);
    }
    if !(diffusion_nm2_s > 0.0) {
        return Err(Error::InvalidInput {
            name: "diffusion_constant",
            value: diffusion_nm2_s,
            reason: "must be positive",
        });
    }
    Ok(d_nm * d_nm / diffusion_nm2_s)
}

/// Number of nuclei inside the shell R_min < r < R_max.
pub fn influence_spin_count(geom: &GeometryConfig) -> f64 {
    geom.n_c * 4.0 / 3.0 * std::f64::consts::PI * (geom.r_max.powi(3) - geom.r_min.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c13() -> PhysicalConstants {
        PhysicalConstants::carbon13()
    }

    #[test]
    fn zero_field_energy_is_the_splitting() {
        assert_eq!(qubit_energy(&c13(), 0.0).unwrap(), 2.87e9);
    }

    #[test]
    fn qubit_energy_at_fifty_millitesla() {
        let e = qubit_energy(&c13(), 0.05).unwrap();
        assert!((e - (2.87e9 - 28.0e9 * 0.05)).abs() < 1e-3);
    }

    #[test]
    fn qubit_energy_rejects_past_anticrossing() {
        assert!(matches!(
            qubit_energy(&c13(), 0.2),
            Err(Error::PastAnticrossing { .. })
        ));
        assert!(qubit_energy(&c13(), -0.01).is_err());
    }

    #[test]
    fn resonance_field_and_energy() {
        let c = c13();
        let b = cross_relaxation_field(&c);
        // D / (γ_e + γ_n) = 2.87e9 / 28.0107e9
        assert!((b - 0.102_460_845_3).abs() < 1e-10);
        let eps = qubit_energy(&c, b).unwrap();
        let eps_n = nuclear_energy(&c, b);
        assert!(((eps - eps_n) / eps_n).abs() < 1e-9);
        assert!((eps - 1.096_331_045e6).abs() < 1e-2);

        let bare = c.with_gamma_n(0.0);
        assert_eq!(cross_relaxation_field(&bare), 2.87e9 / 28.0e9);
    }

    #[test]
    fn nuclear_energy_examples() {
        let c = c13();
        assert_eq!(nuclear_energy(&c, 0.0), 0.0);
        assert!((nuclear_energy(&c, 1.0) - 10.7e6).abs() < 1e-6);
        assert!((nuclear_energy(&c, 0.102) - 1.0914e6).abs() < 1.0);
    }

    #[test]
    fn dipolar_coupling_values() {
        let c = c13();
        // μ₀/4π · (2π·28e9)² · ħ / 2π, per nm³.
        let oracle_per_nm3 = 1e-7 * (2.0 * std::f64::consts::PI * 28e9).powi(2) * 1.054_571_817e-34
            / (2.0 * std::f64::consts::PI)
            / 1e-27;
        assert!((oracle_per_nm3 - 51.948_39e6).abs() < 1.0);
        let g = dipolar_coupling(&c, 10e-9, 0.0).unwrap();
        assert!((g + oracle_per_nm3 / 1000.0 / 2.0).abs() < 1e-6);
        assert!((g.abs() - 25.974_19e3).abs() < 0.1);

        let magic = (1.0 / 3.0_f64.sqrt()).acos();
        assert_eq!(dipolar_coupling(&c, 10e-9, magic).unwrap(), 0.0);

        let g2 = dipolar_coupling(&c, 20e-9, 0.3).unwrap();
        let g1 = dipolar_coupling(&c, 10e-9, 0.3).unwrap();
        assert!((g1 / g2 - 8.0).abs() < 1e-12);

        assert!(dipolar_coupling(&c, 0.0, 0.0).is_err());
    }

    #[test]
    fn window_verdicts() {
        assert_eq!(
            coupling_window_check(70e3, 1.1e6, 250e3, DEFAULT_MARGIN),
            WindowVerdict::BelowRelaxation {
                g: 70e3,
                gamma_cr: 250e3
            }
        );
        assert!(coupling_window_check(300e3, 1.1e6, 250e3, 3.0).passed());
        assert!(matches!(
            coupling_window_check(2e6, 1.1e6, 250e3, DEFAULT_MARGIN),
            WindowVerdict::NotWeak { .. }
        ));
        assert_eq!(
            coupling_window_check(0.0, 1.1e6, 250e3, DEFAULT_MARGIN),
            WindowVerdict::NoCoupling
        );
    }

    #[test]
    fn b_rms_natural_abundance() {
        let c = c13();
        let geom = GeometryConfig::default();
        // Oracle: (1/4)·(1e-7·2π·10.7e6·ħ)²·7π/(2·(0.2e-9)³)·1.9e27
        let moment = 1e-7 * 2.0 * std::f64::consts::PI * 10.7e6 * 1.054_571_817e-34;
        let oracle = 0.25 * moment * moment * 7.0 * std::f64::consts::PI / (2.0 * 8e-30) * 1.9e27;
        let b2 = b_rms_squared(&c, &geom).unwrap();
        assert!((b2 / oracle - 1.0).abs() < 1e-12);
        assert!((b2 - 3.281_717_2e-10).abs() < 1e-16);
        let b_rms = b2.sqrt();
        assert!(b_rms > 10e-6 && b_rms < 30e-6);

        let empty = geom.with_abundance(0.0);
        assert_eq!(b_rms_squared(&c, &empty).unwrap(), 0.0);
        let doubled = geom.with_abundance(2.2);
        assert!((b_rms_squared(&c, &doubled).unwrap() / b2 - 2.0).abs() < 1e-12);

        let bad = GeometryConfig {
            r_min: -1.0,
            ..geom
        };
        assert!(b_rms_squared(&c, &bad).is_err());
    }

    #[test]
    fn lorentzian_shape() {
        let g2 = 1.5e3;
        assert_eq!(spectral_density(1.1e6, 1.1e6, g2).unwrap(), 1.0 / g2);
        let half = spectral_density(1.1e6 + g2, 1.1e6, g2).unwrap();
        assert!((half - 0.5 / g2).abs() < 1e-18);
        let far = spectral_density(1e3 * g2, 0.0, g2).unwrap();
        assert!((far * g2 - 1.0 / (1.0 + 1e6)).abs() < 1e-18);
        assert!(spectral_density(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn microscopic_rate() {
        let c = c13();
        let geom = GeometryConfig::default();
        let rate = cross_relaxation_rate_microscopic(&c, &geom, 1.5e3).unwrap();
        let oracle = 3.0 * 28e9 * 28e9 * b_rms_squared(&c, &geom).unwrap() / 1.5e3;
        assert!((rate / oracle - 1.0).abs() < 1e-12);
        let halved = cross_relaxation_rate_microscopic(&c, &geom, 3.0e3).unwrap();
        assert!((rate / halved - 2.0).abs() < 1e-12);
        let none = cross_relaxation_rate_microscopic(&c, &geom.with_abundance(0.0), 1.5e3).unwrap();
        assert_eq!(none, 0.0);

        let report = rate_consistency_report(&c, &geom, 1.5e3).unwrap();
        assert!((report.operational_hz - 250e3).abs() < 1e-6);
        assert!(!report.within_order_of_magnitude);
    }

    #[test]
    fn scaled_rates() {
        assert_eq!(gamma1_scaled(1.1), 250e3);
        assert_eq!(gamma1_scaled(0.0), 0.0);
        assert!((gamma1_scaled(2.2) - 500e3).abs() < 1e-9);
        assert_eq!(gamma2_scaled(1.1), 1.5e3);
        assert!((gamma2_scaled(11.0) - 15e3).abs() < 1e-9);
        for a in [0.3, 1.1, 7.0, 100.0] {
            assert!((gamma2_scaled(a) / gamma1_scaled(a) - 0.006).abs() < 1e-15);
        }
    }

    #[test]
    fn polarization_examples() {
        let c = c13();
        let p = polarization_from_temperature(1.1e6, Temperature::Kelvin(300.0).as_hz(&c));
        assert!(p > 5e-8 && p < 2e-7, "p = {p}");
        assert!((p - 8.798_612_3e-8).abs() < 1e-15);
        assert_eq!(polarization_from_temperature(1.1e6, f64::INFINITY), 0.0);
        assert_eq!(polarization_from_temperature(1.1e6, 0.0), 1.0);
        let n = fermi_occupation(&c, 1.1e6, Temperature::Hz(1e9));
        assert!((n - 0.5).abs() < 1e-3);
        assert!(n < 0.5);
    }

    #[test]
    fn diffusion() {
        assert_eq!(diffusion_constant(100.0), 6.5);
        assert_eq!(diffusion_constant(0.0), 0.0);
        assert!((diffusion_constant(1.1) - 0.011_f64.sqrt() * 6.5).abs() < 1e-15);
        assert!((diffusion_constant(1.1) - 0.6817).abs() < 1e-4);

        let t = diffusion_time(20.0, 6.5).unwrap();
        assert!((t - 61.538_461_5).abs() < 1e-6);
        assert_eq!(diffusion_time(0.0, 6.5).unwrap(), 0.0);
        assert!((diffusion_time(80.0, 6.5).unwrap() / t - 16.0).abs() < 1e-12);
        assert!(matches!(diffusion_time(20.0, 0.0), Err(Error::NoDiffusion)));
    }

    #[test]
    fn spin_count() {
        let geom = GeometryConfig::default();
        let n = influence_spin_count(&geom);
        // 1.9 nm⁻³ · 4π/3 · (1.33³ − 0.2³) nm³
        let oracle = 1.9 * 4.0 / 3.0 * std::f64::consts::PI * (1.33_f64.powi(3) - 0.008);
        assert!((n - oracle).abs() < 1e-9);
        assert!(n > 18.0 && n < 20.0);
        let flat = GeometryConfig {
            r_max: geom.r_min,
            ..geom
        };
        assert_eq!(influence_spin_count(&flat), 0.0);
        assert!((influence_spin_count(&geom.with_abundance(3.3)) / n - 3.0).abs() < 1e-12);
    }
}
