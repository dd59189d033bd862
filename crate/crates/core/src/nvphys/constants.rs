//! Natural constants and NV / nuclear gyromagnetic data.
//!
//! Everything is stored in ordinary frequency: energies and rates in Hz,
//! gyromagnetic ratios in Hz per tesla, temperatures convertible to Hz via
//! `kb_over_h`. The 2π-prefixed literature values (D = 2π × 2.87 GHz,
//! γ_e = 2π × 28.0 GHz/T) enter here once with the 2π stripped. Formulas that
//! need a magnetic moment (μ = γħ) use [`angular`] on the way in.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// NV ground-state zero-field splitting, Hz.
pub const ZERO_FIELD_SPLITTING_HZ: f64 = 2.87e9;
/// NV electron-spin gyromagnetic ratio, Hz/T.
pub const GAMMA_E_HZ_PER_T: f64 = 28.0e9;
/// ¹³C nuclear gyromagnetic ratio, Hz/T.
pub const GAMMA_C13_HZ_PER_T: f64 = 10.7e6;
/// μ₀/4π, T·m/A.
pub const MU0_OVER_4PI: f64 = 1.0e-7;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant over Planck constant, Hz/K.
pub const KB_OVER_H: f64 = 2.083_661_912e10;

/// Converts an ordinary frequency (Hz) to angular frequency (rad/s).
#[inline]
pub fn angular(hz: f64) -> f64 {
    2.0 * PI * hz
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Zero-field splitting, Hz.
    pub d: f64,
    /// Electron gyromagnetic ratio, Hz/T.
    pub gamma_e: f64,
    /// Nuclear gyromagnetic ratio of the bath species, Hz/T.
    pub gamma_n: f64,
    pub mu0_over_4pi: f64,
    pub hbar: f64,
    pub kb_over_h: f64,
}

impl PhysicalConstants {
    /// NV center with a ¹³C nuclear bath.
    pub const fn carbon13() -> Self {
        Self {
            d: ZERO_FIELD_SPLITTING_HZ,
            gamma_e: GAMMA_E_HZ_PER_T,
            gamma_n: GAMMA_C13_HZ_PER_T,
            mu0_over_4pi: MU0_OVER_4PI,
            hbar: HBAR,
            kb_over_h: KB_OVER_H,
        }
    }

    /// Same NV constants with a different bath species.
    pub fn with_gamma_n(mut self, gamma_n: f64) -> Self {
        self.gamma_n = gamma_n;
        self
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::carbon13()
    }
}

/// A temperature carried with its unit. Frequency-unit temperatures are
/// k_B T / h in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "unit", content = "value", rename_all = "lowercase")]
pub enum Temperature {
    Kelvin(f64),
    Hz(f64),
}

impl Temperature {
    /// k_B T / h in Hz.
    pub fn as_hz(&self, constants: &PhysicalConstants) -> f64 {
        match *self {
            Temperature::Kelvin(k) => k * constants.kb_over_h,
            Temperature::Hz(hz) => hz,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn electron_ratio_dominates_every_registered_nucleus() {
        let c = PhysicalConstants::carbon13();
        for gamma_n in [10.7e6, 42.6e6, 40.0e6] {
            assert!(c.gamma_e / gamma_n > 500.0);
        }
    }

    #[test]
    fn kelvin_conversion() {
        let c = PhysicalConstants::carbon13();
        let t = Temperature::Kelvin(300.0).as_hz(&c);
        assert!((t - 6.250_985_736e12).abs() < 1e3);
        assert_eq!(Temperature::Hz(1e9).as_hz(&c), 1e9);
    }
}
