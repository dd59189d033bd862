use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Natural ¹³C abundance, percent.
pub const NATURAL_ABUNDANCE_PERCENT: f64 = 1.1;
/// ¹³C number density at natural abundance, nm⁻³.
pub const NATURAL_DENSITY_PER_NM3: f64 = 1.9;

const NM: f64 = 1e-9;

/// ¹³C number density (m⁻³) for an abundance in percent, linear through the
/// 1.1 % ↔ 1.9 nm⁻³ anchor.
pub fn abundance_to_density(abundance_percent: f64) -> f64 {
    abundance_percent / NATURAL_ABUNDANCE_PERCENT * NATURAL_DENSITY_PER_NM3 / NM.powi(3)
}

/// Inverse of [`abundance_to_density`].
pub fn density_to_abundance(density_per_m3: f64) -> f64 {
    density_per_m3 * NM.powi(3) / NATURAL_DENSITY_PER_NM3 * NATURAL_ABUNDANCE_PERCENT
}

/// Placement of the two NV centers and their ¹³C surroundings. Lengths in
/// meters, density in m⁻³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    /// Inter-NV distance.
    pub r: f64,
    /// Angle between the inter-NV axis and the field axis, radians.
    pub theta: f64,
    /// Inner radius of the volume of influence.
    pub r_min: f64,
    /// Outer radius of the volume of influence.
    pub r_max: f64,
    /// ¹³C number density.
    pub n_c: f64,
    /// Separation between the two nuclear baths.
    pub d_sep: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            r: 10.0 * NM,
            theta: 0.0,
            r_min: 0.2 * NM,
            r_max: 1.33 * NM,
            n_c: abundance_to_density(NATURAL_ABUNDANCE_PERCENT),
            d_sep: 20.0 * NM,
        }
    }
}

impl GeometryConfig {
    pub fn with_abundance(mut self, abundance_percent: f64) -> Self {
        self.n_c = abundance_to_density(abundance_percent);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, reason| Err(Error::InvalidInput { name, value, reason });
        if !(self.r > 0.0 && self.r.is_finite()) {
            return bad("r", self.r, "inter-NV distance must be positive");
        }
        if !(self.r_min > 0.0) {
            return bad("r_min", self.r_min, "must be positive");
        }
        if !(self.r_max >= self.r_min && self.r_max.is_finite()) {
            return bad("r_max", self.r_max, "must be at least r_min");
        }
        if !(self.n_c >= 0.0 && self.n_c.is_finite()) {
            return bad("n_c", self.n_c, "density must be nonnegative");
        }
        if !(self.d_sep >= 0.0 && self.d_sep.is_finite()) {
            return bad("d_sep", self.d_sep, "must be nonnegative");
        }
        if !self.theta.is_finite() {
            return bad("theta", self.theta, "must be finite");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_anchor_round_trips() {
        let n = abundance_to_density(1.1);
        assert!((n - 1.9e27).abs() < 1e15);
        assert!((density_to_abundance(n) - 1.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_radii() {
        let g = GeometryConfig {
            r_min: 0.0,
            ..Default::default()
        };
        assert!(g.validate().is_err());
        let g = GeometryConfig {
            r_max: 0.1e-9,
            ..Default::default()
        };
        assert!(g.validate().is_err());
        assert!(GeometryConfig::default().validate().is_ok());
    }
}
