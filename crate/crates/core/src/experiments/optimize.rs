use rayon::prelude::*;
use serde::Serialize;

use super::{linspace, transient_peak, Objective, SweepSpec};
use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::lindblad::steady_state;
use crate::nvphys::gamma1_scaled;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on [a, b]; stops once the
/// bracket is narrower than `tol`. Returns (x, f(x)).
pub fn golden_section_max<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimumWarning {
    /// Best coarse point is an endpoint: the bracket holds no interior maximum.
    AtBracketEdge,
    /// Objective is zero on the whole coarse grid.
    FlatObjective,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub concentration_percent: f64,
    pub gamma_hz: f64,
    pub objective: Objective,
    pub g_star_hz: f64,
    pub value: f64,
    pub bounds_hz: [f64; 2],
    pub warning: Option<OptimumWarning>,
}

pub(crate) fn objective_value(spec: &SweepSpec, concentration: f64, objective: Objective, g: f64) -> Result<f64> {
    let params = spec.engine(concentration, g, spec.trace_polarization);
    match objective {
        Objective::Steady => Ok(concurrence(&steady_state(&params)?)?.value),
        Objective::TransientPeak => {
            let times = spec.time_grid.times(params.gamma_l);
            Ok(transient_peak(&params, &times)?.value)
        }
    }
}

/// Coupling that maximizes `objective` at a ¹³C abundance, searched over
/// `bounds` (Hz): a coarse grid of `spec.coarse_points`, then golden-section
/// refinement between the neighbours of the best grid point.
pub fn optimal_g(spec: &SweepSpec, concentration: f64, objective: Objective, bounds: (f64, f64)) -> Result<Optimum> {
    spec.validate()?;
    let (lo, hi) = bounds;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidSpec(format!("search bounds [{lo}, {hi}] need 0 < lo < hi")));
    }
    let grid = linspace(lo, hi, spec.coarse_points);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&g| objective_value(spec, concentration, objective, g))
        .collect::<Result<_>>()?;

    let mut k = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[k] {
            k = i;
        }
    }
    let base = Optimum {
        concentration_percent: concentration,
        gamma_hz: gamma1_scaled(concentration),
        objective,
        g_star_hz: grid[k],
        value: values[k],
        bounds_hz: [lo, hi],
        warning: None,
    };
    if values[k] <= 0.0 {
        return Ok(Optimum {
            warning: Some(OptimumWarning::FlatObjective),
            ..base
        });
    }
    if k == 0 || k + 1 == grid.len() {
        return Ok(Optimum {
            warning: Some(OptimumWarning::AtBracketEdge),
            ..base
        });
    }

    let tol = 1e-9 * grid[k];
    let (g, v) = golden_section_max(
        |g| objective_value(spec, concentration, objective, g),
        grid[k - 1],
        grid[k + 1],
        tol,
    )?;
    Ok(if v >= values[k] {
        Optimum {
            g_star_hz: g,
            value: v,
            ..base
        }
    } else {
        base
    })
}
