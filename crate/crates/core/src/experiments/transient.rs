use rayon::prelude::*;
use serde::Serialize;

use super::{golden_section_max, optimal_g, Optimum, SweepSpec};
use crate::entanglement::{concurrence, heat_currents};
use crate::error::Result;
use crate::lindblad::{build_liouvillian, evolve, DensityMatrix, EngineParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub time: f64,
    pub value: f64,
}

/// Largest concurrence along the trajectory from the bath-thermal product
/// state. The best grid time is refined by golden-section search between its
/// neighbours.
pub fn transient_peak(p: &EngineParams, times: &[f64]) -> Result<Peak> {
    let rho0 = DensityMatrix::thermal_product(p.n_l, p.n_r);
    let states = evolve(p, &rho0, times)?;
    let values: Vec<f64> = states
        .iter()
        .map(|rho| concurrence(rho).map(|c| c.value))
        .collect::<Result<_>>()?;
    let mut k = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[k] {
            k = i;
        }
    }
    if values[k] <= 0.0 || times.len() < 2 {
        return Ok(Peak {
            time: times[k],
            value: values[k],
        });
    }

    let l = build_liouvillian(p);
    let v0 = rho0.vectorize();
    let at = |t: f64| -> Result<f64> {
        let rho = DensityMatrix::devectorize(&(l.propagator(t) * v0));
        Ok(concurrence(&rho)?.value)
    };
    let a = times[k.saturating_sub(1)];
    let b = times[(k + 1).min(times.len() - 1)];
    let (t, v) = golden_section_max(at, a, b, 1e-9 * times[k])?;
    Ok(if v >= values[k] {
        Peak { time: t, value: v }
    } else {
        Peak {
            time: times[k],
            value: values[k],
        }
    })
}

/// Concurrence and heat currents versus time for one concentration, at its
/// optimal coupling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub optimum: Optimum,
    pub params: EngineParams,
    pub times: Vec<f64>,
    pub concurrence: Vec<f64>,
    pub j_left: Vec<f64>,
    pub j_right: Vec<f64>,
    pub peak: Peak,
    /// Concurrence at the last time point (100/Γ by default).
    pub long_time_value: f64,
}

fn trace_for(spec: &SweepSpec, concentration: f64) -> Result<Trace> {
    let optimum = optimal_g(spec, concentration, spec.objective, spec.g_bounds(concentration))?;
    let params = spec.engine(concentration, optimum.g_star_hz, spec.trace_polarization);
    let times = spec.time_grid.times(params.gamma_l);
    let rho0 = DensityMatrix::thermal_product(params.n_l, params.n_r);
    let states = evolve(&params, &rho0, &times)?;

    let mut c = Vec::with_capacity(times.len());
    let mut j_left = Vec::with_capacity(times.len());
    let mut j_right = Vec::with_capacity(times.len());
    for rho in &states {
        c.push(concurrence(rho)?.value);
        let j = heat_currents(&params, rho);
        j_left.push(j.left);
        j_right.push(j.right);
    }
    let peak = transient_peak(&params, &times)?;
    Ok(Trace {
        optimum,
        params,
        long_time_value: *c.last().expect("time grid has at least two points"),
        times,
        concurrence: c,
        j_left,
        j_right,
        peak,
    })
}

/// One trace per concentration, each at the coupling chosen by
/// `spec.objective`.
pub fn transient_traces(spec: &SweepSpec, concentrations: &[f64]) -> Result<Vec<Trace>> {
    spec.validate()?;
    concentrations.par_iter().map(|&c| trace_for(spec, c)).collect()
}
