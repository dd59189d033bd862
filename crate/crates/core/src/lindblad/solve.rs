use std::io::Write;

use nalgebra::SVector;

use super::{build_liouvillian, DensityMatrix, EngineParams, Mat4, StateTolerance, C64};
use crate::error::{Error, Result};

/// Relative singular-value threshold below which a direction of L counts as
/// part of its kernel.
const KERNEL_TOL: f64 = 1e-9;
/// Trace and positivity bounds enforced along trajectories.
const TRAJECTORY_TOL: f64 = 1e-10;

/// RK4 substep as a fraction of 1/max|L_ij|.
pub const RK4_STEP_FRACTION: f64 = 2e-3;

fn check_times(times: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for (index, &t) in times.iter().enumerate() {
        if !(t >= prev && t.is_finite()) {
            return Err(Error::InvalidTimes { index, value: t });
        }
        prev = t;
    }
    Ok(())
}

fn check_along_trajectory(rho: &DensityMatrix, time: f64) -> Result<()> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TRAJECTORY_TOL || tr.im.abs() > TRAJECTORY_TOL {
        return Err(Error::InvalidState(format!("trace drifted to {tr} at t = {time} s")));
    }
    let min_eigenvalue = rho.min_eigenvalue();
    if min_eigenvalue < -TRAJECTORY_TOL {
        return Err(Error::PositivityDrift { time, min_eigenvalue });
    }
    Ok(())
}

/// ρ(t) = exp(L t) ρ₀ at each requested time (seconds, ascending).
///
/// Every returned state is checked for trace and positivity; a violation is
/// an error rather than something to clip.
pub fn evolve(p: &EngineParams, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    p.validate()?;
    rho0.check(StateTolerance::default())?;
    check_times(times)?;
    let l = build_liouvillian(p);
    let v0 = rho0.vectorize();
    times
        .iter()
        .map(|&t| {
            let rho = DensityMatrix::devectorize(&(l.propagator(t) * v0));
            check_along_trajectory(&rho, t)?;
            Ok(rho)
        })
        .collect()
}

/// Fixed-step fourth-order Runge–Kutta propagation. Independent of the
/// matrix exponential and intended as a cross-check only.
pub fn evolve_rk4(
    p: &EngineParams,
    rho0: &DensityMatrix,
    times: &[f64],
    step_fraction: f64,
) -> Result<Vec<DensityMatrix>> {
    p.validate()?;
    rho0.check(StateTolerance::default())?;
    check_times(times)?;
    let l = build_liouvillian(p);
    let m = *l.matrix();
    let h_max = step_fraction / l.max_entry().max(f64::MIN_POSITIVE);
    let mut v = rho0.vectorize();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let span = t - now;
        let steps = (span / h_max).ceil().max(0.0) as usize;
        if steps > 0 {
            let h = C64::from(span / steps as f64);
            let half = C64::from(0.5);
            let sixth = C64::from(1.0 / 6.0);
            for _ in 0..steps {
                let k1 = m * v;
                let k2 = m * (v + k1 * h * half);
                let k3 = m * (v + k2 * h * half);
                let k4 = m * (v + k3 * h);
                v += (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * h * sixth;
            }
        }
        now = t;
        out.push(DensityMatrix::devectorize(&v));
    }
    Ok(out)
}

/// Unique fixed point of the generator, with its scale-free residual
/// ‖L vec(ρ)‖ / max|L_ij|.
pub fn steady_state_with_residual(p: &EngineParams) -> Result<(DensityMatrix, f64)> {
    p.validate()?;
    if !(p.gamma_l > 0.0 && p.gamma_r > 0.0) {
        return Err(Error::InvalidParams(format!(
            "steady state needs positive bare rates (gamma_l = {}, gamma_r = {})",
            p.gamma_l, p.gamma_r
        )));
    }
    let l = build_liouvillian(p);
    let scale = l.max_entry();
    let scaled = l.matrix() / C64::from(scale);
    let svd = scaled.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..16).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let dim = order.iter().filter(|&&k| svd.singular_values[k] <= KERNEL_TOL).count();
    if dim > 1 {
        return Err(Error::DegenerateSteadyState { dim });
    }

    // Column k of V is the conjugate of row k of V†.
    let k = order[0];
    let v = SVector::<C64, 16>::from_fn(|i, _| v_t[(k, i)].conj());
    let raw = Mat4::from_column_slice(v.as_slice());
    let rho = DensityMatrix::from_matrix_unchecked(raw).hermitian_normalized();
    let residual = (scaled * rho.vectorize()).norm();
    Ok((rho, residual))
}

pub fn steady_state(p: &EngineParams) -> Result<DensityMatrix> {
    steady_state_with_residual(p).map(|(rho, _)| rho)
}

/// Trajectory CSV: `t_seconds` then, for each (i, j) in row-major order,
/// `re_ij`, `im_ij`.
pub fn write_trajectory_csv<W: Write>(writer: W, times: &[f64], states: &[DensityMatrix]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t_seconds".to_string()];
    for i in 0..4 {
        for j in 0..4 {
            header.push(format!("re_{i}{j}"));
            header.push(format!("im_{i}{j}"));
        }
    }
    w.write_record(&header)?;
    for (t, rho) in times.iter().zip(states) {
        let mut rec = vec![format!("{t:e}")];
        for i in 0..4 {
            for j in 0..4 {
                let z = rho.get(i, j);
                rec.push(format!("{:e}", z.re));
                rec.push(format!("{:e}", z.im));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
