//! Sweeps over the engine parameter space: steady-state contours in
//! (cold-bath polarization, coupling), optimal coupling per concentration,
//! transient concurrence traces, and feasibility reports.
//!
//! Grid points are independent; every parallel evaluation collects in input
//! order so results do not depend on the thread count.

mod feasibility;
mod optimize;
mod output;
mod transient;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::entanglement::{concurrence, heat_currents};
use crate::error::{Error, Result};
use crate::lindblad::{steady_state, EngineParams};
use crate::nvphys::{fermi_occupation, gamma1_scaled, occupation_from_polarization, PhysicalConstants, Temperature};

pub use feasibility::{feasibility_report, Criterion, FeasibilityInput, FeasibilityReport};
pub use optimize::{golden_section_max, optimal_g, Optimum, OptimumWarning};
pub use output::{write_matrix_csv, write_optima_csv, write_traces_csv};
pub use transient::{transient_peak, transient_traces, Peak, Trace};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Steady-state concurrence.
    Steady,
    /// Largest concurrence reached along the transient from the thermal
    /// product state.
    TransientPeak,
}

/// Log-spaced times in units of 1/Γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeGrid {
    pub start_over_gamma: f64,
    pub stop_over_gamma: f64,
    pub points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            start_over_gamma: 1e-3,
            stop_over_gamma: 1e2,
            points: 400,
        }
    }
}

impl TimeGrid {
    /// Times in seconds for a bare rate `gamma` (Hz). The last point is
    /// exactly `stop_over_gamma / gamma`.
    pub fn times(&self, gamma: f64) -> Vec<f64> {
        let (a, b) = (self.start_over_gamma.ln(), self.stop_over_gamma.ln());
        let n = self.points;
        (0..n)
            .map(|k| {
                let x = if k + 1 == n {
                    self.stop_over_gamma
                } else {
                    (a + (b - a) * k as f64 / (n - 1) as f64).exp()
                };
                x / gamma
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let ok = self.start_over_gamma > 0.0
            && self.stop_over_gamma > self.start_over_gamma
            && self.stop_over_gamma.is_finite()
            && self.points >= 2;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "time grid needs 0 < start < stop and at least 2 points, got {self:?}"
            )))
        }
    }
}

/// `n` evenly spaced points from `a` to `b`, endpoints exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

fn default_polarization() -> Vec<f64> {
    let mut grid = linspace(0.0, 1.0, 21);
    grid.extend(linspace(0.97, 1.0, 7));
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// Cold-bath polarizations for the contour, ascending in [0, 1].
    pub polarization: Vec<f64>,
    /// Couplings for the contour, Hz, ascending.
    pub g_hz: Vec<f64>,
    /// ¹³C abundance fixing Γ for the contour.
    pub concentration_percent: f64,
    /// Abundances for optimal-g curves and transient traces.
    pub concentrations_percent: Vec<f64>,
    pub hot_temperature: Temperature,
    pub qubit_energy_hz: f64,
    /// Cold-bath polarization used by the optimizer and the traces.
    pub trace_polarization: f64,
    pub time_grid: TimeGrid,
    pub objective: Objective,
    /// Coupling search interval in units of Γ.
    pub g_bounds_over_gamma: [f64; 2],
    pub coarse_points: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            polarization: default_polarization(),
            g_hz: (1..=60).map(|k| k as f64 * 5e3).collect(),
            concentration_percent: 1.1,
            concentrations_percent: vec![1.1, 3.0, 10.0, 30.0],
            hot_temperature: Temperature::Hz(1e9),
            qubit_energy_hz: 1.1e6,
            trace_polarization: 1.0,
            time_grid: TimeGrid::default(),
            objective: Objective::Steady,
            g_bounds_over_gamma: [0.01, 1.2],
            coarse_points: 48,
        }
    }
}

fn check_ascending(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidSpec(format!("{name} grid is empty")));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidSpec(format!("{name} grid has a non-finite entry")));
    }
    if let Some(k) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpec(format!(
            "{name} grid is not strictly ascending at index {}",
            k + 1
        )));
    }
    Ok(())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        check_ascending("polarization", &self.polarization)?;
        if self.polarization.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidSpec("polarization grid must lie in [0, 1]".into()));
        }
        check_ascending("g", &self.g_hz)?;
        if self.g_hz[0] < 0.0 {
            return Err(Error::InvalidSpec("g grid must be nonnegative".into()));
        }
        if self.concentrations_percent.is_empty() {
            return Err(Error::InvalidSpec("concentration list is empty".into()));
        }
        for &c in self.concentrations_percent.iter().chain([&self.concentration_percent]) {
            if !(c > 0.0 && c <= 100.0) {
                return Err(Error::InvalidSpec(format!("concentration {c}% outside (0, 100]")));
            }
        }
        let t = self.hot_temperature.as_hz(&PhysicalConstants::carbon13());
        if !(t >= 0.0) {
            return Err(Error::InvalidSpec(format!("hot temperature {t} Hz must be nonnegative")));
        }
        if !(self.qubit_energy_hz > 0.0 && self.qubit_energy_hz.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "qubit energy {} Hz must be positive",
                self.qubit_energy_hz
            )));
        }
        if !(0.0..=1.0).contains(&self.trace_polarization) {
            return Err(Error::InvalidSpec(format!(
                "trace polarization {} outside [0, 1]",
                self.trace_polarization
            )));
        }
        self.time_grid.validate()?;
        let [lo, hi] = self.g_bounds_over_gamma;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidSpec(format!("g bounds [{lo}, {hi}] need 0 < lo < hi")));
        }
        if self.coarse_points < 3 {
            return Err(Error::InvalidSpec("coarse grid needs at least 3 points".into()));
        }
        Ok(())
    }

    /// Hot-bath occupation n_F(ε, T_h).
    pub fn hot_occupation(&self) -> f64 {
        fermi_occupation(&PhysicalConstants::carbon13(), self.qubit_energy_hz, self.hot_temperature)
    }

    /// Resonant engine at ¹³C abundance `concentration` with coupling `g`
    /// and cold-bath polarization `p_cold`.
    pub fn engine(&self, concentration: f64, g: f64, p_cold: f64) -> EngineParams {
        EngineParams::resonant(
            self.qubit_energy_hz,
            g,
            gamma1_scaled(concentration),
            self.hot_occupation(),
            occupation_from_polarization(p_cold),
        )
    }

    /// Search interval in Hz at a given abundance.
    pub fn g_bounds(&self, concentration: f64) -> (f64, f64) {
        let gamma = gamma1_scaled(concentration);
        (self.g_bounds_over_gamma[0] * gamma, self.g_bounds_over_gamma[1] * gamma)
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn parameter_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            parameter_hash: self.parameter_hash(),
            code_version: CODE_VERSION.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub parameter_hash: String,
    pub code_version: String,
}

/// Best grid coupling of one contour row. `g_hz` is `None` when the row has
/// no entanglement anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowOptimum {
    pub polarization: f64,
    pub g_hz: Option<f64>,
    pub index: Option<usize>,
    pub value: f64,
}

/// Steady-state concurrence and heat currents on the (polarization, g) grid.
/// Matrices are indexed `[polarization][g]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub polarization: Vec<f64>,
    pub g_hz: Vec<f64>,
    pub concentration_percent: f64,
    pub gamma_hz: f64,
    pub n_hot: f64,
    pub concurrence: Vec<Vec<f64>>,
    pub heat_left: Vec<Vec<f64>>,
    pub heat_right: Vec<Vec<f64>>,
    pub row_optimum: Vec<RowOptimum>,
    pub provenance: Provenance,
}

impl SweepResult {
    /// (row, column, value) of the largest concurrence, first occurrence.
    pub fn global_max(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for (i, row) in self.concurrence.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c > best.2 {
                    best = (i, j, c);
                }
            }
        }
        best
    }

    pub fn write_concurrence_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        write_matrix_csv(w, &self.polarization, &self.g_hz, &self.concurrence)
    }

    pub fn write_heat_csv<W: std::io::Write>(&self, w: W, side: crate::lindblad::Side) -> Result<()> {
        let m = match side {
            crate::lindblad::Side::Left => &self.heat_left,
            crate::lindblad::Side::Right => &self.heat_right,
        };
        write_matrix_csv(w, &self.polarization, &self.g_hz, m)
    }
}

struct Cell {
    c: f64,
    j_l: f64,
    j_r: f64,
}

fn grid_cell(spec: &SweepSpec, p: f64, g: f64) -> Result<Cell> {
    let params = spec.engine(spec.concentration_percent, g, p);
    let wrap = |e: Error| Error::GridPoint {
        polarization: p,
        coupling_hz: g,
        source: Box::new(e),
    };
    let rho = steady_state(&params).map_err(wrap)?;
    let c = concurrence(&rho).map_err(wrap)?.value;
    let j = heat_currents(&params, &rho);
    Ok(Cell {
        c,
        j_l: j.left,
        j_r: j.right,
    })
}

pub fn steady_contour(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let (np, ng) = (spec.polarization.len(), spec.g_hz.len());
    let cells: Vec<Cell> = (0..np * ng)
        .into_par_iter()
        .map(|k| grid_cell(spec, spec.polarization[k / ng], spec.g_hz[k % ng]))
        .collect::<Result<_>>()?;

    let rows = |f: fn(&Cell) -> f64| -> Vec<Vec<f64>> { cells.chunks(ng).map(|r| r.iter().map(f).collect()).collect() };
    let concurrence = rows(|c| c.c);
    let row_optimum = spec
        .polarization
        .iter()
        .zip(&concurrence)
        .map(|(&p, row)| {
            let (j, &value) = row
                .iter()
                .enumerate()
                .fold((0, &row[0]), |best, (j, v)| if *v > *best.1 { (j, v) } else { best });
            let hit = value > 0.0;
            RowOptimum {
                polarization: p,
                g_hz: hit.then(|| spec.g_hz[j]),
                index: hit.then_some(j),
                value,
            }
        })
        .collect();

    Ok(SweepResult {
        polarization: spec.polarization.clone(),
        g_hz: spec.g_hz.clone(),
        concentration_percent: spec.concentration_percent,
        gamma_hz: gamma1_scaled(spec.concentration_percent),
        n_hot: spec.hot_occupation(),
        heat_left: rows(|c| c.j_l),
        heat_right: rows(|c| c.j_r),
        concurrence,
        row_optimum,
        provenance: spec.provenance(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            polarization: vec![0.0, 0.5, 0.99, 1.0],
            g_hz: vec![10e3, 56e3, 150e3, 300e3],
            ..SweepSpec::default()
        }
    }

    #[test]
    fn default_grids() {
        let s = SweepSpec::default();
        assert_eq!(s.polarization.len(), 27);
        assert_eq!(s.polarization[0], 0.0);
        assert_eq!(*s.polarization.last().unwrap(), 1.0);
        assert!(s.polarization.contains(&0.975));
        assert_eq!(s.g_hz.len(), 60);
        assert_eq!(s.g_hz[59], 300e3);
        s.validate().unwrap();
        assert!((s.hot_occupation() - 0.499_725).abs() < 1e-6);
    }

    #[test]
    fn time_grid_spans_requested_range() {
        let t = TimeGrid::default().times(250e3);
        assert_eq!(t.len(), 400);
        assert!((t[0] - 1e-3 / 250e3).abs() < 1e-20);
        assert_eq!(*t.last().unwrap(), 100.0 / 250e3);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let bad = [
            SweepSpec {
                polarization: vec![],
                ..SweepSpec::default()
            },
            SweepSpec {
                g_hz: vec![2e3, 1e3],
                ..SweepSpec::default()
            },
            SweepSpec {
                polarization: vec![0.5, 1.5],
                ..SweepSpec::default()
            },
            SweepSpec {
                concentrations_percent: vec![],
                ..SweepSpec::default()
            },
            SweepSpec {
                g_bounds_over_gamma: [0.5, 0.1],
                ..SweepSpec::default()
            },
        ];
        for s in bad {
            assert!(matches!(s.validate(), Err(Error::InvalidSpec(_))), "{s:?}");
        }
    }

    #[test]
    fn contour_shape_and_unpolarized_row() {
        let r = steady_contour(&small_spec()).unwrap();
        assert_eq!(r.concurrence.len(), 4);
        assert!(r.concurrence.iter().all(|row| row.len() == 4));
        assert!(r.concurrence[0].iter().all(|&c| c == 0.0));
        assert!(r.row_optimum[0].g_hz.is_none());
        assert_eq!(r.row_optimum[3].g_hz, Some(56e3));
        for (jl, jr) in r.heat_left.iter().flatten().zip(r.heat_right.iter().flatten()) {
            assert!((jl + jr).abs() < 1e-9 * jl.abs().max(1.0));
        }
    }

    #[test]
    fn hash_tracks_parameters() {
        let a = SweepSpec::default();
        let mut b = a.clone();
        assert_eq!(a.parameter_hash(), b.parameter_hash());
        b.qubit_energy_hz = 1.0e6;
        assert_ne!(a.parameter_hash(), b.parameter_hash());
        assert_eq!(a.parameter_hash().len(), 64);
    }

    #[test]
    fn grid_errors_carry_coordinates() {
        let spec = SweepSpec {
            polarization: vec![1.0],
            g_hz: vec![1e3],
            ..SweepSpec::default()
        };
        let err = grid_cell(&spec, 2.0, 1e3).err().unwrap();
        assert!(matches!(err, Error::GridPoint { polarization, .. } if polarization == 2.0));
    }
}
