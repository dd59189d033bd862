//! `nv-entangle` command line.
//!
//! Settings are resolved in order: built-in defaults, then `--config`
//! (TOML, or a previous run's `manifest.json`), then flags. The resolved
//! config is written to `manifest.json` in the output directory together
//! with an inventory of every file the run produced.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::entanglement::{concurrence, heat_currents, to_attowatts};
use crate::error::{Error, Result};
use crate::experiments::{
    feasibility_report, steady_contour, transient_traces, write_optima_csv, write_traces_csv, Objective,
};
use crate::lindblad::{evolve, steady_state_with_residual, DensityMatrix, EngineParams, Side};
use crate::nvphys::{
    b_rms_squared, coupling_window_check, cross_relaxation_field, diffusion_constant, diffusion_time,
    dipolar_coupling, gamma1_scaled, gamma2_scaled, influence_spin_count, occupation_from_polarization,
    qubit_energy, PhysicalConstants, Registry, WindowVerdict,
};

pub use config::{Config, OutputFile, PointConfig, RunManifest, ShellConfig};

#[derive(Debug, Parser)]
#[command(name = "nv-entangle", version, about = "NV-center two-qubit entanglement engine simulator")]
pub struct Cli {
    /// TOML config file, or a manifest.json from an earlier run
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR", default_value = "nv-entangle-out")]
    pub out: PathBuf,
    /// Worker threads for grid evaluation (results do not depend on it)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Factor X in the coupling window g <= eps / X
    #[arg(long, global = true, value_name = "X")]
    pub margin: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived physical parameters and coupling-window verdict
    Params,
    /// Steady state, concurrence and heat currents of one engine
    Steady(PointArgs),
    /// Time evolution of one engine
    Evolve(PointArgs),
    /// Steady-state contours over (cold-bath polarization, coupling)
    Sweep,
    /// Optimal coupling and transient traces per concentration
    Optimize(OptimizeArgs),
    /// Coupling-window and timescale checks for a geometry
    Feasibility(FeasibilityArgs),
    /// Dump the nuclear bath registry
    Registry,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Inter-qubit coupling, Hz
    #[arg(long, value_name = "HZ")]
    pub g_hz: Option<f64>,
    /// Cold-bath polarization in [0, 1]
    #[arg(long, value_name = "P")]
    pub polarization: Option<f64>,
    /// Hot-bath polarization in [0, 1], replacing the hot temperature
    #[arg(long, value_name = "P")]
    pub hot_polarization: Option<f64>,
    /// 13C abundance, percent
    #[arg(long, value_name = "PERCENT")]
    pub concentration: Option<f64>,
    /// S^z S^z coupling, Hz
    #[arg(long, value_name = "HZ")]
    pub zz_hz: Option<f64>,
    /// Initial state in the 4x4 text format (evolve)
    #[arg(long, value_name = "PATH")]
    pub initial_state: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Steady,
    TransientPeak,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Steady => Objective::Steady,
            ObjectiveArg::TransientPeak => Objective::TransientPeak,
        }
    }
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Quantity maximized over the coupling
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveArg>,
    /// Comma-separated 13C abundances, percent
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub concentrations: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct FeasibilityArgs {
    /// 13C abundance, percent
    #[arg(long, value_name = "PERCENT")]
    pub concentration: Option<f64>,
    /// NV-NV distance, nm
    #[arg(long, value_name = "NM")]
    pub r_nm: Option<f64>,
    /// Angle of the NV-NV vector to the field axis, degrees
    #[arg(long, value_name = "DEG")]
    pub theta_deg: Option<f64>,
    /// Bath separation, nm
    #[arg(long, value_name = "NM")]
    pub d_sep_nm: Option<f64>,
}

impl Cli {
    fn command_name(&self) -> &'static str {
        match self.command {
            Command::Params => "params",
            Command::Steady(_) => "steady",
            Command::Evolve(_) => "evolve",
            Command::Sweep => "sweep",
            Command::Optimize(_) => "optimize",
            Command::Feasibility(_) => "feasibility",
            Command::Registry => "registry",
        }
    }

    /// Config file (if any) with flag overrides applied.
    pub fn resolve_config(&self) -> Result<Config> {
        let mut c = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        if let Some(m) = self.margin {
            c.feasibility.margin = m;
        }
        match &self.command {
            Command::Steady(a) | Command::Evolve(a) => {
                let p = &mut c.point;
                set(&mut p.g_hz, a.g_hz);
                set(&mut p.cold_polarization, a.polarization);
                set(&mut p.concentration_percent, a.concentration);
                set(&mut p.zz_hz, a.zz_hz);
                if a.hot_polarization.is_some() {
                    p.hot_polarization = a.hot_polarization;
                }
                if a.initial_state.is_some() {
                    p.initial_state = a.initial_state.clone();
                }
            }
            Command::Optimize(a) => {
                if let Some(o) = a.objective {
                    c.sweep.objective = o.into();
                }
                if let Some(list) = &a.concentrations {
                    c.sweep.concentrations_percent = list.clone();
                }
            }
            Command::Feasibility(a) => {
                let f = &mut c.feasibility;
                set(&mut f.concentration_percent, a.concentration);
                set(&mut f.r_m, a.r_nm.map(|x| x * 1e-9));
                set(&mut f.theta_rad, a.theta_deg.map(f64::to_radians));
                set(&mut f.d_sep_m, a.d_sep_nm.map(|x| x * 1e-9));
            }
            Command::Params | Command::Sweep | Command::Registry => {}
        }
        Ok(c)
    }
}

fn set(slot: &mut f64, v: Option<f64>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn now_unix() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Collects output files and summary lines for one run.
struct Run<'a> {
    dir: &'a Path,
    files: Vec<OutputFile>,
    summary: Vec<String>,
}

impl Run<'_> {
    fn file(&mut self, name: &str, bytes: Vec<u8>) -> Result<()> {
        std::fs::write(self.dir.join(name), &bytes)?;
        let sha256 = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        self.files.push(OutputFile {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256,
        });
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.file(name, bytes)
    }

    fn csv(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.file(name, buf)
    }

    fn say(&mut self, line: String) {
        self.summary.push(line);
    }
}

/// Six significant digits, trailing zeros trimmed.
fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    if !(1e-3..1e9).contains(&x.abs()) {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exp}");
    }
    let decimals = (5 - x.abs().log10().floor() as i32).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn window_text(v: &WindowVerdict) -> String {
    match *v {
        WindowVerdict::Pass => "pass".into(),
        WindowVerdict::NoCoupling => "fail: no coupling (g = 0)".into(),
        WindowVerdict::BelowRelaxation { g, gamma_cr } => {
            format!("fail: Gamma_CR <= g violated (g = {} Hz, Gamma_CR = {} Hz)", sig(g), sig(gamma_cr))
        }
        WindowVerdict::NotWeak { g, eps, margin } => {
            format!("fail: g <= eps/{} violated (g = {} Hz, eps = {} Hz)", sig(margin), sig(g), sig(eps))
        }
    }
}

fn point_params(c: &Config) -> Result<EngineParams> {
    let p = &c.point;
    let n_l = match p.hot_polarization {
        Some(hp) => occupation_from_polarization(hp),
        None => c.sweep.hot_occupation(),
    };
    let params = EngineParams {
        zz: p.zz_hz,
        ..EngineParams::resonant(
            c.sweep.qubit_energy_hz,
            p.g_hz,
            gamma1_scaled(p.concentration_percent),
            n_l,
            occupation_from_polarization(p.cold_polarization),
        )
    };
    params.validate()?;
    Ok(params)
}

fn cmd_params(c: &Config, run: &mut Run) -> Result<()> {
    let k = PhysicalConstants::carbon13();
    let geom = c.geometry();
    geom.validate()?;
    let f = &c.feasibility;
    let b_cr = cross_relaxation_field(&k);
    let eps = qubit_energy(&k, b_cr)?;
    let g = dipolar_coupling(&k, geom.r, geom.theta)?;
    let gamma1 = gamma1_scaled(f.concentration_percent);
    let gamma2 = gamma2_scaled(f.concentration_percent);
    let b_rms = b_rms_squared(&k, &geom)?.sqrt();
    let spins = influence_spin_count(&geom);
    let d = diffusion_constant(f.concentration_percent);
    let t_diff = diffusion_time(geom.d_sep * 1e9, d).ok();
    let window = coupling_window_check(g, eps, gamma1, f.margin);

    run.say(format!("B_CR = {} mT", sig(b_cr * 1e3)));
    run.say(format!("eps = {} MHz", sig(eps / 1e6)));
    run.say(format!(
        "g(r = {} nm, theta = {} deg) = {} kHz",
        sig(geom.r * 1e9),
        sig(geom.theta.to_degrees()),
        sig(g / 1e3)
    ));
    run.say(format!("Gamma1 = {} kHz", sig(gamma1 / 1e3)));
    run.say(format!("Gamma2 = {} kHz", sig(gamma2 / 1e3)));
    run.say(format!("B_rms = {} uT", sig(b_rms * 1e6)));
    run.say(format!("spin count = {}", sig(spins)));
    run.say(match t_diff {
        Some(t) => format!("diffusion time over {} nm = {} s", sig(geom.d_sep * 1e9), sig(t)),
        None => "diffusion time = infinite (no diffusion)".into(),
    });
    run.say(format!("window (margin {}): {}", sig(f.margin), window_text(&window)));

    run.json(
        "params.json",
        &json!({
            "b_cr_t": b_cr,
            "eps_hz": eps,
            "g_hz": g,
            "gamma1_hz": gamma1,
            "gamma2_hz": gamma2,
            "b_rms_t": b_rms,
            "spin_count": spins,
            "diffusion_constant_nm2_s": d,
            "diffusion_time_s": t_diff,
            "window": window,
        }),
    )
}

fn cmd_steady(c: &Config, run: &mut Run) -> Result<()> {
    let p = point_params(c)?;
    let (rho, residual) = steady_state_with_residual(&p)?;
    let conc = concurrence(&rho)?;
    let j = heat_currents(&p, &rho);
    run.file("steady_state.txt", rho.to_text().into_bytes())?;
    run.json(
        "steady.json",
        &json!({
            "params": p,
            "concurrence": conc,
            "heat_current_hz2": j,
            "heat_current_aw": { "left": to_attowatts(j.left), "right": to_attowatts(j.right) },
            "residual": residual,
        }),
    )?;
    run.say(format!(
        "C = {}  J_L = {} aW  J_R = {} aW  residual = {residual:.1e}",
        if conc.value == 0.0 { "0".to_string() } else { sig(conc.value) },
        sig(to_attowatts(j.left)),
        sig(to_attowatts(j.right)),
    ));
    Ok(())
}

fn cmd_evolve(c: &Config, run: &mut Run) -> Result<()> {
    let p = point_params(c)?;
    let rho0 = match &c.point.initial_state {
        Some(path) => DensityMatrix::parse_text(&std::fs::read_to_string(path)?)?,
        None => DensityMatrix::thermal_product(p.n_l, p.n_r),
    };
    let mut times = vec![0.0];
    times.extend(c.sweep.time_grid.times(p.gamma_l.max(p.gamma_r)));
    let states = evolve(&p, &rho0, &times)?;

    let mut rows = Vec::with_capacity(states.len());
    for (t, rho) in times.iter().zip(&states) {
        let j = heat_currents(&p, rho);
        rows.push((*t, concurrence(rho)?.value, j.left, j.right));
    }
    run.csv("trajectory.csv", |b| crate::lindblad::write_trajectory_csv(b, &times, &states))?;
    run.csv("observables.csv", |b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["t_seconds", "concurrence", "j_left_hz2", "j_right_hz2"])?;
        for (t, conc, jl, jr) in &rows {
            w.write_record([t.to_string(), conc.to_string(), jl.to_string(), jr.to_string()])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let (t_peak, c_peak) = rows
        .iter()
        .fold((0.0, 0.0), |best, r| if r.1 > best.1 { (r.0, r.1) } else { best });
    let last = rows.last().expect("nonempty time grid");
    run.say(format!(
        "peak C = {} at t = {:.4e} s  final C = {} at t = {:.4e} s",
        sig(c_peak),
        t_peak,
        sig(last.1),
        last.0
    ));
    Ok(())
}

fn cmd_sweep(c: &Config, run: &mut Run) -> Result<()> {
    let r = steady_contour(&c.sweep)?;
    run.csv("contour_concurrence.csv", |b| r.write_concurrence_csv(b))?;
    run.csv("contour_heat_left.csv", |b| r.write_heat_csv(b, Side::Left))?;
    run.csv("contour_heat_right.csv", |b| r.write_heat_csv(b, Side::Right))?;
    run.csv("row_optima.csv", |b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["polarization", "g_hz", "concurrence"])?;
        for o in &r.row_optimum {
            let g = o.g_hz.map(|g| g.to_string()).unwrap_or_default();
            w.write_record([o.polarization.to_string(), g, o.value.to_string()])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let (i, j, cmax) = r.global_max();
    let interior = j > 0 && j + 1 < r.g_hz.len();
    run.json(
        "sweep.json",
        &json!({
            "provenance": r.provenance,
            "concentration_percent": r.concentration_percent,
            "gamma_hz": r.gamma_hz,
            "n_hot": r.n_hot,
            "shape": [r.polarization.len(), r.g_hz.len()],
            "global_max": { "polarization": r.polarization[i], "g_hz": r.g_hz[j], "concurrence": cmax, "interior": interior },
            "row_optimum": r.row_optimum,
        }),
    )?;
    run.say(format!(
        "grid {}x{}  max C = {} at p = {}, g = {} Hz ({})",
        r.polarization.len(),
        r.g_hz.len(),
        sig(cmax),
        r.polarization[i],
        r.g_hz[j],
        if interior { "interior" } else { "grid edge" }
    ));
    Ok(())
}

fn cmd_optimize(c: &Config, run: &mut Run) -> Result<()> {
    let spec = &c.sweep;
    let traces = transient_traces(spec, &spec.concentrations_percent)?;
    let optima: Vec<_> = traces.iter().map(|t| t.optimum).collect();
    run.csv("optima.csv", |b| write_optima_csv(b, &optima))?;
    run.csv("traces.csv", |b| write_traces_csv(b, &traces))?;
    let summary: Vec<_> = traces
        .iter()
        .map(|t| {
            json!({
                "optimum": t.optimum,
                "peak": t.peak,
                "long_time_value": t.long_time_value,
            })
        })
        .collect();
    run.json("optimize.json", &json!({ "provenance": spec.provenance(), "curves": summary }))?;
    for t in &traces {
        let o = &t.optimum;
        let warn = match o.warning {
            Some(w) => format!("  warning: {}", serde_json::to_value(w)?.as_str().unwrap_or_default()),
            None => String::new(),
        };
        run.say(format!(
            "c = {}%  g* = {} Hz  objective = {}  peak C = {} at t = {:.4e} s  long-time C = {}{warn}",
            o.concentration_percent,
            sig(o.g_star_hz),
            sig(o.value),
            sig(t.peak.value),
            t.peak.time,
            sig(t.long_time_value),
        ));
    }
    Ok(())
}

fn cmd_feasibility(c: &Config, run: &mut Run) -> Result<()> {
    let r = feasibility_report(&c.feasibility)?;
    run.json("feasibility.json", &r)?;
    let verdict = |ok: bool| if ok { "pass" } else { "fail" };
    run.say(format!("window: {}", window_text(&r.window)));
    run.say(format!(
        "diffusion: {} (t_diff / t_engine = {:.3e}, need >= {})",
        verdict(r.diffusion.passed),
        r.diffusion.ratio,
        r.diffusion.required
    ));
    run.say(format!(
        "spin-lattice: {} (Gamma / Gamma_SL = {:.3e}, need >= {})",
        verdict(r.spin_lattice.passed),
        r.spin_lattice.ratio,
        r.spin_lattice.required
    ));
    Ok(())
}

fn cmd_registry(run: &mut Run) -> Result<()> {
    let mut buf = Vec::new();
    Registry::builtin().write(&mut buf)?;
    run.say(String::from_utf8_lossy(&buf).trim_end().to_string());
    run.file("registry.csv", buf)
}

/// Runs one parsed command line, writing outputs and the manifest into
/// `--out` and summary lines to `stdout`.
pub fn run<W: Write>(cli: &Cli, stdout: &mut W) -> Result<RunManifest> {
    let config = cli.resolve_config()?;
    let started = now_unix();
    std::fs::create_dir_all(&cli.out)?;
    let mut run = Run {
        dir: &cli.out,
        files: vec![],
        summary: vec![],
    };

    let work = |run: &mut Run| -> Result<()> {
        match &cli.command {
            Command::Params => cmd_params(&config, run),
            Command::Steady(_) => cmd_steady(&config, run),
            Command::Evolve(_) => cmd_evolve(&config, run),
            Command::Sweep => cmd_sweep(&config, run),
            Command::Optimize(_) => cmd_optimize(&config, run),
            Command::Feasibility(_) => cmd_feasibility(&config, run),
            Command::Registry => cmd_registry(run),
        }
    };
    match cli.threads {
        Some(0) => return Err(Error::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| work(&mut run))?,
        None => work(&mut run)?,
    }

    let mut manifest = RunManifest::new(cli.command_name(), cli.threads, config, started);
    manifest.outputs = std::mem::take(&mut run.files);
    manifest.finished_unix_s = now_unix();
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    std::fs::write(cli.out.join("manifest.json"), bytes)?;

    for line in &run.summary {
        writeln!(stdout, "{line}")?;
    }
    Ok(manifest)
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli, &mut std::io::stdout().lock()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let payload = json!({ "command": cli.command_name(), "error": e.to_string(), "debug": format!("{e:?}") });
            let path = cli.out.join("error.json");
            let written = std::fs::create_dir_all(&cli.out).is_ok()
                && serde_json::to_vec_pretty(&payload)
                    .map(|b| std::fs::write(&path, b).is_ok())
                    .unwrap_or(false);
            if written {
                eprintln!("diagnostics: {}", path.display());
            }
            ExitCode::FAILURE
        }
    }
}
