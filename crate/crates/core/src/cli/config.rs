use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{FeasibilityInput, SweepSpec};
use crate::nvphys::{registry::REGISTRY_VERSION, GeometryConfig};

/// Single-point engine used by `steady` and `evolve`. Energies, temperature
/// and time grid come from the `[sweep]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointConfig {
    pub concentration_percent: f64,
    pub g_hz: f64,
    pub cold_polarization: f64,
    /// Overrides the hot-bath occupation derived from the hot temperature.
    pub hot_polarization: Option<f64>,
    pub zz_hz: f64,
    /// Initial state in the 4×4 text format; defaults to the bath-thermal
    /// product state.
    pub initial_state: Option<PathBuf>,
}

impl Default for PointConfig {
    fn default() -> Self {
        Self {
            concentration_percent: 1.1,
            g_hz: 56e3,
            cold_polarization: 1.0,
            hot_polarization: None,
            zz_hz: 0.0,
            initial_state: None,
        }
    }
}

/// Shell of nuclei that dominates the relaxation, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShellConfig {
    pub r_min_m: f64,
    pub r_max_m: f64,
}

impl Default for ShellConfig {
    fn default() -> Self {
        let g = GeometryConfig::default();
        Self {
            r_min_m: g.r_min,
            r_max_m: g.r_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub sweep: SweepSpec,
    pub point: PointConfig,
    pub feasibility: FeasibilityInput,
    pub shell: ShellConfig,
}

impl Config {
    pub fn geometry(&self) -> GeometryConfig {
        let f = &self.feasibility;
        GeometryConfig {
            r: f.r_m,
            theta: f.theta_rad,
            r_min: self.shell.r_min_m,
            r_max: self.shell.r_max_m,
            d_sep: f.d_sep_m,
            ..GeometryConfig::default().with_abundance(f.concentration_percent)
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a TOML config, or the embedded config of a run manifest when
    /// the file is JSON.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        let parsed = if is_json {
            serde_json::from_str::<RunManifest>(&text)
                .map(|m| m.config)
                .map_err(|e| format!("manifest: {e}"))
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub registry_version: String,
    pub command: String,
    pub threads: Option<usize>,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub config: Config,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new(command: &str, threads: Option<usize>, config: Config, started_unix_s: f64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            registry_version: REGISTRY_VERSION.to_string(),
            command: command.to_string(),
            threads,
            started_unix_s,
            finished_unix_s: started_unix_s,
            config,
            outputs: vec![],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Config::from_toml_str("").unwrap(), Config::default());
    }

    #[test]
    fn toml_round_trip() {
        let mut c = Config::default();
        c.sweep.g_hz = vec![1e3, 2e3];
        c.point.hot_polarization = Some(0.2);
        let back = Config::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_sections_and_temperature_units() {
        let c = Config::from_toml_str(
            "[sweep]\nqubit_energy_hz = 2.0e6\nhot_temperature = { unit = \"kelvin\", value = 300.0 }\nobjective = \"transient_peak\"\n",
        )
        .unwrap();
        assert_eq!(c.sweep.qubit_energy_hz, 2.0e6);
        assert_eq!(c.sweep.g_hz, SweepSpec::default().g_hz);
        assert_eq!(c.sweep.objective, crate::experiments::Objective::TransientPeak);
    }

    #[test]
    fn errors_name_line_and_field() {
        let err = Config::from_toml_str("[sweep]\nqubit_energy_hz = \"fast\"\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("qubit_energy_hz"), "{err}");
        let err = Config::from_toml_str("[point]\ngee_hz = 1.0\n").unwrap_err().to_string();
        assert!(err.contains("gee_hz"), "{err}");
    }
}
