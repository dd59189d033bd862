use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field B_par = {b_par} T is past the level anticrossing (qubit energy {energy_hz} Hz < 0)")]
    PastAnticrossing { b_par: f64, energy_hz: f64 },

    #[error("invalid input `{name}` = {value}: {reason}")]
    InvalidInput {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("no diffusion: diffusion constant is zero, timescale infinite")]
    NoDiffusion,

    #[error("invalid engine parameters: {0}")]
    InvalidParams(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("time grid must be nonnegative and ascending (index {index}: {value})")]
    InvalidTimes { index: usize, value: f64 },

    #[error("steady state is degenerate: numerical kernel of the generator has dimension {dim}")]
    DegenerateSteadyState { dim: usize },

    #[error("positivity drift at t = {time} s: minimum eigenvalue {min_eigenvalue:e}")]
    PositivityDrift { time: f64, min_eigenvalue: f64 },

    #[error("state is not X-shaped: off-X residual {residual:e} exceeds {tolerance:e}")]
    NotXShaped { residual: f64, tolerance: f64 },

    #[error("eigen-solver failed to converge on {matrix}")]
    EigenFailure { matrix: String },

    #[error("grid point (polarization = {polarization}, g = {coupling_hz} Hz): {source}")]
    GridPoint {
        polarization: f64,
        coupling_hz: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid sweep specification: {0}")]
    InvalidSpec(String),

    #[error("registry: {0}")]
    Registry(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidInput {
            name,
            value,
            reason: "must be finite",
        })
    }
}
