use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("frequency {requested} outside the resolved band |xi| <= {nyquist}")]
    OutsideBand { requested: f64, nyquist: f64 },

    #[error("input not band-limited: spectral content at |xi| = {frequency} exceeds the alias-free cap {cap}")]
    NotBandLimited { frequency: f64, cap: f64 },

    #[error("bilinear support too large: {bins} occupied bins exceeds cap {cap}")]
    BandwidthCap { bins: usize, cap: usize },

    #[error("unresolved spectral tail: relative mass {tail:.3e} beyond |xi| = {edge}; band |xi| <= {required:.1} required")]
    UnresolvedTail { tail: f64, edge: f64, required: f64 },

    #[error("temporal band under-resolved: relative energy {edge_energy:.3e} near the temporal Nyquist; use K >= {required_k}")]
    TemporalResolution { edge_energy: f64, required_k: usize },

    #[error("time-step constraint violated: CFL proxy {proxy:.3} > 0.5")]
    Cfl { proxy: f64 },

    #[error("mass drift {drift:.3e} exceeds tolerance {tolerance:.3e} at t = {time}")]
    MassDrift { drift: f64, tolerance: f64, time: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("plan outside the ill-posedness regime: {0}")]
    Regime(String),

    #[error("grid sizing infeasible at N = {n}: {reason}; feasible N <= {cap}")]
    Infeasible { n: f64, reason: String, cap: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("config: {0}")]
    Config(String),

    #[error("format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
