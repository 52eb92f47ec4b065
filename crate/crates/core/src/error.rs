use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("torus grids need 3*2^N samples (N <= {max_depth}), got {got}")]
    InvalidSampleCount { got: usize, max_depth: u32 },
    #[error("line domain [{left}, {right}] is empty or not finite")]
    InvalidDomain { left: f64, right: f64 },
    #[error("grid has no samples")]
    Empty,
    #[error("expected a {expected} domain")]
    WrongDomain { expected: &'static str },
    #[error("arc of generation {generation} does not resolve on a grid of depth {depth}")]
    Misaligned { generation: u32, depth: u32 },
    #[error("operands disagree: {0}")]
    Mismatch(String),
    #[error("Luxemburg bisection stalled in bracket [{lo}, {hi}]")]
    NonConvergence { lo: f64, hi: f64 },
    #[error("unknown Orlicz function {0:?}")]
    UnknownSpec(String),
    #[error("Orlicz function {0:?} has no density")]
    MissingDensity(String),
    #[error("function has mean {0:e}, expected zero")]
    MeanNotZero(f64),
    #[error("frequency cutoff {n_max} is above the Nyquist limit {limit}")]
    FrequencyTooHigh { n_max: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("constants manifest: {0}")]
    Constants(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
