use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("axis {axis} out of range for a {dims}-dimensional grid")]
    AxisOutOfRange { axis: usize, dims: usize },

    #[error("derivative order {0} exceeds the supported maximum of 4")]
    DerivativeOrder(u32),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("Sobolev order {s} outside [0, {max}]")]
    SobolevOrder { s: f64, max: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("hyperbolicity breakdown: min(1 - alpha*eps*u_t) = {min_factor:.6} <= {floor}")]
    HyperbolicityBreakdown { min_factor: f64, floor: f64 },

    #[error("time step {dt} exceeds the admissible limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error(
        "explicit scheme is stiff here (nu*eps*dt/dx^2 = {ratio:.3e} > {threshold}); use IMEX"
    )]
    Stiff { ratio: f64, threshold: f64 },

    #[error("step rejected: non-finite state after advancing to t = {t}")]
    StepRejected { t: f64 },

    #[error("jet order {requested} exceeds the maximum {max}")]
    JetOrderTooLarge { requested: usize, max: usize },

    #[error("jet of order {have} cannot supply time derivative of order {need}")]
    InsufficientJetOrder { need: usize, have: usize },

    #[error("generalized-derivative word of length {0} exceeds the cap of 2")]
    WordTooLong(usize),

    #[error("grid must be origin-centered for coordinate-weighted operators")]
    NotCentered,

    #[error("support radius {radius:.4} exceeds admissible {limit:.4}")]
    SupportMonitor { radius: f64, limit: f64 },

    #[error("ill-posed ratio: denominator vanishes while numerator is {numerator:e}")]
    IllPosedRatio { numerator: f64 },

    #[error("Gronwall envelope pole reached at t = {t}")]
    EnvelopePole { t: f64 },

    #[error("threshold not met: {0}")]
    ThresholdNotMet(String),

    #[error("run guard violated at t = 0: {0}")]
    GuardViolation(String),

    #[error("uniqueness violation: d(0) = 0 but d(t) = {d:e} at t = {t}")]
    UniquenessViolation { t: f64, d: f64 },

    #[error("inequality violated: {0}")]
    InequalityViolated(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("malformed report file: {0}")]
    Report(String),

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors that signal violated run guards or unmet thresholds
    /// rather than numerical or I/O failure.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::GuardViolation(_)
                | Error::ThresholdNotMet(_)
                | Error::SupportMonitor { .. }
                | Error::Precondition(_)
        )
    }
}
