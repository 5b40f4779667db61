use thiserror::Error;

/// Errors raised by the library. Variants mirror the failure modes of the
/// individual operations; `context` strings name the operation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-positive parameter `{0}`")]
    NonPositiveParameter(&'static str),
    #[error("malformed tabulated data: {0}")]
    MalformedTabulatedData(String),
    #[error("tabulated cross section has {available} modes, {requested} requested")]
    TabulatedExhausted { requested: usize, available: usize },
    #[error("coordinates outside the chart: {0}")]
    OutOfChart(String),
    #[error("bessel evaluation outside the supported envelope (nu = {nu}, z = {z})")]
    OutOfEnvelope { nu: f64, z: f64 },
    #[error("no convergence in {0}")]
    NonConvergence(String),
    #[error("asymptotic regime violated: {0}")]
    RegimeViolation(String),
    #[error("bad quadrature spec: {0}")]
    BadSpec(String),
    #[error("radial integrator failed: {0}")]
    StiffnessFailure(String),
    #[error("asymptotic regime unreachable: {0}")]
    RegimeUnreachable(String),
    #[error("ill-conditioned in/out fit: {0}")]
    IllConditionedFit(String),
    #[error("pair is geometrically related or inside the guard band (d = {distance})")]
    GeometricPairRejected { distance: f64 },
    #[error("mode sum did not settle under extrapolation: {0}")]
    SumNotSettled(String),
    #[error("averaging window does not fit the grid: {0}")]
    WindowTooWide(String),
    #[error("ill-conditioned fit (cond = {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("radiation limit not converging: {0}")]
    NotConverging(String),
    #[error("frequency outside the resolvable band: {0}")]
    BandViolation(String),
    #[error("invalid config key `{key}`: {message}")]
    ConfigInvalid { key: String, message: String },
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
