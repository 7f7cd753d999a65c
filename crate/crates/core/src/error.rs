use thiserror::Error;

/// Coarse failure category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Geometry,
    Solver,
    Input,
    Io,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Config => "config",
            ErrorKind::Geometry => "geometry",
            ErrorKind::Solver => "solver",
            ErrorKind::Input => "input",
            ErrorKind::Io => "io",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("unmeshable geometry: {0}")]
    UnmeshableGeometry(String),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("triangle {triangle} carries region tag {tag} with no matching region")]
    TagMismatch { triangle: usize, tag: usize },
    #[error("linear solve failed: {reason}")]
    SolveFailure { reason: String },
    #[error("coupled system is numerically singular (condition estimate {condition:e})")]
    SingularCoupledSystem { condition: f64 },
    #[error("window selects no triangle")]
    EmptyWindow,
    #[error("boundary data is nonzero at vertex {vertex}, outside the measurement arc")]
    DataOutsideGamma { vertex: usize },
    #[error("all data vanish; ratio undefined")]
    ZeroData,
    #[error("vector field is not curl-free")]
    NonCurlFree,
    #[error("coincident points")]
    CoincidentPoints,
    #[error("source point is {distance:.3e} from the nearest interface or boundary (needs {required:.3e})")]
    SourceTooCloseToInterface { distance: f64, required: f64 },
    #[error("window crosses a conductivity interface or obstacle")]
    WindowCrossesInterface,
    #[error("only {resolvable} probe indices are resolvable on this mesh (need at least 4)")]
    InsufficientRange { resolvable: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Config,
            Error::InvalidScenario(_)
            | Error::UnmeshableGeometry(_)
            | Error::DegenerateGeometry(_)
            | Error::TagMismatch { .. }
            | Error::WindowCrossesInterface
            | Error::SourceTooCloseToInterface { .. } => ErrorKind::Geometry,
            Error::SolveFailure { .. } | Error::SingularCoupledSystem { .. } => ErrorKind::Solver,
            Error::Io(_) | Error::Json(_) => ErrorKind::Io,
            _ => ErrorKind::Input,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
