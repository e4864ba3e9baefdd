use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("topology construction failed: {0}")]
    Topology(String),

    #[error("scenario generation failed: {0}")]
    Generation(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("decision shape {found} does not match scenario shape {expected}")]
    DecisionShape { expected: String, found: String },

    #[error("terminal {terminal}: position {position} is served by a satellite after an earlier position fell back to the data center")]
    PrefixOrder { terminal: usize, position: usize },

    #[error("terminal {terminal}: position {position} is served by {count} satellites")]
    MultipleHosts { terminal: usize, position: usize, count: usize },

    #[error("degenerate normalizer for terminal {terminal} ({what} is zero)")]
    ZeroNormalizer { terminal: usize, what: &'static str },

    #[error("search space of {size:.3e} candidates exceeds the enumeration limit {limit:.0e}")]
    TooLarge { size: f64, limit: f64 },

    #[error("LP parse error on line {line}: {msg}")]
    LpParse { line: usize, msg: String },

    #[error("invalid sweep spec: {0}")]
    InvalidSweep(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error envelope.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Topology(_) => "topology",
            Error::Generation(_) => "generation",
            Error::InvalidScenario(_) => "invalid_scenario",
            Error::DecisionShape { .. } => "decision_shape",
            Error::PrefixOrder { .. } => "prefix_order",
            Error::MultipleHosts { .. } => "multiple_hosts",
            Error::ZeroNormalizer { .. } => "zero_normalizer",
            Error::TooLarge { .. } => "too_large",
            Error::LpParse { .. } => "lp_parse",
            Error::InvalidSweep(_) => "invalid_sweep",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
