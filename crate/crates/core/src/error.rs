use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch: expected {expected} grid points, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("unsupported derivative order {0} (at most 4)")]
    UnsupportedOrder(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("vacuum: minimum total density {min_density:e} is at or below the floor {floor:e}")]
    Vacuum { min_density: f64, floor: f64 },

    #[error("numerical error{}: {detail}", at_step(.step))]
    Numerical { step: Option<usize>, detail: String },

    #[error("quadrature did not converge on [{lo}, {hi}]: estimate {estimate:e}, error {error:e}")]
    Quadrature { lo: f64, hi: f64, estimate: f64, error: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("inconsistent physical/spectral state pair: {0}")]
    Inconsistent(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Toml(toml::de::Error),
}

// not `#[from]`: the message already embeds the parser report, and a source
// would print it twice in an error chain
impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Toml(e)
    }
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

fn at_step(step: &Option<usize>) -> String {
    step.map(|s| format!(" at step {s}")).unwrap_or_default()
}
