use std::path::PathBuf;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("epithelium rates degenerate: k_on + k_off = 0")]
    DegenerateEpithelium,

    #[error("degenerate polynomial: all coefficients vanish")]
    DegeneratePolynomial,

    #[error("root finder did not converge after {iterations} iterations")]
    RootsNotConverged { iterations: usize },

    #[error("no sign change over bracket: g({lo}) = {g_lo}, g({hi}) = {g_hi}")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("simulation aborted at t = {t}: {reason}")]
    SimulationAborted { t: f64, reason: String },

    #[error("{path}:{line}: {msg}")]
    Config { path: PathBuf, line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::UnknownParameter(_) | Error::Config { .. } | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
