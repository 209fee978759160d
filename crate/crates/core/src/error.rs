use thiserror::Error;

/// Errors produced by the solver and its diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("direction is not aligned with the grid: {0}")]
    Alignment(String),

    #[error("invalid system specification: {0}")]
    Spec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("solution blew up at t = {time}: {detail}")]
    BlowUp { time: f64, detail: String },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("degenerate direction mask: {0}")]
    MaskStructure(String),

    #[error("positivity violated: {0}")]
    Positivity(String),

    #[error("branch amplitude too large: {0}")]
    Amplitude(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
