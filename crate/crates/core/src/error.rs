use thiserror::Error;

/// Failure modes of the numerical pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("accuracy not reached: {0}")]
    Accuracy(String),
    #[error("seed solution vanishes at x = {at} (choose another seed parameter)")]
    Seed { at: f64 },
    #[error("series truncation tail {tail:e} exceeds tolerance (raise the degree)")]
    Truncation { tail: f64 },
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("transformation is not hyperbolic (|trace| = {trace})")]
    NotHyperbolic { trace: f64 },
    #[error("degenerate group: {0}")]
    DegenerateGroup(String),
}

impl Error {
    /// Short machine-readable tag used in diagnostic output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Pole(_) => "pole",
            Error::Accuracy(_) => "accuracy",
            Error::Seed { .. } => "seed",
            Error::Truncation { .. } => "truncation",
            Error::Geometry(_) => "geometry",
            Error::NoSolution(_) => "no_solution",
            Error::NotHyperbolic { .. } => "not_hyperbolic",
            Error::DegenerateGroup(_) => "degenerate_group",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
