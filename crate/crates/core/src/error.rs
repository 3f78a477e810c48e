use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid convex body: {0}")]
    InvalidBody(String),

    #[error("polytope is unbounded in direction {0}")]
    Unbounded(String),

    #[error("linear map is singular (|det| = {0:e})")]
    SingularMap(f64),

    #[error("unsupported representation: {0}")]
    Unsupported(String),

    #[error("{what} did not converge after {iterations} iterations")]
    Convergence { what: &'static str, iterations: usize },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("design matrix is rank deficient (condition estimate {0:e})")]
    RankDeficient(f64),

    #[error("effective sample size {ess:.1} is below the required {required:.1}")]
    LowEffectiveSampleSize { ess: f64, required: f64 },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a numerical method on valid input, as opposed
    /// to invalid or unsupported input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::Quadrature(_)
                | Error::RankDeficient(_)
                | Error::LowEffectiveSampleSize { .. }
        )
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
