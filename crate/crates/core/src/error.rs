use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("empty input to {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("zero pivot at row {0} of tridiagonal system")]
    ZeroPivot(usize),

    #[error("dense conversion of a {rows}x{cols} operator exceeds the limit of {limit} entries")]
    DenseLimit { rows: usize, cols: usize, limit: usize },

    #[error("solver diverged at iteration {iteration}: {what} became non-finite")]
    Divergence { iteration: usize, what: &'static str },
}

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            context,
            expected,
            actual,
        })
    }
}
