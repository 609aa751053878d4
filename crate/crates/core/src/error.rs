use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypotheses violated: {0}")]
    Hypothesis(String),

    #[error("small divisor {delta:e} below certified bound {bound:e} at {monomial}")]
    SmallDivisor {
        delta: f64,
        bound: f64,
        monomial: String,
    },

    #[error("threshold condition violated: {0}")]
    Threshold(String),

    #[error("fixed point diverged at step {step} after {iters} iterations (increment {increment:e}); try a smaller dt")]
    FixedPointDiverged {
        step: usize,
        iters: usize,
        increment: f64,
    },

    #[error("insufficient tail decay: {0}")]
    InsufficientTailDecay(String),

    #[error("index {index} outside truncation 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("wrong degree: expected {expected}, found {found}")]
    WrongDegree { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("buckling regime, model invalid (m = {0})")]
    Buckling(f64),
}

impl Error {
    /// True for errors that signal a violated mathematical hypothesis rather
    /// than bad input or a numerical breakdown.
    #[must_use]
    pub fn is_hypothesis(&self) -> bool {
        matches!(
            self,
            Error::Hypothesis(_) | Error::Threshold(_) | Error::SmallDivisor { .. } | Error::Buckling(_)
        )
    }

    /// True for numerical failures (non-convergence).
    #[must_use]
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::FixedPointDiverged { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
