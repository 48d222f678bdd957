use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("gamma function pole at z = {0}")]
    Pole(f64),
    #[error("degenerate hypergeometric parameters: {0}")]
    Degenerate(String),
    #[error("covariance matrix is ill-conditioned (Cholesky failed with jitter {jitter:e}); thin the point set")]
    IllConditioned { jitter: f64 },
    #[error("{count} points exceed the dense-sampling cap of {cap}")]
    TooManyPoints { count: usize, cap: usize },
    #[error("quadrature failed to converge (achieved {achieved:e})")]
    NoConvergence { achieved: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::Error::Domain(alloc::format!($($arg)*))
    };
}
pub(crate) use domain;
