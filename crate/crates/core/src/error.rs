use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate}, error {error:.3e})"
    )]
    Convergence {
        estimate: Complex64,
        error: f64,
        subdivisions: usize,
    },

    #[error("integrand is not finite at x = {0:e}")]
    NonFinite(f64),

    #[error("static limit requires static_limit_reflection")]
    StaticLimit,

    #[error("no extremum found near z = {0:e} m")]
    ExtremumNotFound(f64),

    #[error("line {line}: {field}: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::NonFinite(_) | Error::ExtremumNotFound(_)
        )
    }
}
