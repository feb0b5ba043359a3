use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A series or quadrature hit its cap before meeting its tolerance.
    /// `partial` is the best available value and `bound` its error estimate.
    #[error("{what} did not converge after {steps} steps (partial {partial:e}, error bound {bound:e})")]
    NonConvergence {
        what: &'static str,
        steps: usize,
        partial: f64,
        bound: f64,
    },

    #[error("symbol value {value:e} at radius {radius} exceeds its declared bound {bound:e}")]
    SymbolBound { value: f64, radius: f64, bound: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

pub(crate) fn require_nonnegative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be nonnegative and finite",
        })
    }
}
