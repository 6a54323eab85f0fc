use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain where the construction makes sense.
    #[error("domain error: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("coupling matrix is not symmetric: b12 = {b12}, b21 = {b21}")]
    NotSymmetric { b12: f64, b21: f64 },

    #[error("operation not supported for {0}")]
    UnsupportedKind(&'static str),

    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(&'static str),

    #[error("root bracket [{lo}, {hi}] does not straddle a sign change")]
    Bracket { lo: f64, hi: f64 },

    #[error("incompatible functions: {0}")]
    Incompatible(&'static str),

    #[error("discretization is not hermitian: asymmetry {asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("linear solver breakdown at step {step}: {reason}")]
    SolverBreakdown { step: usize, reason: &'static str },

    #[error("grid: {0}")]
    Grid(String),
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}
