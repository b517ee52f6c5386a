use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A_ij - conj(A_ji)| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("function is not defined at eigenvalue {eigenvalue:e}")]
    Domain { eigenvalue: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("effective temperature undefined for a pure state (<sigma_z> = {expectation})")]
    PureState { expectation: f64 },

    #[error("operators do not commute (residual {residual:e}); only the commuting case is supported")]
    NonCommuting { residual: f64 },

    #[error(
        "population leaves [0, 1] (n = {population} at t = {time}); \
         reduce the memory amplitude or change the initial state"
    )]
    Amplitude { population: f64, time: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
}
