use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero vector: the operation is undefined at v = 0")]
    ZeroVector,

    #[error("degenerate fundamental tensor: minimum eigenvalue {min_eigenvalue:e} <= {tolerance:e}")]
    DegenerateTensor { min_eigenvalue: f64, tolerance: f64 },

    #[error("inadmissible Randers one-form: dual norm of b is {dual_norm} (must be < 1){}", location_suffix(.at))]
    InadmissibleRanders { dual_norm: f64, at: Option<Vec<f64>> },

    #[error("matrix is not symmetric positive definite{}", location_suffix(.at))]
    NotPositiveDefinite { at: Option<Vec<f64>> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {point:?} lies outside the chart")]
    OutsideChart { point: Vec<f64> },

    #[error("conformal factor must be positive: lambda = {value} at {at:?}")]
    NonPositiveLambda { value: f64, at: Vec<f64> },

    #[error("SSTK admissibility violated: lambda + |omega| = {value} at {at:?}")]
    SstkInadmissible { value: f64, at: Vec<f64> },

    #[error("the spacetime tensor is undefined on the exceptional bundle (v = 0)")]
    OnExceptionalBundle,

    #[error("{which} tangent is not future-pointing causal")]
    NotCausal { which: &'static str },

    #[error("no future-pointing lightlike root in direction {v:?} (radicand {radicand})")]
    NoFutureRoot { v: Vec<f64>, radicand: f64 },

    #[error("operation requires {required} mode")]
    WrongMode { required: &'static str },

    #[error("the figure-one demo metric is a generalized metric and cannot drive {operation}")]
    NotFinslerNorm { operation: &'static str },

    #[error("momentum inversion failed to converge (residual {residual:e})")]
    NewtonDivergence { residual: f64 },

    #[error("spatial velocity vanished at s = {s} on a non-static trajectory")]
    ZeroVelocityBreakdown { s: f64 },

    #[error("curve is a geodesic: the Euler-Lagrange pairing cannot be made negative (timelike: {timelike})")]
    IsGeodesic { timelike: bool },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("scene error: {0}")]
    Scene(String),
}

fn location_suffix(at: &Option<Vec<f64>>) -> String {
    match at {
        Some(p) => format!(" at {p:?}"),
        None => String::new(),
    }
}

impl Error {
    /// Numerical faults (as opposed to validation failures) map to CLI exit code 2.
    pub fn is_numerical_fault(&self) -> bool {
        matches!(
            self,
            Error::DegenerateTensor { .. }
                | Error::NewtonDivergence { .. }
                | Error::ZeroVelocityBreakdown { .. }
        )
    }
}
