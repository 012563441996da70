use crate::momentum::Momentum;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("NotClosedShell: no lattice ball contains exactly {n} points")]
    NotClosedShell { n: u64 },

    #[error("EmptyLune: no particle-hole pair with transfer momentum {k}")]
    EmptyLune { k: Momentum },

    #[error("DomainError: {0}")]
    Domain(String),

    #[error("ParseError: {0}")]
    Parse(String),

    #[error("SymmetryError: V({k}) = {value} but V({neg}) = {neg_value}")]
    Symmetry {
        k: Momentum,
        value: f64,
        neg: Momentum,
        neg_value: f64,
    },

    #[error("ValueError: {0}")]
    Value(String),

    #[error("ShapeMismatch: Fermi ball has {ball} modes but model has N = {params}")]
    ShapeMismatch { ball: u64, params: u64 },

    #[error("DegenerateCoefficients at k = {k}: alpha = {alpha}, beta = {beta} (need |beta| < alpha)")]
    DegenerateCoefficients { k: Momentum, alpha: f64, beta: f64 },

    #[error("MissingCoefficient: no quadratic coefficients for k = {k}")]
    MissingCoefficient { k: Momentum },

    #[error("ConvergenceFailure: {0}")]
    ConvergenceFailure(String),

    #[error("TruncationOverflow: result needs {needed} pairs, sector holds at most {max_pairs}")]
    TruncationOverflow { needed: usize, max_pairs: usize },

    #[error("BoundViolation in {check}: ratio {ratio} exceeds 1")]
    BoundViolation { check: String, ratio: f64 },
}

impl Error {
    /// Numerical failures (exit code 2) as opposed to invalid input (exit code 1).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure(_) | Error::TruncationOverflow { .. }
        )
    }
}
