use core::fmt;

/// Errors for every fallible operation in the crate.
///
/// Types reject invariant violations at construction with one of these;
/// nothing is silently repaired or renormalized.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Probability vector sum differs from 1 by more than the 1e-9 tolerance.
    NotNormalized { sum: f64 },
    /// A scalar lies outside its permitted range (probabilities, alpha, labels, ...).
    OutOfRange { what: &'static str, value: f64 },
    /// Paired inputs disagree in length or class count.
    LengthMismatch { expected: usize, got: usize },
    /// A value that must be finite is NaN or infinite.
    NotFinite { what: &'static str },
    /// Training labels contain fewer than two distinct classes.
    SingleClassData,
    /// Class occupies none or all of the training labels, so the within-family
    /// likelihood has no interior maximizer along that class axis.
    DegenerateClass { class: usize },
    /// Root finding exhausted its iteration cap without certifying the residual tolerance.
    SolverBudgetExceeded { residual: f64 },
    /// Barrier ascent ended with a projected gradient norm above tolerance.
    NotConverged { grad_norm: f64 },
    /// Prediction was requested at an alpha level the model was not fitted on.
    UnknownAlpha { alpha: f64 },
    /// The box has an empty intersection with the probability simplex.
    EmptyBox,
    /// The operation needs at least one element.
    EmptyList,
    /// Synthetic-task or solver configuration rejected.
    InvalidConfig { reason: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotNormalized { sum } => {
                write!(f, "probability vector sums to {sum}, not 1 (tolerance 1e-9)")
            }
            Error::OutOfRange { what, value } => write!(f, "{what} out of range: {value}"),
            Error::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::NotFinite { what } => write!(f, "{what} must be finite"),
            Error::SingleClassData => write!(f, "training labels contain only one class"),
            Error::DegenerateClass { class } => write!(
                f,
                "class {class} occupies none or all training labels; no interior maximizer"
            ),
            Error::SolverBudgetExceeded { residual } => {
                write!(f, "solver iteration cap hit with residual {residual}")
            }
            Error::NotConverged { grad_norm } => {
                write!(f, "ascent stopped with projected gradient norm {grad_norm}")
            }
            Error::UnknownAlpha { alpha } => {
                write!(f, "alpha {alpha} was not among the fitted levels")
            }
            Error::EmptyBox => write!(f, "box does not intersect the probability simplex"),
            Error::EmptyList => write!(f, "empty input list"),
            Error::InvalidConfig { reason } => write!(f, "invalid configuration: {reason}"),
        }
    }
}

impl core::error::Error for Error {}
