//! Error type shared by the simulator, primitives, and synthesis layers.

use alloc::string::String;

use crate::primitives::RunTrace;

/// Errors reported by this crate.
///
/// Monte Carlo runs that exhaust their attempt budget return
/// [`Error::AttemptsExhausted`] carrying the accumulated [`RunTrace`], so
/// callers can distinguish "never succeeded" from a hard usage error.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A qubit index was outside the register.
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    /// A register larger than the supported maximum was requested.
    RegisterTooLarge { requested: usize, max: usize },
    /// A measurement branch had probability below the cutoff where
    /// renormalization would amplify roundoff into garbage.
    BranchTooImprobable { prob: f64 },
    /// Two states of different register sizes were combined.
    SizeMismatch { left: usize, right: usize },
    /// An expression was evaluated with the wrong number of inputs.
    ArityMismatch { expected: usize, got: usize },
    /// A PAR angle was requested at a tangent pole (some input at pi/2 + n pi).
    TangentPole { input_index: usize },
    /// An argument violated a documented domain restriction.
    Domain(String),
    /// A linear solve hit a (numerically) singular matrix.
    SingularMatrix { condition_estimate: f64 },
    /// A repeat-until-success loop used up its attempt budget.
    AttemptsExhausted { trace: RunTrace },
    /// A linear system exceeded the supported size.
    SystemTooLarge { requested: usize, max: usize },
    /// The computed fit residual exceeded the promised bound.
    ResidualTooLarge { residual: f64, bound: f64 },
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::QubitOutOfRange { qubit, n_qubits } => {
                write!(f, "qubit index {qubit} out of range for {n_qubits}-qubit register")
            }
            Error::RegisterTooLarge { requested, max } => {
                write!(f, "requested {requested}-qubit register exceeds maximum of {max}")
            }
            Error::BranchTooImprobable { prob } => {
                write!(f, "measurement branch probability {prob:.3e} below 1e-15 cutoff")
            }
            Error::SizeMismatch { left, right } => {
                write!(f, "register size mismatch: {left} vs {right} qubits")
            }
            Error::ArityMismatch { expected, got } => {
                write!(f, "expression expects {expected} inputs, got {got}")
            }
            Error::TangentPole { input_index } => {
                write!(f, "PAR angle undefined: input {input_index} at a tangent pole")
            }
            Error::Domain(msg) => write!(f, "domain violation: {msg}"),
            Error::SingularMatrix { condition_estimate } => {
                write!(
                    f,
                    "singular matrix (condition estimate {condition_estimate:.3e})"
                )
            }
            Error::AttemptsExhausted { trace } => {
                write!(f, "repeat-until-success budget exhausted after {} attempts", trace.attempts)
            }
            Error::SystemTooLarge { requested, max } => {
                write!(f, "linear system of size {requested} exceeds maximum of {max}")
            }
            Error::ResidualTooLarge { residual, bound } => {
                write!(f, "solve residual {residual:.3e} exceeds bound {bound:.3e}")
            }
        }
    }
}

impl core::error::Error for Error {}
