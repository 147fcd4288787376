use alloc::string::String;
use core::fmt;

use crate::symexpr::{EvalError, NodeCapExceeded};

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// The problem definition is inconsistent (wrong variables, empty domain).
    InvalidProblem(String),
    /// An argument is outside an operation's precondition.
    InvalidArgument(String),
    /// A symbolic result outgrew the node cap; `order` is the series order
    /// being built when it happened, if any.
    NodeCap {
        order: Option<usize>,
        source: NodeCapExceeded,
    },
    /// A numeric evaluation failed; `context` locates it.
    Eval { context: String, source: EvalError },
    /// The time step violates the monotonicity bound `dt*alpha/dx <= 1/2`.
    Cfl { ratio: f64 },
    /// The viscosity coefficient is below the largest realized `|H'|`.
    Viscosity { alpha: f64, required: f64 },
    /// The scheme produced a non-finite value.
    NonFinite { step: usize },
    /// Too many scan points could not be evaluated.
    ScanFailed { skipped: usize, total: usize },
    MissingSnapshot { time: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidProblem(msg) => write!(f, "invalid problem: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NodeCap {
                order: Some(n),
                source,
            } => write!(f, "series order {n}: {source}"),
            Error::NodeCap { order: None, source } => write!(f, "{source}"),
            Error::Eval { context, source } => write!(f, "{context}: {source}"),
            Error::Cfl { ratio } => write!(
                f,
                "CFL violation: dt*alpha/dx = {ratio} exceeds 1/2"
            ),
            Error::Viscosity { alpha, required } => write!(
                f,
                "viscosity coefficient {alpha} below max |H'| = {required}"
            ),
            Error::NonFinite { step } => write!(f, "non-finite value at time step {step}"),
            Error::ScanFailed { skipped, total } => write!(
                f,
                "{skipped} of {total} scan points could not be evaluated"
            ),
            Error::MissingSnapshot { time } => write!(f, "no snapshot at t = {time}"),
        }
    }
}

impl From<NodeCapExceeded> for Error {
    fn from(source: NodeCapExceeded) -> Error {
        Error::NodeCap {
            order: None,
            source,
        }
    }
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidProblem(_) | Error::InvalidArgument(_))
    }
}

pub type Result<T> = core::result::Result<T, Error>;
