use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = FctError> = core::result::Result<T, E>;

/// Pipeline stage an error was raised in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Build,
    Sample,
    Transform,
    Solve,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Build => "build",
            Phase::Sample => "sample",
            Phase::Transform => "transform",
            Phase::Solve => "solve",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FctError {
    /// Two objects disagree on the ambient dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// A vector argument has the wrong length.
    LengthMismatch { expected: usize, found: usize },
    /// An index set would hold more members than the configured maximum.
    Capacity { required: u128, limit: u128 },
    /// A count or product does not fit the machine integer types.
    Overflow(&'static str),
    InvalidArgument(String),
    /// The target function returned NaN or an infinity.
    NonFinite { point: Vec<f64>, value: f64 },
    /// An evaluation point lies outside `[-1, 1]^D`.
    OutOfDomain { point: Vec<f64> },
    /// More distinct samples were requested than exist.
    Infeasible { requested: u128, available: u128 },
    /// The adaptive L-grid hit its block limit before becoming well conditioned.
    Conditioning {
        blocks: usize,
        kappa: f64,
        rank_deficient: bool,
    },
    /// Conjugate gradients produced a non-finite iterate.
    Breakdown { iteration: usize },
    /// The estimated allocation exceeds the memory budget.
    Budget { required_bytes: u128, budget_bytes: u64 },
    /// Randomized least squares could not draw a well-conditioned sample set.
    RetryExhausted { attempts: usize, last_kappa: f64 },
    /// Error raised inside a named pipeline phase.
    InPhase { phase: Phase, source: Box<FctError> },
}

impl FctError {
    pub(crate) fn in_phase(self, phase: Phase) -> Self {
        match self {
            already @ FctError::InPhase { .. } => already,
            other => FctError::InPhase {
                phase,
                source: Box::new(other),
            },
        }
    }

    /// The underlying error with any phase context stripped.
    pub fn root(&self) -> &FctError {
        match self {
            FctError::InPhase { source, .. } => source.root(),
            other => other,
        }
    }
}

impl fmt::Display for FctError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FctError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            FctError::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            FctError::Capacity { required, limit } => {
                write!(f, "index set of {required} members exceeds the limit of {limit}")
            }
            FctError::Overflow(what) => write!(f, "{what} overflows"),
            FctError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            FctError::NonFinite { point, value } => {
                write!(f, "target function returned {value} at {point:?}")
            }
            FctError::OutOfDomain { point } => {
                write!(f, "point {point:?} lies outside [-1, 1]^D")
            }
            FctError::Infeasible {
                requested,
                available,
            } => write!(
                f,
                "cannot draw {requested} distinct elements from {available}"
            ),
            FctError::Conditioning {
                blocks,
                kappa,
                rank_deficient,
            } => write!(
                f,
                "aliasing system still ill-conditioned after {blocks} blocks \
                 (kappa estimate {kappa:e}, rank deficient: {rank_deficient})"
            ),
            FctError::Breakdown { iteration } => {
                write!(f, "conjugate gradient breakdown at iteration {iteration}")
            }
            FctError::Budget {
                required_bytes,
                budget_bytes,
            } => write!(
                f,
                "estimated {required_bytes} bytes exceed the memory budget of {budget_bytes} bytes"
            ),
            FctError::RetryExhausted {
                attempts,
                last_kappa,
            } => write!(
                f,
                "no well-conditioned sample set after {attempts} attempts (last kappa {last_kappa:e})"
            ),
            FctError::InPhase { phase, source } => write!(f, "{phase} phase: {source}"),
        }
    }
}

impl core::error::Error for FctError {}
