use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical core.
///
/// Solver terminations (blowup, boundary contamination, loss of
/// invertibility) are not errors: they are reported through
/// [`crate::solver::Termination`] on the trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A null derivative of the requested order needs more stored time levels.
    InsufficientHistory { needed: usize, available: usize },
    /// The stencil halo reached a node whose field value is not quiet.
    HaloExhausted { node: usize, value: f64 },
    /// A spacetime region leaves the sampled domain.
    RegionOutsideDomain(&'static str),
    /// A coefficient or profile map returned a non-finite value.
    EvaluationFailure(&'static str),
    /// A coefficient matrix failed the symmetry check.
    NonSymmetric { which: &'static str, defect: f64 },
    /// The symmetric or companion eigensolver did not produce a usable result.
    EigenFailure,
    /// No boost parameter on the search ladder met the requested margin.
    NoBoostFound { margin: f64 },
    /// A builtin catalog lookup failed.
    UnknownName { catalog: &'static str, name: String },
    /// Residual of the traveling wave in the full system exceeded the tolerance.
    ResidualExceedsTol { residual: f64, tol: f64 },
    /// Initial data is not quiet near the boundary.
    SupportViolation { x: f64, value: f64 },
    /// Grid parameters violate their invariants.
    InvalidGrid(&'static str),
    /// Adaptive quadrature hit its recursion limit.
    QuadratureNonconvergence { a: f64, b: f64 },
    /// The Gronwall hypothesis fails on the supplied samples.
    HypothesisViolated { index: usize, excess: f64 },
    /// A convergence study contained a run that did not reach its end time.
    StudyInvalid,
    /// Any other precondition violation.
    InvalidArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InsufficientHistory { needed, available } => write!(
                f,
                "insufficient history: {needed} time levels needed, {available} stored"
            ),
            Error::HaloExhausted { node, value } => {
                write!(f, "stencil halo exhausted at node {node} (|value| = {value:e})")
            }
            Error::RegionOutsideDomain(what) => write!(f, "region outside domain: {what}"),
            Error::EvaluationFailure(what) => write!(f, "evaluation failure in {what}"),
            Error::NonSymmetric { which, defect } => {
                write!(f, "coefficient {which} is not symmetric (defect {defect:e})")
            }
            Error::EigenFailure => f.write_str("eigensolver failure"),
            Error::NoBoostFound { margin } => {
                write!(f, "no boost on the search ladder reaches margin {margin}")
            }
            Error::UnknownName { catalog, name } => write!(f, "unknown {catalog} `{name}`"),
            Error::ResidualExceedsTol { residual, tol } => {
                write!(f, "traveling-wave residual {residual:e} exceeds {tol:e}")
            }
            Error::SupportViolation { x, value } => write!(
                f,
                "initial data not quiet near the boundary: |value| = {value:e} at x = {x}"
            ),
            Error::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            Error::QuadratureNonconvergence { a, b } => {
                write!(f, "adaptive quadrature did not converge on [{a}, {b}]")
            }
            Error::HypothesisViolated { index, excess } => write!(
                f,
                "Gronwall hypothesis violated at sample {index} (excess {excess:e})"
            ),
            Error::StudyInvalid => f.write_str("convergence study invalid: a run terminated early"),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
