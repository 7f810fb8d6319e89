use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// The map has a nonzero constant term, so the origin is not fixed.
    NotCenteredAtOrigin { component: usize, constant: f64 },
    /// `‖∂₀f‖ >= 1`; carries the computed spectral norm.
    NotAContraction { norm: f64 },
    /// `‖g(x0) - x0‖` exceeded the fixed-point tolerance.
    FixedPointMismatch { residual: f64 },
    /// Degree-`m` homogeneous operator `C_A - I` was numerically singular.
    SingularDegreeOperator { degree: usize },
    NoConvergence { iterations: usize, change: f64 },
    EmptyLayer { layer: usize },
    DimensionMismatch { expected: usize, found: usize },
    CenterMismatch,
    GridMismatch,
    DegenerateBox,
    InvalidParameter(String),
    UnknownExample(u32),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotCenteredAtOrigin { component, constant } => write!(
                f,
                "map is not centered at the origin: component {component} has constant term {constant}"
            ),
            Error::NotAContraction { norm } => {
                write!(f, "linear part is not a contraction: ‖∂₀f‖ = {norm}")
            }
            Error::FixedPointMismatch { residual } => {
                write!(f, "point is not a fixed point: ‖g(x0) - x0‖ = {residual:e}")
            }
            Error::SingularDegreeOperator { degree } => {
                write!(f, "degree-{degree} operator is numerically singular")
            }
            Error::NoConvergence { iterations, change } => write!(
                f,
                "no convergence after {iterations} iterations (last change {change:e})"
            ),
            Error::EmptyLayer { layer } => write!(f, "series layer {layer} is empty"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::CenterMismatch => write!(f, "series centers differ"),
            Error::GridMismatch => write!(f, "rasters are defined on different grids"),
            Error::DegenerateBox => write!(f, "box is degenerate"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::UnknownExample(id) => write!(f, "no analytic basin known for example {id}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
