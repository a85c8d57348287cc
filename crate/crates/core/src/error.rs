use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong inside the library.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Root set requested for the zero polynomial.
    ZeroPolynomial,
    /// A rational map with an identically vanishing denominator.
    ZeroDenominator,
    /// An operation that needs a nonconstant map was given a constant.
    ConstantMap,
    /// A numeric argument outside the accepted domain.
    InvalidArgument(String),
    /// Root clustering or local degree extraction did not add up.
    RootClustering { message: String, residuals: Vec<f64> },
    /// An iterative or adaptive method ran out of budget.
    NotConverged { what: &'static str, estimate: f64, error_bound: f64 },
    /// A pole of order three or more where a regular singularity was expected.
    IrregularSingularity { order: usize },
    /// `c >= 1/2` has no positive cone angle.
    NoPositiveAngle { weight: f64 },
    /// Residues of a differential do not sum to zero.
    ResidueTheorem { sum: f64 },
    /// A zero residue was supplied for a pole.
    ZeroResidue,
    /// Two poles or divisor entries share a point.
    DuplicatePoint,
    /// A path or loop passes too close to a pole.
    PathTooClose { segment: usize, distance: f64 },
    /// Winding computation is undefined because a vertex sits on a pole.
    DegenerateWinding { vertex: usize },
    /// Recurrence hit a vanishing indicial factor.
    Resonance { index: usize },
    /// The ratio of local solutions is not of the form `z^alpha`.
    NoNormalForm,
    /// Residues are not all integers, so no single-valued developing map exists.
    MonodromyObstruction,
    /// Not enough data to build a series of the requested order.
    InsufficientSamples { needed: usize, available: usize },
    /// A point that is neither a zero nor a pole of the differential.
    OrdinaryPoint,
    /// Curvature stencil or quadrature grid is unusable.
    Stencil(String),
    /// An internal consistency check failed.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroPolynomial => f.write_str("zero polynomial has no root set"),
            Error::ZeroDenominator => f.write_str("rational map has zero denominator"),
            Error::ConstantMap => f.write_str("map is constant"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::RootClustering { message, residuals } => {
                write!(f, "root clustering failure: {message} (residual norms {residuals:?})")
            }
            Error::NotConverged { what, estimate, error_bound } => {
                write!(f, "{what} did not converge: estimate {estimate:e}, error bound {error_bound:e}")
            }
            Error::IrregularSingularity { order } => {
                write!(f, "irregular singularity: pole of order {order}")
            }
            Error::NoPositiveAngle { weight } => {
                write!(f, "no positive angle for weight {weight} (need c < 1/2)")
            }
            Error::ResidueTheorem { sum } => {
                write!(f, "violates residue theorem: residues sum to {sum:e}")
            }
            Error::ZeroResidue => f.write_str("pole is not 3rd-kind: zero residue"),
            Error::DuplicatePoint => f.write_str("points are not pairwise distinct"),
            Error::PathTooClose { segment, distance } => {
                write!(f, "path too close to a pole: segment {segment} at distance {distance:e}")
            }
            Error::DegenerateWinding { vertex } => {
                write!(f, "winding number undefined: vertex {vertex} collides with a pole")
            }
            Error::Resonance { index } => {
                write!(f, "resonant index {index}; use local_solutions")
            }
            Error::NoNormalForm => {
                f.write_str("no z^alpha normal form; non-compact local monodromy (logarithmic solution)")
            }
            Error::MonodromyObstruction => f.write_str("monodromy obstruction: residues not integers"),
            Error::InsufficientSamples { needed, available } => {
                write!(f, "insufficient samples for requested order: need {needed}, have {available}")
            }
            Error::OrdinaryPoint => f.write_str("ordinary point: neither a zero nor a pole"),
            Error::Stencil(msg) => write!(f, "stencil error: {msg}"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
