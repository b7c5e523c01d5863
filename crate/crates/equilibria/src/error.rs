//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Affinely dependent input where independence is required.
    DegenerateInput(String),
    DimensionMismatch { expected: usize, got: usize },
    /// Evaluation point coincides with a charge site.
    AtSite { site: usize },
    DuplicateSites(usize, usize),
    /// Voronoi construction limits (l ≤ 12, n ≤ 4) exceeded.
    LimitsExceeded(String),
    /// Operation requires a cell of positive codimension.
    NotPositiveCodim,
    /// The slicing subspace does not intersect the diagram generically.
    NonGenericSlice(String),
    /// The diagram violates the genericity assumptions.
    NonGenericDiagram(String),
    UnsupportedDimension(usize),
    /// Exact 1-D counting requires a positive integer exponent.
    NonIntegerAlpha(f64),
    /// Symbolic pipeline requires an exact rational exponent.
    NonRationalAlpha(f64),
    /// The cleared 1-D polynomial has repeated roots.
    DegenerateRootReport(String),
    /// Certified counting could not resolve these intervals at floor width.
    Unresolved { intervals: Vec<(f64, f64)> },
    /// Three-charge pipeline requires non-collinear sites (b ≠ 0).
    CollinearSites,
    /// A symbolic identity the pipeline relies on failed; this signals an
    /// implementation bug, not an input condition.
    IdentityViolation(String),
    /// Boundary monomials of R failed to cancel in the R̃ reduction.
    ReductionFailure(String),
    /// 1 is not a regular value of the curve-defining functions.
    NonRegularValue(String),
    /// Census contains degenerate critical points.
    DegenerateCensus(String),
    ZeroPolynomial,
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateInput(m) => write!(f, "degenerate input: {m}"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::AtSite { site } => write!(f, "evaluation point coincides with site {site}"),
            Error::DuplicateSites(i, j) => write!(f, "sites {i} and {j} coincide"),
            Error::LimitsExceeded(m) => write!(f, "limits exceeded: {m}"),
            Error::NotPositiveCodim => write!(f, "cell has codimension zero"),
            Error::NonGenericSlice(m) => write!(f, "subspace slices the diagram non-generically: {m}"),
            Error::NonGenericDiagram(m) => write!(f, "diagram is non-generic: {m}"),
            Error::UnsupportedDimension(n) => write!(f, "unsupported dimension {n}"),
            Error::NonIntegerAlpha(a) => write!(f, "alpha = {a} is not a positive integer"),
            Error::NonRationalAlpha(a) => write!(f, "alpha = {a} has no exact rational form"),
            Error::DegenerateRootReport(m) => write!(f, "repeated roots: {m}"),
            Error::Unresolved { intervals } => {
                write!(f, "{} interval(s) unresolved at floor width", intervals.len())
            }
            Error::CollinearSites => write!(f, "three-charge sites are collinear (b = 0)"),
            Error::IdentityViolation(m) => write!(f, "symbolic identity violated: {m}"),
            Error::ReductionFailure(m) => write!(f, "boundary reduction failed: {m}"),
            Error::NonRegularValue(m) => write!(f, "1 is not a regular value: {m}"),
            Error::DegenerateCensus(m) => write!(f, "degenerate census: {m}"),
            Error::ZeroPolynomial => write!(f, "zero polynomial has no Newton polygon"),
            Error::InvalidConfig(m) => write!(f, "invalid configuration: {m}"),
        }
    }
}

impl std::error::Error for Error {}
