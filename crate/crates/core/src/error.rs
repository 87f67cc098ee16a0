use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("points are not collinear (deviation {0:.3e})")]
    NotCollinear(f64),
    #[error("degenerate cross-ratio quadruple")]
    DegenerateQuadruple,
    #[error("matrix is singular or beyond supported precision")]
    Singular,
    #[error("empty product")]
    EmptyProduct,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
    #[error("point is not interior")]
    NotInterior,
    #[error("coincident points")]
    CoincidentPoints,
    #[error("point is not on the boundary")]
    NotOnBoundary,
    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),
    #[error("bad Cartan data: {0}")]
    BadCartanData(String),
    #[error("not proximal enough: {0}")]
    NotProximalEnough(String),
    #[error("bad exponent: {0}")]
    BadExponent(f64),
    #[error("domain is not properly convex: {0}")]
    NotProperlyConvex(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("sampler produced a ball meeting the geodesic")]
    SamplerProducedIntersectingBall,
    #[error("orbit ball exceeds cap of {0} elements")]
    ExplosionGuard(usize),
    #[error("ray leaves the reach of the orbit ball (residual {0:.3})")]
    RayExitsReach(f64),
    #[error("generators do not commute")]
    NotCommuting,
    #[error("degenerate weight polygon")]
    DegenerateWeights,
    #[error("element is not biproximal")]
    NotBiproximal,
    #[error("endpoint is not on the boundary")]
    EndpointNotBoundary,
    #[error("non-unique support: choose one explicitly")]
    NonUniqueSupportRequired,
    #[error("insufficient scales: {0}")]
    InsufficientScales(String),
    #[error("point is not C1")]
    NotC1Point,
    #[error("sequence is not divergent")]
    NotDivergent,
    #[error("sequence too short")]
    TooShort,
    #[error("empty annulus at n = {0}")]
    EmptyAnnulus(usize),
    #[error("no stable gap")]
    NoStableGap,
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
