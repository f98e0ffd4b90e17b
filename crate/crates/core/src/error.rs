use thiserror::Error;

/// Errors raised by the geometric operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("points are projectively coincident")]
    CoincidentPoints,
    #[error("lines are projectively coincident")]
    CoincidentLines,
    #[error("point lies on the line at infinity")]
    PointAtInfinity,
    #[error("point lies in the kernel of the map")]
    KernelHit,
    #[error("map is singular")]
    SingularMap,
    #[error("n must be at least 5 (got {0})")]
    TooFewVertices(usize),
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("a vertex lies on the chart line")]
    VertexOnChartLine,
    #[error("maximum number of iterations ({0}) exceeded")]
    MaxIterationsExceeded(usize),
    #[error("no fixed point of the operator inside the convex hull")]
    NoInteriorFixedPoint,
    #[error("more than one fixed point of the operator inside the convex hull")]
    AmbiguousFixedPoint,
    #[error("degenerate point configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("conic is degenerate")]
    DegenerateConic,
    #[error("conic center lies at infinity")]
    CenterAtInfinity,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("Newton iteration did not converge in {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("no damping factor keeps the polygon convex")]
    ConvexityLost,
    #[error("exhausted {0} sampling attempts")]
    ExhaustedAttempts(usize),
    #[error("orbit degenerated: {0}")]
    DegenerateOrbit(String),
    #[error("malformed polygon file: {0}")]
    Format(String),
}

impl Error {
    /// Whether the error reflects degenerate geometry rather than bad input or solver failure.
    pub fn is_degeneracy(&self) -> bool {
        !matches!(
            self,
            Error::TooFewVertices(_)
                | Error::Format(_)
                | Error::NoConvergence { .. }
                | Error::ConvexityLost
                | Error::ExhaustedAttempts(_)
                | Error::MaxIterationsExceeded(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
