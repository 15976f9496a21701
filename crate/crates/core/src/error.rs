use thiserror::Error;

use crate::complex::VertexId;

/// Failures of the Minkowski-space kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("not in R4_perp: xi4 - xi3 = {0} must be positive")]
    NotProper(f64),
    #[error("expected a null vector, got xi*xi = {0}")]
    NotNull(f64),
    #[error("expected a circle (xi*xi > 0), got xi*xi = {0}")]
    NotCircle(f64),
    #[error("disjoint circles (normalized product {0}), use inversive_distance")]
    DisjointCircles(f64),
    #[error("circles intersect (normalized product {0}), use intersection_angle")]
    IntersectingCircles(f64),
    #[error("matrix is not a Lorentz map (defect {0:e})")]
    NotLorentz(f64),
    #[error("vector has a non-finite or all-zero entry set")]
    Degenerate,
}

/// Reasons a face list is not a combinatorial closed disk.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeshError {
    #[error("mesh has no faces")]
    NoFaces,
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("face {face} references unknown vertex {vertex}")]
    UnknownVertex { face: usize, vertex: VertexId },
    #[error("face {0} is degenerate (repeated vertex)")]
    DegenerateFace(usize),
    #[error("faces {0} and {1} span the same vertex triple")]
    DuplicateFace(usize, usize),
    #[error("edge {0}-{1} lies in more than two faces")]
    NonManifoldEdge(VertexId, VertexId),
    #[error("vertex {0} is not used by any face")]
    IsolatedVertex(VertexId),
    #[error("non-disk: complex is disconnected")]
    Disconnected,
    #[error("non-disk: vertex {0} has a pinched neighbourhood")]
    PinchedVertex(VertexId),
    #[error("non-disk: boundary is not a single simple cycle")]
    BoundaryNotSimpleCycle,
    #[error("non-disk: Euler characteristic is {0}, expected 1")]
    EulerCharacteristic(i64),
    #[error("non-disk: faces cannot be oriented coherently")]
    NonOrientable,
}

/// Failures evaluating the metric of a label.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("degenerate edge {0}-{1}: squared length {2} is not positive")]
    DegenerateEdge(VertexId, VertexId, f64),
    #[error("inadmissible face {0}-{1}-{2}: triangle inequality fails")]
    InadmissibleFace(VertexId, VertexId, VertexId),
    #[error("label has {got} entries, complex has {expected} vertices")]
    LabelSize { expected: usize, got: usize },
    #[error("label entry for vertex {0} is not finite")]
    NonFiniteLabel(VertexId),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("inadmissible start: {0}")]
    InadmissibleStart(MetricError),
    #[error("line search stalled at iteration {iteration} (residual {residual:e})")]
    LineSearchStalled { iteration: usize, residual: f64 },
    #[error("max iterations ({0}) reached, residual {1:e}")]
    MaxIterations(usize, f64),
    #[error("step collapse at t = {time} after exhausting step halvings")]
    StepCollapse { time: f64 },
    #[error("singular value decomposition failed")]
    Svd,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("label is not flat: max |K| = {0:e}")]
    NotFlat(f64),
    #[error("unknown boundary scenario `{0}`")]
    UnknownScenario(String),
    #[error("apex circle has non-positive weight {0}")]
    DegenerateApex(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("layout has no vertices")]
    Empty,
    #[error("{0} M-points for a layout of {1} vertices")]
    SizeMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("missing multiplicity for {0}")]
    MissingMultiplicity(String),
    #[error("simplex set is not a sub-complex: {0} lacks a face")]
    NotSubComplex(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Problem-file errors, each carrying the JSON pointer of the offending value.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("preset `{0}` has a fixed boundary scenario")]
    FixedScenario(String),
}

impl ProblemError {
    pub(crate) fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        ProblemError::Schema { pointer: pointer.into(), message: message.into() }
    }
}
