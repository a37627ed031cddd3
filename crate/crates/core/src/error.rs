use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // mesh construction
    #[error("vertex index {index} out of range (mesh has {count} vertices)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("cell {cell} is self-intersecting")]
    SelfIntersecting { cell: usize },
    #[error("cell {cell} is degenerate (area {area:e})")]
    DegenerateCell { cell: usize, area: f64 },
    #[error("vertex {vertex} is not referenced by any cell")]
    DanglingVertex { vertex: usize },
    #[error("edge ({a}, {b}) is shared by {count} cells")]
    NonManifoldEdge { a: usize, b: usize, count: usize },
    #[error("tagged edge ({a}, {b}) is not a boundary edge of the mesh")]
    NotABoundaryEdge { a: usize, b: usize },
    #[error("non-finite coordinate at vertex {vertex}")]
    NonFiniteVertex { vertex: usize },
    #[error("domain is empty or degenerate")]
    EmptyDomain,
    #[error("boundary clipping failed for leaf {leaf}")]
    ClipFailure { leaf: usize },
    #[error("mesh file line {line}: {msg}")]
    MeshFormat { line: usize, msg: String },

    // shape functions
    #[error("polygon is not strictly convex")]
    NotStrictlyConvex,
    #[error("polygon has a reflex vertex")]
    ReflexPolygon,
    #[error("evaluation point lies on the polygon boundary")]
    PointOnBoundary,
    #[error("point ({x}, {y}) lies outside the polygon")]
    OutsidePolygon { x: f64, y: f64 },
    #[error("segment leaves the polygon")]
    SegmentOutside,

    // assembly
    #[error("conductivity of region {region} is not symmetric positive definite")]
    NonSpdConductivity { region: u32 },
    #[error("no material defined for region {region}")]
    MissingMaterial { region: u32 },
    #[error("Neumann data for tag '{tag}' which no boundary edge carries")]
    UntaggedNeumannEdge { tag: String },
    #[error("node {node} prescribed with conflicting heads {a} and {b}")]
    ConflictingDirichlet { node: usize, a: f64, b: f64 },
    #[error("system is singular: no prescribed-head node")]
    SingularSystem,
    #[error("unknown boundary tag '{tag}'")]
    UnknownTag { tag: String },

    // solver
    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64, best: Vec<f64> },
    #[error("matrix is not positive definite (negative curvature detected)")]
    NonSpdDetected,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    // drivers
    #[error("reference field has zero norm")]
    ZeroReference,
    #[error("probe ({x}, {y}) lies outside the domain")]
    ProbeOutsideDomain { x: f64, y: f64 },
    #[error("node ({x}, {y}) of the new mesh lies outside the old mesh")]
    NodeOutsideOldMesh { x: f64, y: f64 },
    #[error("time step must be positive (got {dt})")]
    NonPositiveTimeStep { dt: f64 },
    #[error("seepage-face tag '{tag}' carries no boundary edges")]
    MissingSeepageFace { tag: String },
    #[error("adaptive refinement requires a quadtree-backed mesh")]
    NotQuadtreeBacked,

    // configuration and I/O
    #[error("config parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
