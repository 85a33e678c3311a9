use thiserror::Error;

/// Errors raised by the operator toolkit.
///
/// Numeric payloads are carried as `f64` regardless of the working scalar so
/// that the error type stays independent of the precision in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: ||M - M*||_F = {deviation:e} exceeds {tolerance:e} * ||M||_F (||M||_F = {norm:e})")]
    NotHermitian {
        deviation: f64,
        norm: f64,
        tolerance: f64,
    },

    #[error("function undefined at eigenvalue {eigenvalue}")]
    Domain { eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("operator norm {norm} is outside the admissible ball (limit {limit})")]
    OutOfBall { norm: f64, limit: f64 },

    #[error("not a projection: idempotency defect {idempotency:e}, self-adjointness defect {adjointness:e}")]
    NotProjection { idempotency: f64, adjointness: f64 },

    #[error("projection is not Lagrangian: ||I(2p-1) + (2p-1)I|| = {anticommutator:e}")]
    NotLagrangian { anticommutator: f64 },

    #[error("matrix is not unitary: ||W*W - 1|| = {defect:e}")]
    NotUnitary { defect: f64 },

    #[error("eigenvalue {eigenvalue} lies within {tolerance:e} of the window edge {edge}")]
    BoundaryCollision {
        eigenvalue: f64,
        edge: f64,
        tolerance: f64,
    },

    #[error("operator is not in the covering set: eigenvalue {eigenvalue} is within {gap:e} of tuple point {point}")]
    NotInCovering {
        eigenvalue: f64,
        point: f64,
        gap: f64,
    },

    #[error("surgery violation: replacement spectrum contains {eigenvalue} inside [-{c}, {c}]")]
    SurgeryViolation { eigenvalue: f64, c: f64 },

    #[error("degenerate operator: smallest singular value {min_singular:e} is below {tolerance:e}")]
    Degenerate { min_singular: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unitary has eigenvalue within {tolerance:e} of -1 (distance {distance:e}); logarithm branch cut")]
    BranchCut { distance: f64, tolerance: f64 },

    #[error("spectral flow refinement did not converge on [{theta_lo}, {theta_hi}] within depth {depth}")]
    NonConvergence {
        theta_lo: f64,
        theta_hi: f64,
        depth: usize,
    },

    #[error("eigenvalue {eigenvalue} stays pinned at window edge {radius} on [{theta_lo}, {theta_hi}]")]
    Conditioning {
        eigenvalue: f64,
        radius: f64,
        theta_lo: f64,
        theta_hi: f64,
    },

    #[error("path endpoints do not match: operator distance {distance:e}")]
    EndpointMismatch { distance: f64 },

    #[error("linear algebra backend failure: {0}")]
    Backend(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
