use thiserror::Error;

use crate::cantor::AuditRecord;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate interval [{left}, {right}]")]
    DegenerateInterval { left: f64, right: f64 },

    #[error("invalid Cantor state: {0}")]
    InvalidState(String),

    #[error("stage index {n} out of range (depth {depth})")]
    StageIndex { n: usize, depth: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("point {re}+{im}i is within {tol:e} of a pole")]
    PoleProximity { re: f64, im: f64, tol: f64 },

    #[error("point {re}+{im}i lies on a branch cut")]
    BranchCut { re: f64, im: f64 },

    #[error("point lies on the set (distance to blocks is zero)")]
    OnSet,

    #[error("window ({left}, {right}) has an endpoint inside a block")]
    InvalidWindow { left: f64, right: f64 },

    #[error("contour does not fit: {0}")]
    ContourContainment(String),

    #[error("path comes within {distance:e} of a block or pole (margin {margin:e})")]
    PathCollision { distance: f64, margin: f64 },

    #[error("path continuation exceeded its step budget of {budget}")]
    StepBudget { budget: usize },

    #[error("point {re}+{im}i is not inside the domain")]
    PointPlacement { re: f64, im: f64 },

    #[error("point {re}+{im}i is inside an excluded disc")]
    ExcludedRegion { re: f64, im: f64 },

    #[error("reference disc intersects the blocks of the set")]
    Placement,

    #[error("empty point set")]
    EmptySet,

    #[error("construction stalled at step {step} after {halvings} halvings")]
    ConstructionStall {
        step: usize,
        halvings: u32,
        log: Vec<AuditRecord>,
    },

    #[error("interval width at step {step} is below floating-point resolution ({width:e})")]
    PrecisionExhausted {
        step: usize,
        width: f64,
        log: Vec<AuditRecord>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
