//! Finite stages of the projective limit over a fixed ground complex, with
//! realizing assignments, the relation R and mesh export.

mod geometry;
mod mesh;
pub mod report;
mod tower;

pub use geometry::{barycentric_coords, centroid, diameter, distance, hull_contains, Realization};
pub use mesh::{export_mesh, Mesh, MeshFormat};
pub use report::{quotient_report, Check, DecayRow, HullUnion, PairKind, PairRow, QuotientReport, SupportRow, TripleSummary};
pub use tower::{r_related, refine_assignment, Level, Schedule, Step, StepKind, Thread, ThreadStrategy, TowerOf, WeldSpec};

use crate::complex::Complex;
use crate::seqcalc::SeqError;
use crate::simap::MapError;

pub type Tower = TowerOf<f64>;
pub type RealizingAssignment = Realization<f64>;

#[derive(Debug, thiserror::Error)]
pub enum LimitError {
    #[error("invalid schedule: {0}")]
    ScheduleInvalid(String),
    #[error("ground has dimension {0}; meshes need dimension at most 3")]
    DimensionTooHigh(usize),
    #[error("stage {level} does not exist; the tower has {levels} stages")]
    BadLevel { level: usize, levels: usize },
    #[error("bad thread: {0}")]
    BadThread(String),
    #[error("invariant failed: {0}")]
    InvariantFailed(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// `f64` tower with `blocks` barycentric blocks and the scheduled welds.
pub fn build_tower(ground: &Complex, blocks: usize, schedule: &Schedule) -> Result<Tower, LimitError> {
    Tower::build(ground, blocks, schedule)
}

pub fn epsilon(tower: &Tower, n: usize) -> Result<f64, LimitError> {
    tower.epsilon(n)
}

#[cfg(test)]
mod tests;
