//! Points, boxes and regions of `[0,1]^d` under the L∞ metric, the
//! discretization oracles and packing/covering estimators built on them.
//!
//! Every value here is immutable once built, so nets and regions can be
//! shared freely between concurrent runs.

mod counting;
mod net;
mod point;
mod region;

pub use counting::{covering_number, packing_number, CoveringEstimate, PackingBudget, PackingEstimate};
pub use net::{forward_net, greedy_net, Net, NetKind};
pub use point::{linf_distance, Point};
pub use region::{Aabb, BallKind, Region, RegionMode};

use thiserror::Error;

/// Largest supported ambient dimension; candidate grids grow like `(2/r)^d`.
pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension {0} outside 1..={MAX_DIM}")]
    InvalidDimension(usize),
    #[error("coordinate {index} = {value} outside [0, 1]")]
    OutOfDomain { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("scale {0} outside (0, 1]")]
    InvalidScale(f64),
    #[error("region has no candidate point")]
    EmptyRegion,
    #[error("box bounds inverted on axis {0}")]
    InvertedBox(usize),
}

pub(crate) fn check_dim(d: usize) -> Result<(), GeometryError> {
    if d == 0 || d > MAX_DIM {
        Err(GeometryError::InvalidDimension(d))
    } else {
        Ok(())
    }
}
