//! Synthetic Lipschitz environments with closed-form gap functions, level
//! sets and dimensions, plus reward-noise and expert-function samplers.

mod expert;
mod family;
mod noise;

pub use expert::{ExpertDistribution, ExpertFunction};
pub use family::{Family, FamilyKind, Instance, LevelSet};
pub use noise::NoiseModel;

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("point outside the instance domain: {0}")]
    OutOfDomain(#[from] GeometryError),
    #[error("invalid instance parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> InstanceError {
    InstanceError::InvalidParameter { name, reason: reason.into() }
}
