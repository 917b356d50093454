//! Instance-adaptive Lipschitz bandits on `[0,1]^d` under the L∞ metric.
//!
//! The algorithms and analysis routines are generic over the [`Scalar`]
//! type (`f32` or `f64`); the aliases below fix it to `f64`.

mod scalar;

pub mod analysis;
pub mod bandit;
pub mod experts;
pub mod geometry;
pub mod instances;

pub use scalar::Scalar;

pub type Point = geometry::Point<f64>;
pub type Aabb = geometry::Aabb<f64>;
pub type Region = geometry::Region<f64>;
pub type Net = geometry::Net<f64>;
pub type Instance = instances::Instance<f64>;
pub type LevelSet = instances::LevelSet<f64>;
pub type ExpertDistribution = instances::ExpertDistribution<f64>;
pub type RunTrace = bandit::RunTrace<f64>;
pub type RoundRecord = bandit::RoundRecord<f64>;
pub type PhaseRecord = bandit::PhaseRecord<f64>;
pub type ExpertState = experts::ExpertState<f64>;
