use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Additive reward noise; every variant is 1-sub-Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// Standard normal noise.
    GaussianUnit,
    /// Reward drawn as Bernoulli with success probability `clamp(mean, 0, 1)`;
    /// centred Bernoulli noise is 1/2-sub-Gaussian.
    Bernoulli,
    /// Deterministic rewards.
    Zero,
}

impl NoiseModel {
    /// Draws one reward with the given mean.
    pub fn observe<S: Scalar, R: Rng + ?Sized>(&self, mean: S, rng: &mut R) -> S {
        match self {
            NoiseModel::GaussianUnit => {
                let z: f64 = StandardNormal.sample(rng);
                mean + S::lit(z)
            }
            NoiseModel::Bernoulli => {
                let p = mean.max(S::zero()).min(S::one()).as_f64();
                if rng.gen::<f64>() < p {
                    S::one()
                } else {
                    S::zero()
                }
            }
            NoiseModel::Zero => mean,
        }
    }

    /// Sub-Gaussian scale used by the UCB comparators; zero for deterministic rewards.
    pub fn scale<S: Scalar>(&self) -> S {
        match self {
            NoiseModel::Zero => S::zero(),
            _ => S::one(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::GaussianUnit => "gaussian_unit",
            NoiseModel::Bernoulli => "bernoulli",
            NoiseModel::Zero => "zero",
        }
    }
}
