//! Phased adaptive covering with successive elimination, its forward-cover
//! variant for one-sided Lipschitz rewards, and two UCB comparators.

mod elimination;
mod paco;
mod trace;
mod ucb;

pub use elimination::{run_elimination, EliminationOutcome, PhaseState};
pub use paco::{run_paco, run_paco_one_sided, run_paco_with, PacoVariant};
pub use trace::{Algorithm, PhaseRecord, RoundRecord, RunTrace};
pub use ucb::{grid_arms, run_grid_ucb_baseline, run_positive_gap_ucb};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::instances::InstanceError;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BanditError {
    #[error("confidence parameter must lie in (0, 1), got {0}")]
    InvalidConfidence(f64),
    #[error("horizon must be at least 1")]
    InvalidHorizon,
    #[error("declared Lipschitz constant {declared} is below the instance constant {actual}")]
    InvalidLipschitz { declared: f64, actual: f64 },
    #[error("gap parameter must be positive, got {0}")]
    InvalidGap(f64),
    #[error("no net point at scale {scale} lies in the maximizer; the gap assumption does not hold")]
    GapViolated { scale: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Global confidence level `δ` and its per-phase split `δ_k = 6δ/(π²k²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ConfidenceParams<S> {
    pub delta: S,
}

impl<S: Scalar> ConfidenceParams<S> {
    pub fn new(delta: S) -> Result<Self, BanditError> {
        if delta > S::zero() && delta < S::one() {
            Ok(Self { delta })
        } else {
            Err(BanditError::InvalidConfidence(delta.as_f64()))
        }
    }

    /// `δ = T^{-3}`; horizon 1 would give `δ = 1`, so it falls back to 1/8.
    pub fn for_horizon(horizon: u64) -> Result<Self, BanditError> {
        if horizon == 0 {
            return Err(BanditError::InvalidHorizon);
        }
        let delta = if horizon == 1 { S::lit(0.125) } else { S::from_count(horizon).powi(-3) };
        Self::new(delta)
    }

    pub fn phase_budget(&self, k: u32) -> S {
        let k = S::from_count(u64::from(k));
        S::lit(6.0) * self.delta / (S::PI() * S::PI() * k * k)
    }
}

/// `u_{k,ℓ} = sqrt((2/ℓ)·ln(π²ℓ²|S_k| / (6δ_k)))`.
///
/// The logarithm is expanded into a sum so that tiny `δ_k` does not overflow.
pub fn confidence_radius<S: Scalar>(ell: u64, net_size: usize, delta_k: S) -> Result<S, BanditError> {
    if !(delta_k > S::zero() && delta_k < S::one()) {
        return Err(BanditError::InvalidConfidence(delta_k.as_f64()));
    }
    let ell = S::from_count(ell.max(1));
    let n = S::from_count(net_size.max(1) as u64);
    let log_term = S::lit(2.0) * S::PI().ln() + S::lit(2.0) * ell.ln() + n.ln() - S::lit(6.0).ln() - delta_k.ln();
    Ok((S::lit(2.0) / ell * log_term).sqrt())
}

pub(crate) fn check_run<S: Scalar>(horizon: u64, lipschitz: S, actual: S) -> Result<(), BanditError> {
    if horizon == 0 {
        return Err(BanditError::InvalidHorizon);
    }
    if !(lipschitz > S::zero() && lipschitz.is_finite() && lipschitz >= actual) {
        return Err(BanditError::InvalidLipschitz { declared: lipschitz.as_f64(), actual: actual.as_f64() });
    }
    Ok(())
}
