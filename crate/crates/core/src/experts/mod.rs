//! Full-information play against uniformly Lipschitz reward functions:
//! sequential optimism with uniform sampling over a static grid.

use rand::Rng;
use thiserror::Error;

use crate::bandit::{Algorithm, RoundRecord, RunTrace};
use crate::geometry::{greedy_net, GeometryError, Net};
use crate::instances::{ExpertDistribution, InstanceError};
use crate::Scalar;

/// Largest dimension accepted by [`run_sous`]; the grid has `~T^{d/2}` points.
pub const MAX_EXPERT_DIM: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpertsError {
    #[error("width is defined from round 2 on, got round {0}")]
    InvalidRound(u64),
    #[error("confidence parameter must lie in (0, 1), got {0}")]
    InvalidConfidence(f64),
    #[error("horizon must be at least 1")]
    InvalidHorizon,
    #[error("expert runs support d <= {MAX_EXPERT_DIM}, got {0}")]
    DimensionTooLarge(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// `ε_{t−1} = 2L·sqrt((2d·log((t−1)L) + log(1/δ_{t−1})) / (t−1))` with
/// `δ_{t−1} = 6δ/(π²(t−1)²)`. The first logarithm is clamped at zero.
pub fn epsilon_width<S: Scalar>(t: u64, dim: usize, lipschitz: S, delta: S) -> Result<S, ExpertsError> {
    Ok(width_terms(t, dim, lipschitz, delta)?.0)
}

/// True when `(t−1)L < 1`, i.e. the width at round `t` used the clamp.
pub fn width_is_clamped<S: Scalar>(t: u64, lipschitz: S) -> bool {
    t >= 2 && S::from_count(t - 1) * lipschitz < S::one()
}

fn width_terms<S: Scalar>(t: u64, dim: usize, lipschitz: S, delta: S) -> Result<(S, bool), ExpertsError> {
    if t < 2 {
        return Err(ExpertsError::InvalidRound(t));
    }
    if !(delta > S::zero() && delta < S::one()) {
        return Err(ExpertsError::InvalidConfidence(delta.as_f64()));
    }
    let s = S::from_count(t - 1);
    let raw = (s * lipschitz).ln();
    let clamped = raw < S::zero();
    // log(1/δ_s) = log(π² s² / (6δ))
    let log_inv_delta = S::lit(2.0) * S::PI().ln() + S::lit(2.0) * s.ln() - S::lit(6.0).ln() - delta.ln();
    let inner = S::lit(2.0) * S::from_count(dim as u64) * raw.max(S::zero()) + log_inv_delta;
    Ok((S::lit(2.0) * lipschitz * (inner / s).sqrt(), clamped))
}

/// State of a run after choosing `A_t` and before sampling round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertState<S> {
    pub t: u64,
    pub grid: Net<S>,
    /// `f̂_{t−1}` at every grid point.
    pub means: Vec<S>,
    /// `ε_{t−1}`; `+∞` at round 1 where `A_1` is the whole grid.
    pub epsilon: S,
    /// Grid indices of `A_t`, in grid order.
    pub active: Vec<usize>,
    pub clamped: bool,
}

/// Grid spacing `h = 1/(L·√T)`, capped at 1.
pub fn grid_spacing<S: Scalar>(horizon: u64, lipschitz: S) -> S {
    (S::one() / (lipschitz * S::from_count(horizon).sqrt())).min(S::one())
}

pub fn run_sous<S: Scalar, R: Rng + ?Sized>(
    dist: &ExpertDistribution<S>,
    horizon: u64,
    delta: S,
    rng: &mut R,
) -> Result<RunTrace<S>, ExpertsError> {
    run_sous_with(dist, horizon, delta, rng, |_| {})
}

/// [`run_sous`] with a hook that sees the state at every round.
pub fn run_sous_with<S: Scalar, R: Rng + ?Sized>(
    dist: &ExpertDistribution<S>,
    horizon: u64,
    delta: S,
    rng: &mut R,
    mut observer: impl FnMut(&ExpertState<S>),
) -> Result<RunTrace<S>, ExpertsError> {
    if horizon == 0 {
        return Err(ExpertsError::InvalidHorizon);
    }
    if !(delta > S::zero() && delta < S::one()) {
        return Err(ExpertsError::InvalidConfidence(delta.as_f64()));
    }
    let base = dist.base();
    let d = base.dim();
    if d > MAX_EXPERT_DIM {
        return Err(ExpertsError::DimensionTooLarge(d));
    }
    let lipschitz = dist.lipschitz();
    let grid = greedy_net(&base.domain(), grid_spacing(horizon, lipschitz))?;
    let n = grid.len();
    let base_vals: Vec<S> = grid.points.iter().map(|p| base.eval_at(p.coords())).collect();
    let shape_vals: Vec<S> = grid.points.iter().map(|p| dist.shape_at(p.coords())).collect();
    let gaps: Vec<S> = grid.points.iter().map(|p| base.gap_at(p.coords())).collect();

    let mut state = ExpertState {
        t: 1,
        grid,
        means: vec![S::zero(); n],
        epsilon: S::infinity(),
        active: (0..n).collect(),
        clamped: false,
    };
    let mut trace = RunTrace::new(Algorithm::Sous, horizon);
    trace.widths.reserve(horizon.saturating_sub(1) as usize);
    for t in 1..=horizon {
        state.t = t;
        if t >= 2 {
            let (eps, clamped) = width_terms(t, d, lipschitz, delta)?;
            state.epsilon = eps;
            state.clamped = clamped;
            trace.widths.push(eps);
            if clamped {
                trace.clamped_rounds.push(t);
            }
            let best = state.means.iter().copied().fold(S::neg_infinity(), S::max);
            let threshold = best - eps;
            state.active.clear();
            state.active.extend((0..n).filter(|&i| state.means[i] >= threshold));
        }
        observer(&state);

        let pick = state.active[rng.gen_range(0..state.active.len())];
        let f_t = dist.sample(rng);
        let sign = f_t.sign();
        let reward = dist.combine(sign, base_vals[pick], shape_vals[pick]);
        trace.push(RoundRecord {
            t,
            phase: 1,
            arm: pick as u32,
            active: state.active.len() as u32,
            reward,
            gap: gaps[pick],
        });
        let inv_t = S::one() / S::from_count(t);
        for i in 0..n {
            let v = dist.combine(sign, base_vals[i], shape_vals[i]);
            let step = (v - state.means[i]) * inv_t;
            state.means[i] += step;
        }
    }
    trace.arms = state.grid.points;
    trace.k_t = 1;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Instance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn width_collapses_to_two() {
        let delta = (-1.0f64).exp() * std::f64::consts::PI.powi(2) / 6.0;
        assert!((epsilon_width(2, 1, 1.0, delta).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn width_rejects_round_one() {
        assert_eq!(epsilon_width(1, 1, 1.0f64, 0.1), Err(ExpertsError::InvalidRound(1)));
    }

    #[test]
    fn clamp_flags_small_lipschitz() {
        assert!(width_is_clamped(2, 0.5f64));
        assert!(!width_is_clamped(3, 0.5f64));
        let a = epsilon_width(2, 1, 0.5f64, 0.1).unwrap();
        let expected = 2.0 * 0.5 * (std::f64::consts::PI.powi(2) / 0.6).ln().sqrt();
        assert!((a - expected).abs() < 1e-12);
    }

    #[test]
    fn degenerate_plateau_has_exact_means() {
        let dist = ExpertDistribution::degenerate(Instance::<f64>::plateau(vec![0.25], vec![0.75], 1.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut checked = 0;
        run_sous_with(&dist, 400, 0.1, &mut rng, |s| {
            if s.t >= 2 {
                for (i, p) in s.grid.points.iter().enumerate() {
                    let f = dist.base().eval_at(p.coords());
                    assert!((s.means[i] - f).abs() < 1e-12);
                    // max f̂ = f★, so A_t is the grid part of X_ε.
                    assert_eq!(s.active.contains(&i), dist.base().gap_at(p.coords()) <= s.epsilon);
                }
                checked += 1;
            }
        })
        .unwrap();
        assert_eq!(checked, 399);
    }

    #[test]
    fn rejects_three_dimensions() {
        let dist = ExpertDistribution::degenerate(Instance::cone(vec![0.5, 0.5, 0.5], 1.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(run_sous(&dist, 10, 0.1, &mut rng).unwrap_err(), ExpertsError::DimensionTooLarge(3));
    }
}
