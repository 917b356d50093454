use rand::Rng;

use super::trace::{Algorithm, RoundRecord, RunTrace};
use super::{check_run, BanditError};
use crate::geometry::{forward_net, Point};
use crate::instances::{Instance, NoiseModel};
use crate::Scalar;

/// Uniform grid of pitch `h = T^{-1/(d+2)}`: coordinates `i·h` for
/// `0 <= i <= ⌊1/h⌋` on every axis, in lexicographic order.
pub fn grid_arms<S: Scalar>(dim: usize, horizon: u64) -> Vec<Point<S>> {
    let h = (horizon.max(1) as f64).powf(-1.0 / (dim as f64 + 2.0));
    let n = (1.0 / h + 1e-9).floor() as usize;
    let axis: Vec<S> = (0..=n).map(|i| S::lit((i as f64 * h).min(1.0))).collect();
    let mut out = Vec::with_capacity((n + 1).pow(dim as u32));
    let mut idx = vec![0usize; dim];
    loop {
        out.push(Point::from_vec(idx.iter().map(|&i| axis[i]).collect()));
        let mut j = dim;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] <= n {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// UCB1 on a uniform grid; the worst-case comparator.
pub fn run_grid_ucb_baseline<S: Scalar, R: Rng + ?Sized>(
    instance: &Instance<S>,
    noise: NoiseModel,
    horizon: u64,
    rng: &mut R,
) -> Result<RunTrace<S>, BanditError> {
    if horizon == 0 {
        return Err(BanditError::InvalidHorizon);
    }
    let arms = grid_arms(instance.dim(), horizon);
    Ok(ucb1(instance, noise, arms, horizon, Algorithm::GridUcb, rng))
}

/// Finite-armed reduction for instances whose gap is at least `gap` off the
/// maximizer: UCB1 on a forward net at scale `gap/(4L)`.
pub fn run_positive_gap_ucb<S: Scalar, R: Rng + ?Sized>(
    instance: &Instance<S>,
    noise: NoiseModel,
    horizon: u64,
    gap: S,
    lipschitz: S,
    rng: &mut R,
) -> Result<RunTrace<S>, BanditError> {
    check_run(horizon, lipschitz, instance.lipschitz())?;
    if !(gap > S::zero()) {
        return Err(BanditError::InvalidGap(gap.as_f64()));
    }
    let scale = (gap / (S::lit(4.0) * lipschitz)).min(S::one());
    let net = forward_net(&instance.domain(), scale)?;
    let tol = S::lit(1e-12).max(S::rel_eps());
    if !net.points.iter().any(|p| instance.gap_at(p.coords()) <= tol) {
        return Err(BanditError::GapViolated { scale: scale.as_f64() });
    }
    Ok(ucb1(instance, noise, net.points, horizon, Algorithm::PositiveGapUcb, rng))
}

/// Index `μ̂ + σ·sqrt(2 ln t / n)` with `σ` the noise scale; each arm is
/// pulled once first, ties go to the lowest index.
fn ucb1<S: Scalar, R: Rng + ?Sized>(
    instance: &Instance<S>,
    noise: NoiseModel,
    arms: Vec<Point<S>>,
    horizon: u64,
    algorithm: Algorithm,
    rng: &mut R,
) -> RunTrace<S> {
    let k = arms.len();
    let sigma: S = noise.scale();
    let means_true: Vec<S> = arms.iter().map(|p| instance.eval_at(p.coords())).collect();
    let gaps: Vec<S> = arms.iter().map(|p| instance.gap_at(p.coords())).collect();
    let mut pulls = vec![0u64; k];
    let mut means = vec![S::zero(); k];
    let mut trace = RunTrace::new(algorithm, horizon);
    for t in 1..=horizon {
        let a = if (t as usize) <= k {
            t as usize - 1
        } else {
            let log_t = S::lit(2.0) * S::from_count(t).ln();
            let mut best = 0;
            let mut best_index = S::neg_infinity();
            for i in 0..k {
                let index = means[i] + sigma * (log_t / S::from_count(pulls[i])).sqrt();
                if index > best_index {
                    best_index = index;
                    best = i;
                }
            }
            best
        };
        let y = noise.observe(means_true[a], rng);
        pulls[a] += 1;
        let step = (y - means[a]) / S::from_count(pulls[a]);
        means[a] += step;
        trace.push(RoundRecord { t, phase: 1, arm: a as u32, active: k as u32, reward: y, gap: gaps[a] });
    }
    trace.arms = arms;
    trace.k_t = 1;
    trace
}
