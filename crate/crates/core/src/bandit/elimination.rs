use rand::Rng;

use super::{confidence_radius, BanditError};
use crate::geometry::Net;
use crate::instances::{Instance, NoiseModel};
use crate::Scalar;

/// Mutable state of successive elimination inside one phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState<S> {
    pub radius: S,
    pub delta_k: S,
    /// Completed rounds; every active arm has been pulled exactly this often.
    pub ell: u32,
    /// Current confidence radius, `+∞` before the first round.
    pub u: S,
    /// Net indices still active, in net order.
    pub active: Vec<usize>,
    pub pulls: Vec<u64>,
    pub means: Vec<S>,
}

impl<S: Scalar> PhaseState<S> {
    pub fn new(net_size: usize, radius: S, delta_k: S) -> Self {
        Self {
            radius,
            delta_k,
            ell: 0,
            u: S::infinity(),
            active: (0..net_size).collect(),
            pulls: vec![0; net_size],
            means: vec![S::zero(); net_size],
        }
    }

    /// Stopping rule `u_{k,ℓ} <= r_k/4`.
    pub fn resolved(&self) -> bool {
        self.u <= self.radius / S::lit(4.0)
    }

    /// Streaming mean update.
    fn observe(&mut self, arm: usize, reward: S) {
        self.pulls[arm] += 1;
        let n = S::from_count(self.pulls[arm]);
        let step = (reward - self.means[arm]) / n;
        self.means[arm] += step;
    }

    /// Keeps `a` iff `μ̂(a) + u >= max_j μ̂(j) − u − r_k` (ties within 1e-12).
    fn eliminate(&mut self) -> Vec<usize> {
        let best = self.active.iter().map(|&a| self.means[a]).fold(S::neg_infinity(), S::max);
        let tol = S::rel_eps();
        let (u, r) = (self.u, self.radius);
        let means = &self.means;
        let mut dropped = Vec::new();
        self.active.retain(|&a| {
            let keep = means[a] + u >= best - u - r - tol;
            if !keep {
                dropped.push(a);
            }
            keep
        });
        dropped
    }
}

/// Result of [`run_elimination`].
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationOutcome<S> {
    /// Net indices of the final active set.
    pub survivors: Vec<usize>,
    /// Next time step.
    pub t: u64,
    pub completed: bool,
    pub rounds: u32,
    pub final_radius: S,
    pub active_sizes: Vec<usize>,
    pub eliminated_at: Vec<Option<u32>>,
    pub pulls: Vec<u64>,
    pub means: Vec<S>,
    /// `(net index, reward, active-set size)` for every pull, in order.
    pub sequence: Vec<(usize, S, usize)>,
}

/// Successive elimination on `net` up to accuracy `radius`.
///
/// Each round pulls every active arm once in net order, then recomputes the
/// confidence radius and drops arms by the retention rule. Stops once the
/// radius is at most `radius/4` or the horizon is hit; a mid-round abort
/// returns the current active set.
#[allow(clippy::too_many_arguments)]
pub fn run_elimination<S: Scalar, R: Rng + ?Sized>(
    net: &Net<S>,
    radius: S,
    delta_k: S,
    instance: &Instance<S>,
    noise: NoiseModel,
    mut t: u64,
    horizon: u64,
    rng: &mut R,
) -> Result<EliminationOutcome<S>, BanditError> {
    if !(delta_k > S::zero() && delta_k < S::one()) {
        return Err(BanditError::InvalidConfidence(delta_k.as_f64()));
    }
    let n = net.len();
    let means_true: Vec<S> = net.points.iter().map(|p| instance.eval_at(p.coords())).collect();
    let mut state = PhaseState::new(n, radius, delta_k);
    let mut eliminated_at = vec![None; n];
    let mut active_sizes = Vec::new();
    let mut sequence = Vec::new();
    let mut aborted = false;
    while !state.resolved() && t <= horizon {
        let size = state.active.len();
        active_sizes.push(size);
        for i in 0..size {
            if t > horizon {
                aborted = true;
                break;
            }
            let a = state.active[i];
            let y = noise.observe(means_true[a], rng);
            state.observe(a, y);
            sequence.push((a, y, size));
            t += 1;
        }
        if aborted {
            break;
        }
        state.ell += 1;
        state.u = confidence_radius(u64::from(state.ell), n, delta_k)?;
        for a in state.eliminate() {
            eliminated_at[a] = Some(state.ell);
        }
    }
    Ok(EliminationOutcome {
        survivors: state.active.clone(),
        t,
        completed: state.resolved(),
        rounds: state.ell,
        final_radius: state.u,
        active_sizes,
        eliminated_at,
        pulls: state.pulls,
        means: state.means,
        sequence,
    })
}
