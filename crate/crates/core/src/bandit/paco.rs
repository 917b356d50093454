use rand::Rng;
use serde::{Deserialize, Serialize};

use super::trace::{Algorithm, PhaseRecord, RoundRecord, RunTrace};
use super::{check_run, run_elimination, BanditError, ConfidenceParams};
use crate::geometry::{forward_net, greedy_net, Aabb, BallKind, Net, Region};
use crate::instances::{Instance, NoiseModel};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PacoVariant {
    /// Symmetric balls; `A_{k+1} = X ∩ ∪ B(a, r_k/L)`.
    Symmetric,
    /// Forward nets; `A_{k+1} = A_k ∩ ∪ B⁺(a, r_k/L)`.
    OneSided,
}

/// PACO with symmetric covers.
pub fn run_paco<S: Scalar, R: Rng + ?Sized>(
    instance: &Instance<S>,
    noise: NoiseModel,
    horizon: u64,
    delta: S,
    lipschitz: S,
    rng: &mut R,
) -> Result<RunTrace<S>, BanditError> {
    run_paco_with(instance, noise, horizon, delta, lipschitz, PacoVariant::Symmetric, rng)
}

/// PACO with forward covers, for rewards that are Lipschitz only along `x ⪯ y`.
pub fn run_paco_one_sided<S: Scalar, R: Rng + ?Sized>(
    instance: &Instance<S>,
    noise: NoiseModel,
    horizon: u64,
    delta: S,
    lipschitz: S,
    rng: &mut R,
) -> Result<RunTrace<S>, BanditError> {
    run_paco_with(instance, noise, horizon, delta, lipschitz, PacoVariant::OneSided, rng)
}

pub fn run_paco_with<S: Scalar, R: Rng + ?Sized>(
    instance: &Instance<S>,
    noise: NoiseModel,
    horizon: u64,
    delta: S,
    lipschitz: S,
    variant: PacoVariant,
    rng: &mut R,
) -> Result<RunTrace<S>, BanditError> {
    check_run(horizon, lipschitz, instance.lipschitz())?;
    let conf = ConfidenceParams::new(delta)?;
    let algorithm = match variant {
        PacoVariant::Symmetric => Algorithm::Paco,
        PacoVariant::OneSided => Algorithm::PacoOneSided,
    };
    let mut trace = RunTrace::new(algorithm, horizon);
    let mut region = instance.domain();
    let mut t = 1u64;
    let mut k = 1u32;
    while t <= horizon {
        let radius = S::lit(0.5).powi(k as i32);
        let delta_k = conf.phase_budget(k);
        let scale = radius / lipschitz;
        let net = discretize(&region, scale, variant)?;
        let out = run_elimination(&net, radius, delta_k, instance, noise, t, horizon, rng)?;

        let offset = trace.arms.len();
        trace.arms.extend(net.points.iter().cloned());
        for (i, &(a, reward, active)) in out.sequence.iter().enumerate() {
            let gap = instance.gap_at(net.points[a].coords());
            trace.push(RoundRecord {
                t: t + i as u64,
                phase: k,
                arm: (offset + a) as u32,
                active: active as u32,
                reward,
                gap,
            });
        }

        let next_region = out.completed.then(|| {
            let kind = match variant {
                PacoVariant::Symmetric => BallKind::Symmetric,
                PacoVariant::OneSided => BallKind::Forward,
            };
            let balls: Vec<Aabb<S>> = out.survivors.iter().map(|&a| Aabb::ball(&net.points[a], scale, kind)).collect();
            match variant {
                PacoVariant::Symmetric => region.domain_union(&balls),
                PacoVariant::OneSided => region.intersect_union(&balls),
            }
        });

        trace.phases.push(PhaseRecord {
            k,
            radius,
            delta_k,
            scale,
            net_size: net.len(),
            separation: net.separation,
            region: region.clone(),
            next_region: next_region.clone(),
            arm_offset: offset,
            pulls: out.pulls,
            means: out.means,
            eliminated_at: out.eliminated_at,
            active_sizes: out.active_sizes,
            survivors: out.survivors,
            rounds: out.rounds,
            start_t: t,
            end_t: out.t - 1,
            completed: out.completed,
            final_radius: out.final_radius,
        });
        trace.k_t = k;
        t = out.t;
        if let Some(next) = next_region {
            region = next;
        }
        k += 1;
    }
    Ok(trace)
}

/// `O(A_k, r_k/L)`. Scales of at least the domain side give a single point
/// for symmetric covers; forward covers use the scale-1 forward net.
fn discretize<S: Scalar>(region: &Region<S>, scale: S, variant: PacoVariant) -> Result<Net<S>, BanditError> {
    let capped = scale.min(S::one());
    let mut net = match variant {
        PacoVariant::Symmetric => greedy_net(region, capped)?,
        PacoVariant::OneSided => forward_net(region, capped)?,
    };
    if scale >= S::one() && variant == PacoVariant::Symmetric {
        net.points.truncate(1);
        net.scale = scale;
        net.separation = scale;
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn short_horizon_stays_in_phase_one() {
        let cone = Instance::cone(vec![0.5], 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tr = run_paco(&cone, NoiseModel::GaussianUnit, 10, 0.1, 1.0, &mut rng).unwrap();
        assert_eq!(tr.k_t, 1);
        assert_eq!(tr.total_pulls(), 10);
        assert!(tr.rounds.iter().all(|r| r.phase == 1));
    }

    #[test]
    fn budget_is_exact() {
        let cone = Instance::cone(vec![0.3, 0.6], 1.0).unwrap();
        for horizon in [1, 2, 17, 999, 5000] {
            let mut rng = ChaCha8Rng::seed_from_u64(horizon);
            let tr = run_paco(&cone, NoiseModel::GaussianUnit, horizon, 0.05, 1.0, &mut rng).unwrap();
            assert_eq!(tr.total_pulls(), horizon);
            let times: Vec<u64> = tr.rounds.iter().map(|r| r.t).collect();
            assert_eq!(times, (1..=horizon).collect::<Vec<_>>());
        }
    }

    #[test]
    fn small_lipschitz_gives_single_point_net() {
        let cone = Instance::cone(vec![0.5], 0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tr = run_paco(&cone, NoiseModel::Zero, 20_000, 0.1, 0.25, &mut rng).unwrap();
        assert_eq!(tr.phases[0].net_size, 1);
        assert!(tr.phases[0].completed);
    }

    #[test]
    fn rejects_invalid_inputs() {
        let cone = Instance::cone(vec![0.5], 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            run_paco(&cone, NoiseModel::Zero, 10, 0.1, 1.0, &mut rng).unwrap_err(),
            BanditError::InvalidLipschitz { declared: 1.0, actual: 2.0 }
        );
        assert!(matches!(run_paco(&cone, NoiseModel::Zero, 0, 0.1, 2.0, &mut rng), Err(BanditError::InvalidHorizon)));
        assert!(matches!(
            run_paco(&cone, NoiseModel::Zero, 10, 1.0, 2.0, &mut rng),
            Err(BanditError::InvalidConfidence(_))
        ));
    }
}
