use serde::{Deserialize, Serialize};

use crate::geometry::{Point, Region};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Paco,
    PacoOneSided,
    PositiveGapUcb,
    GridUcb,
    Sous,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Paco, Algorithm::PacoOneSided, Algorithm::PositiveGapUcb, Algorithm::GridUcb, Algorithm::Sous];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Paco => "paco",
            Algorithm::PacoOneSided => "paco_one_sided",
            Algorithm::PositiveGapUcb => "positive_gap_ucb",
            Algorithm::GridUcb => "grid_ucb",
            Algorithm::Sous => "sous",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }
}

/// One pull.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct RoundRecord<S> {
    /// 1-based time step.
    pub t: u64,
    /// Phase index for PACO; 1 for the UCB comparators and SOUS.
    pub phase: u32,
    /// Index into [`RunTrace::arms`].
    pub arm: u32,
    /// Number of arms the policy was choosing among.
    pub active: u32,
    pub reward: S,
    /// Analytic gap of the pulled arm.
    pub gap: S,
}

/// Log of one PACO phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct PhaseRecord<S> {
    pub k: u32,
    pub radius: S,
    pub delta_k: S,
    /// Discretization scale `r_k / L`.
    pub scale: S,
    pub net_size: usize,
    pub separation: S,
    /// Active region `A_k` the net was drawn from.
    pub region: Region<S>,
    /// `A_{k+1}`; only set for completed phases.
    pub next_region: Option<Region<S>>,
    /// Position of the first net point in [`RunTrace::arms`].
    pub arm_offset: usize,
    pub pulls: Vec<u64>,
    pub means: Vec<S>,
    /// Round after which each net point was eliminated, if it was.
    pub eliminated_at: Vec<Option<u32>>,
    /// `|A_ℓ|` at the start of every round.
    pub active_sizes: Vec<usize>,
    /// Net indices of the survivors.
    pub survivors: Vec<usize>,
    /// Completed elimination rounds `ℓ_k`.
    pub rounds: u32,
    pub start_t: u64,
    pub end_t: u64,
    /// True when the radius reached `r_k/4` before the horizon.
    pub completed: bool,
    pub final_radius: S,
}

impl<S: Scalar> PhaseRecord<S> {
    pub fn net_point<'a>(&self, trace: &'a RunTrace<S>, i: usize) -> &'a Point<S> {
        &trace.arms[self.arm_offset + i]
    }
}

/// Full record of a run, enough to replay and audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct RunTrace<S> {
    pub algorithm: Algorithm,
    pub horizon: u64,
    pub arms: Vec<Point<S>>,
    pub rounds: Vec<RoundRecord<S>>,
    pub phases: Vec<PhaseRecord<S>>,
    /// Phase containing the final pull.
    pub k_t: u32,
    pub regret: S,
    /// Width `ε_{t−1}` for rounds `t = 2..=T`, in order (SOUS only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub widths: Vec<S>,
    /// Rounds whose `log((t−1)L)` term was clamped at zero (SOUS only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clamped_rounds: Vec<u64>,
}

impl<S: Scalar> RunTrace<S> {
    pub(crate) fn new(algorithm: Algorithm, horizon: u64) -> Self {
        Self {
            algorithm,
            horizon,
            arms: Vec::new(),
            rounds: Vec::with_capacity(horizon.min(1 << 24) as usize),
            phases: Vec::new(),
            k_t: 0,
            regret: S::zero(),
            widths: Vec::new(),
            clamped_rounds: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, record: RoundRecord<S>) {
        self.regret += record.gap;
        self.rounds.push(record);
    }

    pub fn total_pulls(&self) -> u64 {
        self.rounds.len() as u64
    }

    pub fn arm(&self, record: &RoundRecord<S>) -> &Point<S> {
        &self.arms[record.arm as usize]
    }

    /// Running pseudo-regret after each round.
    pub fn cumulative_regret(&self) -> Vec<S> {
        let mut acc = S::zero();
        self.rounds
            .iter()
            .map(|r| {
                acc += r.gap;
                acc
            })
            .collect()
    }

    /// Cumulative regret at the given 1-based times (clamped to the horizon).
    pub fn regret_at(&self, times: &[u64]) -> Vec<S> {
        let cum = self.cumulative_regret();
        times
            .iter()
            .map(|&t| if t == 0 || cum.is_empty() { S::zero() } else { cum[(t as usize).min(cum.len()) - 1] })
            .collect()
    }

    pub fn completed_phases(&self) -> impl Iterator<Item = &PhaseRecord<S>> {
        self.phases.iter().filter(|p| p.completed)
    }
}
