use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::geometry::{covering_number, packing_number, PackingBudget, Region};
use crate::instances::{Instance, LevelSet};
use crate::Scalar;

/// Separation constant of the greedy nets.
pub const C_SEP: f64 = 0.5;

pub(crate) fn level_region<S: Scalar>(instance: &Instance<S>, r: S) -> Result<Region<S>, AnalysisError> {
    match instance.level_set(r) {
        LevelSet::Exact { region, .. } => Ok(region),
        LevelSet::Predicate { .. } => Err(AnalysisError::NoClosedForm),
    }
}

/// `X_r ∖ X_{r'}` for `r' < r`, with the inner set removed as closed holes.
pub(crate) fn shell<S: Scalar>(instance: &Instance<S>, outer: S, inner: S) -> Result<Region<S>, AnalysisError> {
    let hole = level_region(instance, inner)?;
    Ok(level_region(instance, outer)?.minus(hole.cover_boxes().to_vec()))
}

/// Packing number that also accepts scales of one or more, where at most
/// one point fits.
pub(crate) fn packing<S: Scalar>(region: &Region<S>, r: S) -> Result<usize, AnalysisError> {
    if r >= S::one() {
        let est = packing_number(region, S::lit(0.5), PackingBudget::default())?;
        return Ok(est.count.min(1));
    }
    Ok(packing_number(region, r, PackingBudget::default())?.count)
}

/// Largest `k >= 2` with `T > 4^{k−2}·M(X_{2^{-k}}, 2^{-(k−2)}/L)`, or 1.
/// `M` is the greedy covering proxy of the closed-form level set.
pub fn kt_from_budget<S: Scalar>(instance: &Instance<S>, horizon: u64, lipschitz: S) -> Result<u32, AnalysisError> {
    let mut best = 1;
    let mut k = 2u32;
    // M >= 1, so the relation fails for good once 4^{k−2} >= T.
    while k < 60 && 4f64.powi(k as i32 - 2) < horizon as f64 {
        let level = level_region(instance, S::lit(0.5).powi(k as i32))?;
        let scale = S::lit(0.5).powi(k as i32 - 2) / lipschitz;
        let m = covering_number(&level, scale)?.proxy.max(1);
        if (horizon as f64) > 4f64.powi(k as i32 - 2) * m as f64 {
            best = k;
        }
        k += 1;
    }
    Ok(best)
}

/// The two packing sums of the regret decomposition, with unit constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingSum {
    pub k_t: u32,
    /// `Σ_k 2^k N(X_{2^{-k}} ∖ X_{2^{-(k+1)}}, 2^{-k}/L)`.
    pub first: f64,
    /// `2^{-(k_T+1)} Σ_k 2^{2k} N(X_{2^{-(k_T+1)}} ∖ X★, 2^{-k}/L)`.
    pub second: f64,
    /// Same sums with packings at the scale `c_sep·2^{-k}/L`.
    pub first_normalized: f64,
    pub second_normalized: f64,
    /// Raw shell packings, `k = 1..=k_T`.
    pub shell_counts: Vec<usize>,
    /// Raw packings of `X_{2^{-(k_T+1)}} ∖ X★`, `k = 1..=k_T`.
    pub tail_counts: Vec<usize>,
}

pub fn packing_sum_bound<S: Scalar>(instance: &Instance<S>, k_t: u32, lipschitz: S) -> Result<PackingSum, AnalysisError> {
    let half = |k: u32| S::lit(0.5).powi(k as i32);
    let tail = level_region(instance, half(k_t + 1))?.minus(instance.maximizer().cover_boxes().to_vec());
    let c_sep = S::lit(C_SEP);
    let mut out = PackingSum {
        k_t,
        first: 0.0,
        second: 0.0,
        first_normalized: 0.0,
        second_normalized: 0.0,
        shell_counts: Vec::new(),
        tail_counts: Vec::new(),
    };
    for k in 1..=k_t {
        let scale = half(k) / lipschitz;
        let annulus = shell(instance, half(k), half(k + 1))?;
        let a = packing(&annulus, scale)?;
        let a_norm = packing(&annulus, c_sep * scale)?;
        let b = packing(&tail, scale)?;
        let b_norm = packing(&tail, c_sep * scale)?;
        let w1 = 2f64.powi(k as i32);
        let w2 = 4f64.powi(k as i32) * 0.5f64.powi(k_t as i32 + 1);
        out.first += w1 * a as f64;
        out.first_normalized += w1 * a_norm as f64;
        out.second += w2 * b as f64;
        out.second_normalized += w2 * b_norm as f64;
        out.shell_counts.push(a);
        out.tail_counts.push(b);
    }
    Ok(out)
}
