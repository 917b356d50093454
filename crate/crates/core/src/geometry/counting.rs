use serde::{Deserialize, Serialize};

use super::{greedy_net, linf_distance, GeometryError, Region};
use crate::Scalar;

/// Grid used by [`packing_number`]. `pitch = None` means `r/2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PackingBudget {
    pub pitch: Option<f64>,
}

impl PackingBudget {
    pub fn with_pitch(pitch: f64) -> Self {
        Self { pitch: Some(pitch) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PackingEstimate {
    /// Size of a set of candidate points with pairwise distances `> scale`.
    pub count: usize,
    pub scale: f64,
    pub pitch: f64,
}

/// Certified lower bound on the packing number `N(region, r)`: the greedy
/// strictly-`r`-separated subset of the candidate grid. Deterministic for a
/// given pitch.
pub fn packing_number<S: Scalar>(
    region: &Region<S>,
    r: S,
    budget: PackingBudget,
) -> Result<PackingEstimate, GeometryError> {
    if !(r > S::zero() && r <= S::one()) {
        return Err(GeometryError::InvalidScale(r.as_f64()));
    }
    let pitch = budget.pitch.map(S::lit).unwrap_or(r / S::lit(2.0));
    if !(pitch > S::zero()) {
        return Err(GeometryError::InvalidScale(pitch.as_f64()));
    }
    let est = |count| PackingEstimate { count, scale: r.as_f64(), pitch: pitch.as_f64() };
    if region.is_empty() {
        return Ok(est(0));
    }
    let candidates = region.candidates(pitch);
    let threshold = r * (S::one() + S::rel_eps());
    // Candidates are sorted, so only kept points within `r` along the first
    // axis can conflict; a sliding window keeps this near-linear.
    let mut kept: Vec<&[S]> = Vec::new();
    let mut window_start = 0usize;
    for c in &candidates {
        while window_start < kept.len() && c[0] - kept[window_start][0] > threshold {
            window_start += 1;
        }
        if kept[window_start..].iter().all(|k| linf_distance(k, c) > threshold) {
            kept.push(c);
        }
    }
    Ok(est(kept.len()))
}

/// Covering-number audit for a region at radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringEstimate {
    /// `|greedy_net(region, r)|`, an upper-bound proxy for `C_net · M(region, r)`.
    pub proxy: usize,
    /// Packing lower bound at `2r`; `N(Y, 2r) <= M(Y, r)`.
    pub packing_at_double: usize,
    /// Packing lower bound at `r`; `M(Y, r) <= N(Y, r)`.
    pub packing_at_scale: usize,
    pub scale: f64,
}

/// Covering proxy plus the packing sandwich `N(Y,2r) <= M(Y,r) <= N(Y,r)`.
/// Radii of at least one return the trivial single-point cover, since any
/// subset of the unit cube has diameter at most one.
pub fn covering_number<S: Scalar>(region: &Region<S>, r: S) -> Result<CoveringEstimate, GeometryError> {
    if !(r > S::zero()) {
        return Err(GeometryError::InvalidScale(r.as_f64()));
    }
    if region.is_empty() {
        return Ok(CoveringEstimate { proxy: 0, packing_at_double: 0, packing_at_scale: 0, scale: r.as_f64() });
    }
    let packing = |s: S| -> Result<usize, GeometryError> {
        if s >= S::one() {
            // Diameter <= 1 leaves no pair strictly farther apart than s.
            Ok(usize::from(!region.candidates(S::lit(0.5)).is_empty()))
        } else {
            Ok(packing_number(region, s, PackingBudget::default())?.count)
        }
    };
    let proxy = if r >= S::one() {
        usize::from(!region.candidates(S::lit(0.5)).is_empty())
    } else {
        match greedy_net(region, r) {
            Ok(net) => net.len(),
            Err(GeometryError::EmptyRegion) => 0,
            Err(e) => return Err(e),
        }
    };
    Ok(CoveringEstimate {
        proxy,
        packing_at_double: packing(r * S::lit(2.0))?,
        packing_at_scale: packing(r)?,
        scale: r.as_f64(),
    })
}
