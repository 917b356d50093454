use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::instances::Instance;
use crate::Scalar;

/// Midpoint-rule settings. The per-axis resolution is `2^{-(k_T + extra_levels)}`,
/// reduced until the grid has at most `max_cells` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub extra_levels: u32,
    pub max_cells: u64,
    /// Largest accepted relative change between the two finest grids.
    pub tolerance: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { extra_levels: 4, max_cells: 1 << 24, tolerance: 0.05 }
    }
}

/// Cells with a midpoint gap at or below this are treated as maximizer.
pub const MAXIMIZER_TOLERANCE: f64 = 1e-9;

impl Quadrature {
    fn cells_per_axis(&self, k: u32, dim: usize) -> u64 {
        let mut level = (k + self.extra_levels).min(40);
        while level > 1 && (1u64 << level).saturating_pow(dim as u32) > self.max_cells {
            level -= 1;
        }
        1u64 << level
    }
}

/// Midpoint sum of `g(Δ(x))` over an `n^d` grid on the unit cube.
fn midpoint<S: Scalar>(instance: &Instance<S>, n: u64, g: &impl Fn(f64) -> f64) -> f64 {
    let d = instance.dim();
    let h = 1.0 / n as f64;
    let total = n.pow(d as u32);
    let mut x = vec![S::zero(); d];
    let mut sum = 0.0;
    for idx in 0..total {
        let mut rem = idx;
        for xj in x.iter_mut() {
            *xj = S::lit(((rem % n) as f64 + 0.5) * h);
            rem /= n;
        }
        sum += g(instance.gap_at(&x).as_f64());
    }
    sum * h.powi(d as i32)
}

/// Midpoint rule at the resolution for `k`, checked against one halving.
fn stable_integral<S: Scalar>(
    instance: &Instance<S>,
    k: u32,
    quad: &Quadrature,
    g: impl Fn(f64) -> f64,
) -> Result<f64, AnalysisError> {
    let n = quad.cells_per_axis(k, instance.dim());
    let fine = midpoint(instance, n, &g);
    let coarse = midpoint(instance, (n / 2).max(1), &g);
    let scale = fine.abs().max(coarse.abs());
    if scale > 0.0 && (fine - coarse).abs() > quad.tolerance * scale {
        return Err(AnalysisError::QuadratureUnstable { coarse, fine });
    }
    Ok(fine)
}

/// `∫_{X∖X★} dx / max(Δ(x), 2^{-k_T})^{d+1}`.
pub fn truncated_integral<S: Scalar>(instance: &Instance<S>, k_t: u32, quad: &Quadrature) -> Result<S, AnalysisError> {
    let floor = 0.5f64.powi(k_t as i32);
    let p = instance.dim() as i32 + 1;
    let v = stable_integral(instance, k_t, quad, |gap| {
        if gap > MAXIMIZER_TOLERANCE {
            gap.max(floor).powi(-p)
        } else {
            0.0
        }
    })?;
    Ok(S::lit(v))
}

/// `⌊log₂(T)/(d+2)⌋`, computed in integers.
pub fn kt_lower(horizon: u64, dim: usize) -> u32 {
    let step = dim as u32 + 2;
    let mut k = 0u32;
    while u128::from(horizon) >= 1u128 << ((k + 1) * step).min(127) && (k + 1) * step < 127 {
        k += 1;
    }
    k
}

/// `∫_{X∖X_{2^{-k}}} dx / Δ(x)^{d+1}` with `k = kt_lower(T, d)`.
pub fn lower_integral<S: Scalar>(instance: &Instance<S>, horizon: u64, quad: &Quadrature) -> Result<S, AnalysisError> {
    let k = kt_lower(horizon, instance.dim());
    let cut = 0.5f64.powi(k as i32);
    let p = instance.dim() as i32 + 1;
    let v = stable_integral(instance, k, quad, |gap| if gap > cut { gap.powi(-p) } else { 0.0 })?;
    Ok(S::lit(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kt_lower_small_cases() {
        assert_eq!(kt_lower(1, 1), 0);
        assert_eq!(kt_lower(7, 1), 0);
        assert_eq!(kt_lower(8, 1), 1);
        assert_eq!(kt_lower(4096, 1), 4);
        assert_eq!(kt_lower(4095, 1), 3);
        assert_eq!(kt_lower(u64::MAX, 3), 12);
    }

    #[test]
    fn cone_truncated_closed_form() {
        // 2·(∫_0^{1/8} 64 dx + ∫_{1/8}^{1/2} x^{-2} dx) = 2·(8 + 6)
        let cone = Instance::cone(vec![0.5], 1.0).unwrap();
        let v: f64 = truncated_integral(&cone, 3, &Quadrature::default()).unwrap();
        assert!((v - 28.0).abs() < 0.28, "{v}");
    }

    #[test]
    fn plateau_truncated_closed_form() {
        // 2·(∫_0^{1/8} 64 dx + ∫_{1/8}^{1/4} x^{-2} dx) = 2·(8 + 4)
        let p = Instance::plateau(vec![0.25], vec![0.75], 1.0).unwrap();
        let v: f64 = truncated_integral(&p, 3, &Quadrature::default()).unwrap();
        assert!((v - 24.0).abs() < 0.24, "{v}");
    }

    #[test]
    fn zero_truncation_is_bounded_by_volume() {
        for inst in [
            Instance::cone(vec![0.5], 1.0).unwrap(),
            Instance::plateau(vec![0.25, 0.1], vec![0.75, 0.4], 1.0).unwrap(),
        ] {
            let v: f64 = truncated_integral(&inst, 0, &Quadrature::default()).unwrap();
            assert!(v <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn cone_lower_closed_form() {
        // k = 4: 2·∫_{1/16}^{1/2} x^{-2} dx = 2·(16 − 2)
        let cone = Instance::cone(vec![0.5], 1.0).unwrap();
        let v: f64 = lower_integral(&cone, 4096, &Quadrature::default()).unwrap();
        assert!((v - 28.0).abs() < 0.28, "{v}");
    }

    #[test]
    fn lower_integral_vanishes_when_everything_is_optimal() {
        let flat = Instance::plateau(vec![0.0], vec![1.0], 1.0).unwrap();
        assert_eq!(lower_integral::<f64>(&flat, 4096, &Quadrature::default()).unwrap(), 0.0);
    }

    #[test]
    fn coarse_grid_is_flagged() {
        // A 4-cell grid cannot resolve the cone's cap.
        let cone = Instance::cone(vec![0.5], 1.0).unwrap();
        let quad = Quadrature { extra_levels: 0, max_cells: 4, tolerance: 0.01 };
        assert!(matches!(truncated_integral::<f64>(&cone, 6, &quad), Err(AnalysisError::QuadratureUnstable { .. })));
    }
}
