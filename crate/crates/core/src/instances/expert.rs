use rand::Rng;

use super::{invalid, Instance, InstanceError};
use crate::geometry::{linf_distance, Point};
use crate::Scalar;

/// Distribution over reward functions `f_t = f + σ_t·a·s` with `σ_t` a
/// Rademacher sign, `a` the amplitude and `s` a fixed tent-shaped shape.
///
/// The shape is `s(x) = g(x)·min(f(x), 1 − f(x))` with
/// `g(x) = 1 − 4‖x − ½‖∞`, so `|σ a s| <= min(f, 1 − f)` and every
/// realisation stays in `[0, 1]`. The clamp is kept as a guard but never
/// binds, which makes `E[f_t] = f` exact.
#[derive(Debug, Clone)]
pub struct ExpertDistribution<S> {
    base: Instance<S>,
    amplitude: S,
}

/// One draw `f_t` from an [`ExpertDistribution`].
#[derive(Debug, Clone, Copy)]
pub struct ExpertFunction<'a, S> {
    dist: &'a ExpertDistribution<S>,
    sign: S,
}

impl<S: Scalar> ExpertDistribution<S> {
    /// `amplitude` must lie in `[0, 1]` and the base instance must take
    /// values in `[0, 1]` (checked on a grid of pitch 1/64).
    pub fn new(base: Instance<S>, amplitude: S) -> Result<Self, InstanceError> {
        if !(amplitude >= S::zero() && amplitude <= S::one()) {
            return Err(invalid("amplitude", format!("must lie in [0, 1], got {amplitude}")));
        }
        let (lo, hi) = value_range(&base, 64);
        if lo < S::zero() || hi > S::one() {
            return Err(invalid("instance", format!("mean reward must lie in [0, 1], found range [{lo}, {hi}]")));
        }
        Ok(Self { base, amplitude })
    }

    /// `f_t ≡ f`.
    pub fn degenerate(base: Instance<S>) -> Result<Self, InstanceError> {
        Self::new(base, S::zero())
    }

    pub fn base(&self) -> &Instance<S> {
        &self.base
    }

    pub fn amplitude(&self) -> S {
        self.amplitude
    }

    /// Lipschitz constant shared by every realisation: `l + a·(l + 2)`.
    pub fn lipschitz(&self) -> S {
        let l = self.base.lipschitz();
        l + self.amplitude * (l + S::lit(2.0))
    }

    /// Unscaled perturbation shape `s(x)`.
    pub fn shape_at(&self, x: &[S]) -> S {
        let half = vec![S::lit(0.5); x.len()];
        let g = S::one() - S::lit(4.0) * linf_distance(x, &half);
        let f = self.base.eval_at(x);
        let m = f.min(S::one() - f).max(S::zero());
        g * m
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ExpertFunction<'_, S> {
        let sign = if rng.gen::<bool>() { S::one() } else { -S::one() };
        ExpertFunction { dist: self, sign }
    }

    /// Realisation with a fixed sign; `sign` is clamped to `±1`.
    pub fn with_sign(&self, sign: S) -> ExpertFunction<'_, S> {
        let sign = if sign >= S::zero() { S::one() } else { -S::one() };
        ExpertFunction { dist: self, sign }
    }

    /// Combines cached base and shape values into `f_t(x)`.
    #[inline]
    pub fn combine(&self, sign: S, base: S, shape: S) -> S {
        (base + sign * self.amplitude * shape).max(S::zero()).min(S::one())
    }
}

impl<S: Scalar> ExpertFunction<'_, S> {
    pub fn sign(&self) -> S {
        self.sign
    }

    pub fn eval(&self, x: &Point<S>) -> Result<S, InstanceError> {
        let base = self.dist.base.eval(x)?;
        Ok(self.dist.combine(self.sign, base, self.dist.shape_at(x.coords())))
    }

    pub fn eval_at(&self, x: &[S]) -> S {
        self.dist.combine(self.sign, self.dist.base.eval_at(x), self.dist.shape_at(x))
    }
}

fn value_range<S: Scalar>(inst: &Instance<S>, n: usize) -> (S, S) {
    let d = inst.dim();
    let total = (n + 1).pow(d as u32);
    let mut lo = S::infinity();
    let mut hi = S::neg_infinity();
    let mut x = vec![S::zero(); d];
    for idx in 0..total {
        let mut rem = idx;
        for xj in x.iter_mut() {
            *xj = S::from_count((rem % (n + 1)) as u64) / S::from_count(n as u64);
            rem /= n + 1;
        }
        let v = inst.eval_at(&x);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_amplitude_is_base() {
        let d = ExpertDistribution::degenerate(Instance::cone(vec![0.5], 1.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let f = d.sample(&mut rng);
            for x in [0.0, 0.3, 0.5, 0.9] {
                assert_eq!(f.eval_at(&[x]), d.base().eval_at(&[x]));
            }
        }
    }

    #[test]
    fn positive_sign_adds_scaled_shape() {
        let d = ExpertDistribution::<f64>::new(Instance::cone(vec![0.5], 1.0).unwrap(), 0.1).unwrap();
        let up = d.with_sign(1.0);
        // f(0.25) = 0.75, g(0.25) = 0, so the tent vanishes there.
        assert_eq!(up.eval_at(&[0.25]), 0.75);
        // f(0.4) = 0.9, g(0.4) = 0.6, m = 0.1 → s = 0.06.
        assert!((up.eval_at(&[0.4]) - (0.9 + 0.1 * 0.06)).abs() < 1e-15);
        assert!((d.with_sign(-1.0).eval_at(&[0.4]) - (0.9 - 0.006)).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_base() {
        let steep = Instance::cone(vec![0.0], 3.0).unwrap();
        assert!(ExpertDistribution::new(steep, 0.5).is_err());
        let cone = Instance::<f64>::cone(vec![0.5], 1.0).unwrap();
        assert!(ExpertDistribution::new(cone, 1.5).is_err());
    }
}
