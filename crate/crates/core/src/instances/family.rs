use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{invalid, InstanceError, NoiseModel};
use crate::geometry::{check_dim, Aabb, BallKind, GeometryError, Point, Region};
use crate::Scalar;

type CustomFn<S> = Arc<dyn Fn(&[S]) -> S + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Cone,
    Plateau,
    Multipeak,
    OneSidedStep,
    Custom,
}

impl FamilyKind {
    pub const BUILT_IN: [&'static str; 4] = ["cone", "plateau", "multipeak", "one_sided_step"];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Cone => "cone",
            FamilyKind::Plateau => "plateau",
            FamilyKind::Multipeak => "multipeak",
            FamilyKind::OneSidedStep => "one_sided_step",
            FamilyKind::Custom => "custom",
        }
    }
}

/// Mean-reward shapes. Built-ins are piecewise linear so that the gap, its
/// level sets and their volumes have closed forms.
#[derive(Clone)]
pub enum Family<S> {
    /// `f(x) = 1 − slope·‖x − center‖∞`.
    Cone { center: Vec<S>, slope: S },
    /// `f(x) = 1 − slope·dist∞(x, [lo, hi])`.
    Plateau { lo: Vec<S>, hi: Vec<S>, slope: S },
    /// `f(x) = max_i (height_i − slope·‖x − center_i‖∞)`.
    Multipeak { peaks: Vec<(Vec<S>, S)>, slope: S },
    /// One-dimensional: rises with slope `rise` up to `peak`, flat on
    /// `[peak, peak + width]`, then drops by `drop` and decreases with
    /// `tail_slope`. Lipschitz only along the forward direction.
    OneSidedStep { peak: S, width: S, rise: S, drop: S, tail_slope: S },
    Custom { f: CustomFn<S> },
}

impl<S: fmt::Debug> fmt::Debug for Family<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Cone { center, slope } => f.debug_struct("Cone").field("center", center).field("slope", slope).finish(),
            Family::Plateau { lo, hi, slope } => {
                f.debug_struct("Plateau").field("lo", lo).field("hi", hi).field("slope", slope).finish()
            }
            Family::Multipeak { peaks, slope } => {
                f.debug_struct("Multipeak").field("peaks", peaks).field("slope", slope).finish()
            }
            Family::OneSidedStep { peak, width, rise, drop, tail_slope } => f
                .debug_struct("OneSidedStep")
                .field("peak", peak)
                .field("width", width)
                .field("rise", rise)
                .field("drop", drop)
                .field("tail_slope", tail_slope)
                .finish(),
            Family::Custom { .. } => f.write_str("Custom"),
        }
    }
}

/// Near-optimal set `X_r = {x : Δ(x) <= r}`.
#[derive(Debug, Clone)]
pub enum LevelSet<S> {
    Exact { region: Region<S>, volume: S },
    /// Custom instances only expose membership through `gap(x) <= r`.
    Predicate { r: S },
}

/// A Lipschitz bandit environment on `[0,1]^d`.
#[derive(Debug, Clone)]
pub struct Instance<S> {
    dim: usize,
    /// Lipschitz constant `l` of the mean reward (forward constant for one-sided families).
    lipschitz: S,
    family: Family<S>,
    fstar: S,
    maximizer: Region<S>,
    dz: Option<S>,
    dstar: Option<S>,
    gamma: Option<S>,
    symmetric: bool,
    positive_gap: S,
}

fn positive<S: Scalar>(name: &'static str, v: S) -> Result<(), InstanceError> {
    if v > S::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}

fn unit_coords<S: Scalar>(name: &'static str, v: &[S]) -> Result<(), InstanceError> {
    if v.iter().all(|&c| c >= S::zero() && c <= S::one()) {
        Ok(())
    } else {
        Err(invalid(name, "coordinates must lie in [0, 1]"))
    }
}

impl<S: Scalar> Instance<S> {
    pub fn cone(center: Vec<S>, slope: S) -> Result<Self, InstanceError> {
        let d = center.len();
        check_dim(d)?;
        unit_coords("center", &center)?;
        positive("slope", slope)?;
        let domain = Aabb::unit(d)?;
        let maximizer = Region::singleton(domain, &Point::new(center.clone())?)?;
        Ok(Self {
            dim: d,
            lipschitz: slope,
            family: Family::Cone { center, slope },
            fstar: S::one(),
            maximizer,
            dz: Some(S::zero()),
            dstar: Some(S::zero()),
            gamma: Some(S::lit(0.5).powi(d as i32)),
            symmetric: true,
            positive_gap: S::zero(),
        })
    }

    pub fn plateau(lo: Vec<S>, hi: Vec<S>, slope: S) -> Result<Self, InstanceError> {
        let d = lo.len();
        check_dim(d)?;
        unit_coords("plateau_lo", &lo)?;
        unit_coords("plateau_hi", &hi)?;
        positive("slope", slope)?;
        let domain = Aabb::unit(d)?;
        let plateau = Aabb::new(lo.clone(), hi.clone()).map_err(|e| invalid("plateau", e.to_string()))?;
        let maximizer = Region::union(domain.clone(), [plateau.clone()])?;
        let extent = (0..d).filter(|&j| hi[j] > lo[j]).count();
        let whole = plateau == domain;
        let dz = if whole {
            0
        } else if extent == d {
            d - 1
        } else {
            extent
        };
        Ok(Self {
            dim: d,
            lipschitz: slope,
            family: Family::Plateau { lo, hi, slope },
            fstar: S::one(),
            maximizer,
            dz: Some(S::from_count(dz as u64)),
            dstar: Some(S::from_count(extent as u64)),
            gamma: Some(S::lit(0.5).powi(d as i32)),
            symmetric: true,
            positive_gap: if whole { S::infinity() } else { S::zero() },
        })
    }

    pub fn multipeak(peaks: Vec<(Vec<S>, S)>, slope: S) -> Result<Self, InstanceError> {
        let first = peaks.first().ok_or_else(|| invalid("peaks", "at least one peak required"))?;
        let d = first.0.len();
        check_dim(d)?;
        positive("slope", slope)?;
        for (c, h) in &peaks {
            if c.len() != d {
                return Err(InstanceError::OutOfDomain(GeometryError::DimensionMismatch { expected: d, got: c.len() }));
            }
            unit_coords("peak_center", c)?;
            if !h.is_finite() {
                return Err(invalid("peak_height", "must be finite"));
            }
        }
        let fstar = peaks.iter().map(|p| p.1).fold(S::neg_infinity(), S::max);
        let domain = Aabb::unit(d)?;
        let tops = peaks.iter().filter(|p| p.1 == fstar).map(|p| Aabb::point(&Point::from_vec(p.0.clone())));
        let maximizer = Region::union(domain, tops)?;
        Ok(Self {
            dim: d,
            lipschitz: slope,
            family: Family::Multipeak { peaks, slope },
            fstar,
            maximizer,
            dz: Some(S::zero()),
            dstar: Some(S::zero()),
            gamma: Some(S::lit(0.5).powi(d as i32)),
            symmetric: true,
            positive_gap: S::zero(),
        })
    }

    pub fn one_sided_step(peak: S, width: S, rise: S, drop: S, tail_slope: S) -> Result<Self, InstanceError> {
        unit_coords("peak", &[peak])?;
        if !(width >= S::zero() && peak + width <= S::one()) {
            return Err(invalid("width", "plateau [peak, peak + width] must fit in [0, 1]"));
        }
        positive("rise", rise)?;
        positive("drop", drop)?;
        if !(tail_slope >= S::zero() && tail_slope.is_finite()) {
            return Err(invalid("tail_slope", "must be nonnegative"));
        }
        let domain = Aabb::unit(1)?;
        let maximizer = Region::union(domain, [Aabb::new(vec![peak], vec![peak + width])?])?;
        let positive_gap = if peak > S::zero() {
            S::zero()
        } else if peak + width >= S::one() {
            S::infinity()
        } else {
            drop
        };
        Ok(Self {
            dim: 1,
            lipschitz: rise,
            family: Family::OneSidedStep { peak, width, rise, drop, tail_slope },
            fstar: S::one(),
            maximizer,
            dz: Some(S::zero()),
            dstar: Some(if width > S::zero() { S::one() } else { S::zero() }),
            gamma: Some(S::lit(0.5)),
            symmetric: false,
            positive_gap,
        })
    }

    /// User-supplied mean reward. `fstar` and `maximizer` are trusted; the
    /// dimensions and volume-regularity constants are unknown.
    pub fn custom(
        dim: usize,
        lipschitz: S,
        fstar: S,
        maximizer: Region<S>,
        f: impl Fn(&[S]) -> S + Send + Sync + 'static,
    ) -> Result<Self, InstanceError> {
        check_dim(dim)?;
        positive("lipschitz", lipschitz)?;
        if maximizer.dim() != dim {
            return Err(InstanceError::OutOfDomain(GeometryError::DimensionMismatch {
                expected: dim,
                got: maximizer.dim(),
            }));
        }
        Ok(Self {
            dim,
            lipschitz,
            family: Family::Custom { f: Arc::new(f) },
            fstar,
            maximizer,
            dz: None,
            dstar: None,
            gamma: None,
            symmetric: true,
            positive_gap: S::zero(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz(&self) -> S {
        self.lipschitz
    }

    pub fn family(&self) -> &Family<S> {
        &self.family
    }

    pub fn kind(&self) -> FamilyKind {
        match self.family {
            Family::Cone { .. } => FamilyKind::Cone,
            Family::Plateau { .. } => FamilyKind::Plateau,
            Family::Multipeak { .. } => FamilyKind::Multipeak,
            Family::OneSidedStep { .. } => FamilyKind::OneSidedStep,
            Family::Custom { .. } => FamilyKind::Custom,
        }
    }

    pub fn fstar(&self) -> S {
        self.fstar
    }

    pub fn maximizer(&self) -> &Region<S> {
        &self.maximizer
    }

    pub fn domain(&self) -> Region<S> {
        Region::whole(self.maximizer.domain().clone())
    }

    /// Advertised zooming dimension, when known analytically.
    pub fn dz(&self) -> Option<S> {
        self.dz
    }

    /// Advertised dimension of the maximizer set, when known analytically.
    pub fn dstar(&self) -> Option<S> {
        self.dstar
    }

    /// Volume-regularity constant (rank 0) for built-ins; analysis metadata only.
    pub fn gamma(&self) -> Option<S> {
        self.gamma
    }

    /// False for families that are Lipschitz only along `x ⪯ y`.
    pub fn is_symmetric_lipschitz(&self) -> bool {
        self.symmetric
    }

    /// `inf Δ(x)` over `X ∖ X★`; infinite when `X = X★`.
    pub fn positive_gap(&self) -> S {
        self.positive_gap
    }

    fn check(&self, x: &Point<S>) -> Result<(), InstanceError> {
        if x.dim() != self.dim {
            return Err(GeometryError::DimensionMismatch { expected: self.dim, got: x.dim() }.into());
        }
        Ok(())
    }

    pub fn eval(&self, x: &Point<S>) -> Result<S, InstanceError> {
        self.check(x)?;
        Ok(self.eval_at(x.coords()))
    }

    pub fn gap(&self, x: &Point<S>) -> Result<S, InstanceError> {
        self.check(x)?;
        Ok(self.gap_at(x.coords()))
    }

    /// Reward `f(x) + η` with noise drawn from `noise`.
    pub fn sample_reward<R: Rng + ?Sized>(
        &self,
        noise: NoiseModel,
        x: &Point<S>,
        rng: &mut R,
    ) -> Result<S, InstanceError> {
        let mean = self.eval(x)?;
        Ok(noise.observe(mean, rng))
    }

    /// Mean reward at a point assumed to lie in the domain.
    pub fn eval_at(&self, x: &[S]) -> S {
        match &self.family {
            Family::Cone { center, slope } => S::one() - *slope * linf(x, center),
            Family::Plateau { lo, hi, slope } => S::one() - *slope * box_distance(x, lo, hi),
            Family::Multipeak { peaks, slope } => peaks
                .iter()
                .map(|(c, h)| *h - *slope * linf(x, c))
                .fold(S::neg_infinity(), S::max),
            Family::OneSidedStep { peak, width, rise, drop, tail_slope } => {
                let v = x[0];
                if v < *peak {
                    S::one() - *rise * (*peak - v)
                } else if v <= *peak + *width {
                    S::one()
                } else {
                    S::one() - *drop - *tail_slope * (v - *peak - *width)
                }
            }
            Family::Custom { f } => f(x),
        }
    }

    /// `Δ(x) = f★ − f(x)`, clamped at zero.
    #[inline]
    pub fn gap_at(&self, x: &[S]) -> S {
        (self.fstar - self.eval_at(x)).max(S::zero())
    }

    pub fn in_level_set(&self, x: &[S], r: S) -> bool {
        self.gap_at(x) <= r
    }

    /// Closed-form `X_r` for built-ins; predicate form for custom instances.
    pub fn level_set(&self, r: S) -> LevelSet<S> {
        let r = r.max(S::zero());
        let domain = self.maximizer.domain().clone();
        let region = match &self.family {
            Family::Cone { center, slope } => {
                let c = Point::from_vec(center.clone());
                Region::union(domain, [Aabb::ball(&c, r / *slope, BallKind::Symmetric)])
            }
            Family::Plateau { lo, hi, slope } => {
                let w = r / *slope;
                let b = Aabb::new(lo.iter().map(|&v| v - w).collect(), hi.iter().map(|&v| v + w).collect())
                    .expect("expanded box");
                Region::union(domain, [b])
            }
            Family::Multipeak { peaks, slope } => {
                let balls = peaks
                    .iter()
                    .filter(|(_, h)| *h >= self.fstar - r)
                    .map(|(c, h)| Aabb::ball(&Point::from_vec(c.clone()), (*h - self.fstar + r) / *slope, BallKind::Symmetric));
                Region::union(domain, balls)
            }
            Family::OneSidedStep { peak, width, rise, drop, tail_slope } => {
                let lo = *peak - r / *rise;
                let top = *peak + *width;
                let hi = if r < *drop {
                    top
                } else if *tail_slope > S::zero() {
                    top + (r - *drop) / *tail_slope
                } else {
                    S::one()
                };
                Region::union(domain, [Aabb::new(vec![lo], vec![hi]).expect("ordered interval")])
            }
            Family::Custom { .. } => return LevelSet::Predicate { r },
        }
        .expect("level-set boxes share the domain dimension");
        let volume = region.volume();
        LevelSet::Exact { region, volume }
    }

    /// Samples a uniform point of the domain.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point<S> {
        Point::from_vec((0..self.dim).map(|_| S::lit(rng.gen::<f64>())).collect())
    }
}

impl<S: Scalar> LevelSet<S> {
    pub fn region(&self) -> Option<&Region<S>> {
        match self {
            LevelSet::Exact { region, .. } => Some(region),
            LevelSet::Predicate { .. } => None,
        }
    }

    pub fn volume(&self) -> Option<S> {
        match self {
            LevelSet::Exact { volume, .. } => Some(*volume),
            LevelSet::Predicate { .. } => None,
        }
    }
}

#[inline]
fn linf<S: Scalar>(a: &[S], b: &[S]) -> S {
    crate::geometry::linf_distance(a, b)
}

#[inline]
fn box_distance<S: Scalar>(x: &[S], lo: &[S], hi: &[S]) -> S {
    let mut m = S::zero();
    for j in 0..x.len() {
        m = m.max(lo[j] - x[j]).max(x[j] - hi[j]);
    }
    m
}
