use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{linf_distance, GeometryError, Point, Region};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetKind {
    /// Covers with symmetric balls `B∞(a, scale)`.
    Symmetric,
    /// Covers with forward balls `B∞⁺(a, scale)`.
    Forward,
}

/// Finite point set returned by a discretization oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Net<S> {
    pub points: Vec<Point<S>>,
    /// Covering radius `r` the net was built for.
    pub scale: S,
    /// Certified lower bound on the minimum pairwise L∞ distance.
    pub separation: S,
    /// Pitch of the candidate grid.
    pub grid_pitch: S,
    pub kind: NetKind,
}

impl<S: Scalar> Net<S> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index and distance of the closest net point (ties to the first).
    pub fn nearest(&self, x: &[S]) -> Option<(usize, S)> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, linf_distance(p.coords(), x)))
            .fold(None, |best, cur| match best {
                Some((_, d)) if d <= cur.1 => best,
                _ => Some(cur),
            })
    }

    /// True when some net point `a` covers `x` with the net's ball shape.
    pub fn covers(&self, x: &[S], radius: S) -> bool {
        self.points.iter().any(|a| match self.kind {
            NetKind::Symmetric => linf_distance(a.coords(), x) <= radius,
            NetKind::Forward => {
                a.coords().iter().zip(x).all(|(p, q)| p <= q) && linf_distance(a.coords(), x) <= radius
            }
        })
    }
}

fn check_scale<S: Scalar>(r: S) -> Result<(), GeometryError> {
    if r > S::zero() && r <= S::one() {
        Ok(())
    } else {
        Err(GeometryError::InvalidScale(r.as_f64()))
    }
}

/// Greedy `r`-net of `region`.
///
/// Candidates come from a grid of pitch `r/2` anchored at the domain origin
/// (plus the edges of every region box), scanned lexicographically; a
/// candidate is kept iff it lies farther than `r/2` from every kept point.
/// The result covers the region at radius `3r/4 <= r` and is `r/2`-separated.
pub fn greedy_net<S: Scalar>(region: &Region<S>, r: S) -> Result<Net<S>, GeometryError> {
    check_scale(r)?;
    let pitch = r / S::lit(2.0);
    let candidates = region.candidates(pitch);
    if candidates.is_empty() {
        return Err(GeometryError::EmptyRegion);
    }
    let threshold = pitch * (S::one() + S::rel_eps());
    let (points, separation) = select(&candidates, pitch, |kept, c| linf_distance(kept, c) <= threshold);
    Ok(Net { points, scale: r, separation, grid_pitch: pitch, kind: NetKind::Symmetric })
}

/// Forward `r`-net: anchors `a ∈ region` such that every `y` of the region
/// satisfies `a ⪯ y`, `‖y − a‖∞ <= r` for some anchor.
///
/// Same candidates as [`greedy_net`]; a candidate `g` is skipped iff some kept
/// anchor `a ⪯ g` lies within `r/2`, which leaves room for the half-pitch
/// between any point and the candidate below it. In one dimension the
/// anchors are `r/2`-separated; in higher dimensions a forward cover can
/// force closer anchors and `separation` reports what was achieved.
///
/// The cover is guaranteed for regions without holes. Removing a closed hole
/// leaves points just above its upper edge with no region point below them
/// nearby, so no finite forward cover by region points exists there.
pub fn forward_net<S: Scalar>(region: &Region<S>, r: S) -> Result<Net<S>, GeometryError> {
    check_scale(r)?;
    let pitch = r / S::lit(2.0);
    let candidates = region.candidates(pitch);
    if candidates.is_empty() {
        return Err(GeometryError::EmptyRegion);
    }
    let (points, separation) = select(&candidates, pitch, |kept, c| {
        kept.iter().zip(c).all(|(a, g)| a <= g) && linf_distance(kept, c) <= pitch
    });
    Ok(Net { points, scale: r, separation, grid_pitch: pitch, kind: NetKind::Forward })
}

/// Scans candidates in order and keeps those not `blocked` by a kept point.
/// Blocking must imply L∞ distance `<= cell`, so only neighbouring hash
/// cells need checking. Returns the kept points and a separation lower bound.
fn select<S: Scalar>(
    candidates: &[Vec<S>],
    cell: S,
    blocked: impl Fn(&[S], &[S]) -> bool,
) -> (Vec<Point<S>>, S) {
    let d = candidates[0].len();
    let key = |p: &[S]| -> [i64; 3] {
        let mut k = [0i64; 3];
        for j in 0..d {
            k[j] = (p[j] / cell).floor().to_i64().expect("finite");
        }
        k
    };
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut kept: Vec<Point<S>> = Vec::new();
    // Points in non-adjacent cells are more than `cell` apart.
    let mut separation = cell;
    let offsets = neighbour_offsets(d);
    for c in candidates {
        let k = key(c);
        let mut hit = false;
        let mut nearest = S::infinity();
        for off in &offsets {
            let nk = [k[0] + off[0], k[1] + off[1], k[2] + off[2]];
            if let Some(ids) = grid.get(&nk) {
                for &i in ids {
                    let q = kept[i].coords();
                    if blocked(q, c) {
                        hit = true;
                        break;
                    }
                    nearest = nearest.min(linf_distance(q, c));
                }
            }
            if hit {
                break;
            }
        }
        if !hit {
            separation = separation.min(nearest);
            grid.entry(k).or_default().push(kept.len());
            kept.push(Point::from_vec(c.clone()));
        }
    }
    (kept, separation)
}

fn neighbour_offsets(d: usize) -> Vec<[i64; 3]> {
    let range = |j: usize| if j < d { -1..=1 } else { 0..=0 };
    let mut v = Vec::new();
    for a in range(0) {
        for b in range(1) {
            for c in range(2) {
                v.push([a, b, c]);
            }
        }
    }
    v
}
