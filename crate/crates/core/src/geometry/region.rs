use serde::{Deserialize, Serialize};

use super::{check_dim, GeometryError, Point};
use crate::Scalar;

/// Shape of an L∞ ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallKind {
    /// `B∞(c, r) = {y : ‖y − c‖∞ ≤ r}`.
    Symmetric,
    /// `B∞⁺(c, r) = {y : y ⪰ c, ‖y − c‖∞ ≤ r}`.
    Forward,
}

/// Closed axis-aligned box `[lo, hi]`. Degenerate boxes (`lo == hi` on some
/// axis) are allowed and represent lower-dimensional faces or single points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Aabb<S> {
    lo: Vec<S>,
    hi: Vec<S>,
}

impl<S: Scalar> Aabb<S> {
    pub fn new(lo: Vec<S>, hi: Vec<S>) -> Result<Self, GeometryError> {
        check_dim(lo.len())?;
        if lo.len() != hi.len() {
            return Err(GeometryError::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if let Some(axis) = (0..lo.len()).find(|&j| !(lo[j] <= hi[j])) {
            return Err(GeometryError::InvertedBox(axis));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit(d: usize) -> Result<Self, GeometryError> {
        Self::new(vec![S::zero(); d], vec![S::one(); d])
    }

    pub fn point(p: &Point<S>) -> Self {
        Self { lo: p.coords().to_vec(), hi: p.coords().to_vec() }
    }

    /// L∞ ball of the given kind; not clipped to any domain.
    pub fn ball(center: &Point<S>, radius: S, kind: BallKind) -> Self {
        let c = center.coords();
        match kind {
            BallKind::Symmetric => Self {
                lo: c.iter().map(|&x| x - radius).collect(),
                hi: c.iter().map(|&x| x + radius).collect(),
            },
            BallKind::Forward => Self {
                lo: c.to_vec(),
                hi: c.iter().map(|&x| x + radius).collect(),
            },
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[S] {
        &self.lo
    }

    pub fn hi(&self) -> &[S] {
        &self.hi
    }

    #[inline]
    pub fn contains(&self, x: &[S]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&v, (&l, &h))| l <= v && v <= h)
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo: Vec<S> = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<S> = self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect();
        if lo.iter().zip(&hi).all(|(l, h)| l <= h) {
            Some(Self { lo, hi })
        } else {
            None
        }
    }

    pub fn contains_box(&self, other: &Self) -> bool {
        (0..self.dim()).all(|j| self.lo[j] <= other.lo[j] && other.hi[j] <= self.hi[j])
    }

    pub fn volume(&self) -> S {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(S::one(), |v, (&l, &h)| v * (h - l))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionMode {
    WholeDomain,
    UnionOfParts,
}

/// `domain ∩ (∪ parts) ∖ (∪ holes)`, with every part already clipped to the
/// domain. Holes are closed, so a region with holes is relatively open at
/// their boundary; level-set annuli are the only producers of holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Region<S> {
    domain: Aabb<S>,
    mode: RegionMode,
    parts: Vec<Aabb<S>>,
    holes: Vec<Aabb<S>>,
}

impl<S: Scalar> Region<S> {
    pub fn whole(domain: Aabb<S>) -> Self {
        Self { domain, mode: RegionMode::WholeDomain, parts: Vec::new(), holes: Vec::new() }
    }

    pub fn unit_cube(d: usize) -> Result<Self, GeometryError> {
        Ok(Self::whole(Aabb::unit(d)?))
    }

    pub fn empty(domain: Aabb<S>) -> Self {
        Self { domain, mode: RegionMode::UnionOfParts, parts: Vec::new(), holes: Vec::new() }
    }

    /// Union of `parts` clipped to `domain`; parts missing the domain are dropped.
    pub fn union(domain: Aabb<S>, parts: impl IntoIterator<Item = Aabb<S>>) -> Result<Self, GeometryError> {
        let d = domain.dim();
        let mut clipped = Vec::new();
        for p in parts {
            if p.dim() != d {
                return Err(GeometryError::DimensionMismatch { expected: d, got: p.dim() });
            }
            if let Some(c) = p.intersect(&domain) {
                clipped.push(c);
            }
        }
        let mut region = Self { domain, mode: RegionMode::UnionOfParts, parts: clipped, holes: Vec::new() };
        region.simplify();
        Ok(region)
    }

    pub fn singleton(domain: Aabb<S>, p: &Point<S>) -> Result<Self, GeometryError> {
        Self::union(domain, [Aabb::point(p)])
    }

    /// Removes the closed set `∪ holes` from this region.
    pub fn minus(mut self, holes: impl IntoIterator<Item = Aabb<S>>) -> Self {
        self.holes.extend(holes.into_iter().filter_map(|h| h.intersect(&self.domain)));
        self
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Aabb<S> {
        &self.domain
    }

    pub fn mode(&self) -> RegionMode {
        self.mode
    }

    pub fn parts(&self) -> &[Aabb<S>] {
        &self.parts
    }

    pub fn holes(&self) -> &[Aabb<S>] {
        &self.holes
    }

    /// Boxes whose union (before removing holes) is the region.
    pub fn cover_boxes(&self) -> &[Aabb<S>] {
        match self.mode {
            RegionMode::WholeDomain => std::slice::from_ref(&self.domain),
            RegionMode::UnionOfParts => &self.parts,
        }
    }

    /// Exact: with holes present this decides emptiness on the cell
    /// decomposition, so a part swallowed by holes counts as empty.
    pub fn is_empty(&self) -> bool {
        if self.mode == RegionMode::UnionOfParts && self.parts.is_empty() {
            return true;
        }
        if self.holes.is_empty() {
            return false;
        }
        let mut any = false;
        self.visit_cells(|_| {
            any = true;
            false
        });
        !any
    }

    #[inline]
    pub fn contains(&self, x: &[S]) -> bool {
        if x.len() != self.dim() || !self.domain.contains(x) {
            return false;
        }
        let in_parts = match self.mode {
            RegionMode::WholeDomain => true,
            RegionMode::UnionOfParts => self.parts.iter().any(|p| p.contains(x)),
        };
        in_parts && !self.holes.iter().any(|h| h.contains(x))
    }

    pub fn contains_point(&self, p: &Point<S>) -> bool {
        self.contains(p.coords())
    }

    /// `self ∩ ∪ boxes`, computed exactly as pairwise box intersections.
    pub fn intersect_union(&self, boxes: &[Aabb<S>]) -> Self {
        let mut parts = Vec::new();
        for base in self.cover_boxes() {
            for b in boxes {
                if let Some(c) = base.intersect(b) {
                    parts.push(c);
                }
            }
        }
        let mut out = Self {
            domain: self.domain.clone(),
            mode: RegionMode::UnionOfParts,
            parts,
            holes: self.holes.clone(),
        };
        out.simplify();
        out
    }

    /// `domain ∩ ∪ boxes` for the same domain as `self`.
    pub fn domain_union(&self, boxes: &[Aabb<S>]) -> Self {
        Self::whole(self.domain.clone()).intersect_union(boxes)
    }

    pub fn bounding_box(&self) -> Option<Aabb<S>> {
        let boxes = self.cover_boxes();
        let first = boxes.first()?;
        let mut lo = first.lo.clone();
        let mut hi = first.hi.clone();
        for b in &boxes[1..] {
            for j in 0..lo.len() {
                lo[j] = lo[j].min(b.lo[j]);
                hi[j] = hi[j].max(b.hi[j]);
            }
        }
        Some(Aabb { lo, hi })
    }

    /// Exact Lebesgue volume via coordinate compression over all box edges.
    pub fn volume(&self) -> S {
        if self.is_empty() {
            return S::zero();
        }
        if self.holes.is_empty() && self.cover_boxes().len() == 1 {
            return self.cover_boxes()[0].volume();
        }
        let d = self.dim();
        let mut edges: Vec<Vec<S>> = vec![Vec::new(); d];
        for b in self.cover_boxes().iter().chain(&self.holes) {
            for j in 0..d {
                edges[j].push(b.lo[j]);
                edges[j].push(b.hi[j]);
            }
        }
        for e in &mut edges {
            e.sort_by(|a, b| a.partial_cmp(b).expect("finite edges"));
            e.dedup();
        }
        let cells: Vec<usize> = edges.iter().map(|e| e.len().saturating_sub(1)).collect();
        if cells.iter().any(|&n| n == 0) {
            return S::zero();
        }
        let mut total = S::zero();
        let mut idx = vec![0usize; d];
        let two = S::lit(2.0);
        let mut mid = vec![S::zero(); d];
        loop {
            let mut vol = S::one();
            for j in 0..d {
                let (a, b) = (edges[j][idx[j]], edges[j][idx[j] + 1]);
                mid[j] = (a + b) / two;
                vol *= b - a;
            }
            // Cell interiors are either fully inside or fully outside every box.
            if self.contains(&mid) {
                total += vol;
            }
            let mut axis = 0;
            loop {
                idx[axis] += 1;
                if idx[axis] < cells[axis] {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
                if axis == d {
                    return total;
                }
            }
        }
    }

    /// Drops parts contained in another part; in one dimension also merges
    /// overlapping intervals, which is exact.
    fn simplify(&mut self) {
        if self.mode != RegionMode::UnionOfParts || self.parts.len() < 2 {
            return;
        }
        if self.dim() == 1 {
            self.parts.sort_by(|a, b| a.lo[0].partial_cmp(&b.lo[0]).expect("finite"));
            let mut merged: Vec<Aabb<S>> = Vec::with_capacity(self.parts.len());
            for p in self.parts.drain(..) {
                match merged.last_mut() {
                    Some(last) if p.lo[0] <= last.hi[0] => {
                        if p.hi[0] > last.hi[0] {
                            last.hi[0] = p.hi[0];
                        }
                    }
                    _ => merged.push(p),
                }
            }
            self.parts = merged;
            return;
        }
        let parts = std::mem::take(&mut self.parts);
        let n = parts.len();
        let mut keep = vec![true; n];
        for i in 0..n {
            for j in 0..n {
                if i != j && keep[j] && parts[j].contains_box(&parts[i]) && (parts[i] != parts[j] || j < i) {
                    keep[i] = false;
                    break;
                }
            }
        }
        self.parts = parts.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect();
    }

    /// Candidate points for the greedy oracles: for every cover box, the
    /// per-axis coordinates `{lo} ∪ {origin + i·pitch} ∩ (lo, hi) ∪ {hi}`,
    /// with `origin` the domain's lower corner. Returned sorted
    /// lexicographically and deduplicated; points inside holes are dropped.
    ///
    /// Consecutive coordinates on an axis differ by at most `pitch`, so every
    /// point of a cover box has a candidate of the same box within `pitch/2`
    /// and a candidate `g ⪯ y` within `pitch`.
    ///
    /// Holes can swallow those neighbours, so when holes are present every
    /// cell of the edge arrangement that lies in the region also contributes
    /// its own points, spaced so that each point of the cell has one within
    /// `pitch/2` on every axis.
    pub(crate) fn candidates(&self, pitch: S) -> Vec<Vec<S>> {
        let d = self.dim();
        let origin = self.domain.lo.clone();
        let mut out: Vec<Vec<S>> = Vec::new();
        for b in self.cover_boxes() {
            let axes: Vec<Vec<S>> = (0..d).map(|j| axis_coords(b.lo[j], b.hi[j], origin[j], pitch)).collect();
            let mut idx = vec![0usize; d];
            'product: loop {
                let p: Vec<S> = (0..d).map(|j| axes[j][idx[j]]).collect();
                if !self.holes.iter().any(|h| h.contains(&p)) {
                    out.push(p);
                }
                let mut axis = d;
                loop {
                    if axis == 0 {
                        break 'product;
                    }
                    axis -= 1;
                    idx[axis] += 1;
                    if idx[axis] < axes[axis].len() {
                        break;
                    }
                    idx[axis] = 0;
                }
            }
        }
        if !self.holes.is_empty() {
            let origin = &self.domain.lo;
            self.visit_cells(|cell| {
                let axes: Vec<Vec<S>> =
                    cell.iter().enumerate().map(|(j, &(a, b))| cell_coords(a, b, origin[j], pitch)).collect();
                let mut idx = vec![0usize; d];
                'cell: loop {
                    out.push((0..d).map(|j| axes[j][idx[j]]).collect());
                    let mut axis = d;
                    loop {
                        if axis == 0 {
                            break 'cell;
                        }
                        axis -= 1;
                        idx[axis] += 1;
                        if idx[axis] < axes[axis].len() {
                            break;
                        }
                        idx[axis] = 0;
                    }
                }
                true
            });
        }
        out.sort_by(|a, b| lex_cmp(a, b));
        out.dedup();
        out
    }

    /// Calls `f` on every cell of the arrangement of part and hole edges that
    /// lies in the region, until `f` returns false. A cell is one
    /// `(lo, hi)` per axis, either a single edge value (`lo == hi`) or the
    /// open interval between consecutive edges; membership is constant on it.
    fn visit_cells(&self, mut f: impl FnMut(&[(S, S)]) -> bool) {
        let d = self.dim();
        let axes: Vec<Vec<(S, S)>> = (0..d)
            .map(|j| {
                let mut edges: Vec<S> = self
                    .cover_boxes()
                    .iter()
                    .chain(&self.holes)
                    .flat_map(|b| [b.lo[j], b.hi[j]])
                    .map(|v| v.max(self.domain.lo[j]).min(self.domain.hi[j]))
                    .collect();
                edges.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                edges.dedup();
                let mut cells = Vec::with_capacity(2 * edges.len());
                for (i, &e) in edges.iter().enumerate() {
                    cells.push((e, e));
                    if let Some(&next) = edges.get(i + 1) {
                        cells.push((e, next));
                    }
                }
                cells
            })
            .collect();
        if axes.iter().any(|a| a.is_empty()) {
            return;
        }
        let mut idx = vec![0usize; d];
        let mut cell = vec![(S::zero(), S::zero()); d];
        let mut mid = vec![S::zero(); d];
        loop {
            for j in 0..d {
                cell[j] = axes[j][idx[j]];
                mid[j] = (cell[j].0 + cell[j].1) / S::lit(2.0);
            }
            if self.contains(&mid) && !f(&cell) {
                return;
            }
            let mut axis = d;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < axes[axis].len() {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }
}

/// Coordinates strictly inside the open interval `(a, b)` (or `a` itself
/// when `a == b`): grid points, plus offsets half a pitch from an end that
/// is farther than that from the nearest grid point.
fn cell_coords<S: Scalar>(a: S, b: S, origin: S, pitch: S) -> Vec<S> {
    if a == b {
        return vec![a];
    }
    let half = pitch / S::lit(2.0);
    let inner: Vec<S> = axis_coords(a, b, origin, pitch)
        .into_iter()
        .filter(|&c| c > a && c < b)
        .collect();
    if inner.is_empty() {
        let n = ((b - a) / pitch).ceil().to_usize().unwrap_or(1).max(1);
        let step = (b - a) / S::from_count(n as u64);
        return (0..n).map(|i| a + (S::from_count(i as u64) + S::lit(0.5)) * step).collect();
    }
    let mut v = Vec::with_capacity(inner.len() + 2);
    if inner[0] - a > half {
        v.push(a + half);
    }
    v.extend_from_slice(&inner);
    if b - inner[inner.len() - 1] > half {
        v.push(b - half);
    }
    v
}

pub(crate) fn lex_cmp<S: Scalar>(a: &[S], b: &[S]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).expect("finite coordinates") {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

fn axis_coords<S: Scalar>(lo: S, hi: S, origin: S, pitch: S) -> Vec<S> {
    let mut v = vec![lo];
    if hi > lo {
        let tiny = pitch * S::lit(1e-9);
        let first = ((lo - origin) / pitch).floor().to_i64().expect("finite") + 1;
        let mut i = first;
        loop {
            let c = origin + S::from_i64(i).expect("grid index") * pitch;
            if c >= hi - tiny {
                break;
            }
            if c > lo + tiny {
                v.push(c);
            }
            i += 1;
        }
        v.push(hi);
    }
    v
}
