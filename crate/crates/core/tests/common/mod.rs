#![allow(dead_code)]

use lipbandit::geometry::linf_distance;
use lipbandit::{Aabb, Region};
use proptest::prelude::*;
use rand::Rng;

/// Box with corners drawn from a 1/64 lattice, at least one lattice step wide.
pub fn arb_box(d: usize) -> impl Strategy<Value = Aabb> {
    prop::collection::vec((0u32..63, 1u32..40), d).prop_map(|axes| {
        let lo: Vec<f64> = axes.iter().map(|a| a.0 as f64 / 64.0).collect();
        let hi: Vec<f64> = axes.iter().map(|a| ((a.0 + a.1).min(64)) as f64 / 64.0).collect();
        Aabb::new(lo, hi).unwrap()
    })
}

/// Union of one to three boxes minus up to two closed holes.
pub fn arb_region(d: usize) -> impl Strategy<Value = Region> {
    (prop::collection::vec(arb_box(d), 1..4), prop::collection::vec(arb_box(d), 0..3)).prop_map(move |(parts, holes)| {
        Region::union(Aabb::unit(d).unwrap(), parts).unwrap().minus(holes)
    })
}

/// Uniform points of the unit cube that fall inside `region`.
pub fn sample_inside<R: Rng>(region: &Region, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let d = region.dim();
    let bb = region.bounding_box();
    let Some(bb) = bb else { return Vec::new() };
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n && tries < 50 * n {
        tries += 1;
        let x: Vec<f64> = (0..d).map(|j| rng.gen_range(bb.lo()[j]..=bb.hi()[j])).collect();
        if region.contains(&x) {
            out.push(x);
        }
    }
    out
}

pub fn min_pairwise(points: &[Vec<f64>]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            m = m.min(linf_distance(&points[i], &points[j]));
        }
    }
    m
}
