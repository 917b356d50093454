use serde::{Deserialize, Serialize};

use super::{check_dim, GeometryError};
use crate::Scalar;

/// A point of the unit cube `[0,1]^d`, `1 <= d <= 3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Point<S> {
    coords: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn new(coords: Vec<S>) -> Result<Self, GeometryError> {
        check_dim(coords.len())?;
        for (index, &c) in coords.iter().enumerate() {
            if !(c >= S::zero() && c <= S::one()) {
                return Err(GeometryError::OutOfDomain { index, value: c.as_f64() });
            }
        }
        Ok(Self { coords })
    }

    /// Builds a point without the unit-cube check. Callers guarantee the invariant.
    pub(crate) fn from_vec(coords: Vec<S>) -> Self {
        debug_assert!(!coords.is_empty() && coords.len() <= super::MAX_DIM);
        Self { coords }
    }

    pub fn from_f64(coords: &[f64]) -> Result<Self, GeometryError> {
        Self::new(coords.iter().map(|&c| S::lit(c)).collect())
    }

    pub fn splat(d: usize, value: S) -> Result<Self, GeometryError> {
        Self::new(vec![value; d])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn distance(&self, other: &Self) -> S {
        linf_distance(&self.coords, &other.coords)
    }

    /// Coordinate-wise partial order `self ⪯ other`.
    pub fn precedes(&self, other: &Self) -> bool {
        self.coords.iter().zip(&other.coords).all(|(a, b)| a <= b)
    }
}

#[inline]
pub fn linf_distance<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}
