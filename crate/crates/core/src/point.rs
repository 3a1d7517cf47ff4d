use std::ops::Deref;

use crate::error::{invalid, Error, Result};

/// A position in the search space: a non-empty vector of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("a point needs at least one coordinate"));
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput {
                index,
                reason: format!("coordinate {} is not finite", coords[index]),
            });
        }
        Ok(Point(coords))
    }

    /// The origin of `R^d`.
    pub fn zeros(d: usize) -> Self {
        Point(vec![0.0; d.max(1)])
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// `self - other`, coordinate-wise. Panics on dimension mismatch.
    pub fn displacement_from(&self, other: &Point) -> Vec<f64> {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    pub fn scaled(&self, factor: f64) -> Point {
        Point(self.0.iter().map(|c| c * factor).collect())
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}
