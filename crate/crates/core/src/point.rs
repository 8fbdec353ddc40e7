//! Dense real vectors.

use serde::{Deserialize, Serialize};
use std::ops::{Deref, DerefMut};

/// A dense point in `R^d`. Coordinates are stored 0-based; the progress
/// functions in [`crate::progress`] report 1-based indices.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    /// The standard basis vector `e_i` with a 1-based index.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= dim, "basis index {i} out of range 1..={dim}");
        let mut p = Self::zeros(dim);
        p.0[i - 1] = 1.0;
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Point {
        Point(self.0.iter().map(|a| c * a).collect())
    }

    pub fn scale_mut(&mut self, c: f64) {
        self.0.iter_mut().for_each(|a| *a *= c);
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: f64, other: &Point) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += c * b;
        }
    }

    pub fn add(&self, other: &Point) -> Point {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &Point) -> Point {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// `a * x + b * y`
    pub fn lincomb(a: f64, x: &Point, b: f64, y: &Point) -> Point {
        debug_assert_eq!(x.dim(), y.dim());
        Point(
            x.0.iter()
                .zip(&y.0)
                .map(|(xi, yi)| a * xi + b * yi)
                .collect(),
        )
    }

    /// Mean of a non-empty collection of equal-dimension points.
    pub fn mean<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<Point> {
        let mut iter = points.into_iter();
        let mut acc = iter.next()?.clone();
        let mut n = 1usize;
        for p in iter {
            acc.axpy(1.0, p);
            n += 1;
        }
        acc.scale_mut(1.0 / n as f64);
        Some(acc)
    }

    /// Copy with coordinates past the first `len` set to zero.
    pub fn truncated(&self, len: usize) -> Point {
        let mut out = self.clone();
        for a in out.0.iter_mut().skip(len) {
            *a = 0.0;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let x = Point::from(vec![1.0, 2.0, 2.0]);
        assert_eq!(x.norm(), 3.0);
        assert_eq!(x.dot(&Point::basis(3, 2)), 2.0);
        let y = x.sub(&x.scaled(0.5));
        assert_eq!(y.as_slice(), &[0.5, 1.0, 1.0]);
        assert_eq!(x.truncated(1).as_slice(), &[1.0, 0.0, 0.0]);
        let m = Point::mean([&x, &Point::zeros(3)]).unwrap();
        assert_eq!(m.as_slice(), &[0.5, 1.0, 1.0]);
        assert!(Point::mean(std::iter::empty()).is_none());
    }
}
