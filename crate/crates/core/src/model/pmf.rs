use std::ops::Index;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// How far an input weight vector's sum may stray from one before it is
/// rejected. Accepted vectors are renormalized to sum exactly to one.
pub const PMF_SUM_TOLERANCE: f64 = 1e-9;

/// A probability mass function over a finite, indexed action set.
///
/// This is the common currency of every policy in the crate: user choices,
/// channel choices, and power choices on both sides are all `Pmf`s.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Pmf<T> {
    weights: Vec<T>,
}

impl<T: Real> Pmf<T> {
    /// Validates and renormalizes a weight vector: all entries must be
    /// non-negative and the sum must be within [`PMF_SUM_TOLERANCE`] of one.
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::validation(vec!["pmf: empty weight vector".into()]));
        }
        let mut violations = Vec::new();
        for (i, &w) in weights.iter().enumerate() {
            if w < T::zero() || w.is_nan() {
                violations.push(format!("pmf[{i}]: weight {w} is negative or NaN"));
            }
        }
        let sum: T = weights.iter().copied().sum();
        if (sum - T::one()).abs() > real(PMF_SUM_TOLERANCE) {
            violations.push(format!("pmf: weights sum to {sum}, expected 1"));
        }
        if !violations.is_empty() {
            return Err(Error::validation(violations));
        }
        let weights = weights.into_iter().map(|w| w / sum).collect();
        Ok(Pmf { weights })
    }

    /// Uniform pmf over `len` actions.
    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform pmf needs at least one action");
        let w = T::one() / real::<T>(len as f64);
        Pmf {
            weights: vec![w; len],
        }
    }

    /// Point mass on `index`.
    pub fn basis(len: usize, index: usize) -> Self {
        assert!(index < len, "basis index out of range");
        let mut weights = vec![T::zero(); len];
        weights[index] = T::one();
        Pmf { weights }
    }

    /// Two-point pmf with weight `w` on `lo` and `1 - w` on `hi`.
    pub(crate) fn two_point(len: usize, lo: usize, hi: usize, w: T) -> Self {
        assert!(lo < len && hi < len && lo != hi);
        let mut weights = vec![T::zero(); len];
        weights[lo] = w;
        weights[hi] = T::one() - w;
        Pmf { weights }
    }

    /// Uniform pmf over the given support indices, zero elsewhere.
    pub fn uniform_over(len: usize, support: &[usize]) -> Self {
        assert!(!support.is_empty(), "support must be non-empty");
        let w = T::one() / real::<T>(support.len() as f64);
        let mut weights = vec![T::zero(); len];
        for &i in support {
            assert!(i < len, "support index out of range");
            weights[i] = w;
        }
        Pmf { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.weights.iter()
    }

    /// Expected value of `values` under this pmf.
    pub fn expectation(&self, values: &[T]) -> T {
        debug_assert_eq!(values.len(), self.len());
        self.weights.iter().zip(values).map(|(&w, &v)| w * v).sum()
    }

    /// Indices carrying strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > T::zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// True when both pmfs have the same length and every weight differs by
    /// at most `tol`.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.len() == other.len()
            && self
                .weights
                .iter()
                .zip(other.weights.iter())
                .all(|(&a, &b)| (a - b).abs() <= tol)
    }
}

impl<T> Index<usize> for Pmf<T> {
    type Output = T;

    fn index(&self, index: usize) -> &T {
        &self.weights[index]
    }
}
