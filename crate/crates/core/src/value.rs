//! Finite-dimensional value space standing in for the Banach space `X`.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::Real;

/// Norm carried by a [`ValueVec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    #[default]
    Euclidean,
    Max,
    One,
}

/// Element of `R^n` (or `Z^n`, `Q^n`) with a selectable norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueVec<T> {
    components: Vec<T>,
    norm_kind: NormKind,
}

impl<T> ValueVec<T> {
    pub fn new(components: Vec<T>) -> Self {
        Self {
            components,
            norm_kind: NormKind::Euclidean,
        }
    }

    pub fn with_norm(mut self, norm_kind: NormKind) -> Self {
        self.norm_kind = norm_kind;
        self
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[T] {
        &self.components
    }

    pub fn into_components(self) -> Vec<T> {
        self.components
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm_kind
    }
}

impl<T: Clone + Zero> ValueVec<T> {
    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![T::zero(); dim])
    }

    pub fn scalar(x: T) -> Self {
        Self::new(vec![x])
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Zero::is_zero)
    }
}

impl<T: Clone + Neg<Output = T>> Neg for ValueVec<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            components: self.components.into_iter().map(|c| -c).collect(),
            norm_kind: self.norm_kind,
        }
    }
}

impl<T: Clone + Add<Output = T>> ValueVec<T> {
    /// Componentwise sum; panics on dimension mismatch.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "value dimension mismatch");
        Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
            norm_kind: self.norm_kind,
        }
    }
}

impl<T: Clone + Sub<Output = T>> ValueVec<T> {
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "value dimension mismatch");
        Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
            norm_kind: self.norm_kind,
        }
    }
}

impl<T: Clone + Mul<Output = T>> ValueVec<T> {
    pub fn scale(&self, s: T) -> Self {
        Self {
            components: self.components.iter().map(|c| c.clone() * s.clone()).collect(),
            norm_kind: self.norm_kind,
        }
    }
}

impl<T: Clone + Zero + Mul<Output = T>> ValueVec<T> {
    /// Bilinear pairing `sum_i x_i y_i` (the duality between `X` and `X*`).
    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.dim(), other.dim(), "value dimension mismatch");
        self.components
            .iter()
            .zip(&other.components)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }
}

impl<T: Real> ValueVec<T> {
    pub fn norm(&self) -> T {
        match self.norm_kind {
            NormKind::Euclidean => self
                .components
                .iter()
                .fold(T::zero(), |acc, &c| acc + c * c)
                .sqrt(),
            NormKind::Max => self
                .components
                .iter()
                .fold(T::zero(), |acc, &c| acc.max(c.abs())),
            NormKind::One => self.components.iter().fold(T::zero(), |acc, &c| acc + c.abs()),
        }
    }

    pub fn squared_euclidean(&self) -> T {
        self.components.iter().fold(T::zero(), |acc, &c| acc + c * c)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.components
            .iter()
            .zip(&other.components)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }
}

/// Sign helper with `sign(0) = 0`.
pub fn signum0<T: Signed + Zero>(x: &T) -> T {
    if x.is_zero() {
        T::zero()
    } else {
        x.signum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms() {
        let v = ValueVec::new(vec![3.0_f64, -4.0]);
        assert_eq!(v.norm(), 5.0);
        assert_eq!(v.clone().with_norm(NormKind::Max).norm(), 4.0);
        assert_eq!(v.with_norm(NormKind::One).norm(), 7.0);
        assert_eq!(ValueVec::<f64>::zeros(3).norm(), 0.0);
    }

    #[test]
    fn exact_integer_values() {
        let a = ValueVec::new(vec![1_i64, -2]);
        let b = ValueVec::new(vec![3_i64, 5]);
        assert_eq!(a.dot(&b), -7);
        assert_eq!((-a.clone()).components(), &[-1, 2]);
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn homogeneity() {
        for kind in [NormKind::Euclidean, NormKind::Max, NormKind::One] {
            let v = ValueVec::new(vec![0.5_f64, -1.25, 2.0]).with_norm(kind);
            let s = -3.0;
            assert!((v.scale(s).norm() - 3.0 * v.norm()).abs() < 1e-12);
        }
    }
}
