//! Exact linear structure shared by every vector type in the crate.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::numerics::{fmt_rational, rational_vec, Rational};

/// A vector in a rational subspace of some Banach space.
///
/// `common_coords` must return coordinates of both operands in one common
/// finite linear system: the map to coordinates has to be linear and injective
/// on the span of the two vectors, so that linear dependence can be decided
/// from them.
pub trait Vector: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    fn common_coords(&self, other: &Self) -> (Vec<Rational>, Vec<Rational>);
    fn to_json(&self) -> serde_json::Value;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    fn midpoint(&self, other: &Self) -> Self {
        self.add(other).scale(&Rational::new(1.into(), 2.into()))
    }

    fn is_zero_vector(&self) -> bool {
        self.common_coords(self).0.iter().all(Zero::is_zero)
    }

    /// Linear dependence of `self` and `other` over the rationals.
    fn is_parallel(&self, other: &Self) -> bool {
        let (x, y) = self.common_coords(other);
        linearly_dependent(&x, &y)
    }
}

pub fn linearly_dependent(x: &[Rational], y: &[Rational]) -> bool {
    debug_assert_eq!(x.len(), y.len());
    let Some(p) = (0..x.len()).find(|&i| !x[i].is_zero() || !y[i].is_zero()) else {
        return true;
    };
    (0..x.len()).all(|j| &x[p] * &y[j] == &x[j] * &y[p])
}

/// A point of `ℝ^d` with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RVec(#[serde(with = "rational_vec")] pub Vec<Rational>);

impl RVec {
    pub fn new(coords: Vec<Rational>) -> Self {
        RVec(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn sup_norm(&self) -> Rational {
        self.0
            .iter()
            .map(num_traits::Signed::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn sq_norm(&self) -> Rational {
        self.0.iter().map(|q| q * q).sum()
    }

    pub fn l1_norm(&self) -> Rational {
        self.0.iter().map(num_traits::Signed::abs).sum()
    }
}

impl Vector for RVec {
    fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        RVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn scale(&self, c: &Rational) -> Self {
        RVec(self.0.iter().map(|a| a * c).collect())
    }

    fn common_coords(&self, other: &Self) -> (Vec<Rational>, Vec<Rational>) {
        let n = self.dim().max(other.dim());
        let pad = |v: &[Rational]| {
            let mut out = v.to_vec();
            out.resize(n, Rational::zero());
            out
        };
        (pad(&self.0), pad(&other.0))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.0
                .iter()
                .map(|q| serde_json::Value::String(fmt_rational(q)))
                .collect(),
        )
    }
}

/// Finite direct sums are vectors too; used for `ℓ₂`-sums of codomains.
impl<V: Vector> Vector for Vec<V> {
    fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "summand count mismatch");
        self.iter().zip(other).map(|(a, b)| a.add(b)).collect()
    }

    fn scale(&self, c: &Rational) -> Self {
        self.iter().map(|a| a.scale(c)).collect()
    }

    fn common_coords(&self, other: &Self) -> (Vec<Rational>, Vec<Rational>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (a, b) in self.iter().zip(other) {
            let (x, y) = a.common_coords(b);
            xs.extend(x);
            ys.extend(y);
        }
        (xs, ys)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.iter().map(Vector::to_json).collect())
    }
}
