use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

/// A point of `R^d` with exact rational coordinates.
///
/// Ordering is lexicographic on coordinates, which is what every
/// tie-break in the crate uses.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector {
    #[serde(with = "rational::serde_rational_vec")]
    coords: Vec<Rational>,
}

impl Vector {
    pub fn new(coords: Vec<Rational>) -> Self {
        Vector { coords }
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        Vector::new(xs.iter().map(|&x| rational::int(x)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        Vector::new(vec![Rational::zero(); dim])
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Vector::zero(dim);
        v.coords[i] = rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &Vector) -> Rational {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scale(&self, s: &Rational) -> Vector {
        Vector::new(self.coords.iter().map(|c| c * s).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(rational::to_f64).collect()
    }

    /// `max_i |x_i|`
    pub fn max_abs(&self) -> Rational {
        self.coords
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `true` when `self = t * other` for some rational `t > 0`.
    pub fn is_positive_multiple_of(&self, other: &Vector) -> bool {
        if self.dim() != other.dim() || self.is_zero() || other.is_zero() {
            return false;
        }
        let pivot = other.coords.iter().position(|c| !c.is_zero()).unwrap();
        let t = &self.coords[pivot] / &other.coords[pivot];
        t.is_positive() && other.scale(&t) == *self
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector::new(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector::new(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector::new(self.coords.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
