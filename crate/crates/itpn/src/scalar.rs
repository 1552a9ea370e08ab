//! Exact scalar arithmetic and bounds with a distinguished `+inf`.
//!
//! Every engine in this crate works over an exact rational scalar; floating
//! point is never used. The [`Scalar`] trait abstracts the concrete rational
//! representation so that small models can run on fixed-width ratios while
//! anything that multiplies coefficients (the polyhedral oracle) runs on
//! arbitrary-precision ones.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Neg};

use num::traits::{FromPrimitive, Signed};

/// An exact rational scalar.
///
/// Implemented by `num::rational::Ratio<i64>` and `num::BigRational`; the
/// crate-root aliases [`crate::Rational`] and [`crate::Rational64`] pick the
/// two instantiations used throughout.
pub trait Scalar:
    Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Signed + FromPrimitive + 'static
{
}

impl<T> Scalar for T where
    T: Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Signed + FromPrimitive + 'static
{
}

/// Converts a machine integer into a scalar.
pub fn int<S: Scalar>(n: i64) -> S {
    S::from_i64(n).expect("integer representable in scalar")
}

/// Builds the rational `num / den`.
pub fn ratio<S: Scalar>(num: i64, den: i64) -> S {
    assert!(den != 0, "zero denominator");
    int::<S>(num) / int::<S>(den)
}

/// A rational bound extended with `+inf`.
///
/// Upper bounds of firing intervals and matrix entries may be infinite; lower
/// bounds never are, so negation of `Infinity` is a contract violation and
/// panics.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Bound<S> {
    Finite(S),
    Infinity,
}

pub use Bound::{Finite, Infinity};

impl<S: Scalar> Bound<S> {
    pub fn zero() -> Self {
        Finite(S::zero())
    }

    pub fn of(n: i64) -> Self {
        Finite(int(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(&self) -> Option<&S> {
        match self {
            Finite(v) => Some(v),
            Infinity => None,
        }
    }

    /// Unwraps a bound that is finite by contract.
    pub fn expect_finite(&self) -> &S {
        match self {
            Finite(v) => v,
            Infinity => panic!("bound expected to be finite"),
        }
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Finite(v) => !v.is_negative(),
            Infinity => true,
        }
    }
}

/// `+inf` absorbs addition.
impl<S: Scalar> Add for Bound<S> {
    type Output = Bound<S>;
    fn add(self, rhs: Bound<S>) -> Bound<S> {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => Infinity,
        }
    }
}

impl<S: Scalar> Add<&S> for Bound<S> {
    type Output = Bound<S>;
    fn add(self, rhs: &S) -> Bound<S> {
        match self {
            Finite(a) => Finite(a + rhs.clone()),
            Infinity => Infinity,
        }
    }
}

impl<S: Scalar> Neg for Bound<S> {
    type Output = Bound<S>;
    fn neg(self) -> Bound<S> {
        match self {
            Finite(v) => Finite(-v),
            Infinity => panic!("negation of +inf (lower bounds are always finite)"),
        }
    }
}

impl<S: Scalar> From<S> for Bound<S> {
    fn from(v: S) -> Self {
        Finite(v)
    }
}

impl<S: fmt::Display> fmt::Display for Bound<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(v) => v.fmt(f),
            Infinity => write!(f, "inf"),
        }
    }
}
