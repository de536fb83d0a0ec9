//! Numeric abstractions shared by the metric and solver code.
//!
//! [`Scalar`] covers every type the transportation solver and the distance
//! code can run on: `f32`, `f64` and exact rationals ([`Exact`]).
//! [`Real`] adds the logarithms needed by the entropy-based measures and is
//! only implemented for the floating point types.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Exact rational arithmetic.
pub type Exact = BigRational;

/// A number type the transport solver and distances can be evaluated in.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// `num / den`. `den` must be non-zero.
    fn from_ratio(num: u64, den: u64) -> Self;

    /// Lossy conversion used for reporting.
    fn to_f64(&self) -> f64;

    /// Slack allowed when checking that masses balance and marginals are met.
    /// Zero for exact types.
    fn feasibility_tolerance() -> Self;

    /// Threshold below which a reduced cost or a flow is treated as zero
    /// inside the simplex iterations. Zero for exact types.
    fn pivot_tolerance() -> Self;

    fn is_exact() -> bool {
        Self::pivot_tolerance().is_zero()
    }
}

impl Scalar for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn feasibility_tolerance() -> Self {
        1e-9
    }

    fn pivot_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn from_ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn feasibility_tolerance() -> Self {
        1e-5
    }

    fn pivot_tolerance() -> Self {
        1e-7
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn feasibility_tolerance() -> Self {
        BigRational::zero()
    }

    fn pivot_tolerance() -> Self {
        BigRational::zero()
    }
}

/// Floating point scalars: everything the entropy and risk code needs.
pub trait Real: Scalar + Float + FromPrimitive + Copy {}

impl Real for f32 {}
impl Real for f64 {}

/// `|a - b| <= tol`.
pub(crate) fn approx_eq<T: Scalar>(a: &T, b: &T, tol: &T) -> bool {
    (a.clone() - b.clone()).abs() <= *tol
}

pub(crate) fn sum<'a, T: Scalar>(values: impl IntoIterator<Item = &'a T>) -> T {
    values
        .into_iter()
        .fold(T::zero(), |acc, v| acc + v.clone())
}
