//! Scalar abstractions shared by the deterministic numerics.
//!
//! [`Real`] covers the floating-point paths (special functions, quadrature,
//! log-space moment formulas). [`Field`] is the weaker algebraic bound used by
//! formulas that only need field operations, so they can also be evaluated in
//! exact rational arithmetic.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts an integer count into `Self`.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A commutative field with exact conversion from small integers.
///
/// Implemented for the floating types and for `num_rational::Ratio<i64>` /
/// `Ratio<i128>`.
pub trait Field: Num + Clone + FromPrimitive + Debug {
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }
}

impl Field for f32 {}
impl Field for f64 {}
impl Field for num_rational::Ratio<i64> {}
impl Field for num_rational::Ratio<i128> {}

/// Integer power by repeated squaring; `x^0 = 1` including `0^0`.
pub fn powi<F: Field>(x: &F, mut n: u32) -> F {
    let mut base = x.clone();
    let mut acc = F::one();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base.clone();
        }
        n >>= 1;
        if n > 0 {
            base = base.clone() * base;
        }
    }
    acc
}

/// `n!` in the field.
pub fn factorial<F: Field>(n: u32) -> F {
    (1..=n as i64).fold(F::one(), |acc, k| acc * F::from_int(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn zero_to_the_zero_is_one() {
        assert_eq!(powi(&0.0_f64, 0), 1.0);
        assert_eq!(powi(&Ratio::<i64>::from_integer(0), 0), Ratio::from_integer(1));
    }

    #[test]
    fn powi_matches_float_pow() {
        assert_eq!(powi(&1.5_f64, 7), 1.5_f64.powi(7));
        assert_eq!(powi(&Ratio::<i128>::new(2, 3), 3), Ratio::new(8, 27));
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial::<f64>(0), 1.0);
        assert_eq!(factorial::<f64>(6), 720.0);
        assert_eq!(factorial::<Ratio<i64>>(5), Ratio::from_integer(120));
    }
}
