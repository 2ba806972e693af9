//! Scalar special functions used by the stick densities and the closed-form
//! moment identities.
//!
//! Every routine here is a pure function. The closed forms are paired with
//! independent evaluators (partial sums, quadrature) exposed through
//! [`oracle`], which the `validate` suite and the tests use as references.

mod bessel;
mod gamma;
mod hypergeometric;
mod incgamma;
mod kolmogorov;
pub mod oracle;

pub use bessel::{bessel_k, ln_bessel_k};
pub use gamma::{
    digamma, ln_gamma_signed, ln_pochhammer_signed, log_gamma, pochhammer, EULER_GAMMA,
};
pub use hypergeometric::{DEFAULT_TERMS, gauss_2f1_unity, hyp2f1_partial_sum, ich_2q1_partial_sum, ich_2q1_unity};
pub use incgamma::{ln_upper_incomplete_gamma, regularized_gamma_p, regularized_gamma_q, upper_incomplete_gamma};
pub use kolmogorov::{kolmogorov_cdf, kolmogorov_quantile};

use crate::scalar::Real;

/// A special-function value with an estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpecialValue<T> {
    pub value: T,
    pub abs_error_bound: T,
}

impl<T: Real> SpecialValue<T> {
    pub fn new(value: T, abs_error_bound: T) -> Self {
        SpecialValue { value, abs_error_bound: abs_error_bound.abs() }
    }

    /// A value whose error is a few ulps of `value`.
    pub(crate) fn rounded(value: T, ulps: f64) -> Self {
        Self::new(value, value.abs() * T::epsilon() * T::lit(ulps))
    }

    pub fn relative_error_bound(&self) -> T {
        if self.value == T::zero() {
            self.abs_error_bound
        } else {
            self.abs_error_bound / self.value.abs()
        }
    }
}

/// `sin(pi x)` with exact zeros at the integers.
pub(crate) fn sin_pi<T: Real>(x: T) -> T {
    let two = T::lit(2.0);
    let mut r = x % two;
    if r < T::zero() {
        r = r + two;
    }
    // r in [0, 2)
    if r == T::zero() || r == T::one() {
        return T::zero();
    }
    let (r, sign) = if r > T::one() { (r - T::one(), -T::one()) } else { (r, T::one()) };
    let r = if r > T::lit(0.5) { T::one() - r } else { r };
    sign * (T::PI() * r).sin()
}

/// True when `x` is an integer <= 0.
pub(crate) fn is_nonpositive_integer<T: Real>(x: T) -> bool {
    x <= T::zero() && x == x.round()
}
