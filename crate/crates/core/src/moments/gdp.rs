//! Var P(A) / (H(A)(1 - H(A))) for the generalized Dirichlet process.

use super::MomentValue;
use crate::error::{domain, Error, Result};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};

/// Leading term (sum 1/k^2) / ((sum 1/j)^2 a).
fn asymptotic(a: f64, r: u32) -> f64 {
    let h1: f64 = (1..=r).map(|j| 1.0 / j as f64).sum();
    let h2: f64 = (1..=r).map(|k| 1.0 / (k * k) as f64).sum();
    h2 / (h1 * h1 * a)
}

/// I_{a,r} = a (r!)^a sum_k int_0^inf x / ((k+x)^2 prod_j (j+x)^a) dx.
///
/// The integrand is evaluated through its logarithm. Panels double from the
/// decay scale 1/(a H_r) out to x = r, then the tail is mapped to [0, 1).
pub fn gdp_variance_integral(a: f64, r: u32) -> Result<MomentValue> {
    if !(a > 0.0) || !a.is_finite() || r == 0 {
        return Err(domain(format!("GDP needs a > 0 and r >= 1, got a = {a}, r = {r}")));
    }
    if a > 1e8 {
        return Err(Error::Overflow(format!("a = {a:e} exceeds the log-space range of the integrand")));
    }
    let ln_a = a.ln();
    let h1: f64 = (1..=r).map(|j| 1.0 / j as f64).sum();
    let integrand = |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        // (r!)^a / prod (j+x)^a = prod (1 + x/j)^{-a}
        let ln_prod: f64 = (1..=r).map(|j| (x / j as f64).ln_1p()).sum();
        let core = ln_a - a * ln_prod + x.ln();
        (1..=r).map(|k| (core - 2.0 * (k as f64 + x).ln()).exp()).sum()
    };
    let tol = Tolerance::new(0.0, 1e-12);
    let mut edges = vec![0.0];
    let mut x = 1.0 / (a * h1);
    let stop = r as f64;
    while x < stop {
        edges.push(x);
        x *= 2.0;
    }
    edges.push(stop);
    let mut value = 0.0;
    let mut error = 0.0;
    for w in edges.windows(2) {
        let q = integrate(integrand, w[0], w[1], tol);
        value += q.value;
        error += q.error;
    }
    let q = integrate_to_infinity(integrand, stop, stop, tol);
    value += q.value;
    error += q.error;
    if !(error <= 1e-9 * value.abs()) || !value.is_finite() {
        return Err(Error::Quadrature { value, error });
    }
    Ok(MomentValue::quadrature(value, Some(asymptotic(a, r))))
}
