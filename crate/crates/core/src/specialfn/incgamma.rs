use crate::error::{domain, Error, Result};
use crate::scalar::Real;

use super::gamma::{log_gamma_pos, EULER_GAMMA};
use super::SpecialValue;

const MAX_TERMS: usize = 1_000_000;

/// sum_{n>=0} x^n / (c+1)_n, so that gamma(c, x) = x^c e^{-x} / c * sum.
fn lower_series<T: Real>(c: T, x: T) -> Result<T> {
    let mut term = T::one();
    let mut sum = T::one();
    for n in 1..MAX_TERMS {
        term = term * x / (c + T::count(n));
        sum = sum + term;
        if term.abs() < T::lit(1e-17) * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::SeriesDivergence { terms: MAX_TERMS, what: "incomplete gamma series".into() })
}

/// Continued fraction h with Gamma(c, x) = x^c e^{-x} h (modified Lentz).
fn upper_cf<T: Real>(c: T, x: T) -> Result<T> {
    let tiny = T::min_positive_value() / T::epsilon();
    let mut b = x + T::one() - c;
    let mut cc = tiny.recip();
    let mut d = b.recip();
    let mut h = d;
    for i in 1..MAX_TERMS {
        let fi = T::count(i);
        let an = -fi * (fi - c);
        b = b + T::lit(2.0);
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        cc = b + an / cc;
        if cc.abs() < tiny {
            cc = tiny;
        }
        d = d.recip();
        let del = d * cc;
        h = h * del;
        if (del - T::one()).abs() < T::epsilon() {
            return Ok(h);
        }
    }
    Err(Error::SeriesDivergence { terms: MAX_TERMS, what: "incomplete gamma continued fraction".into() })
}

/// E_1(x) = Gamma(0, x) by its power series, 0 < x < 1.
fn e1_series<T: Real>(x: T) -> T {
    let mut term = T::one();
    let mut sum = T::zero();
    for k in 1..200 {
        let kf = T::count(k);
        term = -term * x / kf;
        let add = term / kf;
        sum = sum + add;
        if add.abs() < T::epsilon() * T::lit(1e-2) * sum.abs() {
            break;
        }
    }
    -T::lit(EULER_GAMMA) - x.ln() - sum
}

fn positive_order<T: Real>(c: T, x: T) -> Result<T> {
    if x == T::zero() {
        return Ok(log_gamma_pos(c).exp());
    }
    if x < c + T::one() {
        let lower = (c * x.ln() - x).exp() / c * lower_series(c, x)?;
        Ok(log_gamma_pos(c).exp() - lower)
    } else {
        Ok((c * x.ln() - x).exp() * upper_cf(c, x)?)
    }
}

/// Upper incomplete gamma function Gamma(c, x) = int_x^inf u^{c-1} e^{-u} du
/// for any real c; x > 0 is required when c <= 0.
pub fn upper_incomplete_gamma<T: Real>(c: T, x: T) -> Result<SpecialValue<T>> {
    if !(x >= T::zero()) || !x.is_finite() || !c.is_finite() {
        return Err(domain(format!("upper_incomplete_gamma requires x >= 0, got {x}")));
    }
    if c > T::zero() {
        return Ok(SpecialValue::rounded(positive_order(c, x)?, 64.0));
    }
    if x == T::zero() {
        return Err(domain(format!("Gamma({c}, 0) diverges for c <= 0")));
    }
    if x >= T::one() {
        return Ok(SpecialValue::rounded((c * x.ln() - x).exp() * upper_cf(c, x)?, 64.0));
    }
    // Downward recurrence Gamma(s, x) = (Gamma(s+1, x) - x^s e^{-x}) / s.
    let floor = c.floor();
    let base_order = c - floor;
    let (mut s, mut g) = if base_order == T::zero() {
        (T::zero(), e1_series(x))
    } else {
        (base_order, positive_order(base_order, x)?)
    };
    let mut steps = 0usize;
    while s > c {
        s = s - T::one();
        g = (g - (s * x.ln() - x).exp()) / s;
        steps += 1;
    }
    Ok(SpecialValue::rounded(g, 64.0 * (1 + steps) as f64))
}

/// ln Gamma(c, x), staying finite where Gamma(c, x) itself under- or
/// overflows (large x, or c far below zero).
pub fn ln_upper_incomplete_gamma<T: Real>(c: T, x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() || !c.is_finite() {
        return Err(domain(format!("ln_upper_incomplete_gamma requires x > 0, got {x}")));
    }
    let use_cf = if c > T::zero() { x >= c + T::one() } else { x >= T::one() || c <= T::lit(-5.0) };
    if use_cf {
        return Ok(c * x.ln() - x + upper_cf(c, x)?.ln());
    }
    Ok(upper_incomplete_gamma(c, x)?.value.ln())
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a), a > 0.
pub fn regularized_gamma_q<T: Real>(a: T, x: T) -> Result<T> {
    if !(a > T::zero()) || !(x >= T::zero()) {
        return Err(domain(format!("regularized_gamma_q requires a > 0, x >= 0, got ({a}, {x})")));
    }
    if x == T::zero() {
        return Ok(T::one());
    }
    if x < a + T::one() {
        Ok(T::one() - lower_p(a, x)?)
    } else {
        Ok((a * x.ln() - x - log_gamma_pos(a)).exp() * upper_cf(a, x)?)
    }
}

/// Regularized lower incomplete gamma P(a, x) = 1 - Q(a, x).
pub fn regularized_gamma_p<T: Real>(a: T, x: T) -> Result<T> {
    if !(a > T::zero()) || !(x >= T::zero()) {
        return Err(domain(format!("regularized_gamma_p requires a > 0, x >= 0, got ({a}, {x})")));
    }
    if x < a + T::one() {
        lower_p(a, x)
    } else {
        Ok(T::one() - regularized_gamma_q(a, x)?)
    }
}

fn lower_p<T: Real>(a: T, x: T) -> Result<T> {
    if x == T::zero() {
        return Ok(T::zero());
    }
    Ok((a * x.ln() - x - log_gamma_pos(a + T::one())).exp() * lower_series(a, x)?)
}
