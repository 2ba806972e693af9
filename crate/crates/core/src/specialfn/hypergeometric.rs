use crate::error::{domain, Error, Result};
use crate::scalar::Real;

use super::gamma::ln_gamma_signed;
use super::{is_nonpositive_integer, SpecialValue};

/// Default term budget for the partial-sum evaluators.
pub const DEFAULT_TERMS: usize = 1_000_000;

/// Gauss's value 2F1(a, b; c; 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b)).
pub fn gauss_2f1_unity<T: Real>(a: T, b: T, c: T) -> Result<SpecialValue<T>> {
    if is_nonpositive_integer(c) {
        return Err(Error::Pole(format!("2F1 lower parameter c = {c} is a nonpositive integer")));
    }
    let s = c - a - b;
    if !(s > T::zero()) {
        return Err(Error::Divergence(format!("2F1 at 1 diverges: c - a - b = {s} <= 0")));
    }
    if a == T::zero() || b == T::zero() {
        return Ok(SpecialValue::new(T::one(), T::zero()));
    }
    if is_nonpositive_integer(c - a) || is_nonpositive_integer(c - b) {
        return Err(Error::Pole(format!("c - a or c - b is a nonpositive integer (a={a}, b={b}, c={c})")));
    }
    let (l1, s1) = ln_gamma_signed(c)?;
    let (l2, s2) = ln_gamma_signed(s)?;
    let (l3, s3) = ln_gamma_signed(c - a)?;
    let (l4, s4) = ln_gamma_signed(c - b)?;
    let ln_v = l1 + l2 - l3 - l4;
    let value = s1 * s2 * s3 * s4 * ln_v.exp();
    let cond = T::lit(8.0) + l1.abs() + l2.abs() + l3.abs() + l4.abs();
    Ok(SpecialValue::new(value, value.abs() * T::epsilon() * cond))
}

/// Sums a hypergeometric-type series given its first term and term ratio
/// `t_{k+1} / t_k`. `tail_exponent` is s when the terms decay like k^{-s-1}
/// (the tail is then removed by Richardson extrapolation with known
/// exponent); `None` means geometric or terminating decay.
pub(crate) fn accelerated_sum<T: Real, R: FnMut(usize) -> T>(
    first: T,
    mut ratio: R,
    tail_exponent: Option<T>,
    max_terms: usize,
    what: &str,
) -> Result<SpecialValue<T>> {
    let max_terms = (max_terms.max(64) / 4) * 4;
    let q1 = max_terms / 4;
    let q2 = max_terms / 2;
    let mut t = first;
    let mut sum = first;
    let (mut s_q1, mut s_q2) = (T::nan(), T::nan());
    let mut last_ratio = T::zero();
    for k in 0..max_terms - 1 {
        let r = ratio(k);
        t = t * r;
        sum = sum + t;
        let n = k + 2;
        if t == T::zero() {
            return Ok(SpecialValue::rounded(sum, n as f64));
        }
        last_ratio = r.abs();
        let factor = match tail_exponent {
            Some(s) if s > T::zero() => T::one() + T::count(n) / s,
            Some(_) => T::infinity(),
            None if last_ratio < T::one() => (last_ratio / (T::one() - last_ratio)).max(T::one()),
            None => T::infinity(),
        };
        if t.abs() * factor < T::lit(1e-14) * sum.abs() {
            return Ok(SpecialValue::new(sum, t.abs() * factor + sum.abs() * T::epsilon() * T::count(n)));
        }
        if n == q1 {
            s_q1 = sum;
        } else if n == q2 {
            s_q2 = sum;
        }
    }
    let s3 = sum;
    match tail_exponent {
        Some(s) if s > T::zero() => {
            // S_i = S - C N_i^{-s} - D N_i^{-s-1} at N, 2N, 4N
            let two = T::lit(2.0);
            let u = |i: i32| two.powf(-s * T::lit(i as f64));
            let v = |i: i32| two.powf(-(s + T::one()) * T::lit(i as f64));
            let (d1, d2) = (s_q2 - s_q1, s3 - s_q2);
            let (a11, a12) = (u(0) - u(1), v(0) - v(1));
            let (a21, a22) = (u(1) - u(2), v(1) - v(2));
            let det = a11 * a22 - a12 * a21;
            let cc = (d1 * a22 - a12 * d2) / det;
            let dd = (a11 * d2 - a21 * d1) / det;
            let two_term = s3 + cc * u(2) + dd * v(2);
            let one_term = s3 + d2 / a21 * u(2);
            let err = (two_term - one_term).abs() + two_term.abs() * T::epsilon() * T::count(max_terms);
            if !two_term.is_finite() {
                return Err(Error::SeriesDivergence { terms: max_terms, what: what.into() });
            }
            Ok(SpecialValue::new(two_term, err))
        }
        None if last_ratio < T::one() => {
            let tail = t.abs() * last_ratio / (T::one() - last_ratio);
            Ok(SpecialValue::new(sum, tail))
        }
        _ => Err(Error::Divergence(format!("{what}: series does not converge"))),
    }
}

/// Partial-sum evaluator of sum_n (a)_n (b)_n / ((c)_n n!) at unit argument,
/// with the algebraic tail removed by extrapolation.
pub fn hyp2f1_partial_sum<T: Real>(a: T, b: T, c: T, max_terms: usize) -> Result<SpecialValue<T>> {
    if is_nonpositive_integer(c) {
        return Err(Error::Pole(format!("2F1 lower parameter c = {c} is a nonpositive integer")));
    }
    let terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    let s = c - a - b;
    if !terminating && !(s > T::zero()) {
        return Err(Error::Divergence(format!("2F1 at 1 diverges: c - a - b = {s} <= 0")));
    }
    accelerated_sum(
        T::one(),
        |k| {
            let kf = T::count(k);
            (a + kf) * (b + kf) / ((c + kf) * (kf + T::one()))
        },
        if terminating { None } else { Some(s) },
        max_terms,
        "2F1 partial sums",
    )
}

fn check_2q1<T: Real>(a: T, b: T, m: T, n: u32) -> Result<()> {
    if !(a > T::zero()) || !(b < T::lit(2.0)) || !(m > T::zero()) || n == 0 {
        return Err(domain(format!("2Q1 requires a > 0, b < 2, m > 0, n >= 1 (a={a}, b={b}, m={m}, n={n})")));
    }
    Ok(())
}

/// Closed value at unit argument of the increasing-coefficient series
/// 2Q1(a, b, c, m, n; 1) = prod_{l=1}^{n-1} (a + b l) (a + m) / (m - n b).
/// Only c = 1 is supported in closed form.
pub fn ich_2q1_unity<T: Real>(a: T, b: T, c: T, m: T, n: u32) -> Result<SpecialValue<T>> {
    check_2q1(a, b, m, n)?;
    let gap = m - T::count(n as usize) * b;
    if !(gap > T::zero()) {
        return Err(domain(format!("2Q1 at 1 requires m - n b > 0, got {gap}")));
    }
    if c != T::one() {
        return Err(Error::Unsupported(format!(
            "2Q1 closed form is established only for c = 1 (got c = {c}); use ich_2q1_partial_sum"
        )));
    }
    let mut prod = T::one();
    for l in 1..n {
        prod = prod * (a + b * T::count(l as usize));
    }
    Ok(SpecialValue::rounded(prod * (a + m) / gap, 4.0 + n as f64))
}

/// Partial-sum evaluator of the defining series
/// sum_k prod_{l=1}^{n-1}(a + b(k+l)) (a/b+1)_k (c)_k / (((a+m)/b+1)_k k!) x^k
/// for arbitrary c and |x| <= 1.
pub fn ich_2q1_partial_sum<T: Real>(a: T, b: T, c: T, m: T, n: u32, x: T, max_terms: usize) -> Result<SpecialValue<T>> {
    check_2q1(a, b, m, n)?;
    if x.abs() > T::one() {
        return Err(domain(format!("2Q1 series requires |x| <= 1, got {x}")));
    }
    let mut first = T::one();
    for l in 1..n {
        first = first * (a + b * T::count(l as usize));
    }
    let nf = T::count(n as usize);
    let tail = if x.abs() < T::one() || b == T::zero() {
        None
    } else {
        Some(m / b - nf + T::one() - c)
    };
    accelerated_sum(
        first,
        |k| {
            let kf = T::count(k);
            (a + b * (kf + nf)) / (a + m + b * (kf + T::one())) * (c + kf) / (kf + T::one()) * x
        },
        tail,
        max_terms,
        "2Q1 partial sums",
    )
}
