//! Conditional stick densities of the NIGP and NGGP.

use crate::error::{domain, Error, Result};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::specialfn::{ln_bessel_k, ln_pochhammer_signed, ln_upper_incomplete_gamma, log_gamma, SpecialValue};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn check_args(n: u32, prefix_prod: f64, x: f64) -> Result<()> {
    if n == 0 {
        return Err(domain("stick index n starts at 1"));
    }
    if !(prefix_prod > 0.0 && prefix_prod <= 1.0) {
        return Err(domain(format!("prefix product must lie in (0, 1], got {prefix_prod}")));
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(domain(format!("density argument must lie in (0, 1), got {x}")));
    }
    Ok(())
}

/// ln f_{v_n | v_1..v_{n-1}}(x) for the NIGP, given prod_{i<n}(1 - v_i).
pub fn ln_conditional_density_nigp(n: u32, prefix_prod: f64, a: f64, x: f64) -> Result<f64> {
    check_args(n, prefix_prod, x)?;
    if !(a > 0.0) {
        return Err(domain("NIGP needs a > 0"));
    }
    let z = a / prefix_prod.sqrt();
    let nf = n as f64;
    let ln1mx = (-x).ln_1p();
    let top = ln_bessel_k(0.5 * (nf + 1.0), z * (-0.5 * ln1mx).exp())?;
    let bottom = ln_bessel_k(0.5 * nf, z)?;
    Ok(0.5 * z.ln() - 0.5 * x.ln() + 0.25 * (nf - 5.0) * ln1mx + top - LN_SQRT_2PI - bottom)
}

/// NIGP conditional stick density; n = 1 is the marginal of v_1.
pub fn conditional_density_nigp(n: u32, prefix_prod: f64, a: f64, x: f64) -> Result<f64> {
    Ok(ln_conditional_density_nigp(n, prefix_prod, a, x)?.exp())
}

/// ln of int_0^inf exp(ln_g(s)) ds where exp(ln_g(s)) ~ s^{alpha - 1} at 0.
/// Substitutes s = w^{1/beta}, beta = min(alpha, 1), and rescales by the
/// integrand's peak so the quadrature never sees overflow.
fn ln_integral<F: Fn(f64) -> f64>(ln_g: F, alpha: f64, scale: f64) -> Result<f64> {
    let beta = alpha.min(1.0);
    let ln_h = |w: f64| {
        if w <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let ln_w = w.ln();
        let ln_s = ln_w / beta;
        ln_g(ln_s.exp()) + (1.0 - beta) * ln_s - beta.ln()
    };
    // locate the peak on a log-spaced scan in s
    let mut peak_s = scale;
    let mut peak = f64::NEG_INFINITY;
    for k in 0..=120 {
        let s = scale * 10f64.powf(-6.0 + 0.08 * k as f64);
        let v = ln_h(s.powf(beta));
        if v > peak {
            peak = v;
            peak_s = s;
        }
    }
    if !peak.is_finite() {
        return Err(domain("integrand vanishes or overflows everywhere"));
    }
    let w0 = peak_s.powf(beta);
    let tol = Tolerance::new(0.0, 1e-12);
    let head = integrate(|w| (ln_h(w) - peak).exp(), 0.0, w0, tol);
    let tail = integrate_to_infinity(|w| (ln_h(w) - peak).exp(), w0, w0.max(scale.powf(beta)), tol);
    let total = head.value + tail.value;
    let err = head.error + tail.error;
    if !(total > 0.0) || err > 1e-8 * total {
        return Err(Error::Quadrature { value: total, error: err });
    }
    Ok(peak + total.ln())
}

/// ln of int_0^inf e^{-s} (1 + s/y)^{m-1} (1 - (1 + s/y)^{-1/sigma})^{m sigma - 1} ds.
fn ln_bracket(m: u32, sigma: f64, y: f64) -> Result<f64> {
    let mf = m as f64;
    let expo = mf * sigma - 1.0;
    let ln_g = move |s: f64| {
        let l = (s / y).ln_1p();
        let inner = -(-l / sigma).exp_m1();
        -s + (mf - 1.0) * l + expo * inner.ln()
    };
    ln_integral(ln_g, mf * sigma, mf.max(1.0))
}

/// ln f_{v_n | v_1..v_{n-1}}(x) for the NGGP, given prod_{i<n}(1 - v_i).
///
/// Evaluated through the closed integral obtained by summing the
/// incomplete-gamma series under its integral sign.
pub fn ln_conditional_density_nggp(n: u32, prefix_prod: f64, sigma: f64, a: f64, x: f64) -> Result<f64> {
    check_args(n, prefix_prod, x)?;
    if !(sigma > 0.0 && sigma < 1.0) || !(a > 0.0) {
        return Err(domain("NGGP needs 0 < sigma < 1 and a > 0"));
    }
    let ln1mx = (-x).ln_1p();
    let ln_pp = prefix_prod.ln();
    let nf = n as f64;
    if n == 1 {
        let y = a * (-sigma * ln1mx).exp();
        let pre = -sigma * x.ln() + (sigma - 1.0) * ln1mx + a - y - log_gamma(sigma)? - log_gamma(1.0 - sigma)?;
        return Ok(pre + ln_bracket(1, sigma, y)?);
    }
    let y = a * (-sigma * (ln1mx + ln_pp)).exp();
    let y_prev = a * (-sigma * ln_pp).exp();
    let pre = sigma.ln() + log_gamma((nf - 1.0) * sigma)? - sigma * x.ln() + (nf * sigma - 1.0) * ln1mx
        - log_gamma(1.0 - sigma)?
        - log_gamma(nf * sigma)?;
    let num = -y + (nf - 1.0) * y.ln() + ln_bracket(n, sigma, y)?;
    let den = -y_prev + (nf - 2.0) * y_prev.ln() + ln_bracket(n - 1, sigma, y_prev)?;
    Ok(pre + num - den)
}

/// NGGP conditional stick density; n = 1 is the marginal of v_1.
pub fn conditional_density_nggp(n: u32, prefix_prod: f64, sigma: f64, a: f64, x: f64) -> Result<f64> {
    Ok(ln_conditional_density_nggp(n, prefix_prod, sigma, a, x)?.exp())
}

/// Kahan-compensated sum of sum_j (c)_j / j! y^{j/sigma} Gamma(m - j/sigma, y),
/// stopping once a term drops below 1e-12 of the running sum.
fn incgamma_series(c: f64, m: f64, sigma: f64, y: f64, max_terms: usize) -> Result<SpecialValue<f64>> {
    let ln_y = y.ln();
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut ln_fact = 0.0f64;
    for j in 0..max_terms {
        if j > 0 {
            ln_fact += (j as f64).ln();
        }
        let (ln_poch, sign) = ln_pochhammer_signed(c, j as u32);
        if sign == 0.0 {
            return Ok(SpecialValue::new(sum, comp.abs()));
        }
        let jf = j as f64;
        let ln_g = ln_upper_incomplete_gamma(m - jf / sigma, y)?;
        let term = sign * (ln_poch - ln_fact + jf / sigma * ln_y + ln_g).exp();
        let t = term - comp;
        let next = sum + t;
        comp = (next - sum) - t;
        sum = next;
        if term.abs() < 1e-12 * sum.abs() {
            return Ok(SpecialValue::new(sum, term.abs() + comp.abs()));
        }
    }
    Err(Error::SeriesDivergence { terms: max_terms, what: format!("NGGP incomplete-gamma series (m = {m}, sigma = {sigma})") })
}

/// NGGP conditional density summed directly from its incomplete-gamma
/// series. Converges slowly when n sigma is small; raises a series
/// divergence error after `max_terms` terms (default 10^4 via `None`).
pub fn nggp_series_density(n: u32, prefix_prod: f64, sigma: f64, a: f64, x: f64, max_terms: Option<usize>) -> Result<SpecialValue<f64>> {
    check_args(n, prefix_prod, x)?;
    let max_terms = max_terms.unwrap_or(10_000);
    let nf = n as f64;
    let ln1mx = (-x).ln_1p();
    if n == 1 {
        let y = a * (-sigma * ln1mx).exp();
        let s = incgamma_series(1.0 - sigma, 1.0, sigma, y, max_terms)?;
        let pre = (-sigma * x.ln() + (sigma - 1.0) * ln1mx + a - log_gamma(sigma)? - log_gamma(1.0 - sigma)?).exp();
        return Ok(SpecialValue::new(pre * s.value, pre * s.abs_error_bound));
    }
    let ln_pp = prefix_prod.ln();
    let y = a * (-sigma * (ln1mx + ln_pp)).exp();
    let y_prev = a * (-sigma * ln_pp).exp();
    let num = incgamma_series(1.0 - nf * sigma, nf, sigma, y, max_terms)?;
    let den = incgamma_series(1.0 - (nf - 1.0) * sigma, nf - 1.0, sigma, y_prev, max_terms)?;
    let pre = (sigma.ln() + log_gamma((nf - 1.0) * sigma)? - sigma * x.ln() + (nf * sigma - 1.0) * ln1mx
        - log_gamma(1.0 - sigma)?
        - log_gamma(nf * sigma)?)
    .exp();
    let value = pre * num.value / den.value;
    let rel = num.abs_error_bound / num.value.abs() + den.abs_error_bound / den.value.abs();
    Ok(SpecialValue::new(value, value.abs() * rel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::tanh_sinh;

    fn mass<F: Fn(f64) -> f64>(f: F) -> (f64, f64) {
        let g = |x: f64| if x < 1.0 { f(x) } else { 0.0 };
        let q0 = tanh_sinh(|x, _, _| g(x), 0.0, 1.0, 1e-10);
        let q1 = tanh_sinh(|x, _, _| x * g(x), 0.0, 1.0, 1e-10);
        (q0.value, q1.value)
    }

    #[test]
    fn nigp_densities_normalize() {
        for (n, pp, a) in [(1, 1.0, 10.0), (2, 0.93, 10.0), (3, 0.5, 2.0), (6, 0.2, 50.0)] {
            let (m0, _) = mass(|x| conditional_density_nigp(n, pp, a, x).unwrap());
            assert!((m0 - 1.0).abs() < 1e-6, "n={n}: {m0}");
        }
        assert!(conditional_density_nigp(1, 1.0, 10.0, 1.0 - 1e-9).unwrap() < 1e-100);
        assert!(conditional_density_nigp(1, 1.0, 10.0, 1.0).is_err());
    }

    #[test]
    fn nggp_densities_normalize() {
        for (n, pp, sigma, a) in [(1, 1.0, 0.5, 20.0), (1, 1.0, 0.3, 2.0), (2, 1.0, 0.5, 20.0), (3, 0.4, 0.7, 5.0)] {
            let (m0, _) = mass(|x| conditional_density_nggp(n, pp, sigma, a, x).unwrap());
            assert!((m0 - 1.0).abs() < 1e-5, "n={n} sigma={sigma}: {m0}");
        }
        let f = conditional_density_nggp(2, 1.0, 0.5, 20.0, 0.3).unwrap();
        assert!(f.is_finite() && f > 0.0);
    }

    #[test]
    fn nggp_first_stick_mean_scales_like_one_over_a() {
        let means: Vec<f64> = [50.0, 100.0, 200.0]
            .iter()
            .map(|&a| a * mass(|x| conditional_density_nggp(1, 1.0, 0.5, a, x).unwrap()).1)
            .collect();
        assert!(means.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()), "{means:?}");
        assert!((means[2] - 1.0).abs() < 0.02, "{means:?}");
    }

    #[test]
    fn series_matches_integral_where_it_converges() {
        for (n, pp, sigma, a, x) in [(5, 0.6, 0.9, 3.0, 0.2), (6, 0.8, 0.8, 1.5, 0.45), (4, 0.3, 0.95, 2.0, 0.1)] {
            let s = nggp_series_density(n, pp, sigma, a, x, None).unwrap();
            let i = conditional_density_nggp(n, pp, sigma, a, x).unwrap();
            assert!((s.value / i - 1.0).abs() < 1e-8, "n={n}: {} vs {i}", s.value);
        }
    }

    #[test]
    fn slow_series_reports_divergence() {
        let r = nggp_series_density(1, 1.0, 0.5, 20.0, 0.1, Some(200));
        assert!(matches!(r, Err(Error::SeriesDivergence { .. })));
    }
}
