use crate::error::{domain, Error, Result};
use crate::scalar::Real;

use super::gamma::EULER_GAMMA;
use super::SpecialValue;

const MAX_ITER: usize = 10_000;

/// (K_0(z), K_1(z)) by the power series, for 0 < z <= 2.
fn k01_series<T: Real>(z: T) -> (T, T) {
    let half_z = z * T::lit(0.5);
    let x2 = half_z * half_z;
    let gamma = T::lit(EULER_GAMMA);
    let ln_half = half_z.ln();
    // k = 0 terms
    let mut t0 = T::one(); // x2^k / (k!)^2
    let mut t1 = T::one(); // x2^k / (k! (k+1)!)
    let mut h = T::zero(); // H_k
    let mut i0 = T::one();
    let mut s0 = T::zero();
    let mut i1 = T::one();
    let mut s1 = T::one() - T::lit(2.0) * gamma; // H_0 + H_1 - 2 gamma
    for k in 1..200 {
        let kf = T::count(k);
        t0 = t0 * x2 / (kf * kf);
        t1 = t1 * x2 / (kf * (kf + T::one()));
        h = h + kf.recip();
        let h_next = h + (kf + T::one()).recip();
        i0 = i0 + t0;
        s0 = s0 + h * t0;
        i1 = i1 + t1;
        s1 = s1 + (h + h_next - T::lit(2.0) * gamma) * t1;
        if t0 < T::epsilon() * T::lit(1e-3) * i0 {
            break;
        }
    }
    let i1 = half_z * i1;
    let k0 = -(ln_half + gamma) * i0 + s0;
    let k1 = z.recip() + ln_half * i1 - z * T::lit(0.25) * s1;
    (k0, k1)
}

/// e^z K_mu(z), e^z K_{mu+1}(z) by Steed's continued fraction, z >= 2.
fn kmu_cf2<T: Real>(mu: T, z: T) -> Result<(T, T)> {
    let two = T::lit(2.0);
    let mut b = two * (T::one() + z);
    let mut d = b.recip();
    let mut h = d;
    let mut delh = d;
    let mut q1 = T::zero();
    let mut q2 = T::one();
    let a1 = T::lit(0.25) - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = T::one() + q * delh;
    let mut converged = a1 == T::zero();
    if !converged {
        for i in 2..MAX_ITER {
            let fi = T::count(i);
            a = a - two * (fi - T::one());
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q = q + c * qnew;
            b = b + two;
            d = (b + a * d).recip();
            delh = (b * d - T::one()) * delh;
            h = h + delh;
            let dels = q * delh;
            s = s + dels;
            if (dels / s).abs() < T::epsilon() {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::SeriesDivergence { terms: MAX_ITER, what: "Bessel K continued fraction".into() });
    }
    let h = a1 * h;
    let k0 = (T::PI() / (two * z)).sqrt() / s;
    let k1 = k0 * (mu + z + T::lit(0.5) - h) / z;
    Ok((k0, k1))
}

/// Decodes an admissible order into (2|nu|) as an integer.
fn twice_order<T: Real>(nu: T) -> Result<u64> {
    let t = (nu.abs() * T::lit(2.0)).to_f64().unwrap_or(f64::NAN);
    let m = t.round();
    if !t.is_finite() || (t - m).abs() > 1e-12 * m.max(1.0) {
        return Err(Error::Unsupported(format!(
            "bessel_k supports integer and half-integer orders only, got {nu}"
        )));
    }
    Ok(m as u64)
}

struct Scaled<T> {
    /// K_nu(z) = mantissa * exp(log_scale - z)
    mantissa: T,
    log_scale: T,
    steps: u64,
}

fn k_scaled<T: Real>(nu: T, z: T) -> Result<Scaled<T>> {
    if !(z > T::zero()) || !z.is_finite() {
        return Err(domain(format!("bessel_k requires z > 0, got {z}")));
    }
    let m = twice_order(nu)?;
    let half_integer = m % 2 == 1;
    let n = m / 2; // integer part of |nu|
    let mu = if half_integer { T::lit(0.5) } else { T::zero() };
    let (mut k_lo, mut k_hi) = if half_integer {
        let k = (T::PI() / (T::lit(2.0) * z)).sqrt();
        (k, k * (T::one() + z.recip()))
    } else if z <= T::lit(2.0) {
        let (k0, k1) = k01_series(z);
        let e = z.exp();
        (k0 * e, k1 * e)
    } else {
        kmu_cf2(mu, z)?
    };
    if n == 0 {
        return Ok(Scaled { mantissa: k_lo, log_scale: T::zero(), steps: 0 });
    }
    let mut log_scale = T::zero();
    let big = T::lit(1e250);
    for j in 1..n {
        let order = mu + T::count(j as usize);
        let next = k_lo + T::lit(2.0) * order / z * k_hi;
        k_lo = k_hi;
        k_hi = next;
        if k_hi > big {
            let l = k_hi.ln();
            let f = (-l).exp();
            k_lo = k_lo * f;
            k_hi = k_hi * f;
            log_scale = log_scale + l;
        }
    }
    Ok(Scaled { mantissa: k_hi, log_scale, steps: n })
}

/// Modified Bessel function of the second kind K_nu(z) for integer and
/// half-integer orders.
pub fn bessel_k<T: Real>(nu: T, z: T) -> Result<SpecialValue<T>> {
    let s = k_scaled(nu, z)?;
    let value = if s.log_scale == T::zero() {
        s.mantissa * (-z).exp()
    } else {
        s.mantissa * (s.log_scale - z).exp()
    };
    let ulps = 16.0 + 2.0 * s.steps as f64;
    Ok(SpecialValue::rounded(value, ulps))
}

/// ln K_nu(z), representable far beyond the range where K_nu over- or
/// underflows.
pub fn ln_bessel_k<T: Real>(nu: T, z: T) -> Result<T> {
    let s = k_scaled(nu, z)?;
    Ok(s.mantissa.ln() + s.log_scale - z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_to_infinity, Tolerance};

    fn oracle(nu: f64, z: f64) -> f64 {
        integrate_to_infinity(|t: f64| (-z * t.cosh()).exp() * (nu * t).cosh(), 0.0, 1.0, Tolerance::rel(1e-14)).value
    }

    #[test]
    fn examples() {
        let k = bessel_k(0.5f64, 1.0).unwrap().value;
        assert!((k - (std::f64::consts::FRAC_PI_2).sqrt() * (-1f64).exp()).abs() < 1e-15);
        assert!((bessel_k(1.5f64, 1.0).unwrap().value - 0.922_137_0).abs() < 1e-6);
        assert!((bessel_k(1.0f64, 1.0).unwrap().value - 0.601_907_230_197_234_6).abs() < 1e-14);
        assert!(bessel_k(1.0, 0.0).is_err());
        assert!(bessel_k(0.3, 1.0).is_err());
        assert_eq!(bessel_k(-2.0, 1.5).unwrap().value, bessel_k(2.0, 1.5).unwrap().value);
    }

    #[test]
    fn matches_quadrature() {
        for &nu in &[0.0, 0.5, 1.0, 1.5, 2.0, 3.5, 5.0, 8.5] {
            for &z in &[0.05, 0.5, 1.0, 1.99, 2.01, 4.0, 10.0, 30.0] {
                let k = bessel_k(nu, z).unwrap().value;
                let o = oracle(nu, z);
                assert!(((k - o) / o).abs() < 1e-11, "nu={nu} z={z} {k} {o}");
            }
        }
    }

    #[test]
    fn log_form_survives_extremes() {
        // K_{1/2}(800) underflows f64 but its log is exact
        let l = ln_bessel_k(0.5f64, 800.0).unwrap();
        let expect = (std::f64::consts::PI / 1600.0).sqrt().ln() - 800.0;
        assert!((l - expect).abs() < 1e-12);
        // large order at small argument overflows directly
        let l = ln_bessel_k(400.0f64, 0.5).unwrap();
        assert!(l.is_finite() && l > 700.0);
        let l_prev = ln_bessel_k(399.0f64, 0.5).unwrap();
        let l_prev2 = ln_bessel_k(398.0f64, 0.5).unwrap();
        // recurrence residual in log space
        let ratio = (l_prev2 - l).exp() + 2.0 * 399.0 / 0.5 * (l_prev - l).exp();
        assert!((ratio - 1.0).abs() < 1e-12);
    }
}
