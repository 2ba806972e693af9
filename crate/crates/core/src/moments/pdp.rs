//! Exact joint power sums of Pitman-Yor weights.

use super::{MomentSpec, MomentValue};
use crate::error::{domain, Error, Result};
use crate::scalar::Field;
use crate::specialfn::ln_pochhammer_signed;

fn check_params(a: f64, b: f64) -> Result<()> {
    if !(0.0..1.0).contains(&b) || !(a > -b) || !a.is_finite() {
        return Err(domain(format!("PDP needs 0 <= b < 1 and a > -b, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// Running ln|x| and sign of a product.
struct SignedLog {
    ln: f64,
    sign: f64,
}

impl SignedLog {
    fn mul(&mut self, ln_abs: f64, sign: f64) {
        self.ln += ln_abs;
        self.sign *= sign;
    }

    fn mul_value(&mut self, x: f64) {
        self.mul(x.abs().ln(), x.signum());
    }

    fn div_value(&mut self, x: f64) {
        self.mul(-x.abs().ln(), x.signum());
    }
}

/// E[sum_{i_1 < ... < i_k} prod_j w_{i_j}^{p_j}] under PDP(a, b):
///
/// 1/((a + kb)(a+1)_{P-1}) prod_i (1-b)_{p_i} (a + bi) / (p_{i:k} - (k-i+1) b),
///
/// evaluated as a sum of logs with the sign carried separately.
pub fn pdp_joint_power_sum(a: f64, b: f64, spec: &MomentSpec) -> Result<MomentValue> {
    check_params(a, b)?;
    let k = spec.k();
    let total = spec.total();
    if total == 0 {
        return Err(domain("joint power sum needs a positive total exponent"));
    }
    check_poles(spec, |i, m| spec.tail_sum(i) as f64 - m as f64 * b)?;
    let mut acc = SignedLog { ln: 0.0, sign: 1.0 };
    acc.div_value(a + k as f64 * b);
    let (lp, sp) = ln_pochhammer_signed(a + 1.0, total - 1);
    acc.mul(-lp, sp);
    for i in 1..=k {
        let (lq, sq) = ln_pochhammer_signed(1.0 - b, spec.p()[i - 1]);
        let c = a + b * i as f64;
        if sq == 0.0 || c == 0.0 {
            return Ok(MomentValue::exact(0.0));
        }
        acc.mul(lq, sq);
        acc.mul_value(c);
        acc.div_value(spec.tail_sum(i) as f64 - (k - i + 1) as f64 * b);
    }
    Ok(MomentValue::exact(acc.sign * acc.ln.exp()))
}

fn check_poles<F: Fn(usize, usize) -> f64>(spec: &MomentSpec, den: F) -> Result<()> {
    let k = spec.k();
    for i in 1..=k {
        let d = den(i, k - i + 1);
        if !(d > 0.0) {
            return Err(Error::Pole(format!("p_{{{i}:k}} - (k-i+1) b = {d} is not positive")));
        }
    }
    Ok(())
}

/// The same identity in an exact field, e.g. with rational a and b.
pub fn pdp_joint_power_sum_exact<F: Field + PartialOrd>(a: &F, b: &F, spec: &MomentSpec) -> Result<F> {
    let zero = F::zero();
    let one = F::one();
    if *b < zero || *b >= one || !(a.clone() + b.clone() > zero) {
        return Err(domain(format!("PDP needs 0 <= b < 1 and a > -b, got a = {a:?}, b = {b:?}")));
    }
    let k = spec.k();
    let total = spec.total();
    if total == 0 {
        return Err(domain("joint power sum needs a positive total exponent"));
    }
    let int = |n: usize| F::from_int(n as i64);
    let mut den = a.clone() + int(k) * b.clone();
    for j in 1..total {
        den = den * (a.clone() + int(j as usize));
    }
    let mut num = F::one();
    for i in 1..=k {
        let d = int(spec.tail_sum(i) as usize) - int(k - i + 1) * b.clone();
        if d <= zero {
            return Err(Error::Pole(format!("p_{{{i}:k}} - (k-i+1) b = {d:?} is not positive")));
        }
        for j in 0..spec.p()[i - 1] {
            num = num * (one.clone() - b.clone() + int(j as usize));
        }
        num = num * (a.clone() + b.clone() * int(i));
        den = den * d;
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn spec(p: &[u32]) -> MomentSpec {
        MomentSpec::new(p.to_vec()).unwrap()
    }

    #[test]
    fn worked_values() {
        assert!((pdp_joint_power_sum(9.0, 0.0, &spec(&[2])).unwrap().value - 0.1).abs() < 1e-15);
        assert!((pdp_joint_power_sum(1.0, 0.0, &spec(&[2, 2])).unwrap().value - 1.0 / 48.0).abs() < 1e-16);
        assert!((pdp_joint_power_sum(9.0, 0.5, &spec(&[2])).unwrap().value - 0.05).abs() < 1e-16);
        let q = pdp_joint_power_sum_exact(&Rational::from_integer(1), &Rational::from_integer(0), &spec(&[2, 2])).unwrap();
        assert_eq!(q, Rational::new(1, 48));
        let q = pdp_joint_power_sum_exact(&Rational::from_integer(9), &Rational::new(1, 2), &spec(&[2])).unwrap();
        assert_eq!(q, Rational::new(1, 20));
    }

    #[test]
    fn pairs_of_squares() {
        // closed form for p = (2, ..., 2)
        for &(a, b) in &[(1.0f64, 0.3f64), (10.0, 0.5), (0.5, 0.9)] {
            for k in 1..=4usize {
                let mut num = (1.0 - b).powi(k as i32);
                for j in 1..k {
                    num *= a + b * j as f64;
                }
                let mut den: f64 = (1..=k).map(|i| i as f64).product();
                for j in 1..2 * k {
                    den *= a + j as f64;
                }
                let v = pdp_joint_power_sum(a, b, &spec(&vec![2; k])).unwrap().value;
                assert!((v - num / den).abs() < 1e-13 * v, "a={a} b={b} k={k}");
            }
        }
    }

    #[test]
    fn float_matches_rational() {
        let specs: [&[u32]; 5] = [&[2], &[3, 2], &[2, 2, 2], &[1, 4], &[5, 1, 2]];
        for s in specs {
            for (an, ad, bn, bd) in [(3i128, 2i128, 1i128, 4i128), (10, 1, 1, 2), (1, 10, 9, 10)] {
                let exact = pdp_joint_power_sum_exact(&Rational::new(an, ad), &Rational::new(bn, bd), &spec(s)).unwrap();
                let (a, b) = (an as f64 / ad as f64, bn as f64 / bd as f64);
                let v = pdp_joint_power_sum(a, b, &spec(s)).unwrap().value;
                let e = *exact.numer() as f64 / *exact.denom() as f64;
                assert!((v - e).abs() < 1e-13 * e.abs(), "{s:?} a={a} b={b}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn poles_and_large_arguments() {
        // p = (1): den = 1 - b > 0, fine; p = (1, 1) with b = 0.6 gives 2 - 1.2 > 0 and 1 - 0.6
        assert!(pdp_joint_power_sum(1.0, 0.6, &spec(&[1, 1])).is_ok());
        assert!(matches!(pdp_joint_power_sum(1.0, 0.5, &spec(&[0, 0])), Err(Error::Domain(_))));
        assert!(matches!(pdp_joint_power_sum(1.0, 0.5, &spec(&[1, 0])), Err(Error::Pole(_))));
        let v = pdp_joint_power_sum(1e6, 0.5, &spec(&[10; 5])).unwrap().value;
        assert!(v.is_finite() && v > 0.0);
    }
}
