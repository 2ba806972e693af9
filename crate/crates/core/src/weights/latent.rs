//! Exact NIGP/NGGP sticks from the size-biased jumps of the underlying
//! completely random measure. Attaching an Exp(s) clock to every jump s,
//! the ring times tau_n satisfy psi(tau_n) = Gamma_n (unit Poisson arrivals),
//! the n-th jump given tau_n has density proportional to s rho(s) e^{-tau_n s},
//! and the unrung jumps form a CRM with intensity rho(s) e^{-tau_N s}.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, InverseGaussian};

use super::family::open01;
use super::model::{Truncation, WeightModel, WeightSequence};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) enum Crm {
    /// rho(s) = a (2 pi)^{-1/2} s^{-3/2} e^{-s/2}, psi(u) = a (sqrt(1 + 2u) - 1).
    InverseGaussian { a: f64 },
    /// rho(s) = a sigma / Gamma(1 - sigma) s^{-1-sigma} e^{-s}, psi(u) = a ((1 + u)^sigma - 1).
    GeneralizedGamma { sigma: f64, a: f64 },
}

impl Crm {
    pub(crate) fn of(model: &WeightModel) -> Result<Self> {
        match *model {
            WeightModel::Nigp { a } => Ok(Crm::InverseGaussian { a }),
            WeightModel::Nggp { sigma, a } => Ok(Crm::GeneralizedGamma { sigma, a }),
            _ => Err(Error::Unsupported(format!("no latent sampler for {}", model.name()))),
        }
    }

    pub(crate) fn psi_inv(&self, y: f64) -> f64 {
        match *self {
            Crm::InverseGaussian { a } => {
                let r = y / a;
                r + 0.5 * r * r
            }
            Crm::GeneralizedGamma { sigma, a } => ((y / a).ln_1p() / sigma).exp_m1(),
        }
    }

    /// psi'(u): mean total mass of the residual CRM at tilt u.
    pub(crate) fn residual_mean(&self, u: f64) -> f64 {
        match *self {
            Crm::InverseGaussian { a } => a / (1.0 + 2.0 * u).sqrt(),
            Crm::GeneralizedGamma { sigma, a } => a * sigma * (1.0 + u).powf(sigma - 1.0),
        }
    }

    fn jump<R: Rng + ?Sized>(&self, u: f64, rng: &mut R) -> f64 {
        let (shape, rate) = match *self {
            Crm::InverseGaussian { .. } => (0.5, u + 0.5),
            Crm::GeneralizedGamma { sigma, .. } => (1.0 - sigma, 1.0 + u),
        };
        // shape < 1: Gamma(shape) = Gamma(shape + 1) * U^{1/shape}
        let g = Gamma::new(shape + 1.0, 1.0).expect("valid shape").sample(rng);
        g * (open01(rng).ln() / shape).exp() / rate
    }

    fn residual<R: Rng + ?Sized>(&self, u: f64, rng: &mut R) -> Result<f64> {
        match *self {
            Crm::InverseGaussian { a } => {
                let ig = InverseGaussian::new(a / (1.0 + 2.0 * u).sqrt(), a * a).map_err(|e| domain(e.to_string()))?;
                Ok(ig.sample(rng))
            }
            Crm::GeneralizedGamma { sigma, a } => Ok(tilted_stable_total(sigma, a * (1.0 + u).powf(sigma), rng) / (1.0 + u)),
        }
    }
}

/// Positive sigma-stable variable with Laplace transform exp(-lambda^sigma),
/// by Kanter's representation.
pub(crate) fn positive_stable<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> f64 {
    use std::f64::consts::PI;
    let u = open01(rng);
    let e: f64 = Exp1.sample(rng);
    let ratio = (sigma * PI * u).sin() / (PI * u).sin();
    let kanter = ratio.powf(1.0 / (1.0 - sigma)) * ((1.0 - sigma) * PI * u).sin() / (sigma * PI * u).sin();
    (kanter / e).powf((1.0 - sigma) / sigma)
}

/// Total mass with Laplace exponent A((1 + lambda)^sigma - 1). At
/// sigma = 1/2 this is inverse Gaussian with mean A/2 and shape A^2/2;
/// otherwise see [`tilted_stable_by_rejection`].
pub(crate) fn tilted_stable_total<R: Rng + ?Sized>(sigma: f64, big_a: f64, rng: &mut R) -> f64 {
    if sigma == 0.5 {
        if let Ok(ig) = InverseGaussian::new(0.5 * big_a, 0.5 * big_a * big_a) {
            return ig.sample(rng);
        }
    }
    tilted_stable_by_rejection(sigma, big_a, rng)
}

/// A sum of ceil(A) exponentially tilted stable pieces, each by rejection
/// from the untilted stable law; O(A) work.
pub(crate) fn tilted_stable_by_rejection<R: Rng + ?Sized>(sigma: f64, big_a: f64, rng: &mut R) -> f64 {
    let m = big_a.ceil().max(1.0);
    let scale = (big_a / m).powf(1.0 / sigma);
    let mut total = 0.0;
    for _ in 0..m as u64 {
        loop {
            let s = scale * positive_stable(sigma, rng);
            if open01(rng) <= (-s).exp() {
                total += s;
                break;
            }
        }
    }
    total
}

pub(crate) fn sample<R: Rng + ?Sized>(model: &WeightModel, rng: &mut R, trunc: &Truncation) -> Result<WeightSequence> {
    let crm = Crm::of(model)?;
    let mut jumps: Vec<f64> = Vec::new();
    let mut arrival = 0.0;
    let mut sum = 0.0;
    let mut tilt;
    let residual = loop {
        let e: f64 = Exp1.sample(rng);
        arrival += e;
        tilt = crm.psi_inv(arrival);
        let j = crm.jump(tilt, rng);
        jumps.push(j);
        sum += j;
        let n = jumps.len();
        match *trunc {
            Truncation::Fixed(m) => {
                if n >= m {
                    break crm.residual(tilt, rng)?;
                }
            }
            Truncation::Adaptive { eps_tail, max_sticks } | Truncation::Capped { eps_tail, max_sticks } => {
                if crm.residual_mean(tilt) <= 0.5 * eps_tail * sum {
                    let r = crm.residual(tilt, rng)?;
                    // a residual above the target is discarded and the jump sequence extended
                    if r / (sum + r) < eps_tail {
                        break r;
                    }
                }
                if n >= max_sticks {
                    let r = crm.residual(tilt, rng)?;
                    if matches!(trunc, Truncation::Capped { .. }) || r / (sum + r) < eps_tail {
                        break r;
                    }
                    return Err(Error::TruncationFailure { cap: max_sticks, tail: r / (sum + r), eps: eps_tail });
                }
            }
        }
    };
    let total = sum + residual;
    let n = jumps.len();
    let mut v = vec![0.0; n];
    let mut rest = residual;
    for k in (0..n).rev() {
        rest += jumps[k];
        v[k] = jumps[k] / rest;
    }
    let w: Vec<f64> = jumps.iter().map(|j| j / total).collect();
    let log_tail = residual.ln() - total.ln();
    Ok(WeightSequence { v, w, tail: residual / total, log_tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::stats;

    #[test]
    fn tilted_stable_cumulants() {
        for (sigma, big_a) in [(0.5, 3.7), (0.3, 0.4), (0.7, 20.0)] {
            let xs: Vec<f64> = (0..40_000).map(|k| tilted_stable_total(sigma, big_a, &mut stream(3, k))).collect();
            let m = stats::mean(&xs);
            let var = stats::variance(&xs);
            let mean_t = big_a * sigma;
            let var_t = big_a * sigma * (1.0 - sigma);
            assert!((m - mean_t).abs() < 4.0 * stats::std_error(&xs), "{sigma} {big_a}: {m} vs {mean_t}");
            assert!((var / var_t - 1.0).abs() < 0.08, "{sigma} {big_a}: {var} vs {var_t}");
        }
    }

    #[test]
    fn half_stable_shortcut_matches_rejection() {
        for big_a in [0.3, 4.0, 60.0] {
            let xs: Vec<f64> = (0..20_000).map(|k| tilted_stable_total(0.5, big_a, &mut stream(8, k))).collect();
            let ys: Vec<f64> = (0..20_000).map(|k| tilted_stable_by_rejection(0.5, big_a, &mut stream(9, k))).collect();
            let d = stats::ks_two_sample(&xs, &ys);
            assert!(d < 0.0192, "A = {big_a}: two-sample KS {d}");
        }
    }

    #[test]
    fn psi_inverse_roundtrip() {
        for crm in [Crm::InverseGaussian { a: 3.0 }, Crm::GeneralizedGamma { sigma: 0.4, a: 3.0 }] {
            for u in [1e-6f64, 0.3, 7.0, 1e4] {
                let y = match crm {
                    Crm::InverseGaussian { a } => a * 2.0 * u / ((1.0f64 + 2.0 * u).sqrt() + 1.0),
                    Crm::GeneralizedGamma { sigma, a } => a * (sigma * u.ln_1p()).exp_m1(),
                };
                assert!((crm.psi_inv(y) / u - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mass_accounting() {
        for model in [WeightModel::nigp(5.0).unwrap(), WeightModel::nggp(0.5, 5.0).unwrap()] {
            for trunc in [Truncation::Fixed(7), Truncation::adaptive(1e-3)] {
                let s = sample(&model, &mut stream(2, 0), &trunc).unwrap();
                let total: f64 = s.w.iter().sum::<f64>() + s.tail;
                assert!((total - 1.0).abs() < 1e-12);
                assert!(s.v.iter().all(|&v| v > 0.0 && v < 1.0));
                if let Truncation::Fixed(m) = trunc {
                    assert_eq!(s.len(), m);
                } else {
                    assert!(s.tail < 1e-3);
                }
                // w_i = v_i prod_{j<i} (1 - v_j)
                let mut prod = 1.0;
                for (v, w) in s.v.iter().zip(&s.w) {
                    assert!((v * prod - w).abs() < 1e-12);
                    prod *= 1.0 - v;
                }
            }
        }
    }
}
