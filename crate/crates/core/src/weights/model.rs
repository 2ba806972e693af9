use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use super::family::{open01, IidFamily, IidLaw};
use super::latent;
use super::tabulated::InverseCdfSampler;
use crate::error::{domain, Error, Result};

/// Prior family and parameters governing the law of the stick weights.
#[derive(Debug, Clone)]
pub enum WeightModel {
    /// Dirichlet process: v_i iid Beta(1, a).
    Dp { a: f64 },
    /// Dirichlet process with general iid stick law.
    Dpg { family: IidFamily, a: f64 },
    /// Two-parameter Poisson-Dirichlet: v_i ~ Beta(1 - b, a + i b).
    Pdp { a: f64, b: f64 },
    /// Normalized inverse Gaussian process.
    Nigp { a: f64 },
    /// Normalized generalized gamma process.
    Nggp { sigma: f64, a: f64 },
    /// Generalized Dirichlet process (finite-dimensional laws only).
    Gdp { a: f64, r: u32 },
}

impl WeightModel {
    pub fn dp(a: f64) -> Result<Self> {
        let m = WeightModel::Dp { a };
        m.validate()?;
        Ok(m)
    }

    pub fn dpg(family: IidFamily, a: f64) -> Result<Self> {
        let m = WeightModel::Dpg { family, a };
        m.validate()?;
        Ok(m)
    }

    pub fn pdp(a: f64, b: f64) -> Result<Self> {
        let m = WeightModel::Pdp { a, b };
        m.validate()?;
        Ok(m)
    }

    pub fn nigp(a: f64) -> Result<Self> {
        let m = WeightModel::Nigp { a };
        m.validate()?;
        Ok(m)
    }

    pub fn nggp(sigma: f64, a: f64) -> Result<Self> {
        let m = WeightModel::Nggp { sigma, a };
        m.validate()?;
        Ok(m)
    }

    pub fn gdp(a: f64, r: u32) -> Result<Self> {
        let m = WeightModel::Gdp { a, r };
        m.validate()?;
        Ok(m)
    }

    /// Enforces the parameter ranges. PDP accepts b = 0 (the Dirichlet case)
    /// and any a > -b.
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, a: f64| {
            if a > 0.0 && a.is_finite() {
                Ok(())
            } else {
                Err(domain(format!("{name} must be positive and finite, got {a}")))
            }
        };
        match self {
            WeightModel::Dp { a } | WeightModel::Nigp { a } => pos("a", *a),
            WeightModel::Dpg { family, a } => {
                pos("a", *a)?;
                family.validate()
            }
            WeightModel::Pdp { a, b } => {
                if !(*b >= 0.0 && *b < 1.0) {
                    return Err(domain(format!("PDP discount b must lie in [0, 1), got {b}")));
                }
                if !(*a > -b) || !a.is_finite() {
                    return Err(domain(format!("PDP needs a > -b, got a = {a}, b = {b}")));
                }
                Ok(())
            }
            WeightModel::Nggp { sigma, a } => {
                pos("a", *a)?;
                if !(*sigma > 0.0 && *sigma < 1.0) {
                    return Err(domain(format!("NGGP sigma must lie in (0, 1), got {sigma}")));
                }
                Ok(())
            }
            WeightModel::Gdp { a, r } => {
                pos("a", *a)?;
                if *r == 0 {
                    return Err(domain("GDP r must be a positive integer"));
                }
                Ok(())
            }
        }
    }

    pub fn a(&self) -> f64 {
        match self {
            WeightModel::Dp { a }
            | WeightModel::Dpg { a, .. }
            | WeightModel::Pdp { a, .. }
            | WeightModel::Nigp { a }
            | WeightModel::Nggp { a, .. }
            | WeightModel::Gdp { a, .. } => *a,
        }
    }

    /// The same family at another concentration.
    pub fn with_a(&self, a: f64) -> Result<Self> {
        let m = match self.clone() {
            WeightModel::Dp { .. } => WeightModel::Dp { a },
            WeightModel::Dpg { family, .. } => WeightModel::Dpg { family, a },
            WeightModel::Pdp { b, .. } => WeightModel::Pdp { a, b },
            WeightModel::Nigp { .. } => WeightModel::Nigp { a },
            WeightModel::Nggp { sigma, .. } => WeightModel::Nggp { sigma, a },
            WeightModel::Gdp { r, .. } => WeightModel::Gdp { a, r },
        };
        m.validate()?;
        Ok(m)
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightModel::Dp { .. } => "dp",
            WeightModel::Dpg { .. } => "dpg",
            WeightModel::Pdp { .. } => "pdp",
            WeightModel::Nigp { .. } => "nigp",
            WeightModel::Nggp { .. } => "nggp",
            WeightModel::Gdp { .. } => "gdp",
        }
    }

    /// Parameter record for reports.
    pub fn describe(&self) -> ModelEcho {
        let mut e = ModelEcho { process: self.name().into(), a: self.a(), b: None, sigma: None, r: None, family: None };
        match self {
            WeightModel::Pdp { b, .. } => e.b = Some(*b),
            WeightModel::Nggp { sigma, .. } => e.sigma = Some(*sigma),
            WeightModel::Gdp { r, .. } => e.r = Some(*r),
            WeightModel::Dpg { family, .. } => e.family = Some(family.name().into()),
            _ => {}
        }
        e
    }
}

/// Serializable echo of a model's parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelEcho {
    pub process: String,
    pub a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

/// When to stop breaking the stick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Exactly this many sticks.
    Fixed(usize),
    /// Stop once the realized tail mass drops below `eps_tail`; a
    /// truncation-failure error if `max_sticks` is reached first.
    Adaptive { eps_tail: f64, max_sticks: usize },
    /// As `Adaptive`, but reaching `max_sticks` simply stops.
    Capped { eps_tail: f64, max_sticks: usize },
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Adaptive { eps_tail: 1e-10, max_sticks: 1_000_000 }
    }
}

impl Truncation {
    pub fn adaptive(eps_tail: f64) -> Self {
        Truncation::Adaptive { eps_tail, max_sticks: 1_000_000 }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            Truncation::Fixed(0) => Err(domain("fixed truncation needs at least one stick")),
            Truncation::Adaptive { eps_tail, max_sticks } | Truncation::Capped { eps_tail, max_sticks }
                if !(eps_tail > 0.0 && eps_tail < 1.0) || max_sticks == 0 =>
            {
                Err(domain(format!("adaptive truncation needs 0 < eps_tail < 1 and a positive cap, got {eps_tail}, {max_sticks}")))
            }
            _ => Ok(()),
        }
    }

    /// Decision after `n` sticks with realized ln(tail).
    #[inline]
    pub(crate) fn stop(&self, n: usize, log_tail: f64) -> Result<bool> {
        match *self {
            Truncation::Fixed(m) => Ok(n >= m),
            Truncation::Adaptive { eps_tail, max_sticks } => {
                if log_tail < eps_tail.ln() {
                    Ok(true)
                } else if n >= max_sticks {
                    Err(Error::TruncationFailure { cap: max_sticks, tail: log_tail.exp(), eps: eps_tail })
                } else {
                    Ok(false)
                }
            }
            Truncation::Capped { eps_tail, max_sticks } => Ok(log_tail < eps_tail.ln() || n >= max_sticks),
        }
    }
}

/// Stick sampler used for NIGP and NGGP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplerMode {
    /// Exact construction from the size-biased jumps of the underlying
    /// completely random measure.
    #[default]
    Latent,
    /// Sequential numeric inversion of the conditional stick densities.
    InverseCdf,
}

/// One truncated weight sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    /// prod_{j <= N} (1 - v_j), the mass beyond the last stick.
    pub tail: f64,
    pub log_tail: f64,
}

impl WeightSequence {
    /// Builds v, w and the tail from ln(1 - v_i), telescoping in log space.
    pub(crate) fn from_logs(v: Vec<f64>, log1m: &[f64]) -> Self {
        let mut w = Vec::with_capacity(v.len());
        let mut cum = 0.0f64;
        for &l in log1m {
            w.push(cum.exp() * -l.exp_m1());
            cum += l;
        }
        WeightSequence { v, w, tail: cum.exp(), log_tail: cum }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

fn iid_sequence<R: Rng + ?Sized>(law: &IidLaw, rng: &mut R, trunc: &Truncation) -> Result<WeightSequence> {
    let mut v = Vec::new();
    let mut logs = Vec::new();
    let mut cum = 0.0;
    loop {
        let (vi, li) = law.draw(rng);
        v.push(vi);
        logs.push(li);
        cum += li;
        if trunc.stop(v.len(), cum)? {
            break;
        }
    }
    Ok(WeightSequence::from_logs(v, &logs))
}

fn pdp_sequence<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R, trunc: &Truncation) -> Result<WeightSequence> {
    if b == 0.0 {
        return iid_sequence(&IidLaw::BetaOneA { a }, rng, trunc);
    }
    let x = Gamma::new(1.0 - b, 1.0).map_err(|e| domain(e.to_string()))?;
    let mut v = Vec::new();
    let mut logs = Vec::new();
    let mut cum = 0.0;
    loop {
        let i = v.len() + 1;
        let y = Gamma::new(a + i as f64 * b, 1.0).map_err(|e| domain(e.to_string()))?;
        let gx = x.sample(rng);
        let gy = y.sample(rng);
        let s = gx + gy;
        let (vi, li) = if s > 0.0 { (gx / s, gy.ln() - s.ln()) } else { (open01(rng), f64::NAN) };
        let li = if li.is_finite() { li } else { (-vi).ln_1p() };
        v.push(vi);
        logs.push(li);
        cum += li;
        if trunc.stop(v.len(), cum)? {
            break;
        }
    }
    Ok(WeightSequence::from_logs(v, &logs))
}

/// Samples stick fractions and weights of `model` with the default sampler.
pub fn sample_weight_sequence<R: Rng + ?Sized>(model: &WeightModel, rng: &mut R, trunc: &Truncation) -> Result<WeightSequence> {
    sample_weight_sequence_with(model, rng, trunc, SamplerMode::Latent)
}

/// Samples stick fractions and weights, choosing the NIGP/NGGP sampler.
pub fn sample_weight_sequence_with<R: Rng + ?Sized>(
    model: &WeightModel,
    rng: &mut R,
    trunc: &Truncation,
    mode: SamplerMode,
) -> Result<WeightSequence> {
    model.validate()?;
    trunc.validate()?;
    match model {
        WeightModel::Dp { a } => iid_sequence(&IidLaw::BetaOneA { a: *a }, rng, trunc),
        WeightModel::Dpg { family, a } => iid_sequence(&family.at(*a)?, rng, trunc),
        WeightModel::Pdp { a, b } => pdp_sequence(*a, *b, rng, trunc),
        WeightModel::Nigp { .. } | WeightModel::Nggp { .. } => match mode {
            SamplerMode::Latent => latent::sample(model, rng, trunc),
            SamplerMode::InverseCdf => InverseCdfSampler::new(model)?.sample(rng, trunc),
        },
        WeightModel::Gdp { .. } => Err(Error::Unsupported(
            "GDP has no stick-breaking sampler; use the finite-dimensional sampler".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::stats;

    #[test]
    fn construction_checks() {
        assert!(WeightModel::dp(0.0).is_err());
        assert!(WeightModel::pdp(0.5, 1.0).is_err());
        assert!(WeightModel::pdp(-0.4, 0.5).is_ok());
        assert!(WeightModel::pdp(-0.6, 0.5).is_err());
        assert!(WeightModel::nggp(1.0, 1.0).is_err());
        assert!(WeightModel::gdp(1.0, 0).is_err());
        let mut rng = stream(0, 0);
        assert!(matches!(
            sample_weight_sequence(&WeightModel::gdp(1.0, 2).unwrap(), &mut rng, &Truncation::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn dp_stick_count_matches_geometric_decay() {
        let model = WeightModel::dp(1.0).unwrap();
        let trunc = Truncation::adaptive(1e-10);
        let counts: Vec<f64> = (0..10_000)
            .map(|k| {
                let mut rng = stream(5, k);
                let s = sample_weight_sequence(&model, &mut rng, &trunc).unwrap();
                let total: f64 = s.w.iter().sum::<f64>() + s.tail;
                assert!((total - 1.0).abs() < 1e-12);
                s.len() as f64
            })
            .collect();
        // -ln(1 - v) ~ Exp(a), so the count is a renewal time for level ln(1e10)
        let expect = 1e10f64.ln() + 1.0;
        let m = stats::mean(&counts);
        assert!((m / expect - 1.0).abs() < 0.2, "{m} vs {expect}");
    }

    #[test]
    fn pdp_first_stick_mean() {
        let model = WeightModel::pdp(0.5, 0.5).unwrap();
        let v1: Vec<f64> = (0..20_000)
            .map(|k| sample_weight_sequence(&model, &mut stream(9, k), &Truncation::Fixed(1)).unwrap().v[0])
            .collect();
        let m = stats::mean(&v1);
        assert!((m - 1.0 / 3.0).abs() < 4.0 * stats::std_error(&v1));
    }

    #[test]
    fn adaptive_cap_raises_truncation_failure() {
        let model = WeightModel::pdp(1.0, 0.9).unwrap();
        let t = Truncation::Adaptive { eps_tail: 1e-12, max_sticks: 100 };
        let r = sample_weight_sequence(&model, &mut stream(1, 1), &t);
        assert!(matches!(r, Err(Error::TruncationFailure { cap: 100, .. })));
        let t = Truncation::Capped { eps_tail: 1e-12, max_sticks: 100 };
        assert_eq!(sample_weight_sequence(&model, &mut stream(1, 1), &t).unwrap().len(), 100);
    }
}
