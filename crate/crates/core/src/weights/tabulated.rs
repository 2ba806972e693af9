//! Sequential inverse-CDF sampling of NIGP/NGGP sticks from tabulated
//! conditional densities.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use super::densities::{ln_conditional_density_nggp, ln_conditional_density_nigp};
use super::family::open01;
use super::model::{Truncation, WeightModel, WeightSequence};
use crate::error::{domain, Error, Result};
use crate::quad::{GL8_NODES, GL8_WEIGHTS};

const GRID_POINTS: usize = 4096;
const EDGE: f64 = 1e-14;

type TableCache = HashMap<(u8, u64, u64), Arc<StickTable>>;

/// Conditional stick CDF on a logit-spaced grid with monotone cubic
/// (Fritsch-Carlson) interpolation.
#[derive(Debug, Clone)]
pub struct StickTable {
    x: Vec<f64>,
    cdf: Vec<f64>,
    slope: Vec<f64>,
}

impl StickTable {
    /// Tabulates `exp(ln_pdf)`, whose behaviour near 0 is x^{-alpha}.
    pub fn build<F: Fn(f64) -> Result<f64>>(ln_pdf: F, alpha: f64) -> Result<Self> {
        let lo = (EDGE / (1.0 - EDGE)).ln();
        let step = -2.0 * lo / (GRID_POINTS - 1) as f64;
        let x: Vec<f64> = (0..GRID_POINTS).map(|k| 1.0 / (1.0 + (-(lo + step * k as f64)).exp())).collect();
        let node_ln: Vec<f64> = x.iter().map(|&t| ln_pdf(t)).collect::<Result<_>>()?;
        let mut cell_ln = Vec::with_capacity((GRID_POINTS - 1) * 8);
        for w in x.windows(2) {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for node in GL8_NODES {
                cell_ln.push(ln_pdf(mid + half * node)?);
            }
        }
        let shift = node_ln.iter().chain(&cell_ln).fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        if !shift.is_finite() {
            return Err(domain("conditional density vanishes on the whole grid"));
        }
        // mass of [0, x_0] from the x^{-alpha} power law
        let mut cdf = Vec::with_capacity(GRID_POINTS);
        let mut acc = (node_ln[0] - shift).exp() * x[0] / (1.0 - alpha);
        cdf.push(acc);
        for (k, w) in x.windows(2).enumerate() {
            let half = 0.5 * (w[1] - w[0]);
            let cell: f64 = (0..8).map(|j| GL8_WEIGHTS[j] * (cell_ln[8 * k + j] - shift).exp()).sum();
            acc += cell * half;
            cdf.push(acc);
        }
        let total = acc;
        for c in &mut cdf {
            *c /= total;
        }
        let dens: Vec<f64> = node_ln.iter().map(|&l| (l - shift).exp() / total).collect();
        let slope = fritsch_carlson(&x, &cdf, &dens);
        Ok(StickTable { x, cdf, slope })
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        if t <= self.x[0] {
            return self.cdf[0] * (t / self.x[0]).powf(1.0 - self.alpha_from_edge());
        }
        let k = self.x.partition_point(|&g| g <= t).min(self.x.len() - 1).max(1) - 1;
        if k + 1 >= self.x.len() {
            return 1.0;
        }
        self.hermite(k, t)
    }

    fn alpha_from_edge(&self) -> f64 {
        // slope / (cdf / x) = 1 - alpha at the first node
        1.0 - (self.slope[0] * self.x[0] / self.cdf[0]).clamp(1e-6, 1.0)
    }

    fn hermite(&self, k: usize, t: f64) -> f64 {
        let (x0, x1) = (self.x[k], self.x[k + 1]);
        let h = x1 - x0;
        let s = (t - x0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.cdf[k] + h10 * h * self.slope[k] + h01 * self.cdf[k + 1] + h11 * h * self.slope[k + 1]
    }

    /// Generalized inverse of the interpolated CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= self.cdf[0] {
            return self.x[0] * (u / self.cdf[0]).powf(1.0 / (1.0 - self.alpha_from_edge()));
        }
        let k = self.cdf.partition_point(|&c| c < u).min(self.x.len() - 1);
        let k = k.max(1) - 1;
        let (mut lo, mut hi) = (self.x[k], self.x[k + 1]);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.hermite(k, mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

fn fritsch_carlson(x: &[f64], y: &[f64], d: &[f64]) -> Vec<f64> {
    let mut m = d.to_vec();
    for k in 0..x.len() - 1 {
        let delta = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
        if delta <= 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let (al, be) = (m[k] / delta, m[k + 1] / delta);
        let r = al * al + be * be;
        if r > 9.0 {
            let t = 3.0 / r.sqrt();
            m[k] = t * al * delta;
            m[k + 1] = t * be * delta;
        }
    }
    m
}

/// Inverse-CDF stick sampler for NIGP/NGGP. The first-stick table is built
/// once per parameter set and cached process-wide; later sticks are retabulated from the realized prefix product,
/// so each stick after the first costs a full tabulation.
#[derive(Debug, Clone)]
pub struct InverseCdfSampler {
    model: WeightModel,
    first: Arc<StickTable>,
}

impl InverseCdfSampler {
    pub fn new(model: &WeightModel) -> Result<Self> {
        model.validate()?;
        if !matches!(model, WeightModel::Nigp { .. } | WeightModel::Nggp { .. }) {
            return Err(Error::Unsupported(format!("inverse-CDF stick sampler covers NIGP and NGGP, not {}", model.name())));
        }
        let key = match *model {
            WeightModel::Nigp { a } => (0u8, 0u64, a.to_bits()),
            WeightModel::Nggp { sigma, a } => (1u8, sigma.to_bits(), a.to_bits()),
            _ => unreachable!(),
        };
        static CACHE: OnceLock<Mutex<TableCache>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(first) = cache.lock().expect("table cache").get(&key) {
            return Ok(InverseCdfSampler { model: model.clone(), first: first.clone() });
        }
        let first = Arc::new(Self::tabulate(model, 1, 1.0)?);
        cache.lock().expect("table cache").insert(key, first.clone());
        Ok(InverseCdfSampler { model: model.clone(), first })
    }

    /// The conditional CDF table of stick n given prod_{i<n}(1 - v_i).
    pub fn tabulate(model: &WeightModel, n: u32, prefix_prod: f64) -> Result<StickTable> {
        match *model {
            WeightModel::Nigp { a } => StickTable::build(|x| ln_conditional_density_nigp(n, prefix_prod, a, x), 0.5),
            WeightModel::Nggp { sigma, a } => {
                StickTable::build(|x| ln_conditional_density_nggp(n, prefix_prod, sigma, a, x), sigma)
            }
            _ => Err(Error::Unsupported("tabulated sticks need NIGP or NGGP".into())),
        }
    }

    pub fn first_stick(&self) -> &StickTable {
        &self.first
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, trunc: &Truncation) -> Result<WeightSequence> {
        trunc.validate()?;
        let mut v = Vec::new();
        let mut logs = Vec::new();
        let mut cum = 0.0f64;
        loop {
            let n = v.len() as u32 + 1;
            let u = open01(rng);
            let vi = if n == 1 {
                self.first.quantile(u)
            } else {
                Self::tabulate(&self.model, n, cum.exp())?.quantile(u)
            };
            let li = (-vi).ln_1p();
            v.push(vi);
            logs.push(li);
            cum += li;
            if trunc.stop(v.len(), cum)? {
                break;
            }
        }
        Ok(WeightSequence::from_logs(v, &logs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::tanh_sinh;
    use crate::weights::densities::conditional_density_nigp;

    #[test]
    fn table_cdf_matches_quadrature() {
        let model = WeightModel::nigp(10.0).unwrap();
        let s = InverseCdfSampler::new(&model).unwrap();
        for x in [1e-4, 0.01, 0.05, 0.1, 0.3] {
            let q = tanh_sinh(|t, _, _| conditional_density_nigp(1, 1.0, 10.0, t).unwrap(), 0.0, x, 1e-11).value;
            assert!((s.first_stick().cdf(x) - q).abs() < 1e-8, "{x}: {} vs {q}", s.first_stick().cdf(x));
        }
        for u in [1e-6, 0.1, 0.5, 0.99] {
            let x = s.first_stick().quantile(u);
            assert!((s.first_stick().cdf(x) - u).abs() < 1e-12);
        }
    }
}
