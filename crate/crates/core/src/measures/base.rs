use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::stats::{normal_cdf, normal_pdf, normal_quantile};
use crate::weights::open01;

/// Nonatomic base measure H on the real line.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseMeasure {
    Uniform { lo: f64, hi: f64 },
    Normal { mu: f64, sd: f64 },
    /// Linear interpolation through an increasing quantile grid at
    /// equispaced levels 0, 1/(K-1), ..., 1.
    Table {
        #[serde(skip)]
        quantiles: Arc<Vec<f64>>,
    },
}

/// Quantile-grid resolution for tables built from a quantile function.
pub const TABLE_POINTS: usize = 1024;

impl BaseMeasure {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(domain(format!("uniform base needs finite lo < hi, got ({lo}, {hi})")));
        }
        Ok(BaseMeasure::Uniform { lo, hi })
    }

    pub fn unit_uniform() -> Self {
        BaseMeasure::Uniform { lo: 0.0, hi: 1.0 }
    }

    pub fn normal(mu: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0) || !mu.is_finite() || !sd.is_finite() {
            return Err(domain(format!("normal base needs finite mu and sd > 0, got ({mu}, {sd})")));
        }
        Ok(BaseMeasure::Normal { mu, sd })
    }

    /// A table from strictly increasing quantiles at equispaced levels.
    pub fn table(quantiles: Vec<f64>) -> Result<Self> {
        if quantiles.len() < 2 {
            return Err(domain("quantile table needs at least two points"));
        }
        if quantiles.iter().any(|q| !q.is_finite()) || quantiles.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("quantile table must be finite and strictly increasing"));
        }
        Ok(BaseMeasure::Table { quantiles: Arc::new(quantiles) })
    }

    /// Tabulates a quantile function on [lo_level, hi_level] at
    /// `TABLE_POINTS` equispaced levels.
    pub fn table_from_quantile<F: Fn(f64) -> f64>(q: F, lo_level: f64, hi_level: f64) -> Result<Self> {
        let n = TABLE_POINTS;
        Self::table((0..n).map(|k| q(lo_level + (hi_level - lo_level) * k as f64 / (n - 1) as f64)).collect())
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match self {
            BaseMeasure::Uniform { lo, hi } => ((t - lo) / (hi - lo)).clamp(0.0, 1.0),
            BaseMeasure::Normal { mu, sd } => normal_cdf((t - mu) / sd),
            BaseMeasure::Table { quantiles } => {
                let q = quantiles.as_slice();
                let n = q.len();
                if t <= q[0] {
                    return 0.0;
                }
                if t >= q[n - 1] {
                    return 1.0;
                }
                let k = q.partition_point(|&x| x <= t) - 1;
                (k as f64 + (t - q[k]) / (q[k + 1] - q[k])) / (n - 1) as f64
            }
        }
    }

    /// H^{-1}(s) = inf{t : H(t) >= s}.
    pub fn quantile(&self, s: f64) -> f64 {
        match self {
            BaseMeasure::Uniform { lo, hi } => lo + (hi - lo) * s.clamp(0.0, 1.0),
            BaseMeasure::Normal { mu, sd } => mu + sd * normal_quantile(s),
            BaseMeasure::Table { quantiles } => {
                let q = quantiles.as_slice();
                let n = q.len();
                let pos = s.clamp(0.0, 1.0) * (n - 1) as f64;
                let k = (pos.floor() as usize).min(n - 2);
                q[k] + (pos - k as f64) * (q[k + 1] - q[k])
            }
        }
    }

    /// Density h(t) of H.
    pub fn density(&self, t: f64) -> f64 {
        match self {
            BaseMeasure::Uniform { lo, hi } => {
                if t >= *lo && t <= *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            BaseMeasure::Normal { mu, sd } => normal_pdf((t - mu) / sd) / sd,
            BaseMeasure::Table { quantiles } => {
                let q = quantiles.as_slice();
                let n = q.len();
                if t < q[0] || t > q[n - 1] {
                    return 0.0;
                }
                let k = (q.partition_point(|&x| x <= t).max(1) - 1).min(n - 2);
                1.0 / ((n - 1) as f64 * (q[k + 1] - q[k]))
            }
        }
    }

    /// One draw from H by inversion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(open01(rng))
    }

    /// H((lo, hi]).
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        (self.cdf(hi) - self.cdf(lo)).max(0.0)
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaseMeasure::Uniform { .. } => "uniform",
            BaseMeasure::Normal { .. } => "normal",
            BaseMeasure::Table { .. } => "table",
        }
    }
}
