use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{BaseMeasure, TailRule};
use crate::weights::{ModelEcho, Truncation, WeightModel};

/// How partition masses are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionSampler {
    /// Truncated stick-breaking with iid atoms.
    #[default]
    StickBreaking,
    /// Exact finite-dimensional law (DP, NIGP, GDP only).
    DirectFiniteDim,
}

/// Pass/fail bands. Every band is an absolute bound on the reported number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Max entrywise |empirical - target| covariance error. The quantile
    /// experiment scales it by max(1, |target|).
    pub cov: f64,
    /// Max per-marginal KS distance to N(0, 1).
    pub ks: f64,
    /// KS distance of the sup statistic to the Kolmogorov law.
    pub sup_ks: f64,
    /// Allowed distance of the LLN log-log slope from -tau/2.
    pub slope: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { cov: 0.02, ks: 0.02, sup_ks: 0.03, slope: 0.1 }
    }
}

/// Settings shared by all experiments; each experiment reads the fields it needs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Prior; its a is replaced by each grid point.
    pub model: WeightModel,
    pub base: BaseMeasure,
    pub a_grid: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    /// H-masses of consecutive cells A_1, A_2, ... from the bottom of the support.
    pub sets: Vec<f64>,
    /// H-levels u_j of the CDF grid, t_j = H^{-1}(u_j).
    pub grid_levels: Vec<f64>,
    pub quantile_levels: Vec<f64>,
    pub sampler: PartitionSampler,
    pub truncation: Truncation,
    pub tail_rule: TailRule,
    /// LLN/GC: a = n^tau over n_grid.
    pub tau: f64,
    pub n_grid: Vec<u64>,
    pub tolerances: Tolerances,
}

/// Equispaced levels k/(n+1), k = 1..n.
pub(crate) fn equispaced_levels(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 / (n + 1) as f64).collect()
}

impl ExperimentConfig {
    pub fn new(model: WeightModel) -> Self {
        ExperimentConfig {
            model,
            base: BaseMeasure::unit_uniform(),
            a_grid: vec![1e2, 1e3, 1e4],
            reps: 10_000,
            seed: 0,
            sets: vec![0.2, 0.3, 0.5],
            grid_levels: equispaced_levels(99),
            quantile_levels: vec![0.25, 0.5, 0.75],
            sampler: PartitionSampler::StickBreaking,
            truncation: Truncation::Capped { eps_tail: 1e-3, max_sticks: 1_000_000 },
            tail_rule: TailRule::Spread,
            tau: 1.0,
            n_grid: vec![10, 100, 1000, 10_000],
            tolerances: Tolerances::default(),
        }
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            model: self.model.describe(),
            base: self.base.clone(),
            a_grid: self.a_grid.clone(),
            reps: self.reps,
            seed: self.seed,
            sets: self.sets.clone(),
            grid_levels: self.grid_levels.clone(),
            quantile_levels: self.quantile_levels.clone(),
            sampler: self.sampler,
            truncation: TruncationEcho::from(self.truncation),
            tail_rule: self.tail_rule,
            tau: self.tau,
            n_grid: self.n_grid.clone(),
            tolerances: self.tolerances,
        }
    }

    pub(crate) fn check_common(&self, points: usize) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if points == 0 {
            return bad("the concentration grid is empty".into());
        }
        if self.reps < 2 {
            return bad(format!("need at least 2 replicates, got {}", self.reps));
        }
        if self.sampler == PartitionSampler::DirectFiniteDim
            && !matches!(self.model, WeightModel::Dp { .. } | WeightModel::Nigp { .. } | WeightModel::Gdp { .. })
        {
            return bad(format!("direct finite-dimensional sampling covers DP, NIGP and GDP, not {}", self.model.name()));
        }
        if self.sampler == PartitionSampler::StickBreaking && matches!(self.model, WeightModel::Gdp { .. }) {
            return bad("GDP has no stick-breaking sampler; use direct sampling".into());
        }
        Ok(())
    }

    pub(crate) fn check_a_grid(&self) -> Result<()> {
        self.check_common(self.a_grid.len())?;
        if self.a_grid.iter().any(|&a| !(a > 0.0) || !a.is_finite()) || self.a_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("the a-grid must be positive and increasing".into()));
        }
        Ok(())
    }

    pub(crate) fn check_levels(levels: &[f64], what: &str) -> Result<()> {
        if levels.is_empty()
            || levels.iter().any(|&u| !(u > 0.0 && u < 1.0))
            || levels.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::Config(format!("{what} must be increasing levels inside (0, 1)")));
        }
        Ok(())
    }
}

/// Serializable echo of a resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub model: ModelEcho,
    pub base: BaseMeasure,
    pub a_grid: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub sets: Vec<f64>,
    pub grid_levels: Vec<f64>,
    pub quantile_levels: Vec<f64>,
    pub sampler: PartitionSampler,
    pub truncation: TruncationEcho,
    pub tail_rule: TailRule,
    pub tau: f64,
    pub n_grid: Vec<u64>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationEcho {
    pub rule: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_tail: Option<f64>,
    pub max_sticks: usize,
}

impl From<Truncation> for TruncationEcho {
    fn from(t: Truncation) -> Self {
        match t {
            Truncation::Fixed(n) => TruncationEcho { rule: "fixed", eps_tail: None, max_sticks: n },
            Truncation::Adaptive { eps_tail, max_sticks } => {
                TruncationEcho { rule: "adaptive", eps_tail: Some(eps_tail), max_sticks }
            }
            Truncation::Capped { eps_tail, max_sticks } => TruncationEcho { rule: "capped", eps_tail: Some(eps_tail), max_sticks },
        }
    }
}
