//! Weight moments: exact identities, leading-order asymptotics, quadrature
//! and Monte Carlo oracles, plus Gaussian joint moments.

mod gaussian;
mod gdp;
mod mc;
mod pdp;

pub use gaussian::{gaussian_joint_moment, gaussian_moment_wick_oracle, GaussianMomentSpec, WICK_MAX_ORDER};
pub use gdp::gdp_variance_integral;
pub use mc::{mc_truncated_power_sum, mc_truncated_power_sums, mc_truncated_power_sums_multilevel, truncated_power_sum, TruncationLevel};
pub use pdp::{pdp_joint_power_sum, pdp_joint_power_sum_exact};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::weights::{check_clt_conditions, ConditionStatus, IidFamily, WeightModel};

/// Multi-index (p_1, ..., p_k) of a joint power sum
/// E[sum_{i_1 < ... < i_k} w_{i_1}^{p_1} ... w_{i_k}^{p_k}].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct MomentSpec {
    p: Vec<u32>,
}

impl MomentSpec {
    pub fn new(p: Vec<u32>) -> Result<Self> {
        if p.is_empty() {
            return Err(domain("moment spec needs at least one exponent"));
        }
        Ok(MomentSpec { p })
    }

    pub fn p(&self) -> &[u32] {
        &self.p
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    /// p_{m:k} with 1-based m.
    pub fn tail_sum(&self, m: usize) -> u32 {
        self.p[m - 1..].iter().sum()
    }

    pub fn total(&self) -> u32 {
        self.tail_sum(1)
    }

    pub fn min(&self) -> u32 {
        *self.p.iter().min().expect("nonempty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    Exact,
    AsymptoticLeading,
    Quadrature,
    MonteCarlo,
}

/// A moment value and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentValue {
    pub value: f64,
    pub kind: MomentKind,
    /// Standard error; present exactly for Monte Carlo values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    /// Bound on the mass ignored by truncation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    /// Leading-order asymptotic value, when a non-asymptotic value is primary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic: Option<f64>,
}

impl MomentValue {
    pub fn exact(value: f64) -> Self {
        Self::of(value, MomentKind::Exact)
    }

    pub fn asymptotic(value: f64) -> Self {
        Self::of(value, MomentKind::AsymptoticLeading)
    }

    pub fn quadrature(value: f64, asymptotic: Option<f64>) -> Self {
        MomentValue { asymptotic, ..Self::of(value, MomentKind::Quadrature) }
    }

    pub fn monte_carlo(value: f64, stderr: f64, tail_bound: Option<f64>) -> Result<Self> {
        if !(stderr > 0.0) {
            return Err(domain(format!("Monte Carlo value needs a positive standard error, got {stderr}")));
        }
        Ok(MomentValue { stderr: Some(stderr), tail_bound, ..Self::of(value, MomentKind::MonteCarlo) })
    }

    fn of(value: f64, kind: MomentKind) -> Self {
        MomentValue { value, kind, stderr: None, tail_bound: None, asymptotic: None }
    }

    fn scaled(self, c: f64) -> Self {
        MomentValue {
            value: self.value * c,
            stderr: self.stderr.map(|s| s * c),
            asymptotic: self.asymptotic.map(|s| s * c),
            ..self
        }
    }
}

/// E[sum_i w_i^2] for each prior.
///
/// NGGP returns the leading term (1 - sigma)/(sigma a) for every sigma; see
/// [`expected_sum_w2_strict`] for the variant restricted to sigma = 1/m.
pub fn expected_sum_w2(model: &WeightModel) -> Result<MomentValue> {
    model.validate()?;
    Ok(match *model {
        WeightModel::Dp { a } => MomentValue::exact(1.0 / (a + 1.0)),
        WeightModel::Pdp { a, b } => MomentValue::exact((1.0 - b) / (a + 1.0)),
        WeightModel::Dpg { ref family, a } => {
            let law = family.at(a)?;
            MomentValue::asymptotic(law.moment(2) / (2.0 * law.moment(1)))
        }
        WeightModel::Nigp { a } => MomentValue::asymptotic(1.0 / a),
        WeightModel::Nggp { sigma, a } => MomentValue::asymptotic((1.0 - sigma) / (sigma * a)),
        WeightModel::Gdp { a, r } => gdp_variance_integral(a, r)?,
    })
}

/// As [`expected_sum_w2`], but NGGP is accepted only for sigma = 1/m.
pub fn expected_sum_w2_strict(model: &WeightModel) -> Result<MomentValue> {
    if let WeightModel::Nggp { sigma, .. } = *model {
        let m = (1.0 / sigma).round();
        if (m * sigma - 1.0).abs() > 1e-12 {
            return Err(Error::Unsupported(format!("NGGP leading coefficient needs sigma = 1/m, got {sigma}")));
        }
    }
    expected_sum_w2(model)
}

/// Var P(A) = H(A)(1 - H(A)) E[sum w^2].
pub fn variance_of_mass(model: &WeightModel, h_mass: f64) -> Result<MomentValue> {
    if !(0.0..=1.0).contains(&h_mass) {
        return Err(domain(format!("H(A) must lie in [0, 1], got {h_mass}")));
    }
    Ok(expected_sum_w2(model)?.scaled(h_mass * (1.0 - h_mass)))
}

const PROBE_GRID: [f64; 3] = [10.0, 100.0, 1000.0];

/// Leading term of the joint power sum for iid sticks:
/// prod E[v^{p_i}] / (p_{1:k} p_{2:k} ... p_{k:k} E[v]^k).
///
/// The family must pass the vanishing-ratio condition on a probe grid
/// a in {10, 100, 1000}.
pub fn iid_joint_power_sum_asym(family: &IidFamily, a: f64, spec: &MomentSpec) -> Result<MomentValue> {
    iid_joint_power_sum_asym_on(family, a, spec, &PROBE_GRID)
}

/// As [`iid_joint_power_sum_asym`] with a caller-chosen probe grid.
pub fn iid_joint_power_sum_asym_on(family: &IidFamily, a: f64, spec: &MomentSpec, probe: &[f64]) -> Result<MomentValue> {
    if spec.min() == 0 {
        return Err(domain("asymptotic power sum needs every p_i >= 1"));
    }
    let p_max = (spec.p().iter().copied().max().unwrap_or(1) + 1).max(2);
    let report = check_clt_conditions(family, probe, p_max)?;
    if report.condition_i == ConditionStatus::Fail {
        return Err(Error::ConditionViolated(format!(
            "{} fails the vanishing moment-ratio condition on a = {:?}",
            family.name(),
            probe
        )));
    }
    let law = family.at(a)?;
    let m1 = law.moment(1);
    let mut ln_v = -(spec.k() as f64) * m1.ln();
    for m in 1..=spec.k() {
        ln_v += law.moment(spec.p()[m - 1]).ln() - (spec.tail_sum(m) as f64).ln();
    }
    Ok(MomentValue::asymptotic(ln_v.exp()))
}
