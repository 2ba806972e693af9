//! Limit targets (Gaussian covariance of standardized masses, Brownian
//! bridge kernel, quantile kernel) and seeded Monte Carlo experiments
//! checking the large-a limit theorems.

mod config;
mod csv;
mod experiments;

pub use config::{ConfigEcho, ExperimentConfig, PartitionSampler, Tolerances, TruncationEcho};
pub use csv::{write_clt_csv, write_clt_samples_csv, write_fclt_csv, write_kolmogorov_csv, write_lln_csv, write_quantile_csv, write_sup_csv};
pub use experiments::{
    run_clt_experiment, run_fclt_experiment, run_lln_gc_experiment, run_quantile_experiment, sup_deviation, Check,
    LlnPoint, PointReport, Report,
};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg::{asymmetry, min_eigenvalue};
use crate::measures::{BaseMeasure, CdfPath, PartitionStats};

/// A symmetric positive semidefinite target covariance.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CovarianceTarget {
    pub matrix: Vec<Vec<f64>>,
}

impl CovarianceTarget {
    fn checked(matrix: Vec<Vec<f64>>) -> Result<Self> {
        if asymmetry(&matrix) > 1e-12 {
            return Err(domain("target covariance is not symmetric"));
        }
        let ev = min_eigenvalue(&matrix);
        if ev < -1e-10 {
            return Err(domain(format!("target covariance has eigenvalue {ev:e}")));
        }
        Ok(CovarianceTarget { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }
}

/// Limit covariance of the standardized masses of disjoint sets:
/// 1 on the diagonal, -sqrt(h_i h_j / ((1-h_i)(1-h_j))) off it.
pub fn build_sigma(h_masses: &[f64]) -> Result<CovarianceTarget> {
    if h_masses.is_empty() || h_masses.iter().any(|&h| !(h > 0.0 && h < 1.0)) {
        return Err(domain("set masses must lie in (0, 1)"));
    }
    if h_masses.iter().sum::<f64>() > 1.0 + 1e-9 {
        return Err(domain("disjoint sets need masses summing to at most 1"));
    }
    let n = h_masses.len();
    let odds: Vec<f64> = h_masses.iter().map(|h| (h / (1.0 - h)).sqrt()).collect();
    let matrix = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { -odds[i] * odds[j] }).collect()).collect();
    CovarianceTarget::checked(matrix)
}

/// Brownian bridge kernel min(u_i, u_j) - u_i u_j.
pub fn bridge_covariance(u: &[f64]) -> Result<CovarianceTarget> {
    if u.is_empty() || u.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(domain("bridge levels must lie strictly inside (0, 1)"));
    }
    if u.windows(2).any(|w| w[1] < w[0]) {
        return Err(domain("bridge levels must be nondecreasing"));
    }
    let matrix = u.iter().map(|&a| u.iter().map(|&b| a.min(b) - a * b).collect()).collect();
    CovarianceTarget::checked(matrix)
}

/// Limit covariance of (P^{-1}(s) - H^{-1}(s)) / sqrt(E sum w^2):
/// (min(s,t) - st) / (h(H^{-1}(s)) h(H^{-1}(t))).
pub fn quantile_covariance(base: &BaseMeasure, levels: &[f64]) -> Result<CovarianceTarget> {
    let bridge = bridge_covariance(levels)?;
    let dens: Vec<f64> = levels.iter().map(|&s| base.density(base.quantile(s))).collect();
    if let Some(s) = levels.iter().zip(&dens).find(|(_, d)| !(**d > 0.0)).map(|p| p.0) {
        return Err(domain(format!("base density vanishes at the level-{s} quantile")));
    }
    let matrix = bridge
        .matrix
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, k)| k / (dens[i] * dens[j])).collect())
        .collect();
    CovarianceTarget::checked(matrix)
}

fn check_sum_w2(sum_w2: f64) -> Result<()> {
    if !(sum_w2 > 0.0) || !sum_w2.is_finite() {
        return Err(domain(format!("E sum w^2 must be positive, got {sum_w2}")));
    }
    Ok(())
}

/// D[i] = (P(A_i) - H(A_i)) / sqrt(H(A_i)(1 - H(A_i)) E sum w^2).
pub fn standardize_partition(masses: &PartitionStats, sum_w2: f64) -> Result<Vec<f64>> {
    check_sum_w2(sum_w2)?;
    standardize(&masses.masses, &masses.h_masses, sum_w2)
}

pub(crate) fn standardize(masses: &[f64], h: &[f64], sum_w2: f64) -> Result<Vec<f64>> {
    masses
        .iter()
        .zip(h)
        .map(|(&p, &h)| {
            if !(h > 0.0 && h < 1.0) {
                return Err(Error::Degenerate(format!("cannot standardize a set of H-mass {h}")));
            }
            Ok((p - h) / (h * (1.0 - h) * sum_w2).sqrt())
        })
        .collect()
}

/// Q[j] = (P((-inf, t_j]) - H((-inf, t_j])) / sqrt(E sum w^2).
pub fn q_statistic(path: &CdfPath, sum_w2: f64) -> Result<Vec<f64>> {
    check_sum_w2(sum_w2)?;
    let s = sum_w2.sqrt();
    Ok(path.values.iter().zip(&path.h_values).map(|(p, h)| (p - h) / s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_examples() {
        let s = build_sigma(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((s.matrix[0][1] + 0.5).abs() < 1e-15);
        assert_eq!(build_sigma(&[0.4]).unwrap().matrix, vec![vec![1.0]]);
        let s = build_sigma(&[0.5, 0.5]).unwrap();
        assert!((s.matrix[1][0] + 1.0).abs() < 1e-15);
        assert!(build_sigma(&[0.0, 0.5]).is_err());
        assert!(build_sigma(&[0.7, 0.5]).is_err());
    }

    #[test]
    fn bridge_examples() {
        let b = bridge_covariance(&[0.5]).unwrap();
        assert_eq!(b.matrix[0][0], 0.25);
        let b = bridge_covariance(&[0.25, 0.75]).unwrap();
        assert!((b.matrix[0][1] - 0.0625).abs() < 1e-15);
        assert!(bridge_covariance(&[0.0, 0.5]).is_err());
        let q = quantile_covariance(&BaseMeasure::normal(0.0, 1.0).unwrap(), &[0.5]).unwrap();
        assert!((q.matrix[0][0] - 0.25 * 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn standardization_examples() {
        let stats = PartitionStats { masses: vec![0.55], h_masses: vec![0.5] };
        let d = standardize_partition(&stats, 0.1).unwrap();
        assert!((d[0] - 0.05 / 0.025f64.sqrt()).abs() < 1e-14);
        let same = PartitionStats { masses: vec![0.2, 0.8], h_masses: vec![0.2, 0.8] };
        assert_eq!(standardize_partition(&same, 0.1).unwrap(), vec![0.0, 0.0]);
        let d4 = standardize_partition(&stats, 0.4).unwrap();
        assert!((d4[0] - 0.5 * d[0]).abs() < 1e-15);
        let bad = PartitionStats { masses: vec![1.0], h_masses: vec![1.0] };
        assert!(standardize_partition(&bad, 0.1).is_err());
        let path = CdfPath { grid: vec![0.3, 0.6], values: vec![0.35, 0.6], h_values: vec![0.3, 0.6] };
        let q = q_statistic(&path, 0.01).unwrap();
        assert!((q[0] - 0.5).abs() < 1e-14 && q[1] == 0.0);
        assert!((q[0] * 0.1 + path.h_values[0] - path.values[0]).abs() < 1e-15);
    }
}
