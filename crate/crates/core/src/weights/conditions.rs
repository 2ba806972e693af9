//! Numerical and analytic checks of the moment conditions under which iid
//! stick laws satisfy the central and functional central limit theorems.

use serde::Serialize;

use super::family::IidFamily;
use crate::error::{domain, Result};
use crate::stats::ols_slope;

/// Outcome of one condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStatus {
    Pass,
    Fail,
    /// Ratios moved non-monotonically along the a-grid.
    Inconclusive,
}

/// A moment ratio tracked along the a-grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioEvidence {
    /// `n` for E[v^{n+1}]/E[v^n]; the multi-index for the mixed ratio.
    pub index: Vec<u32>,
    pub ratios: Vec<f64>,
    /// Least-squares slope of ln(ratio) against ln(a).
    pub log_slope: f64,
    pub status: ConditionStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub a_grid: Vec<f64>,
    pub condition_i: ConditionStatus,
    pub condition_ii: ConditionStatus,
    pub condition_i_pass: bool,
    pub condition_ii_pass: bool,
    /// k_1..k_{p_max} when known in closed form.
    pub k_exponents: Option<Vec<f64>>,
    /// a^{k_p} E[v^p] at the largest a, estimating C_p.
    pub c_estimates: Option<Vec<f64>>,
    pub evidence_i: Vec<RatioEvidence>,
    pub evidence_ii: Vec<RatioEvidence>,
}

/// A ratio counts as vanishing when it decreases along the grid and its
/// log-log slope is at most this.
const SLOPE_THRESHOLD: f64 = -0.05;
/// Relative wiggle tolerated before a sequence counts as non-monotone.
const MONOTONE_TOL: f64 = 1e-9;

fn judge(a_grid: &[f64], ratios: &[f64]) -> (f64, ConditionStatus) {
    let lx: Vec<f64> = a_grid.iter().map(|a| a.ln()).collect();
    let ly: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    if ly.iter().any(|v| !v.is_finite()) {
        return (f64::NAN, ConditionStatus::Inconclusive);
    }
    let slope = ols_slope(&lx, &ly);
    let monotone = ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + MONOTONE_TOL));
    let status = if !monotone {
        ConditionStatus::Inconclusive
    } else if slope <= SLOPE_THRESHOLD {
        ConditionStatus::Pass
    } else {
        ConditionStatus::Fail
    };
    (slope, status)
}

fn combine(items: &[RatioEvidence]) -> ConditionStatus {
    if items.iter().any(|e| e.status == ConditionStatus::Fail) {
        ConditionStatus::Fail
    } else if items.iter().any(|e| e.status == ConditionStatus::Inconclusive) {
        ConditionStatus::Inconclusive
    } else {
        ConditionStatus::Pass
    }
}

/// Nonincreasing multi-indices with parts >= 2 and sum <= p_max, excluding
/// those with every part equal to 2 (for which p_{1:k}/2 = k).
fn mixed_indices(p_max: u32) -> Vec<Vec<u32>> {
    fn rec(rem: u32, max_part: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() && cur.iter().any(|&p| p > 2) {
            out.push(cur.clone());
        }
        for p in (2..=max_part.min(rem)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(p_max, p_max, &mut Vec::new(), &mut out);
    out
}

/// Checks the two moment conditions for `family` along `a_grid`.
///
/// Condition (i) is always checked numerically. Condition (ii) uses the
/// exponent inequality j k_i >= i k_j when the k_p are known, and the mixed
/// moment ratios over all admissible multi-indices otherwise.
pub fn check_clt_conditions(family: &IidFamily, a_grid: &[f64], p_max: u32) -> Result<ConditionReport> {
    family.validate()?;
    if p_max < 2 {
        return Err(domain("p_max must be at least 2"));
    }
    if a_grid.len() < 3 || a_grid.windows(2).any(|w| !(w[1] > w[0])) || !(a_grid[0] > 0.0) {
        return Err(domain("a_grid needs at least 3 increasing positive points"));
    }
    if a_grid[a_grid.len() - 1] / a_grid[0] < 100.0 * (1.0 - 1e-12) {
        return Err(domain("a_grid must span at least two decades"));
    }
    // moments[k][p-1] = E[v^p] at a_grid[k]
    let moments: Vec<Vec<f64>> = a_grid
        .iter()
        .map(|&a| {
            let law = family.at(a)?;
            Ok((1..=p_max).map(|p| law.moment(p)).collect())
        })
        .collect::<Result<_>>()?;
    let m = |k: usize, p: u32| moments[k][p as usize - 1];

    let evidence_i: Vec<RatioEvidence> = (1..p_max)
        .map(|n| {
            let ratios: Vec<f64> = (0..a_grid.len()).map(|k| m(k, n + 1) / m(k, n)).collect();
            let (log_slope, status) = judge(a_grid, &ratios);
            RatioEvidence { index: vec![n], ratios, log_slope, status }
        })
        .collect();
    let condition_i = combine(&evidence_i);

    let evidence_ii: Vec<RatioEvidence> = mixed_indices(p_max)
        .into_iter()
        .map(|idx| {
            let total: u32 = idx.iter().sum();
            let half = total as f64 / 2.0;
            let ratios: Vec<f64> = (0..a_grid.len())
                .map(|k| {
                    let ln = (half - idx.len() as f64) * m(k, 1).ln() + idx.iter().map(|&p| m(k, p).ln()).sum::<f64>()
                        - half * m(k, 2).ln();
                    ln.exp()
                })
                .collect();
            let (log_slope, status) = judge(a_grid, &ratios);
            RatioEvidence { index: idx, ratios, log_slope, status }
        })
        .collect();

    let k_exponents: Option<Vec<f64>> = (1..=p_max).map(|p| family.k_exponent(p)).collect();
    let condition_ii = match &k_exponents {
        Some(k) => {
            let ok = k.iter().all(|&kp| kp > 0.0)
                && (1..=p_max as usize).all(|i| (1..=i).all(|j| j as f64 * k[i - 1] >= i as f64 * k[j - 1] * (1.0 - 1e-12)));
            if ok {
                ConditionStatus::Pass
            } else {
                ConditionStatus::Fail
            }
        }
        None => combine(&evidence_ii),
    };
    let last = a_grid.len() - 1;
    let c_estimates = k_exponents
        .as_ref()
        .map(|k| (1..=p_max).map(|p| a_grid[last].powf(k[p as usize - 1]) * m(last, p)).collect());
    Ok(ConditionReport {
        a_grid: a_grid.to_vec(),
        condition_i,
        condition_ii,
        condition_i_pass: condition_i == ConditionStatus::Pass,
        condition_ii_pass: condition_ii == ConditionStatus::Pass,
        k_exponents,
        c_estimates,
        evidence_i,
        evidence_ii,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [f64; 4] = [1e1, 1e2, 1e3, 1e4];

    #[test]
    fn beta_one_a_passes_with_factorial_constants() {
        let r = check_clt_conditions(&IidFamily::BetaOneA, &GRID, 6).unwrap();
        assert!(r.condition_i_pass && r.condition_ii_pass);
        let k = r.k_exponents.unwrap();
        let c = r.c_estimates.unwrap();
        let mut fact = 1.0;
        for p in 1..=6 {
            fact *= p as f64;
            assert_eq!(k[p - 1], p as f64);
            assert!((c[p - 1] / fact - 1.0).abs() < 0.01, "C_{p} = {}", c[p - 1]);
        }
    }

    #[test]
    fn beta_sqrt_a_passes_with_half_exponents() {
        let r = check_clt_conditions(&IidFamily::beta_rho_power(0.5), &GRID, 6).unwrap();
        assert!(r.condition_i_pass && r.condition_ii_pass);
        assert_eq!(r.k_exponents.unwrap()[3], 2.0);
        assert!(r.evidence_ii.iter().all(|e| e.status == ConditionStatus::Pass));
    }

    #[test]
    fn beta_a_a_fails_condition_i() {
        let r = check_clt_conditions(&IidFamily::beta_a_a_table(4001), &[1e1, 1e2, 1e3], 4).unwrap();
        assert_eq!(r.condition_i, ConditionStatus::Fail);
        assert!((r.evidence_i[0].ratios[2] - 0.5).abs() < 1e-3);
    }

    #[test]
    fn multi_index_enumeration() {
        let idx = mixed_indices(6);
        assert!(idx.contains(&vec![3]) && idx.contains(&vec![4, 2]) && idx.contains(&vec![3, 3]));
        assert!(!idx.contains(&vec![2, 2]) && !idx.contains(&vec![2, 2, 2]) && !idx.contains(&vec![2]));
        assert!(idx.iter().all(|i| i.iter().sum::<u32>() <= 6 && i.iter().all(|&p| p >= 2)));
    }

    #[test]
    fn grid_requirements() {
        assert!(check_clt_conditions(&IidFamily::BetaOneA, &[1.0, 10.0], 3).is_err());
        assert!(check_clt_conditions(&IidFamily::BetaOneA, &[1.0, 2.0, 10.0], 3).is_err());
    }
}
