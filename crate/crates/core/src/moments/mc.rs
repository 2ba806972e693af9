//! Monte Carlo oracle for joint power sums of stick-breaking weights.

use super::{MomentSpec, MomentValue};
use crate::error::{domain, Result};
use crate::rng::map_replicates;
use crate::stats::{mean, std_error};
use crate::weights::{sample_weight_sequence, Truncation, WeightModel};

/// sum_{i_1 < ... < i_k} prod_j w_{i_j}^{p_j} over the given weights, by a
/// backward recursion over suffix sums in O(N k).
pub fn truncated_power_sum(w: &[f64], p: &[u32]) -> f64 {
    let k = p.len();
    // suffix[j] = sum over i_j < ... < i_k beyond the current position
    let mut suffix = vec![0.0; k + 1];
    suffix[k] = 1.0;
    for &wt in w.iter().rev() {
        for j in 0..k {
            suffix[j] += wt.powi(p[j] as i32) * suffix[j + 1];
        }
    }
    suffix[0]
}

/// Monte Carlo estimate of one joint power sum.
pub fn mc_truncated_power_sum(
    model: &WeightModel,
    spec: &MomentSpec,
    reps: usize,
    trunc: &Truncation,
    seed: u64,
) -> Result<MomentValue> {
    Ok(mc_truncated_power_sums(model, std::slice::from_ref(spec), reps, trunc, seed)?.remove(0))
}

/// Monte Carlo estimates of several joint power sums from the same
/// replicates. Replicate i uses its own stream, so results do not depend on
/// the thread count. The tail bound is the largest realized
/// tail^{min p} over the replicates.
pub fn mc_truncated_power_sums(
    model: &WeightModel,
    specs: &[MomentSpec],
    reps: usize,
    trunc: &Truncation,
    seed: u64,
) -> Result<Vec<MomentValue>> {
    if specs.iter().any(|s| s.min() < 2) {
        return Err(domain("Monte Carlo power sums need every p_i >= 2"));
    }
    if reps < 1000 {
        return Err(domain(format!("Monte Carlo power sums need at least 1000 replicates, got {reps}")));
    }
    let runs = map_replicates(seed, 0, reps, |_, rng| -> Result<(Vec<f64>, f64)> {
        let seq = sample_weight_sequence(model, rng, trunc)?;
        Ok((specs.iter().map(|s| truncated_power_sum(&seq.w, s.p())).collect(), seq.tail))
    });
    let runs: Vec<(Vec<f64>, f64)> = runs.into_iter().collect::<Result<_>>()?;
    let max_tail = runs.iter().map(|r| r.1).fold(0.0, f64::max);
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let xs: Vec<f64> = runs.iter().map(|r| r.0[i]).collect();
            MomentValue::monte_carlo(mean(&xs), std_error(&xs), Some(max_tail.powi(s.min() as i32)))
        })
        .collect()
}

/// One rung of a multilevel truncation schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationLevel {
    pub max_sticks: usize,
    pub reps: usize,
}

/// Multilevel Monte Carlo over truncation caps N_0 < N_1 < ... < N_L.
///
/// Level 0 averages S(N_0); level l > 0 averages S(N_l) - S(N_{l-1}) on
/// paths of N_l sticks, where S(N) is the power sum over the first N
/// weights. The sum estimates the N_L-truncated moment, unbiasedly, at the
/// cost of few long paths: the differences are small, so the higher levels
/// need far fewer replicates. Sticks stop early once the tail drops below `eps_tail`.
pub fn mc_truncated_power_sums_multilevel(
    model: &WeightModel,
    specs: &[MomentSpec],
    levels: &[TruncationLevel],
    eps_tail: f64,
    seed: u64,
) -> Result<Vec<MomentValue>> {
    let Some(first) = levels.first() else {
        return Err(domain("a multilevel schedule needs at least one level"));
    };
    if levels.windows(2).any(|w| w[1].max_sticks <= w[0].max_sticks) || levels.iter().skip(1).any(|l| l.reps < 2) {
        return Err(domain("multilevel caps must increase and every level needs replicates"));
    }
    let trunc = |n| Truncation::Capped { eps_tail, max_sticks: n };
    let mut out = mc_truncated_power_sums(model, specs, first.reps, &trunc(first.max_sticks), seed)?;
    let mut var: Vec<f64> = out.iter().map(|v| v.stderr.unwrap_or(0.0).powi(2)).collect();
    let mut max_tail = out.iter().zip(specs).map(|(v, s)| v.tail_bound.unwrap_or(0.0).powf(1.0 / s.min() as f64)).fold(0.0, f64::max);
    for (l, pair) in levels.windows(2).enumerate() {
        let (lo, hi) = (pair[0].max_sticks, pair[1]);
        let runs = map_replicates(seed, l + 1, hi.reps, |_, rng| -> Result<(Vec<f64>, f64)> {
            let seq = sample_weight_sequence(model, rng, &trunc(hi.max_sticks))?;
            let head = &seq.w[..seq.w.len().min(lo)];
            Ok((specs.iter().map(|s| truncated_power_sum(&seq.w, s.p()) - truncated_power_sum(head, s.p())).collect(), seq.tail))
        });
        let runs: Vec<(Vec<f64>, f64)> = runs.into_iter().collect::<Result<_>>()?;
        max_tail = runs.iter().map(|r| r.1).fold(0.0, f64::max);
        for (i, v) in out.iter_mut().enumerate() {
            let xs: Vec<f64> = runs.iter().map(|r| r.0[i]).collect();
            v.value += mean(&xs);
            var[i] += std_error(&xs).powi(2);
        }
    }
    out.iter()
        .zip(var)
        .zip(specs)
        .map(|((v, var), s)| MomentValue::monte_carlo(v.value, var.sqrt(), Some(max_tail.powi(s.min() as i32))))
        .collect()
}
