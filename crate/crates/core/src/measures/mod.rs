//! Random probability measures assembled from stick weights and iid atoms,
//! exact finite-dimensional samplers, and mass, CDF and quantile evaluation.

mod base;
mod finite;

use rand::Rng;
use serde::Serialize;

pub use base::{BaseMeasure, TABLE_POINTS};
pub use finite::{
    sample_dirichlet_partition, sample_gdp_partition, sample_nig_partition, sample_partition, FiniteDimSampler,
};

use crate::error::{domain, Error, Result};
use crate::weights::{sample_weight_sequence_with, SamplerMode, Truncation, WeightModel};

/// One truncated realization of a stick-breaking measure.
#[derive(Debug, Clone, PartialEq)]
pub struct StickSample {
    pub atoms: Vec<f64>,
    pub weights: Vec<f64>,
    /// Mass beyond the last stick.
    pub tail_mass: f64,
    /// Base measure the atoms were drawn from; carries the unassigned tail.
    pub base: BaseMeasure,
}

/// How the truncation tail enters evaluated masses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    /// Add tail_mass * H(A) to every set, keeping E P(A) = H(A) exactly.
    #[default]
    Spread,
    /// Drop the tail and renormalize the kept weights.
    Renormalize,
}

/// Masses of consecutive intervals (b_{j-1}, b_j].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionStats {
    pub masses: Vec<f64>,
    pub h_masses: Vec<f64>,
}

/// P((-inf, t_j]) and H((-inf, t_j]) along a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfPath {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub h_values: Vec<f64>,
}

impl StickSample {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Writes `index,atom,weight` rows and a closing `TAIL,,tail_mass` row.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,atom,weight")?;
        for (i, (t, w)) in self.atoms.iter().zip(&self.weights).enumerate() {
            writeln!(out, "{},{t:e},{w:e}", i + 1)?;
        }
        writeln!(out, "TAIL,,{:e}", self.tail_mass)
    }
}

/// Draws weights from `model` and iid atoms from `base`.
pub fn build_stick_sample<R: Rng + ?Sized>(model: &WeightModel, base: &BaseMeasure, rng: &mut R, trunc: &Truncation) -> Result<StickSample> {
    build_stick_sample_with(model, base, rng, trunc, SamplerMode::Latent)
}

pub fn build_stick_sample_with<R: Rng + ?Sized>(
    model: &WeightModel,
    base: &BaseMeasure,
    rng: &mut R,
    trunc: &Truncation,
    mode: SamplerMode,
) -> Result<StickSample> {
    if matches!(model, WeightModel::Gdp { .. }) {
        return Err(Error::Unsupported("GDP has no stick sampler; use sample_gdp_partition".into()));
    }
    let seq = sample_weight_sequence_with(model, rng, trunc, mode)?;
    let atoms = (0..seq.w.len()).map(|_| base.sample(rng)).collect();
    Ok(StickSample { atoms, weights: seq.w, tail_mass: seq.tail, base: base.clone() })
}

fn check_increasing(xs: &[f64], what: &str) -> Result<()> {
    if xs.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().any(|x| x.is_nan()) {
        return Err(domain(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

/// Interval boundaries whose consecutive H-masses are `h`, starting at the
/// lower end of the support.
pub fn boundaries_for_masses(base: &BaseMeasure, h: &[f64]) -> Result<Vec<f64>> {
    if h.iter().any(|&x| !(x > 0.0)) || h.iter().sum::<f64>() > 1.0 + 1e-12 {
        return Err(domain("set masses must be positive with sum at most 1"));
    }
    let mut out = vec![base.quantile(0.0)];
    let mut acc = 0.0;
    for &x in h {
        acc += x;
        out.push(base.quantile(acc.min(1.0)));
    }
    Ok(out)
}

/// Masses of the intervals (b_{j-1}, b_j] with the tail spread in proportion to H.
pub fn evaluate_partition(sample: &StickSample, boundaries: &[f64]) -> Result<PartitionStats> {
    evaluate_partition_with(sample, boundaries, TailRule::Spread)
}

pub fn evaluate_partition_with(sample: &StickSample, boundaries: &[f64], rule: TailRule) -> Result<PartitionStats> {
    if boundaries.len() < 2 {
        return Err(domain("a partition needs at least two boundaries"));
    }
    check_increasing(boundaries, "partition boundaries")?;
    let n = boundaries.len() - 1;
    let mut masses = vec![0.0; n];
    for (&t, &w) in sample.atoms.iter().zip(&sample.weights) {
        let idx = boundaries.partition_point(|&b| b < t);
        if idx >= 1 && idx <= n {
            masses[idx - 1] += w;
        }
    }
    let h_masses: Vec<f64> = boundaries.windows(2).map(|b| sample.base.mass(b[0], b[1])).collect();
    match rule {
        TailRule::Spread => {
            for (m, h) in masses.iter_mut().zip(&h_masses) {
                *m += sample.tail_mass * h;
            }
        }
        TailRule::Renormalize => {
            let kept: f64 = sample.weights.iter().sum();
            if kept > 0.0 {
                masses.iter_mut().for_each(|m| *m /= kept);
            }
        }
    }
    Ok(PartitionStats { masses, h_masses })
}

/// P((-inf, t_j]) on `grid`, nondecreasing by construction.
pub fn evaluate_cdf(sample: &StickSample, grid: &[f64]) -> Result<CdfPath> {
    evaluate_cdf_with(sample, grid, TailRule::Spread)
}

pub fn evaluate_cdf_with(sample: &StickSample, grid: &[f64], rule: TailRule) -> Result<CdfPath> {
    if grid.is_empty() {
        return Err(domain("CDF grid must be nonempty"));
    }
    check_increasing(grid, "CDF grid")?;
    // bin[k] collects atoms in (t_{k-1}, t_k]; bin[len] those above the grid
    let mut bins = vec![0.0; grid.len() + 1];
    for (&t, &w) in sample.atoms.iter().zip(&sample.weights) {
        bins[grid.partition_point(|&g| g < t)] += w;
    }
    let h_values: Vec<f64> = grid.iter().map(|&t| sample.base.cdf(t)).collect();
    let scale = match rule {
        TailRule::Spread => 1.0,
        TailRule::Renormalize => {
            let kept: f64 = sample.weights.iter().sum();
            if kept > 0.0 {
                1.0 / kept
            } else {
                1.0
            }
        }
    };
    let mut acc = 0.0;
    let values = bins[..grid.len()]
        .iter()
        .zip(&h_values)
        .map(|(b, h)| {
            acc += b;
            let v = match rule {
                TailRule::Spread => acc + sample.tail_mass * h,
                TailRule::Renormalize => acc * scale,
            };
            v.min(1.0)
        })
        .collect();
    Ok(CdfPath { grid: grid.to_vec(), values, h_values })
}

/// Atoms sorted by location with cumulative weights, for repeated quantile queries.
#[derive(Debug, Clone)]
pub struct SortedSample<'a> {
    sample: &'a StickSample,
    atoms: Vec<f64>,
    /// cum[i] = total weight of atoms[..=i]
    cum: Vec<f64>,
}

impl<'a> SortedSample<'a> {
    pub fn new(sample: &'a StickSample) -> Self {
        let mut pairs: Vec<(f64, f64)> = sample.atoms.iter().copied().zip(sample.weights.iter().copied()).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut acc = 0.0;
        let cum = pairs
            .iter()
            .map(|p| {
                acc += p.1;
                acc
            })
            .collect();
        SortedSample { sample, atoms: pairs.into_iter().map(|p| p.0).collect(), cum }
    }

    /// P^{-1}(s) = inf{t : P((-inf, t]) >= s}, with the tail spread by H.
    pub fn quantile(&self, s: f64) -> f64 {
        let tail = self.sample.tail_mass;
        let base = &self.sample.base;
        let n = self.atoms.len();
        // on [atoms[j-1], atoms[j]) the CDF is cum[j-1] + tail * H(t)
        for j in 0..=n {
            let below = if j == 0 { 0.0 } else { self.cum[j - 1] };
            if j > 0 && s <= below + tail * base.cdf(self.atoms[j - 1]) {
                return self.atoms[j - 1];
            }
            let next = if j < n { self.atoms[j] } else { f64::INFINITY };
            if tail > 0.0 && s < below + tail * base.cdf(next) {
                let t = base.quantile(((s - below) / tail).clamp(0.0, 1.0));
                return if j > 0 { t.max(self.atoms[j - 1]) } else { t };
            }
        }
        self.atoms.last().copied().unwrap_or_else(|| base.quantile(s))
    }
}

/// Generalized inverse P^{-1}(s) of one sample.
pub fn quantile_of_sample(sample: &StickSample, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(domain(format!("quantile level must lie in (0, 1), got {s}")));
    }
    Ok(SortedSample::new(sample).quantile(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn toy(tail: f64) -> StickSample {
        let w = 1.0 - tail;
        StickSample {
            atoms: vec![0.7, 0.2, 0.5],
            weights: vec![0.5 * w, 0.3 * w, 0.2 * w],
            tail_mass: tail,
            base: BaseMeasure::unit_uniform(),
        }
    }

    #[test]
    fn partition_and_cdf() {
        let s = toy(0.0);
        let p = evaluate_partition(&s, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(p.masses, vec![0.5, 0.5]);
        let c = evaluate_cdf(&s, &[0.1, 0.2, 0.6, 2.0]).unwrap();
        assert_eq!(c.values, vec![0.0, 0.3, 0.5, 1.0]);
        let empty = StickSample { atoms: vec![], weights: vec![], tail_mass: 1.0, base: BaseMeasure::unit_uniform() };
        let p = evaluate_partition(&empty, &[0.0, 0.3, 1.0]).unwrap();
        assert_eq!(p.masses, p.h_masses);
        assert!(evaluate_partition(&s, &[0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn spread_and_renormalize() {
        let s = toy(0.2);
        let p = evaluate_partition(&s, &[0.0, 0.5, 1.0]).unwrap();
        assert!((p.masses[0] - (0.8 * 0.5 + 0.1)).abs() < 1e-15);
        let r = evaluate_partition_with(&s, &[0.0, 0.5, 1.0], TailRule::Renormalize).unwrap();
        assert!((r.masses[0] - 0.5).abs() < 1e-15 && (r.masses.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quantiles() {
        let s = toy(0.0);
        assert_eq!(quantile_of_sample(&s, 0.1).unwrap(), 0.2);
        assert_eq!(quantile_of_sample(&s, 0.3).unwrap(), 0.2);
        assert_eq!(quantile_of_sample(&s, 0.31).unwrap(), 0.5);
        assert_eq!(quantile_of_sample(&s, 0.99).unwrap(), 0.7);
        // all-tail sample reproduces H^{-1}
        let empty = StickSample { atoms: vec![], weights: vec![], tail_mass: 1.0, base: BaseMeasure::unit_uniform() };
        assert!((quantile_of_sample(&empty, 0.37).unwrap() - 0.37).abs() < 1e-15);
        // F(0.1) = 0.1 * 0.1 * ... continuous part below the first atom
        let s = toy(0.5);
        let q = quantile_of_sample(&s, 0.05).unwrap();
        assert!((q - 0.1).abs() < 1e-12, "{q}");
        let q = quantile_of_sample(&s, 0.2).unwrap();
        assert_eq!(q, 0.2);
    }

    #[test]
    fn quantile_inverts_cdf_on_random_samples() {
        let model = WeightModel::dp(5.0).unwrap();
        for k in 0..50 {
            let s = build_stick_sample(&model, &BaseMeasure::unit_uniform(), &mut stream(11, k), &Truncation::adaptive(1e-2)).unwrap();
            let sorted = SortedSample::new(&s);
            for lvl in [0.05, 0.3, 0.5, 0.77, 0.95] {
                let q = sorted.quantile(lvl);
                let f = |t: f64| evaluate_cdf(&s, &[t]).unwrap().values[0];
                assert!(f(q) >= lvl - 1e-12, "F(q) < s at {lvl}");
                assert!(f(q - 1e-9) < lvl + 1e-12, "not the infimum at {lvl}");
            }
        }
    }
}
