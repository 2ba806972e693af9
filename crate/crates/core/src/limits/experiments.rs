use serde::Serialize;

use super::config::{ExperimentConfig, PartitionSampler};
use super::{bridge_covariance, build_sigma, quantile_covariance, standardize, ConfigEcho, CovarianceTarget};
use crate::error::{Error, Result};
use crate::measures::{
    boundaries_for_masses, build_stick_sample, evaluate_cdf_with, evaluate_partition_with, sample_partition, SortedSample,
    StickSample, TailRule,
};
use crate::moments::{expected_sum_w2, MomentValue};
use crate::rng::{map_replicates, Stream};
use crate::specialfn::kolmogorov_cdf;
use crate::stats::{covariance_matrix, covariance_std_errors, ks_statistic, mean, normal_cdf, ols_slope, quantile_sorted, std_error};
use crate::weights::WeightModel;

/// One named pass/fail comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub pass: bool,
}

impl Check {
    fn below(name: String, value: f64, upper: f64) -> Self {
        Check { name, value, lower: None, upper: Some(upper), pass: value < upper }
    }

    fn within(name: String, value: f64, lower: f64, upper: f64) -> Self {
        Check { name, value, lower: Some(lower), upper: Some(upper), pass: value >= lower && value <= upper }
    }

    fn flag(name: String, ok: bool) -> Self {
        Check { name, value: if ok { 1.0 } else { 0.0 }, lower: Some(1.0), upper: None, pass: ok }
    }
}

/// Results at one concentration of a covariance-type experiment
/// (CLT, FCLT, quantile process).
#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub a: f64,
    pub sum_w2: MomentValue,
    /// Set masses, CDF levels or quantile levels indexing the coordinates.
    pub labels: Vec<f64>,
    pub mean: Vec<f64>,
    pub mean_stderr: Vec<f64>,
    pub emp_cov: Vec<Vec<f64>>,
    pub target_cov: Vec<Vec<f64>>,
    pub cov_stderr: Vec<Vec<f64>>,
    pub max_abs_err: f64,
    /// KS distance of each coordinate to N(0, target variance).
    pub marginal_ks: Vec<f64>,
    /// FCLT: KS distance of sup |Q| to the Kolmogorov law.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_ks: Option<f64>,
    /// FCLT: the same for the supremum over the grid only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_sup_ks: Option<f64>,
    pub pass: bool,
    /// Per-replicate statistic vectors.
    #[serde(skip)]
    pub samples: Vec<Vec<f64>>,
    #[serde(skip)]
    pub sup_values: Vec<f64>,
    #[serde(skip)]
    pub grid_sup_values: Vec<f64>,
}

/// Results at one n of the LLN / Glivenko-Cantelli experiment.
#[derive(Debug, Clone, Serialize)]
pub struct LlnPoint {
    pub n: u64,
    pub a: f64,
    pub median_abs_dev: f64,
    pub p95_abs_dev: f64,
    pub sup_median: f64,
    pub sup_p95: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: &'static str,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lln_points: Vec<LlnPoint>,
    /// Gated comparisons; `pass` is their conjunction.
    pub checks: Vec<Check>,
    /// Reported but not gated.
    pub diagnostics: Vec<Check>,
    pub pass: bool,
}

impl Report {
    fn new(experiment: &'static str, cfg: &ExperimentConfig, checks: Vec<Check>, diagnostics: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Report { experiment, config: cfg.echo(), points: Vec::new(), lln_points: Vec::new(), checks, diagnostics, pass }
    }
}

/// sup_t |P((-inf, t]) - H((-inf, t])| over the whole line, with the
/// truncation tail handled as in `rule`. Between atoms the deviation is
/// linear in H(t), so the supremum is attained next to an atom.
pub fn sup_deviation(sample: &StickSample, rule: TailRule) -> f64 {
    let (scale, tail) = match rule {
        TailRule::Spread => (1.0, sample.tail_mass),
        TailRule::Renormalize => {
            let kept: f64 = sample.weights.iter().sum();
            (if kept > 0.0 { 1.0 / kept } else { 1.0 }, 0.0)
        }
    };
    let mut pts: Vec<(f64, f64)> = sample.atoms.iter().zip(&sample.weights).map(|(&t, &w)| (sample.base.cdf(t), w)).collect();
    pts.sort_unstable_by(|x, y| x.0.total_cmp(&y.0));
    let drift = 1.0 - tail;
    let mut cum = 0.0;
    let mut sup = 0.0f64;
    for (u, w) in pts {
        let before = scale * cum - drift * u;
        cum += w;
        let after = scale * cum - drift * u;
        sup = sup.max(before.abs()).max(after.abs());
    }
    sup
}

fn sum_w2_at(model: &WeightModel) -> Result<MomentValue> {
    expected_sum_w2(model)
}

/// Cells covering the whole support: the given masses and, if they fall
/// short of 1, the complement.
fn full_cells(h: &[f64]) -> Vec<f64> {
    let s: f64 = h.iter().sum();
    let mut cells = h.to_vec();
    if s < 1.0 - 1e-12 {
        cells.push(1.0 - s);
    }
    cells
}

fn draw_sample(cfg: &ExperimentConfig, model: &WeightModel, rng: &mut Stream) -> Result<StickSample> {
    build_stick_sample(model, &cfg.base, rng, &cfg.truncation)
}

/// P((-inf, H^{-1}(u_j)]) at every level, plus the continuum supremum when a
/// stick sample is available.
fn cdf_at_levels(
    cfg: &ExperimentConfig,
    model: &WeightModel,
    levels: &[f64],
    grid: &[f64],
    rng: &mut Stream,
) -> Result<(Vec<f64>, Option<f64>)> {
    match cfg.sampler {
        PartitionSampler::StickBreaking => {
            let s = draw_sample(cfg, model, rng)?;
            let path = evaluate_cdf_with(&s, grid, cfg.tail_rule)?;
            Ok((path.values, Some(sup_deviation(&s, cfg.tail_rule))))
        }
        PartitionSampler::DirectFiniteDim => {
            let mut cells: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
            cells.insert(0, levels[0]);
            cells.push(1.0 - levels[levels.len() - 1]);
            let m = sample_partition(model, &cells, rng)?;
            let mut acc = 0.0;
            Ok((m[..levels.len()].iter().map(|x| {
                acc += x;
                acc
            }).collect(), None))
        }
    }
}

fn summarize(
    a: f64,
    sum_w2: MomentValue,
    labels: Vec<f64>,
    samples: Vec<Vec<f64>>,
    target: &CovarianceTarget,
    err_scale: impl Fn(f64) -> f64,
) -> PointReport {
    let n = samples.len();
    let d = labels.len();
    let cols: Vec<Vec<f64>> = (0..d).map(|j| samples.iter().map(|r| r[j]).collect()).collect();
    let emp_cov = covariance_matrix(&samples);
    let cov_stderr = covariance_std_errors(&emp_cov, n);
    let mut max_abs_err = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            max_abs_err = max_abs_err.max((emp_cov[i][j] - target.matrix[i][j]).abs() / err_scale(target.matrix[i][j]));
        }
    }
    let marginal_ks = cols
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let sd = target.matrix[j][j].sqrt();
            ks_statistic(c, |x| normal_cdf(x / sd))
        })
        .collect();
    PointReport {
        a,
        sum_w2,
        labels,
        mean: cols.iter().map(|c| mean(c)).collect(),
        mean_stderr: cols.iter().map(|c| std_error(c)).collect(),
        emp_cov,
        target_cov: target.matrix.clone(),
        cov_stderr,
        max_abs_err,
        marginal_ks,
        sup_ks: None,
        grid_sup_ks: None,
        pass: false,
        samples,
        sup_values: Vec::new(),
        grid_sup_values: Vec::new(),
    }
}

fn collect<T>(runs: Vec<Result<T>>) -> Result<Vec<T>> {
    runs.into_iter().collect()
}

fn mean_diagnostics(points: &[PointReport]) -> Check {
    let ok = points.iter().all(|p| p.mean.iter().zip(&p.mean_stderr).all(|(m, s)| m.abs() < 3.0 * s));
    Check::flag("mean_within_3_stderr".into(), ok)
}

fn trend_diagnostic(points: &[PointReport]) -> Option<Check> {
    let (first, last) = (points.first()?, points.last()?);
    (points.len() > 1).then(|| Check::below("max_cov_err_last_below_first".into(), last.max_abs_err, first.max_abs_err))
}

/// Standardized partition masses D_a for each a in the grid, compared with
/// the limit covariance of disjoint sets.
pub fn run_clt_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.check_a_grid()?;
    let target = build_sigma(&cfg.sets).map_err(|e| Error::Config(e.to_string()))?;
    let cells = full_cells(&cfg.sets);
    let bounds = boundaries_for_masses(&cfg.base, &cfg.sets)?;
    let tol = cfg.tolerances;
    let mut points = Vec::new();
    for (pi, &a) in cfg.a_grid.iter().enumerate() {
        let model = cfg.model.with_a(a)?;
        let sum_w2 = sum_w2_at(&model)?;
        let runs = map_replicates(cfg.seed, pi, cfg.reps, |_, rng| -> Result<Vec<f64>> {
            let masses = match cfg.sampler {
                PartitionSampler::StickBreaking => {
                    let s = draw_sample(cfg, &model, rng)?;
                    evaluate_partition_with(&s, &bounds, cfg.tail_rule)?.masses
                }
                PartitionSampler::DirectFiniteDim => sample_partition(&model, &cells, rng)?[..cfg.sets.len()].to_vec(),
            };
            standardize(&masses, &cfg.sets, sum_w2.value)
        });
        let mut p = summarize(a, sum_w2, cfg.sets.clone(), collect(runs)?, &target, |_| 1.0);
        p.pass = p.max_abs_err < tol.cov && p.marginal_ks.iter().all(|&k| k < tol.ks);
        points.push(p);
    }
    let last = points.last().expect("nonempty grid");
    let max_ks = last.marginal_ks.iter().cloned().fold(0.0, f64::max);
    let checks = vec![
        Check::below(format!("max_cov_err@a={}", last.a), last.max_abs_err, tol.cov),
        Check::below(format!("max_marginal_ks@a={}", last.a), max_ks, tol.ks),
    ];
    let mut diagnostics = vec![mean_diagnostics(&points)];
    diagnostics.extend(trend_diagnostic(&points));
    let mut report = Report::new("clt", cfg, checks, diagnostics);
    report.points = points;
    Ok(report)
}

/// Paths of Q_{H,a} on the CDF grid, compared with the Brownian bridge kernel,
/// and the law of sup |Q| compared with the Kolmogorov distribution.
pub fn run_fclt_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.check_a_grid()?;
    ExperimentConfig::check_levels(&cfg.grid_levels, "CDF grid levels")?;
    let target = bridge_covariance(&cfg.grid_levels)?;
    let grid: Vec<f64> = cfg.grid_levels.iter().map(|&u| cfg.base.quantile(u)).collect();
    let tol = cfg.tolerances;
    let mut points = Vec::new();
    for (pi, &a) in cfg.a_grid.iter().enumerate() {
        let model = cfg.model.with_a(a)?;
        let sum_w2 = sum_w2_at(&model)?;
        let root = sum_w2.value.sqrt();
        let runs = map_replicates(cfg.seed, pi, cfg.reps, |_, rng| -> Result<(Vec<f64>, Option<f64>)> {
            let (values, sup) = cdf_at_levels(cfg, &model, &cfg.grid_levels, &grid, rng)?;
            let q = values.iter().zip(&cfg.grid_levels).map(|(v, u)| (v - u) / root).collect();
            Ok((q, sup.map(|s| s / root)))
        });
        let runs = collect(runs)?;
        let grid_sup: Vec<f64> = runs.iter().map(|r| r.0.iter().fold(0.0f64, |m, x| m.max(x.abs()))).collect();
        let sup: Vec<f64> = runs.iter().map(|r| r.1.unwrap_or(f64::NAN)).collect();
        let continuum = runs.iter().all(|r| r.1.is_some());
        let samples = runs.into_iter().map(|r| r.0).collect();
        let mut p = summarize(a, sum_w2, cfg.grid_levels.clone(), samples, &target, |_| 1.0);
        let grid_ks = ks_statistic(&grid_sup, kolmogorov_cdf);
        p.grid_sup_ks = Some(grid_ks);
        p.sup_ks = Some(if continuum { ks_statistic(&sup, kolmogorov_cdf) } else { grid_ks });
        p.sup_values = if continuum { sup } else { grid_sup.clone() };
        p.grid_sup_values = grid_sup;
        p.pass = p.max_abs_err < tol.cov && p.sup_ks.unwrap() < tol.sup_ks;
        points.push(p);
    }
    let last = points.last().expect("nonempty grid");
    let checks = vec![
        Check::below(format!("max_cov_err@a={}", last.a), last.max_abs_err, tol.cov),
        Check::below(format!("sup_ks@a={}", last.a), last.sup_ks.unwrap(), tol.sup_ks),
    ];
    let mut diagnostics = vec![mean_diagnostics(&points)];
    diagnostics.extend(trend_diagnostic(&points));
    let mut report = Report::new("fclt", cfg, checks, diagnostics);
    report.points = points;
    Ok(report)
}

/// Deviations |P(A) - H(A)| for A = (-inf, H^{-1}(sets[0])] and the grid
/// supremum of |P - H| at a = n^tau.
pub fn run_lln_gc_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.check_common(cfg.n_grid.len())?;
    ExperimentConfig::check_levels(&cfg.grid_levels, "CDF grid levels")?;
    if cfg.n_grid.windows(2).any(|w| w[1] <= w[0]) || cfg.n_grid[0] == 0 {
        return Err(Error::Config("the n-grid must be positive and increasing".into()));
    }
    if !(cfg.tau > 0.0) {
        return Err(Error::Config(format!("tau must be positive, got {}", cfg.tau)));
    }
    let h_a = *cfg.sets.first().ok_or_else(|| Error::Config("LLN needs a set mass".into()))?;
    let mut levels = cfg.grid_levels.clone();
    levels.push(h_a);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    ExperimentConfig::check_levels(&levels, "set mass")?;
    let at = levels.iter().position(|&u| u == h_a).expect("inserted");
    let grid: Vec<f64> = levels.iter().map(|&u| cfg.base.quantile(u)).collect();
    let mut lln = Vec::new();
    for (pi, &n) in cfg.n_grid.iter().enumerate() {
        let a = (n as f64).powf(cfg.tau);
        let model = cfg.model.with_a(a)?;
        let runs = map_replicates(cfg.seed, pi, cfg.reps, |_, rng| -> Result<(f64, f64)> {
            let (values, _) = cdf_at_levels(cfg, &model, &levels, &grid, rng)?;
            let sup = values.iter().zip(&levels).fold(0.0f64, |m, (v, u)| m.max((v - u).abs()));
            Ok(((values[at] - h_a).abs(), sup))
        });
        let runs = collect(runs)?;
        let mut dev: Vec<f64> = runs.iter().map(|r| r.0).collect();
        let mut sup: Vec<f64> = runs.iter().map(|r| r.1).collect();
        dev.sort_by(f64::total_cmp);
        sup.sort_by(f64::total_cmp);
        lln.push(LlnPoint {
            n,
            a,
            median_abs_dev: quantile_sorted(&dev, 0.5),
            p95_abs_dev: quantile_sorted(&dev, 0.95),
            sup_median: quantile_sorted(&sup, 0.5),
            sup_p95: quantile_sorted(&sup, 0.95),
        });
    }
    let mut checks = Vec::new();
    if lln.len() >= 2 {
        let ln_n: Vec<f64> = lln.iter().map(|p| (p.n as f64).ln()).collect();
        let ln_med: Vec<f64> = lln.iter().map(|p| p.median_abs_dev.ln()).collect();
        let centre = -0.5 * cfg.tau;
        let slope = ols_slope(&ln_n, &ln_med);
        checks.push(Check::within("median_abs_dev_loglog_slope".into(), slope, centre - cfg.tolerances.slope, centre + cfg.tolerances.slope));
        let monotone = lln.windows(2).all(|w| w[1].sup_median < w[0].sup_median);
        checks.push(Check::flag("sup_median_decreasing".into(), monotone));
    }
    let mut report = Report::new("lln_gc", cfg, checks, Vec::new());
    report.lln_points = lln;
    Ok(report)
}

/// Standardized quantiles (P^{-1}(s) - H^{-1}(s)) / sqrt(E sum w^2) compared
/// with the quantile-process kernel.
pub fn run_quantile_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.check_a_grid()?;
    if cfg.sampler != PartitionSampler::StickBreaking {
        return Err(Error::Config("the quantile experiment needs stick-breaking samples".into()));
    }
    ExperimentConfig::check_levels(&cfg.quantile_levels, "quantile levels")?;
    let target = quantile_covariance(&cfg.base, &cfg.quantile_levels)?;
    let h_q: Vec<f64> = cfg.quantile_levels.iter().map(|&s| cfg.base.quantile(s)).collect();
    let tol = cfg.tolerances;
    let mut points = Vec::new();
    for (pi, &a) in cfg.a_grid.iter().enumerate() {
        let model = cfg.model.with_a(a)?;
        let sum_w2 = sum_w2_at(&model)?;
        let root = sum_w2.value.sqrt();
        let runs = map_replicates(cfg.seed, pi, cfg.reps, |_, rng| -> Result<Vec<f64>> {
            let s = draw_sample(cfg, &model, rng)?;
            let sorted = SortedSample::new(&s);
            Ok(cfg.quantile_levels.iter().zip(&h_q).map(|(&lv, &q)| (sorted.quantile(lv) - q) / root).collect())
        });
        let mut p = summarize(a, sum_w2, cfg.quantile_levels.clone(), collect(runs)?, &target, |t: f64| t.abs().max(1.0));
        p.pass = p.max_abs_err < tol.cov;
        points.push(p);
    }
    let last = points.last().expect("nonempty grid");
    let checks = vec![Check::below(format!("max_scaled_cov_err@a={}", last.a), last.max_abs_err, tol.cov)];
    let mut diagnostics = vec![mean_diagnostics(&points)];
    diagnostics.extend(trend_diagnostic(&points));
    let mut report = Report::new("quantile", cfg, checks, diagnostics);
    report.points = points;
    Ok(report)
}
