use serde::Serialize;
use stickbreak::limits::{
    run_clt_experiment, run_fclt_experiment, run_lln_gc_experiment, run_quantile_experiment, write_clt_csv,
    write_clt_samples_csv, write_fclt_csv, write_kolmogorov_csv, write_lln_csv, write_quantile_csv, write_sup_csv,
    ExperimentConfig, PartitionSampler, Report,
};
use stickbreak::measures::{build_stick_sample_with, BaseMeasure, TailRule};
use stickbreak::moments::{
    expected_sum_w2, gaussian_joint_moment, iid_joint_power_sum_asym, mc_truncated_power_sum, pdp_joint_power_sum,
    GaussianMomentSpec, MomentSpec, MomentValue,
};
use stickbreak::rng::stream;
use stickbreak::validation::{gaussian_suite, run_suite, SuiteReport, SUITES};
use stickbreak::weights::{IidFamily, ModelEcho, SamplerMode, Truncation, WeightModel};

use crate::args::Command;
use crate::output::Run;
use crate::settings::{parse_grid, parse_list, Settings};
use crate::CliError;

const MODEL_DEFAULTS: [(&str, &str); 1] = [("seed", "0")];

const EXPERIMENT_DEFAULTS: [(&str, &str); 11] = [
    ("seed", "0"),
    ("reps", "10000"),
    ("base", "uniform"),
    ("sampler", "auto"),
    ("tail-rule", "spread"),
    ("truncation", "capped"),
    ("eps-tail", "1e-3"),
    ("max-sticks", "1000000"),
    ("tol-cov", "0.02"),
    ("tol-ks", "0.02"),
    ("tol-sup-ks", "0.03"),
];

/// Runs one command; `Ok(false)` means a gated check failed.
pub fn dispatch(command: &Command, config: Option<&str>, stamp: bool) -> Result<bool, CliError> {
    let name = command.name();
    let flags = command.flags().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut s = Settings::resolve(name, flags, config)?;
    match name {
        "sample" => {
            s.defaults(&MODEL_DEFAULTS);
            s.defaults(&[("base", "uniform"), ("sampler-mode", "latent"), ("truncation", "adaptive"), ("eps-tail", "1e-10"), ("max-sticks", "1000000")]);
        }
        "moments" => {
            s.defaults(&MODEL_DEFAULTS);
            s.defaults(&[("multi-index", "2"), ("method", "auto")]);
            if s.get("method") == Some("mc") {
                s.defaults(&[("reps", "100000"), ("truncation", "capped"), ("eps-tail", "1e-12"), ("max-sticks", "100000")]);
            }
        }
        "validate" => s.defaults(&[("seed", "0"), ("suite", "all")]),
        _ => {
            s.defaults(&EXPERIMENT_DEFAULTS);
            match name {
                "clt" => s.defaults(&[("partition", "0.2,0.3,0.5"), ("a", "1e2:1e4:3")]),
                "fclt" => s.defaults(&[("grid", "99"), ("a", "1e2:1e4:3")]),
                "gc" => s.defaults(&[("tau", "1"), ("n-grid", "10,100,1000,10000"), ("partition", "0.3"), ("grid", "99"), ("tol-slope", "0.1")]),
                _ => s.defaults(&[("levels", "0.25,0.5,0.75"), ("a", "1e2:1e4:3")]),
            }
        }
    }
    configure_threads(&s)?;
    let seed: u64 = s.parse_required("seed", "random seed")?;
    let out = s.get("out").unwrap_or("-").to_string();
    let run = Run::new(name, seed, s, stamp);
    match name {
        "sample" => sample(&run, &out),
        "moments" => moments(&run, &out),
        "validate" => validate(&run, &out),
        _ => experiment(&run, &out),
    }
}

fn configure_threads(s: &Settings) -> Result<(), CliError> {
    let threads = match s.get("threads") {
        Some(t) => Some(crate::settings::parse_value::<usize>("threads", t)?),
        None => match std::env::var("STICKBREAK_THREADS") {
            Ok(t) => Some(t.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("invalid STICKBREAK_THREADS value `{t}`")))?),
            Err(_) => None,
        },
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))?;
    }
    Ok(())
}

fn usage_from_core(flag: &str) -> impl Fn(stickbreak::Error) -> CliError + '_ {
    move |e| CliError::Usage(format!("--{flag}: {e}"))
}

fn family(s: &Settings) -> Result<IidFamily, CliError> {
    let f = match s.require("family", "needed by --process dpg")? {
        "beta-one-a" => IidFamily::BetaOneA,
        "beta-rho-power" => IidFamily::beta_rho_power(s.parse_required("gamma", "needed by --family beta-rho-power")?),
        "beta-a-a" => IidFamily::beta_a_a_table(4001),
        "piecewise-fb" => IidFamily::PiecewiseFb { epsilon: s.parse_required("epsilon", "needed by --family piecewise-fb")? },
        other => return Err(CliError::Usage(format!("unknown --family `{other}`"))),
    };
    f.validate().map_err(usage_from_core("family"))?;
    Ok(f)
}

fn model_at(s: &Settings, a: f64) -> Result<WeightModel, CliError> {
    let process = s.require("process", "the prior to use")?;
    let m = match process {
        "dp" => WeightModel::dp(a),
        "dpg" => WeightModel::dpg(family(s)?, a),
        "pdp" => WeightModel::pdp(a, s.parse_required("b", "needed by --process pdp")?),
        "nigp" => WeightModel::nigp(a),
        "nggp" => WeightModel::nggp(s.parse_required("sigma", "needed by --process nggp")?, a),
        "gdp" => WeightModel::gdp(a, s.parse_required("r", "needed by --process gdp")?),
        other => return Err(CliError::Usage(format!("unknown --process `{other}`; expected dp, dpg, pdp, nigp, nggp or gdp"))),
    };
    m.map_err(usage_from_core("process"))
}

fn single_a(s: &Settings) -> Result<f64, CliError> {
    let grid = parse_grid("a", s.require("a", "the concentration")?)?;
    match grid.as_slice() {
        [a] => Ok(*a),
        _ => Err(CliError::Usage("--a takes a single value for this command".into())),
    }
}

fn truncation(s: &Settings) -> Result<Truncation, CliError> {
    let eps: f64 = s.parse_required("eps-tail", "truncation tail mass")?;
    let cap: usize = s.parse_required("max-sticks", "truncation cap")?;
    let t = match s.require("truncation", "truncation rule")? {
        "adaptive" => Truncation::Adaptive { eps_tail: eps, max_sticks: cap },
        "capped" => Truncation::Capped { eps_tail: eps, max_sticks: cap },
        "fixed" => Truncation::Fixed(cap),
        other => return Err(CliError::Usage(format!("unknown --truncation `{other}`; expected adaptive, capped or fixed"))),
    };
    if !matches!(t, Truncation::Fixed(_)) && !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Usage(format!("--eps-tail must lie in (0, 1), got {eps}")));
    }
    if cap == 0 {
        return Err(CliError::Usage("--max-sticks must be positive".into()));
    }
    Ok(t)
}

fn base(s: &Settings) -> Result<BaseMeasure, CliError> {
    let text = s.require("base", "base measure")?;
    let parts: Vec<&str> = text.split(':').collect();
    let num = |t: &str| crate::settings::parse_value::<f64>("base", t);
    let b = match parts.as_slice() {
        ["uniform"] => Ok(BaseMeasure::unit_uniform()),
        ["uniform", lo, hi] => BaseMeasure::uniform(num(lo)?, num(hi)?),
        ["normal"] => BaseMeasure::normal(0.0, 1.0),
        ["normal", mu, sd] => BaseMeasure::normal(num(mu)?, num(sd)?),
        _ => return Err(CliError::Usage(format!("invalid --base `{text}`; expected uniform[:lo:hi] or normal[:mu:sd]"))),
    };
    b.map_err(usage_from_core("base"))
}

fn levels(key: &str, text: &str) -> Result<Vec<f64>, CliError> {
    if !text.contains(',') {
        if let Ok(n) = text.trim().parse::<usize>() {
            if n == 0 {
                return Err(CliError::Usage(format!("--{key} needs at least one level")));
            }
            return Ok((1..=n).map(|k| k as f64 / (n + 1) as f64).collect());
        }
    }
    parse_list(key, text)
}

#[derive(Serialize)]
struct SampleEcho {
    model: ModelEcho,
    sticks: usize,
    tail_mass: f64,
}

fn sample(run: &Run, out: &str) -> Result<bool, CliError> {
    let s = &run.settings;
    let model = model_at(s, single_a(s)?)?;
    let mode = match s.require("sampler-mode", "stick sampler")? {
        "latent" => SamplerMode::Latent,
        "inverse-cdf" => SamplerMode::InverseCdf,
        other => return Err(CliError::Usage(format!("unknown --sampler-mode `{other}`; expected latent or inverse-cdf"))),
    };
    let sample = build_stick_sample_with(&model, &base(s)?, &mut stream(run.seed, 0), &truncation(s)?, mode)?;
    let echo = SampleEcho { model: model.describe(), sticks: sample.len(), tail_mass: sample.tail_mass };
    let json = serde_json::to_string(&echo).expect("sample echo serializes");
    run.write_csv(out, &[("sample", json)], |w| sample.write_csv(w))?;
    Ok(true)
}

#[derive(Serialize)]
struct MomentOut<'a, M: Serialize, S: Serialize> {
    model: M,
    spec: S,
    #[serde(flatten)]
    value: &'a MomentValue,
}

#[derive(Serialize)]
struct GaussianEcho<'a> {
    r: &'a [u32],
    sigma: &'a [Vec<f64>],
}

fn moments(run: &Run, out: &str) -> Result<bool, CliError> {
    let s = &run.settings;
    if let Some(r) = s.get("gauss-r") {
        let r: Vec<u32> = parse_list("gauss-r", r)?;
        let cov = s.require("gauss-cov", "needed by --gauss-r")?;
        let sigma: Vec<Vec<f64>> = cov.split(';').map(|row| parse_list("gauss-cov", row)).collect::<Result<_, _>>()?;
        let spec = GaussianMomentSpec::new(r.clone(), sigma.clone()).map_err(usage_from_core("gauss-cov"))?;
        let value = MomentValue::exact(gaussian_joint_moment(&spec));
        let body = MomentOut { model: "gaussian", spec: GaussianEcho { r: &r, sigma: &sigma }, value: &value };
        return run.document(&body).and_then(|d| crate::output::write_bytes(out, d.as_bytes())).map(|_| true);
    }
    let model = model_at(s, single_a(s)?)?;
    let spec = MomentSpec::new(parse_list("multi-index", s.require("multi-index", "the exponents")?)?)
        .map_err(usage_from_core("multi-index"))?;
    if spec.p().contains(&0) {
        return Err(CliError::Usage("--multi-index entries must be positive".into()));
    }
    let value = match s.require("method", "moment method")? {
        "auto" => match &model {
            _ if spec.p() == [2] => expected_sum_w2(&model)?,
            WeightModel::Dp { a } => pdp_joint_power_sum(*a, 0.0, &spec)?,
            WeightModel::Pdp { a, b } => pdp_joint_power_sum(*a, *b, &spec)?,
            WeightModel::Dpg { family, a } => iid_joint_power_sum_asym(family, *a, &spec)?,
            m => {
                return Err(CliError::Usage(format!(
                    "no closed form or leading term for {} with multi-index {:?}; use --method mc",
                    m.name(),
                    spec.p()
                )))
            }
        },
        "mc" => mc_truncated_power_sum(&model, &spec, s.parse_required("reps", "replicates")?, &truncation(s)?, run.seed)?,
        other => return Err(CliError::Usage(format!("unknown --method `{other}`; expected auto or mc"))),
    };
    let body = MomentOut { model: model.describe(), spec: spec.p(), value: &value };
    crate::output::write_bytes(out, run.document(&body)?.as_bytes())?;
    Ok(true)
}

#[derive(Serialize)]
struct ValidateOut {
    suites: Vec<SuiteReport>,
    pass: bool,
}

fn validate(run: &Run, out: &str) -> Result<bool, CliError> {
    let which = run.settings.require("suite", "suite name")?;
    let names: Vec<&str> = if which == "all" { SUITES.to_vec() } else { vec![which] };
    let mut suites = Vec::new();
    for n in names {
        let r = match n {
            "gaussian" => gaussian_suite(100, run.seed),
            _ => run_suite(n).ok_or_else(|| CliError::Usage(format!("unknown --suite `{n}`; expected all or one of {}", SUITES.join(", "))))?,
        };
        eprintln!("{}: {} ({} checks, worst error/tolerance {:.2})", r.suite, if r.pass { "PASS" } else { "FAIL" }, r.checks.len(), r.worst_margin());
        for f in r.failures() {
            eprintln!("  {} = {} vs {} (rel {:.2e} > {:.0e})", f.name, f.value, f.reference, f.rel_err, f.tolerance);
        }
        suites.push(r);
    }
    let pass = suites.iter().all(|r| r.pass);
    crate::output::write_bytes(out, run.document(&ValidateOut { suites, pass })?.as_bytes())?;
    Ok(pass)
}

fn experiment_config(run: &Run) -> Result<ExperimentConfig, CliError> {
    let s = &run.settings;
    let gc = run.command == "gc";
    let a_grid = match s.get("a") {
        Some(a) => parse_grid("a", a)?,
        None if gc => vec![1.0],
        None => return Err(CliError::Usage("missing required option --a".into())),
    };
    let if_a = |e: stickbreak::Error| CliError::Usage(format!("--a: {e}"));
    if a_grid.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return Err(if_a(stickbreak::Error::Config("concentrations must be positive".into())));
    }
    let model = model_at(s, a_grid[0])?;
    let mut cfg = ExperimentConfig::new(model);
    cfg.a_grid = a_grid;
    cfg.seed = run.seed;
    cfg.reps = s.parse_required("reps", "replicates")?;
    cfg.base = base(s)?;
    cfg.truncation = truncation(s)?;
    cfg.sampler = match s.require("sampler", "partition sampler")? {
        "stick" => PartitionSampler::StickBreaking,
        "direct" => PartitionSampler::DirectFiniteDim,
        "auto" if matches!(cfg.model, WeightModel::Gdp { .. }) => PartitionSampler::DirectFiniteDim,
        "auto" => PartitionSampler::StickBreaking,
        other => return Err(CliError::Usage(format!("unknown --sampler `{other}`; expected auto, stick or direct"))),
    };
    cfg.tail_rule = match s.require("tail-rule", "tail rule")? {
        "spread" => TailRule::Spread,
        "renormalize" => TailRule::Renormalize,
        other => return Err(CliError::Usage(format!("unknown --tail-rule `{other}`; expected spread or renormalize"))),
    };
    cfg.tolerances.cov = s.parse_required("tol-cov", "tolerance")?;
    cfg.tolerances.ks = s.parse_required("tol-ks", "tolerance")?;
    cfg.tolerances.sup_ks = s.parse_required("tol-sup-ks", "tolerance")?;
    if let Some(t) = s.parse("tol-slope")? {
        cfg.tolerances.slope = t;
    }
    match run.command {
        "clt" => cfg.sets = s.list("partition")?.unwrap_or_default(),
        "fclt" => cfg.grid_levels = levels("grid", s.require("grid", "grid")?)?,
        "gc" => {
            cfg.tau = s.parse_required("tau", "a = n^tau")?;
            cfg.n_grid = s.list("n-grid")?.unwrap_or_default();
            let mass: Vec<f64> = s.list("partition")?.unwrap_or_default();
            cfg.sets = mass.into_iter().take(1).collect();
            cfg.grid_levels = levels("grid", s.require("grid", "grid")?)?;
        }
        _ => cfg.quantile_levels = s.list("levels")?.unwrap_or_default(),
    }
    Ok(cfg)
}

fn summarize(report: &Report) {
    eprintln!("{}: {}", report.experiment, if report.pass { "PASS" } else { "FAIL" });
    let gated = report.checks.iter().map(|c| (c, if c.pass { "ok  " } else { "FAIL" }));
    let diagnostic = report.diagnostics.iter().map(|c| (c, "diag"));
    for (c, tag) in gated.chain(diagnostic) {
        let band = match (c.lower, c.upper) {
            (Some(l), Some(u)) => format!(" in [{l}, {u}]"),
            (None, Some(u)) => format!(" < {u}"),
            (Some(l), None) => format!(" >= {l}"),
            (None, None) => String::new(),
        };
        eprintln!("  {tag} {} = {}{band}", c.name, c.value);
    }
}

fn experiment(run: &Run, out: &str) -> Result<bool, CliError> {
    let cfg = experiment_config(run)?;
    let report = match run.command {
        "clt" => run_clt_experiment(&cfg),
        "fclt" => run_fclt_experiment(&cfg),
        "gc" => run_lln_gc_experiment(&cfg),
        _ => run_quantile_experiment(&cfg),
    }
    .map_err(|e| match e {
        stickbreak::Error::Config(m) => CliError::Usage(m),
        e => CliError::Core(e),
    })?;
    let echo = serde_json::to_string(&report.config).expect("config echo serializes");
    let extra = [("experiment", echo)];
    match run.command {
        "clt" => {
            run.write_csv(out, &extra, |w| write_clt_csv(&report, w))?;
            if let Some(p) = run.settings.get("samples") {
                run.write_csv(p, &extra, |w| write_clt_samples_csv(&report, w))?;
            }
        }
        "fclt" => {
            run.write_csv(out, &extra, |w| write_fclt_csv(&report, w))?;
            if let Some(p) = run.settings.get("sup-out") {
                run.write_csv(p, &extra, |w| write_sup_csv(&report, w))?;
            }
            if let Some(p) = run.settings.get("kolmogorov-out") {
                run.write_csv(p, &extra, |w| write_kolmogorov_csv(300, w))?;
            }
        }
        "gc" => run.write_csv(out, &extra, |w| write_lln_csv(&report, w))?,
        _ => run.write_csv(out, &extra, |w| write_quantile_csv(&report, w))?,
    }
    if let Some(p) = run.settings.get("report") {
        crate::output::write_bytes(p, run.document(&report)?.as_bytes())?;
    }
    summarize(&report);
    Ok(report.pass)
}
