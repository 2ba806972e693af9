use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Stick-breaking priors: samplers, weight moments and limit-theorem checks.
///
/// Every option can also come from `--config FILE` (TOML, or JSON for a
/// `.json` path) with top-level keys and per-command sections such as
/// `[clt]`; flags given on the command line win.
#[derive(Debug, Parser)]
#[command(name = "stickbreak-lab", version)]
pub struct Cli {
    /// Config file with default option values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<String>,
    /// Add a wall-clock line to output headers. Reruns are then no longer
    /// byte-identical.
    #[arg(long, global = true)]
    pub stamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one truncated stick-breaking measure as index,atom,weight rows.
    Sample(SampleArgs),
    /// Joint weight moments E[sum w^p1 ... w^pk], or Gaussian moments.
    Moments(MomentsArgs),
    /// Standardized partition masses against their Gaussian limit.
    Clt(CltArgs),
    /// Scaled CDF process against the Brownian bridge.
    Fclt(FcltArgs),
    /// Strong-law and Glivenko-Cantelli decay with a = n^tau.
    Gc(GcArgs),
    /// Random quantiles against their Gaussian limit.
    Quantile(QuantileArgs),
    /// Oracle cross-checks of the numerical kernels.
    Validate(ValidateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sample(_) => "sample",
            Command::Moments(_) => "moments",
            Command::Clt(_) => "clt",
            Command::Fclt(_) => "fclt",
            Command::Gc(_) => "gc",
            Command::Quantile(_) => "quantile",
            Command::Validate(_) => "validate",
        }
    }

    pub fn flags(&self) -> serde_json::Result<serde_json::Value> {
        match self {
            Command::Sample(a) => serde_json::to_value(a),
            Command::Moments(a) => serde_json::to_value(a),
            Command::Clt(a) => serde_json::to_value(a),
            Command::Fclt(a) => serde_json::to_value(a),
            Command::Gc(a) => serde_json::to_value(a),
            Command::Quantile(a) => serde_json::to_value(a),
            Command::Validate(a) => serde_json::to_value(a),
        }
    }
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ModelArgs {
    /// dp, dpg, pdp, nigp, nggp or gdp.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<String>,
    /// Concentration: one value, a comma list, or start:stop:count (log-spaced).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    /// Pitman-Yor discount in [0, 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    /// Generalized gamma index in (0, 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    /// Number of gamma components of the generalized Dirichlet process.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    /// Stick law for dpg: beta-one-a, beta-rho-power, beta-a-a or piecewise-fb.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// Exponent of rho_a = a^gamma for beta-rho-power.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    /// Exponent of the piecewise-fb family.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TruncArgs {
    /// adaptive, capped (stop silently at the cap) or fixed (exactly max-sticks).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<String>,
    /// Target tail mass of the truncated sticks.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_tail: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_sticks: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunArgs {
    /// Random seed (default 0).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
    /// Worker threads; falls back to STICKBREAK_THREADS, then to all cores.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<String>,
    /// Output path, `-` for stdout.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExpArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<String>,
    /// Path for the JSON report.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    /// uniform[:lo:hi] or normal[:mu:sd].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    /// auto, stick or direct (exact finite-dimensional law; dp, nigp, gdp).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<String>,
    /// spread (tail mass in proportion to H) or renormalize.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_rule: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_cov: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_ks: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_sup_ks: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_slope: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    /// uniform[:lo:hi] or normal[:mu:sd].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    /// NIGP/NGGP stick sampler: latent or inverse-cdf.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler_mode: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct MomentsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    /// Monte Carlo replicates for --method mc.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<String>,
    /// Exponents p1,...,pk.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multi_index: Option<String>,
    /// auto (closed form or asymptotic) or mc.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Gaussian moment E[X1^r1 ... Xn^rn] for these exponents instead of a prior.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauss_r: Option<String>,
    /// Gaussian covariance, rows separated by `;`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauss_cov: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CltArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub exp: ExpArgs,
    /// H-masses of consecutive cells from the bottom of the support.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    /// Path for the per-replicate standardized masses.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FcltArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub exp: ExpArgs,
    /// Number of equispaced H-levels, or a comma list of levels.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    /// Path for per-replicate sup statistics.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_out: Option<String>,
    /// Path for the Kolmogorov CDF reference curve.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kolmogorov_out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GcArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub exp: ExpArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<String>,
    /// Values of n; a = n^tau.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<String>,
    /// H-mass of the set A = (-inf, H^{-1}(mass)].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    /// Number of equispaced H-levels, or a comma list of levels.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct QuantileArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub exp: ExpArgs,
    /// Quantile levels in (0, 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ValidateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    /// all, specialfn, gaussian, moments or conditions.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
}
