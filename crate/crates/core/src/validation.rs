//! Oracle cross-check suites: each closed form against an evaluator that
//! shares no code path with it.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::moments::{gaussian_joint_moment, gaussian_moment_wick_oracle, gdp_variance_integral, pdp_joint_power_sum, pdp_joint_power_sum_exact, GaussianMomentSpec, MomentSpec};
use crate::rng::stream;
use crate::specialfn::oracle::{bessel_k_quadrature, upper_incomplete_gamma_quadrature};
use crate::specialfn::{bessel_k, gauss_2f1_unity, hyp2f1_partial_sum, ich_2q1_partial_sum, ich_2q1_unity, kolmogorov_cdf, upper_incomplete_gamma};
use crate::weights::{check_clt_conditions, IidFamily};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleCheck {
    fn relative(name: String, value: f64, reference: f64, tolerance: f64) -> Self {
        let rel_err = if value == reference { 0.0 } else { ((value - reference) / reference).abs() };
        OracleCheck { name, value, reference, rel_err, tolerance, pass: rel_err <= tolerance }
    }

    fn flag(name: String, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        OracleCheck { name, value: v, reference: 1.0, rel_err: 1.0 - v, tolerance: 0.0, pass: ok }
    }

    fn failed(name: String, err: impl std::fmt::Display) -> Self {
        OracleCheck { name: format!("{name}: {err}"), value: f64::NAN, reference: f64::NAN, rel_err: f64::INFINITY, tolerance: 0.0, pass: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<OracleCheck>,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: &'static str, checks: Vec<OracleCheck>) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        SuiteReport { suite, checks, pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &OracleCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn worst_rel_err(&self) -> f64 {
        self.checks.iter().map(|c| c.rel_err).fold(0.0, f64::max)
    }

    /// Largest rel_err / tolerance over the numeric checks; below 1 when all pass.
    pub fn worst_margin(&self) -> f64 {
        self.checks.iter().filter(|c| c.tolerance > 0.0).map(|c| c.rel_err / c.tolerance).fold(0.0, f64::max)
    }
}

pub const SUITES: [&str; 4] = ["specialfn", "gaussian", "moments", "conditions"];

pub fn run_suite(name: &str) -> Option<SuiteReport> {
    Some(match name {
        "specialfn" => specialfn_suite(),
        "gaussian" => gaussian_suite(100, 0),
        "moments" => moments_suite(),
        "conditions" => conditions_suite(),
        _ => return None,
    })
}

/// 2F1 and 2Q1 at unity against partial sums (1e-8); Bessel K and the
/// upper incomplete gamma against quadrature (1e-9); recurrences; Kolmogorov
/// CDF monotonicity.
pub fn specialfn_suite() -> SuiteReport {
    let mut checks = Vec::new();
    for a in [0.0, 0.3, 0.5, 1.0, 1.5] {
        for b in [-0.7, 0.5, 1.0] {
            for c in [1.4, 2.0, 3.0, 4.2] {
                if c - a - b <= 0.0 {
                    continue;
                }
                let name = format!("2F1(1; {a}, {b}, {c})");
                match (gauss_2f1_unity(a, b, c), hyp2f1_partial_sum(a, b, c, 100_000)) {
                    (Ok(x), Ok(y)) => checks.push(OracleCheck::relative(name, x.value, y.value, 1e-8)),
                    (Err(e), _) | (_, Err(e)) => checks.push(OracleCheck::failed(name, e)),
                }
            }
        }
    }
    for a in [0.5, 1.0, 2.0] {
        for b in [0.0, 0.25, 0.5] {
            for m in [1.0, 2.0, 4.0] {
                for n in 1..=3u32 {
                    if m - n as f64 * b <= 0.0 {
                        continue;
                    }
                    let name = format!("2Q1(1; a={a}, b={b}, c=1, m={m}, n={n})");
                    match (ich_2q1_unity(a, b, 1.0, m, n), ich_2q1_partial_sum(a, b, 1.0, m, n, 1.0, 1_000_000)) {
                        (Ok(x), Ok(y)) => checks.push(OracleCheck::relative(name, x.value, y.value, 1e-8)),
                        (Err(e), _) | (_, Err(e)) => checks.push(OracleCheck::failed(name, e)),
                    }
                }
            }
        }
    }
    for nu in [0.0, 0.5, 1.0, 1.5, 2.0, 3.5, 5.0, 8.5] {
        for z in [0.05, 0.5, 1.0, 2.0, 4.0, 10.0, 30.0] {
            let name = format!("K_{nu}({z})");
            match bessel_k(nu, z) {
                Ok(k) => checks.push(OracleCheck::relative(name, k.value, bessel_k_quadrature(nu, z).value, 1e-9)),
                Err(e) => checks.push(OracleCheck::failed(name, e)),
            }
            if nu >= 1.0 {
                let name = format!("K recurrence nu={nu} z={z}");
                match (bessel_k(nu - 1.0, z), bessel_k(nu, z), bessel_k(nu + 1.0, z)) {
                    (Ok(lo), Ok(mid), Ok(hi)) => {
                        checks.push(OracleCheck::relative(name, lo.value + 2.0 * nu / z * mid.value, hi.value, 1e-9))
                    }
                    _ => checks.push(OracleCheck::failed(name, "evaluation error")),
                }
            }
        }
    }
    for c in [-3.5, -2.0, -1.0, -0.5, 0.0, 0.3, 1.0, 2.5, 7.0] {
        for x in [0.05, 0.4, 1.0, 2.5, 8.0, 20.0] {
            let name = format!("Gamma({c}, {x})");
            match (upper_incomplete_gamma(c, x), upper_incomplete_gamma(c + 1.0, x)) {
                (Ok(g), Ok(g1)) => {
                    checks.push(OracleCheck::relative(name, g.value, upper_incomplete_gamma_quadrature(c, x).value, 1e-9));
                    let rhs = c * g.value + x.powf(c) * (-x).exp();
                    checks.push(OracleCheck::relative(format!("Gamma recurrence c={c} x={x}"), rhs, g1.value, 1e-9));
                }
                (Err(e), _) | (_, Err(e)) => checks.push(OracleCheck::failed(name, e)),
            }
        }
    }
    let ks: Vec<f64> = (0..=3000).map(|k| kolmogorov_cdf(k as f64 * 1e-3)).collect();
    let ok = ks.windows(2).all(|w| w[1] >= w[0]) && ks.iter().all(|&v| (0.0..=1.0).contains(&v));
    checks.push(OracleCheck::flag("Kolmogorov CDF nondecreasing in [0, 1] on [0, 3]".into(), ok));
    checks.push(OracleCheck::relative("Kolmogorov CDF at 1.3581".into(), kolmogorov_cdf(1.3581), 0.95, 1e-4));
    SuiteReport::new("specialfn", checks)
}

/// A random covariance matrix L L^T / n with standard normal L.
fn random_covariance(n: usize, rng: &mut crate::rng::Stream) -> Vec<Vec<f64>> {
    let l: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| StandardNormal.sample(rng)).collect()).collect();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| l[i][k] * l[j][k]).sum::<f64>() / n as f64).collect())
        .collect()
}

/// All r in N^n with |r| <= max_order.
fn multi_indices(n: usize, max_order: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|r: Vec<u32>| {
                let used: u32 = r.iter().sum();
                (0..=max_order - used).map(move |x| {
                    let mut s = r.clone();
                    s.push(x);
                    s
                })
            })
            .collect();
    }
    out
}

/// Closed Gaussian moment formula against the matching enumeration for
/// every |r| <= 8, n <= 4, over `matrices` random covariances per n. One
/// check per (n, matrix) holding the worst relative error; odd orders must
/// both be exactly zero.
pub fn gaussian_suite(matrices: usize, seed: u64) -> SuiteReport {
    let mut checks = Vec::new();
    for n in 1..=4usize {
        let indices = multi_indices(n, 8);
        for m in 0..matrices {
            let sigma = random_covariance(n, &mut stream(seed, (n * 1000 + m) as u64));
            let mut worst = (0.0f64, 1.0, 1.0);
            let mut odd_ok = true;
            for r in &indices {
                let spec = GaussianMomentSpec::new(r.clone(), sigma.clone()).expect("valid covariance");
                let f = gaussian_joint_moment(&spec);
                let w = gaussian_moment_wick_oracle(&spec).expect("order within bound");
                if spec.order() % 2 == 1 {
                    odd_ok &= f == 0.0 && w == 0.0;
                    continue;
                }
                let rel = if f == w { 0.0 } else { ((f - w) / w).abs() };
                if rel > worst.0 {
                    worst = (rel, f, w);
                }
            }
            let mut c = OracleCheck::relative(format!("n={n} matrix={m} worst multi-index"), worst.1, worst.2, 1e-10);
            c.pass &= odd_ok;
            checks.push(c);
        }
    }
    SuiteReport::new("gaussian", checks)
}

/// PDP identity in floating point against exact rational arithmetic, its
/// continuity at b = 0, and the GDP integral at r = 1.
pub fn moments_suite() -> SuiteReport {
    let mut checks = Vec::new();
    let specs: [&[u32]; 6] = [&[2], &[2, 2], &[3, 2], &[2, 2, 2], &[4, 1, 3], &[2, 3, 1, 2]];
    for s in specs {
        let spec = MomentSpec::new(s.to_vec()).expect("nonempty");
        for (an, ad, bn, bd) in [(1i128, 1i128, 1i128, 10i128), (10, 1, 1, 2), (100, 1, 9, 10), (3, 2, 0, 1)] {
            let (a, b) = (an as f64 / ad as f64, bn as f64 / bd as f64);
            let name = format!("PDP {s:?} a={a} b={b}");
            match (pdp_joint_power_sum(a, b, &spec), pdp_joint_power_sum_exact(&Rational::new(an, ad), &Rational::new(bn, bd), &spec)) {
                (Ok(v), Ok(q)) => checks.push(OracleCheck::relative(name, v.value, *q.numer() as f64 / *q.denom() as f64, 1e-12)),
                (Err(e), _) | (_, Err(e)) => checks.push(OracleCheck::failed(name, e)),
            }
            if b == 0.0 {
                if let (Ok(v0), Ok(v1)) = (pdp_joint_power_sum(a, 0.0, &spec), pdp_joint_power_sum(a, 1e-9, &spec)) {
                    checks.push(OracleCheck::relative(format!("PDP {s:?} a={a} continuity at b=0"), v1.value, v0.value, 1e-6));
                }
            }
        }
    }
    for a in [1.0, 10.0, 100.0] {
        let name = format!("GDP I_(a={a}, r=1)");
        match gdp_variance_integral(a, 1) {
            Ok(v) => checks.push(OracleCheck::relative(name, v.value, 1.0 / (a + 1.0), 1e-8)),
            Err(e) => checks.push(OracleCheck::failed(name, e)),
        }
    }
    SuiteReport::new("moments", checks)
}

/// Beta(1, a) and Beta(sqrt a, a) pass both moment conditions; Beta(a, a)
/// fails the vanishing-ratio condition.
pub fn conditions_suite() -> SuiteReport {
    let grid = [10.0, 100.0, 1000.0];
    let mut checks = Vec::new();
    for (family, want_i, want_ii) in [
        (IidFamily::BetaOneA, true, Some(true)),
        (IidFamily::beta_rho_power(0.5), true, Some(true)),
        (IidFamily::beta_a_a_table(4001), false, None),
    ] {
        let name = family.name();
        match check_clt_conditions(&family, &grid, 6) {
            Ok(r) => {
                checks.push(OracleCheck::flag(format!("{name}: condition (i) pass = {want_i}"), r.condition_i_pass == want_i));
                if let Some(w) = want_ii {
                    checks.push(OracleCheck::flag(format!("{name}: condition (ii) pass = {w}"), r.condition_ii_pass == w));
                }
            }
            Err(e) => checks.push(OracleCheck::failed(name.into(), e)),
        }
    }
    SuiteReport::new("conditions", checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_enumeration() {
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(4, 8).len(), 495);
    }
}
