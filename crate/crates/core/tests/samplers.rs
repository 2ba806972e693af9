use stickbreak::measures::{
    boundaries_for_masses, build_stick_sample, evaluate_partition, sample_dirichlet_partition, sample_nig_partition,
    sample_partition, BaseMeasure,
};
use stickbreak::moments::expected_sum_w2;
use stickbreak::quad::tanh_sinh;
use stickbreak::rng::map_replicates;
use stickbreak::stats::{chi_square_p_value, ks_statistic, ks_two_sample, mean, quantile, std_error, variance, variance_std_error};
use stickbreak::weights::{
    conditional_density_nggp, conditional_density_nigp, iid_moment, sample_weight_sequence, sample_weight_sequence_with,
    IidFamily, SamplerMode, Truncation, WeightModel,
};

fn stick_mass(model: &WeightModel, h: f64, reps: usize, trunc: Truncation, seed: u64) -> Vec<f64> {
    let base = BaseMeasure::unit_uniform();
    let b = boundaries_for_masses(&base, &[h]).unwrap();
    map_replicates(seed, 0, reps, |_, rng| {
        let s = build_stick_sample(model, &base, rng, &trunc).unwrap();
        evaluate_partition(&s, &b).unwrap().masses[0]
    })
}

#[test]
fn dirichlet_first_weight_is_beta_one_a() {
    let a = 3.5;
    let model = WeightModel::dp(a).unwrap();
    let w1 = map_replicates(1, 0, 100_000, |_, rng| sample_weight_sequence(&model, rng, &Truncation::Fixed(1)).unwrap().w[0]);
    let d = ks_statistic(&w1, |x| 1.0 - (1.0 - x).powf(a));
    assert!(d < 1.95 / 100_000f64.sqrt(), "KS {d}");
}

#[test]
fn beta_one_a_moments_approach_factorials() {
    let a: f64 = 1e3;
    for p in 1..=4u32 {
        let fact: f64 = (1..=p).map(f64::from).product();
        let scaled = a.powi(p as i32) * iid_moment(&IidFamily::BetaOneA, a, p).unwrap() / fact;
        assert!((scaled - 1.0).abs() < 0.05, "p = {p}: {scaled}");
    }
}

/// Empirical CDF of the first stick at 20 quantile points against the
/// quadrature CDF of its density, within 3 standard errors.
fn first_stick_matches_density<F: Fn(f64) -> f64>(model: &WeightModel, mode: SamplerMode, pdf: F) {
    let n = 20_000;
    let v1 = map_replicates(2, 0, n, |_, rng| sample_weight_sequence_with(model, rng, &Truncation::Fixed(1), mode).unwrap().v[0]);
    for k in 0..20 {
        let level = (k as f64 + 0.5) / 20.0;
        let x = quantile(&v1, level);
        let empirical = v1.iter().filter(|&&v| v <= x).count() as f64 / n as f64;
        let exact = tanh_sinh(|t, _, _| pdf(t), 0.0, x, 1e-10).value;
        let se = (exact * (1.0 - exact) / n as f64).sqrt();
        assert!((empirical - exact).abs() < 3.0 * se, "{} {mode:?} at x = {x}: {empirical} vs {exact}", model.name());
    }
}

#[test]
fn nigp_first_stick_cdf() {
    for a in [0.7, 8.0] {
        let m = WeightModel::nigp(a).unwrap();
        for mode in [SamplerMode::InverseCdf, SamplerMode::Latent] {
            first_stick_matches_density(&m, mode, |t| conditional_density_nigp(1, 1.0, a, t).unwrap());
        }
    }
}

#[test]
fn nggp_first_stick_cdf() {
    for (sigma, a) in [(0.3, 2.0), (0.6, 12.0)] {
        let m = WeightModel::nggp(sigma, a).unwrap();
        for mode in [SamplerMode::InverseCdf, SamplerMode::Latent] {
            first_stick_matches_density(&m, mode, |t| conditional_density_nggp(1, 1.0, sigma, a, t).unwrap());
        }
    }
}

#[test]
fn dirichlet_partition_agrees_with_sticks() {
    let (a, h) = (10.0, 0.3);
    let direct = map_replicates(3, 0, 100_000, |_, rng| sample_dirichlet_partition(a, &[h, 1.0 - h], rng).unwrap()[0]);
    let sticks = stick_mass(&WeightModel::dp(a).unwrap(), h, 100_000, Truncation::adaptive(1e-10), 4);
    let d = ks_two_sample(&direct, &sticks);
    assert!(d < 0.01, "two-sample KS {d}");
}

/// Binned two-sample chi-square between the inverse-Gaussian partition
/// sampler and latent stick-breaking.
#[test]
fn nig_partition_agrees_with_sticks() {
    let (a, h, n) = (2.0, 0.3, 10_000);
    let direct = map_replicates(5, 0, n, |_, rng| sample_nig_partition(a, &[h, 1.0 - h], rng).unwrap()[0]);
    let sticks = stick_mass(&WeightModel::nigp(a).unwrap(), h, n, Truncation::adaptive(1e-3), 6);
    let mut pooled: Vec<f64> = direct.iter().chain(&sticks).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let bins = 20;
    let edges: Vec<f64> = (1..bins).map(|k| quantile(&pooled, k as f64 / bins as f64)).collect();
    let count = |xs: &[f64]| {
        let mut c = vec![0.0f64; bins];
        for &x in xs {
            c[edges.partition_point(|&e| e < x)] += 1.0;
        }
        c
    };
    let (cx, cy) = (count(&direct), count(&sticks));
    let stat: f64 = cx.iter().zip(&cy).filter(|(x, y)| **x + **y > 0.0).map(|(x, y)| (x - y).powi(2) / (x + y)).sum();
    let p = chi_square_p_value(stat, (bins - 1) as f64);
    assert!(p > 1e-3, "chi-square {stat}, p = {p}");
}

fn check_mass_moments(label: &str, masses: &[f64], h: f64, sum_w2: f64) {
    assert!((mean(masses) - h).abs() < 4.0 * std_error(masses), "{label}: mean {} vs {h}", mean(masses));
    let target = h * (1.0 - h) * sum_w2;
    let v = variance(masses);
    assert!((v - target).abs() < 4.0 * variance_std_error(masses), "{label}: variance {v} vs {target}");
}

#[test]
fn mass_mean_and_variance() {
    let h = 0.3;
    let dp = WeightModel::dp(10.0).unwrap();
    check_mass_moments("dp", &stick_mass(&dp, h, 20_000, Truncation::adaptive(1e-10), 7), h, expected_sum_w2(&dp).unwrap().value);
    let pdp = WeightModel::pdp(10.0, 0.25).unwrap();
    let trunc = Truncation::Capped { eps_tail: 1e-4, max_sticks: 100_000 };
    check_mass_moments("pdp", &stick_mass(&pdp, h, 20_000, trunc, 8), h, expected_sum_w2(&pdp).unwrap().value);
    for model in [WeightModel::nigp(1e3).unwrap(), WeightModel::gdp(1e3, 2).unwrap()] {
        let masses = map_replicates(9, 0, 20_000, |_, rng| sample_partition(&model, &[h, 1.0 - h], rng).unwrap()[0]);
        check_mass_moments(model.name(), &masses, h, expected_sum_w2(&model).unwrap().value);
    }
    let nggp = WeightModel::nggp(0.5, 1e3).unwrap();
    let masses = stick_mass(&nggp, h, 4000, Truncation::adaptive(0.1), 10);
    check_mass_moments("nggp", &masses, h, expected_sum_w2(&nggp).unwrap().value);
}
