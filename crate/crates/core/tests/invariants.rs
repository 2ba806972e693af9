use proptest::prelude::*;
use stickbreak::limits::{bridge_covariance, build_sigma, standardize_partition};
use stickbreak::linalg::min_eigenvalue;
use stickbreak::measures::{build_stick_sample, evaluate_cdf, BaseMeasure, PartitionStats};
use stickbreak::moments::{
    gaussian_joint_moment, gaussian_moment_wick_oracle, pdp_joint_power_sum, pdp_joint_power_sum_exact,
    truncated_power_sum, GaussianMomentSpec, MomentSpec,
};
use stickbreak::rng::stream;
use stickbreak::weights::{sample_weight_sequence, IidFamily, Truncation, WeightModel};
use stickbreak::Rational;

fn model_strategy() -> impl Strategy<Value = WeightModel> {
    prop_oneof![
        (0.1f64..50.0).prop_map(|a| WeightModel::dp(a).unwrap()),
        (0.1f64..50.0, 0.0f64..0.8).prop_map(|(a, b)| WeightModel::pdp(a, b).unwrap()),
        (0.5f64..30.0).prop_map(|a| WeightModel::dpg(IidFamily::beta_rho_power(0.5), a).unwrap()),
        (0.2f64..30.0).prop_map(|a| WeightModel::nigp(a).unwrap()),
        (0.2f64..0.8, 0.2f64..30.0).prop_map(|(s, a)| WeightModel::nggp(s, a).unwrap()),
    ]
}

fn covariance(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(-1.5f64..1.5, n * n).prop_map(move |l| {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| l[i * n + k] * l[j * n + k]).sum()).collect()).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_sequences_account_for_all_mass(model in model_strategy(), seed in 0u64..1000, fixed in prop::option::of(1usize..200)) {
        let trunc = fixed.map(Truncation::Fixed).unwrap_or(Truncation::Capped { eps_tail: 1e-6, max_sticks: 200_000 });
        let seq = sample_weight_sequence(&model, &mut stream(seed, 0), &trunc).unwrap();
        prop_assert!(seq.v.iter().all(|&v| v > 0.0 && v < 1.0));
        prop_assert!(seq.w.iter().all(|&w| w >= 0.0));
        let total: f64 = seq.w.iter().sum::<f64>() + seq.tail;
        prop_assert!((total - 1.0).abs() < 1e-12, "total {}", total);
        if let Some(n) = fixed {
            prop_assert_eq!(seq.len(), n);
        }
    }

    #[test]
    fn cdf_paths_are_monotone_and_bounded(model in model_strategy(), seed in 0u64..1000) {
        let base = BaseMeasure::normal(0.0, 1.0).unwrap();
        let s = build_stick_sample(&model, &base, &mut stream(seed, 1), &Truncation::Capped { eps_tail: 1e-4, max_sticks: 100_000 }).unwrap();
        let grid: Vec<f64> = (0..60).map(|k| -3.0 + 0.1 * k as f64).collect();
        let path = evaluate_cdf(&s, &grid).unwrap();
        prop_assert!(path.values.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(path.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn power_sum_recursion_matches_enumeration(w in prop::collection::vec(0.0f64..0.5, 0..12), p in prop::collection::vec(1u32..4, 1..4)) {
        let n = w.len();
        let mut brute = 0.0;
        let k = p.len();
        let mut idx: Vec<usize> = (0..k).collect();
        if n >= k {
            loop {
                brute += idx.iter().zip(&p).map(|(&i, &e)| w[i].powi(e as i32)).product::<f64>();
                // next strictly increasing index tuple
                let mut j = k;
                while j > 0 && idx[j - 1] == n - k + j - 1 {
                    j -= 1;
                }
                if j == 0 {
                    break;
                }
                idx[j - 1] += 1;
                for t in j..k {
                    idx[t] = idx[t - 1] + 1;
                }
            }
        }
        let fast = truncated_power_sum(&w, &p);
        prop_assert!((fast - brute).abs() <= 1e-14 * brute.abs().max(1e-300) + 1e-300, "{} vs {}", fast, brute);
    }

    #[test]
    fn gaussian_formula_matches_wick(n in 1usize..5, orders in prop::collection::vec(0u32..4, 4), sigma in covariance(4)) {
        let r: Vec<u32> = orders[..n].to_vec();
        let sigma: Vec<Vec<f64>> = sigma[..n].iter().map(|row| row[..n].to_vec()).collect();
        let spec = GaussianMomentSpec::new(r, sigma).unwrap();
        let f = gaussian_joint_moment(&spec);
        let w = gaussian_moment_wick_oracle(&spec).unwrap();
        if spec.order() % 2 == 1 {
            prop_assert_eq!(f, 0.0);
            prop_assert_eq!(w, 0.0);
        } else {
            let scale = w.abs().max(1e-300);
            prop_assert!((f - w).abs() <= 1e-10 * scale + 1e-14, "{} vs {}", f, w);
        }
    }

    #[test]
    fn pdp_identity_is_continuous_at_zero_discount(a in 0.2f64..200.0, p in prop::collection::vec(1u32..5, 1..4)) {
        prop_assume!(p.iter().sum::<u32>() <= 8);
        let spec = MomentSpec::new(p).unwrap();
        let at_zero = pdp_joint_power_sum(a, 0.0, &spec).unwrap().value;
        let near = pdp_joint_power_sum(a, 1e-9, &spec).unwrap().value;
        prop_assert!(((near - at_zero) / at_zero).abs() < 1e-6);
    }

    #[test]
    fn pdp_float_matches_rational(an in 1i128..40, bn in 0i128..10, p in prop::collection::vec(1u32..4, 1..4)) {
        let spec = MomentSpec::new(p).unwrap();
        let exact = pdp_joint_power_sum_exact(&Rational::new(an, 1), &Rational::new(bn, 10), &spec).unwrap();
        let exact = *exact.numer() as f64 / *exact.denom() as f64;
        let float = pdp_joint_power_sum(an as f64, bn as f64 / 10.0, &spec).unwrap().value;
        prop_assert!(((float - exact) / exact).abs() < 1e-12, "{} vs {}", float, exact);
    }

    #[test]
    fn sigma_is_a_correlation_matrix(raw in prop::collection::vec(0.05f64..1.0, 1..7)) {
        // masses of n cells out of a partition with at least one more cell
        let total: f64 = raw.iter().sum::<f64>() + 0.5;
        let h: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let s = build_sigma(&h).unwrap().matrix;
        for i in 0..h.len() {
            prop_assert!((s[i][i] - 1.0).abs() < 1e-12);
            for j in 0..h.len() {
                prop_assert_eq!(s[i][j], s[j][i]);
            }
        }
        prop_assert!(min_eigenvalue(&s) >= -1e-10);
    }

    #[test]
    fn bridge_kernel_is_positive_semidefinite(mut u in prop::collection::vec(0.001f64..0.999, 1..30)) {
        u.sort_by(f64::total_cmp);
        u.dedup();
        let k = bridge_covariance(&u).unwrap().matrix;
        prop_assert!(min_eigenvalue(&k) >= -1e-10);
    }

    #[test]
    fn standardization_is_linear_in_the_masses(raw in prop::collection::vec(0.05f64..1.0, 2..6), i in 0usize..6, c in -0.05f64..0.05) {
        let total: f64 = raw.iter().sum();
        let h: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let i = i % h.len();
        let stats = |m: Vec<f64>| PartitionStats { masses: m, h_masses: h.clone() };
        let base = standardize_partition(&stats(h.clone()), 0.01).unwrap();
        let mut bumped = h.clone();
        bumped[i] += c;
        let moved = standardize_partition(&stats(bumped), 0.01).unwrap();
        for (j, (x, y)) in moved.iter().zip(&base).enumerate() {
            if j == i {
                let expect = c / (h[i] * (1.0 - h[i]) * 0.01).sqrt();
                prop_assert!((x - y - expect).abs() < 1e-9);
            } else {
                prop_assert_eq!(x, y);
            }
        }
    }
}
