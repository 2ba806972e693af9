use stickbreak::limits::{run_clt_experiment, run_fclt_experiment, run_lln_gc_experiment, run_quantile_experiment, ExperimentConfig, PartitionSampler};
use stickbreak::weights::{Truncation, WeightModel};

fn config(model: WeightModel, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(model);
    cfg.a_grid = vec![50.0, 200.0];
    cfg.reps = 400;
    cfg.seed = seed;
    cfg.n_grid = vec![10, 100];
    cfg.grid_levels = vec![0.1, 0.3, 0.5, 0.7, 0.9];
    cfg.truncation = Truncation::Capped { eps_tail: 1e-2, max_sticks: 100_000 };
    cfg
}

fn fingerprint(cfg: &ExperimentConfig) -> Vec<String> {
    let mut out = vec![
        format!("{:?}", run_clt_experiment(cfg).unwrap()),
        format!("{:?}", run_fclt_experiment(cfg).unwrap()),
        format!("{:?}", run_lln_gc_experiment(cfg).unwrap()),
    ];
    if cfg.sampler == PartitionSampler::StickBreaking {
        out.push(format!("{:?}", run_quantile_experiment(cfg).unwrap()));
    }
    out
}

#[test]
fn same_seed_same_numbers() {
    for model in [WeightModel::pdp(1.0, 0.3).unwrap(), WeightModel::nggp(0.4, 1.0).unwrap()] {
        let cfg = config(model, 17);
        assert_eq!(fingerprint(&cfg), fingerprint(&cfg));
    }
    let mut direct = config(WeightModel::gdp(1.0, 3).unwrap(), 17);
    direct.sampler = PartitionSampler::DirectFiniteDim;
    assert_eq!(fingerprint(&direct), fingerprint(&direct));
}

#[test]
fn results_do_not_depend_on_the_thread_count() {
    let cfg = config(WeightModel::dp(1.0).unwrap(), 3);
    let wide = fingerprint(&cfg);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let narrow = pool.install(|| fingerprint(&cfg));
    assert_eq!(wide, narrow);
    let other = fingerprint(&config(WeightModel::dp(1.0).unwrap(), 4));
    assert_ne!(wide, other);
}
