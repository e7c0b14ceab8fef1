use spikelab::limit_laws::LimitLawSpec;
use spikelab::matrix_lab::{build_wigner, spiked_extremes, Scaling, SpikeVectorSpec};
use spikelab::monte_carlo::{
    convergence_sweep, derive_seed, run_experiment, run_id, summarize, write_csv, ExperimentConfig, Statistic,
};
use spikelab::tail_sampler::{LawConfig, TailLaw};

fn base() -> ExperimentConfig {
    serde_json::from_value(serde_json::json!({
        "law": {"family": "pareto", "alpha": 2.0},
        "scaling": "inv_bn",
        "theta": 1.5,
        "spike": {"kind": "uniform_delocalized"},
        "n_list": [20, 40],
        "trials": 6,
        "master_seed": 77
    }))
    .unwrap()
}

fn csv_bytes(config: &ExperimentConfig, threads: usize) -> Vec<u8> {
    let recs = run_experiment(config, Some(threads)).unwrap();
    let mut out = Vec::new();
    write_csv(&mut out, &run_id(config).unwrap(), &recs).unwrap();
    out
}

#[test]
fn output_ignores_thread_count() {
    let c = base();
    let one = csv_bytes(&c, 1);
    assert_eq!(one, csv_bytes(&c, 3));
    assert_eq!(one, csv_bytes(&c, 1));
    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().count(), 1 + 12);
    assert!(text.starts_with("run_id,n,trial_index,seed,lambda1,maxA,wall_time_ms\n"));
}

#[test]
fn different_master_seeds_differ() {
    let mut c = base();
    let a = csv_bytes(&c, 1);
    c.master_seed += 1;
    assert_ne!(a, csv_bytes(&c, 1));
}

#[test]
fn large_n_goes_through_lanczos() {
    let mut c = base();
    c.n_list = vec![450];
    c.trials = 2;
    c.statistics = vec![Statistic::Lambda1, Statistic::MaxA, Statistic::Opnorm];
    let recs = run_experiment(&c, Some(1)).unwrap();
    let law = TailLaw::pareto(2.0, 1.0).unwrap();
    let scale = 1.0 / law.b_of(450.0).unwrap();
    let v = vec![1.0 / 450f64.sqrt(); 450];
    for r in &recs {
        let a = build_wigner(450, &law, r.seed).unwrap();
        let mut p = a.scaled(scale);
        p.add_rank_one(1.5, &v);
        let dense = spikelab::matrix_lab::sym_eigenvalues(&p).unwrap();
        assert!((r.lambda1 - dense[449]).abs() < 1e-8 * dense[449].abs());
        let opnorm = dense[449].max(-dense[0]);
        assert!((r.opnorm.unwrap() - opnorm).abs() < 1e-8 * opnorm);
    }
}

#[test]
fn spike_dominates_tiny_matrix() {
    // With 1/b_n scaling the entry scale cancels, so the spike is compared with
    // the operator norm of the scaled noise instead (Weyl).
    let mut c = base();
    c.n_list = vec![2];
    c.trials = 1;
    c.theta = 5.0;
    c.spike = SpikeVectorSpec::Basis { index: 1 };
    c.law = LawConfig::Pareto { alpha: 3.5, scale: 1e-6 };
    let r = &run_experiment(&c, Some(1)).unwrap()[0];
    let law = TailLaw::pareto(3.5, 1e-6).unwrap();
    let a = build_wigner(2, &law, derive_seed(77, 2, 0)).unwrap();
    let noise = a.scaled(1.0 / law.b_of(2.0).unwrap()).spectral_norm().unwrap();
    assert!((r.lambda1 - 5.0).abs() <= noise + 1e-12);
}

#[test]
fn spike_never_lowers_top_eigenvalue() {
    let a = build_wigner(60, &TailLaw::pareto(1.2, 1.0).unwrap(), 9).unwrap();
    let v: Vec<f64> = (0..60).map(|i| if i < 3 { 1.0 / 3f64.sqrt() } else { 0.0 }).collect();
    for theta in [0.0, 0.1, 1.0, 10.0] {
        let e = spiked_extremes(&a, 0.01, theta, &v, true, true).unwrap();
        assert!(e.lambda1 >= e.lambda1_unperturbed.unwrap() - 1e-12);
        assert!(e.lambda_min.unwrap() <= e.lambda1);
    }
}

#[test]
fn summaries_and_sweeps() {
    let c = base();
    let sweep = convergence_sweep(&c, Some(1)).unwrap();
    assert_eq!(sweep.summaries.len(), 2);
    for s in &sweep.summaries {
        assert_eq!(s.trials, 6);
        assert!((0.0..=1.0).contains(&s.ks));
        assert_eq!(s.target_law, LimitLawSpec::Thm1 { theta: 1.5, alpha: 2.0 });
        assert_eq!(s.run_id, run_id(&c).unwrap());
    }
    let mut single = c.clone();
    single.n_list = vec![20];
    assert!(convergence_sweep(&single, Some(1)).is_err());
    assert_eq!(summarize(&c, &sweep.records).unwrap(), sweep.summaries);
}

#[test]
fn target_law_inference() {
    let mut c = base();
    c.law = LawConfig::Pareto4UnitVar;
    c.scaling = Scaling::InvSqrtN;
    c.spike = SpikeVectorSpec::Basis { index: 1 };
    assert_eq!(c.target_law().unwrap(), LimitLawSpec::Thm3 { theta: 1.5, c: 0.25 });
    c.spike = SpikeVectorSpec::UniformDelocalized;
    assert!(matches!(c.target_law().unwrap(), LimitLawSpec::Thm2 { c, .. } if c == 0.25));
}

#[test]
fn invalid_configs_are_rejected() {
    let mut c = base();
    c.trials = 0;
    assert!(run_experiment(&c, None).is_err());
    let mut c = base();
    c.n_list = vec![40, 20];
    assert!(c.validate().is_err());
    let mut c = base();
    c.scaling = Scaling::InvSqrtN;
    assert!(c.validate().is_err());
    let mut c = base();
    c.spike = SpikeVectorSpec::Basis { index: 21 };
    assert!(c.validate().is_err());
}

#[test]
fn timing_column_only_on_request() {
    let mut c = base();
    c.record_timing = true;
    c.n_list = vec![10];
    let recs = run_experiment(&c, Some(1)).unwrap();
    assert!(recs.iter().all(|r| r.wall_time_ms.is_some()));
    let mut out = Vec::new();
    write_csv(&mut out, "x", &recs).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.lines().skip(1).all(|l| !l.ends_with(',')));
}
