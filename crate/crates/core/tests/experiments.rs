use shuffled_core::experiments::*;
use shuffled_core::*;

fn small_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(60, 4, 4, 20, vec![Snr::Finite(0.5), Snr::Finite(50.0), Snr::Noiseless]);
    cfg.trials = 6;
    cfg.master_seed = 17;
    cfg
}

#[test]
fn sigma_round_trips_through_snr() {
    let b = sample_design_matrix::<f64>(5, 3, DistributionKind::Gaussian, 4).unwrap();
    for target in [1e-3, 0.37, 1.0, 42.0, 1e6] {
        let sigma = sigma_for_snr(&b, 3, target).unwrap();
        let back = snr(&b, 3, sigma).unwrap().as_f64();
        assert!((back - target).abs() <= 1e-12 * target);
    }
}

#[test]
fn trials_are_reproducible() {
    let cfg = small_config();
    for (g, t) in [(0, 0), (1, 3), (2, 5)] {
        let a = run_trial(&cfg, g, t).unwrap();
        let b = run_trial(&cfg, g, t).unwrap();
        let (a, b) = (a.completed().unwrap(), b.completed().unwrap());
        assert_eq!((a.exact, a.hamming, a.rel_b_error), (b.exact, b.hamming, b.rel_b_error));
        assert_eq!(a.exact, a.hamming == 0);
    }
    assert!(run_trial(&cfg, 3, 0).is_err());
}

#[test]
fn scalar_noiseless_trials_recover() {
    let mut cfg = ExperimentConfig::new(200, 1, 1, 50, vec![Snr::Noiseless]);
    cfg.trials = 100;
    let exact = (0..100).filter(|&t| run_trial(&cfg, 0, t).unwrap().completed().unwrap().exact).count();
    assert!(exact >= 99);
}

#[test]
fn fully_shuffled_two_column_trial_fails() {
    let mut cfg = ExperimentConfig::new(1000, 2, 1, 1000, vec![Snr::Noiseless]);
    cfg.signal = SignalSpec::Canonical { scale: 1000.0 };
    let r = run_trial(&cfg, 0, 0).unwrap();
    let r = r.completed().unwrap();
    assert!(!r.exact);
    assert!(r.hamming >= 700, "{}", r.hamming);
}

#[test]
fn sweep_aggregates_its_trials() {
    let cfg = small_config();
    let res = run_sweep(&cfg).unwrap();
    assert_eq!(res.rows.len(), 3);
    for (g, row) in res.rows.iter().enumerate() {
        assert_eq!(row.trials, 6);
        assert_eq!(row.failed, 0);
        assert_eq!(row.snr, cfg.snr_grid[g]);
        let trials: Vec<TrialResult> =
            (0..6).map(|t| run_trial(&cfg, g, t).unwrap().completed().unwrap().clone()).collect();
        let rate = trials.iter().filter(|r| r.exact).count() as f64 / 6.0;
        let hamming = trials.iter().map(|r| r.hamming as f64).sum::<f64>() / 6.0;
        assert_eq!(row.recovery_rate, rate);
        assert!((row.mean_hamming - hamming).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&row.recovery_rate));
    }
    assert!(res.rows[2].logdet_ratio.is_none());
    assert_eq!(res.rows[2].sigma, 0.0);
    assert_eq!(res.rows[2].recovery_rate, 1.0);
    assert!(res.rows[2].mean_rel_b_error <= 1e-8);
}

#[test]
fn noiseless_point_recovers_in_easy_regime() {
    let mut cfg = ExperimentConfig::new(150, 30, 30, 30, vec![Snr::Finite(0.1), Snr::Finite(1.0), Snr::Noiseless]);
    cfg.trials = 10;
    let res = run_sweep(&cfg).unwrap();
    assert_eq!(res.rows.last().unwrap().recovery_rate, 1.0);
}

#[test]
fn thread_count_does_not_change_output() {
    let cfg = small_config();
    let one = to_csv_string(&run_sweep_with_threads(&cfg, 1).unwrap());
    let four = to_csv_string(&run_sweep_with_threads(&cfg, 4).unwrap());
    assert_eq!(one, four);
}

#[test]
fn csv_round_trip() {
    let res = run_sweep(&small_config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    write_csv(&res, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    assert!(text.lines().nth(3).unwrap().contains(",inf,"));
    let back = read_csv(&path).unwrap();
    assert_eq!(back.rows.len(), res.rows.len());
    for (a, b) in back.rows.iter().zip(&res.rows) {
        assert_eq!((a.n, a.p, a.m, a.h, a.trials, a.seed), (b.n, b.p, b.m, b.h, b.trials, b.seed));
        // fields are written to 12 significant digits
        let close = |x: f64, y: f64| x == y || (x - y).abs() <= 5e-12 * y.abs();
        assert!(close(a.snr.as_f64(), b.snr.as_f64()));
        assert!(close(a.sigma, b.sigma));
        assert!(close(a.recovery_rate, b.recovery_rate));
        assert!(close(a.mean_hamming, b.mean_hamming));
        assert!(close(a.mean_rel_b_error, b.mean_rel_b_error));
        assert_eq!(a.logdet_ratio.is_some(), b.logdet_ratio.is_some());
        assert!(close(a.logdet_ratio.unwrap_or(0.0), b.logdet_ratio.unwrap_or(0.0)));
    }
    assert_eq!(to_csv_string(&back), text);

    let empty = dir.path().join("empty.csv");
    write_csv(&SweepResult::default(), &empty).unwrap();
    assert_eq!(std::fs::read_to_string(&empty).unwrap().trim_end(), CSV_HEADER);
    assert!(write_csv(&res, dir.path().join("missing/dir/x.csv")).is_err());
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.cfg");
    std::fs::write(
        &path,
        "# desk run\nn = 500\np = 50\nm = 50\nh = 50\ndist = gaussian\nsnr_grid = logspace(-2, 1, 4), inf\ntrials = 50\nmaster_seed = 3\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::read_from(&path).unwrap();
    assert_eq!(cfg.snr_grid.len(), 5);
    assert!(cfg.snr_grid[4].is_noiseless());
    assert!((cfg.snr_grid[0].as_f64() - 0.01).abs() < 1e-15);
    assert_eq!(cfg.master_seed, 3);

    assert!(ExperimentConfig::parse("n = 5\np = 1\nm = 1\nh = 0\nsnr_grid = 1\ntrials = 0").is_err());
    let err = ExperimentConfig::parse("n = 5\nbogus = 1").unwrap_err().to_string();
    assert!(err.contains("bogus"));
    assert!(ExperimentConfig::read_from(dir.path().join("absent.cfg")).is_err());
}

#[test]
fn failure_demo_trace() {
    let a = reproduce_failure_demo(200, 20, 5).unwrap();
    let b = reproduce_failure_demo(200, 20, 5).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 21);
    assert!(a.iter().enumerate().all(|(i, s)| s.iteration == i));
    assert!(a.windows(2).all(|w| w[1].residual <= w[0].residual));
    assert!(reproduce_failure_demo(99, 10, 0).is_err());
    let csv = trace_to_csv(&a);
    assert_eq!(csv.lines().next(), Some("iteration,hamming,residual"));
    assert_eq!(csv.lines().count(), 22);
}
