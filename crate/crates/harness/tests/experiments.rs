use mcfli_core::Grid;
use mcfli_harness::{
    estimate_rip_constants, run_sweep, run_trial, select_cores, SweepSpec, TrialSetup,
};

fn high_visibility_q() -> usize {
    let g = Grid::unit(1, 256).unwrap();
    select_cores(&g, 240.0, 100, 1).unwrap().0
}

#[test]
fn trial_regimes() {
    let setup = TrialSetup::default();
    let q = high_visibility_q();
    let good = (0..10).filter(|&s| run_trial(&setup, 4, q, 122, s).unwrap().success).count();
    assert!(good >= 9, "{good}/10 at K=4, M=122");
    let bad = (0..10).filter(|&s| run_trial(&setup, 10, q, 20, s).unwrap().success).count();
    assert!(bad <= 1, "{bad}/10 at K=10, M=20");
}

#[test]
fn sweep_is_thread_count_independent() {
    let spec = SweepSpec {
        k: vec![2, 3],
        q: vec![8],
        visibility_targets: vec![],
        m: vec![10, 25],
        trials: 6,
        master_seed: 42,
        ..SweepSpec::default()
    };
    let csv = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let mut out = Vec::new();
        pool.install(|| run_sweep(&spec).unwrap()).write_csv(&mut out).unwrap();
        out
    };
    assert_eq!(csv(1), csv(3));
}

#[test]
fn success_rate_is_monotone_in_m() {
    let spec = SweepSpec {
        k: vec![4],
        m: vec![16, 24, 32, 40, 48],
        trials: 40,
        master_seed: 3,
        ..SweepSpec::default()
    };
    let r = run_sweep(&spec).unwrap();
    let n = spec.trials as f64;
    for w in r.cells.windows(2) {
        let (a, b) = (w[0].success_rate, w[1].success_rate);
        // Two binomial standard deviations of the difference.
        let sd = ((a * (1.0 - a) + b * (1.0 - b)) / n).sqrt();
        assert!(b >= a - 2.0 * sd.max(1.0 / n), "{a} -> {b}");
    }
    for c in &r.cells {
        assert!(c.mean_visibilities <= (c.q * (c.q - 1)) as f64);
        assert!(c.std_visibilities <= 0.08 * 256.0);
        assert!((c.mean_visibilities - 240.0).abs() <= 0.1 * 240.0);
    }
}

#[test]
fn rip_constants_bracket() {
    let g = Grid::unit(1, 256).unwrap();
    let q = high_visibility_q();
    for k0 in [2usize, 4] {
        let r = estimate_rip_constants(&g, k0, q, 11 * k0 + 10, 200, 7 + k0 as u64).unwrap();
        assert!(r.lower > 0.0, "{r:?}");
        assert!(r.upper_ratio <= 8.0 / 3.0 * 1.2, "{r:?}");
    }
}
