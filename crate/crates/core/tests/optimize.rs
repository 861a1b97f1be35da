mod common;

use cabello::npa::NpaLevel;
use cabello::optimize::{
    optimize_hardy, optimize_ideal, optimize_nonideal, sweep_epsilon, uniform_grid, OptOptions, OptimizeError,
    SweepOptions, SweepStatus,
};
use cabello::qubit::projectors;
use cabello::scenario::{behavior_from_quantum, cabello_stats, local_max_score};
use common::seeded;
use proptest::prelude::*;

fn quick(seed: u64) -> OptOptions {
    OptOptions { starts: 16, seed, ..Default::default() }
}

proptest! {
    #![proptest_config(seeded(12))]

    #[test]
    fn identical_inputs_give_identical_results(eps in 0.0..0.5f64, seed in any::<u64>()) {
        let a = serde_json::to_string(&optimize_nonideal(eps, &quick(seed)).unwrap()).unwrap();
        let b = serde_json::to_string(&optimize_nonideal(eps, &quick(seed)).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn scores_reevaluate_through_the_general_pipeline(eps in 0.0..0.5f64) {
        let r = optimize_nonideal(eps, &quick(42)).unwrap();
        let proj = projectors(&r.params.measurements()).unwrap();
        let s = cabello_stats(&behavior_from_quantum(&r.params.state().unwrap(), &proj.alice(), &proj.bob()).unwrap());
        prop_assert!((s.score - r.score).abs() < 1e-9);
        prop_assert!(s.e10 <= eps + 1e-9 && s.e01 <= eps + 1e-9);
    }
}

#[test]
fn ideal_and_hardy_are_deterministic() {
    let opts = OptOptions::default();
    assert_eq!(optimize_ideal(&opts).unwrap(), optimize_ideal(&opts).unwrap());
    assert_eq!(optimize_hardy(&opts).unwrap(), optimize_hardy(&opts).unwrap());
}

#[test]
fn lower_bound_grows_with_eps() {
    let grid = uniform_grid(0.0, 0.5, 21);
    let scores: Vec<f64> = grid.iter().map(|&e| optimize_nonideal(e, &quick(42)).unwrap().score).collect();
    for w in scores.windows(2) {
        assert!(w[1] >= w[0] - 1e-9, "{scores:?}");
    }
    assert!((scores[0] - cabello::qubit::analytic_optimum().score).abs() < 1e-9);
}

#[test]
fn sweep_sandwich_and_thread_independence() {
    let grid = uniform_grid(0.0, 0.2, 5);
    let serial = SweepOptions { opt: quick(42), threads: 0, ..Default::default() };
    let records = sweep_epsilon(&grid, &serial).unwrap();
    let threaded = sweep_epsilon(&grid, &SweepOptions { threads: 3, ..serial }).unwrap();
    assert_eq!(records, threaded);
    for (r, &eps) in records.iter().zip(&grid) {
        assert_eq!(r.eps, eps);
        assert_eq!(r.level, NpaLevel::Two);
        assert_eq!(r.status, SweepStatus::Ok);
        assert_eq!(r.local_bound, local_max_score(eps).unwrap());
        assert!(r.quantum_lower <= r.quantum_upper + 1e-6, "{r:?}");
        assert!(r.local_bound <= r.quantum_lower, "{r:?}");
    }
}

#[test]
fn invalid_sweep_grids() {
    let opts = SweepOptions::default();
    assert!(matches!(sweep_epsilon(&[0.1, 0.0], &opts), Err(OptimizeError::InvalidGrid(_))));
    assert!(matches!(sweep_epsilon(&[0.1, 0.1], &opts), Err(OptimizeError::InvalidGrid(_))));
    assert!(matches!(sweep_epsilon(&[0.6], &opts), Err(OptimizeError::InvalidGrid(_))));
    assert!(sweep_epsilon(&[], &opts).unwrap().is_empty());
}

#[test]
fn nonideal_rejects_out_of_range_eps() {
    for eps in [-0.1, 0.51, f64::NAN] {
        assert!(matches!(optimize_nonideal(eps, &OptOptions::default()), Err(OptimizeError::InvalidEpsilon(_))));
    }
}
