mod common;

use std::collections::HashSet;

use common::*;
use svp_core::harness::{
    random_select, run_active_learning, run_classical_active_learning, run_coreset, speedup, AlConfig, AlMethod,
    CoresetConfig, CoresetMethod, FixedTimer, Schedule,
};
use svp_core::learner::{make_synthetic, LearnerSpec, SyntheticDataset, SyntheticParams};

fn small(seed: u64) -> SyntheticDataset {
    make_synthetic(&SyntheticParams {
        classes: 3,
        dim: 4,
        separation: 4.0,
        noise: 1.0,
        train_size: 300,
        test_size: 200,
        seed,
    })
    .unwrap()
}

fn al(method: AlMethod, budget: f64, seed: u64) -> AlConfig {
    AlConfig {
        proxy: LearnerSpec::logistic(5, 0.1, 16, seed),
        target: LearnerSpec::mlp(8, 5, 0.05, 16, seed),
        method,
        budget_fraction: budget,
        schedule: Schedule::default(),
        seed,
    }
}

fn coreset(method: CoresetMethod, fraction: f64, seed: u64) -> CoresetConfig {
    CoresetConfig {
        proxy: LearnerSpec::logistic(5, 0.1, 16, seed),
        target: LearnerSpec::logistic(5, 0.1, 16, seed),
        method,
        subset_fraction: fraction,
        seed,
        compare_full: false,
    }
}

#[test]
fn schedule_sizes_follow_the_rounds() {
    let d = small(1);
    let report =
        run_active_learning(&al(AlMethod::LeastConfidence, 0.3, 1), &d.train, &d.test, &mut FixedTimer::default())
            .unwrap();
    let sizes: Vec<usize> = report.outcome.rounds.iter().map(|r| r.labeled).collect();
    assert_eq!(sizes, [6, 30, 60, 90]);
    assert_eq!(report.timing.rounds.len(), 3);
    assert!(report.outcome.rounds[1..].iter().all(|r| r.proxy_error.is_some()));
}

#[test]
fn budget_equal_to_initial_runs_no_rounds() {
    let d = small(2);
    let report =
        run_active_learning(&al(AlMethod::Kcenters, 0.02, 2), &d.train, &d.test, &mut FixedTimer::default()).unwrap();
    assert_eq!(report.outcome.rounds.len(), 1);
    assert_eq!(report.outcome.selected.len(), 6);
    assert_eq!(report.timing.selection_seconds, 0.0);
}

#[test]
fn labeled_sets_never_repeat_or_escape_the_pool() {
    let d = small(3);
    for method in [AlMethod::LeastConfidence, AlMethod::Kcenters, AlMethod::Random] {
        let report = run_active_learning(&al(method, 0.5, 3), &d.train, &d.test, &mut FixedTimer::default()).unwrap();
        let sel = &report.outcome.selected;
        assert_eq!(sel.len(), 150);
        assert_eq!(sel.iter().collect::<HashSet<_>>().len(), sel.len(), "{method:?}");
        assert!(sel.iter().all(|&i| i < d.train.len()));
        let added: usize = report.outcome.rounds.iter().map(|r| r.added).sum();
        assert_eq!(added, sel.len());
    }
}

#[test]
fn runs_are_deterministic() {
    let d = small(4);
    for method in [AlMethod::LeastConfidence, AlMethod::Kcenters, AlMethod::Random] {
        let cfg = al(method, 0.3, 4);
        let a = run_active_learning(&cfg, &d.train, &d.test, &mut FixedTimer::default()).unwrap();
        let b = run_active_learning(&cfg, &d.train, &d.test, &mut FixedTimer::default()).unwrap();
        assert_eq!(a.outcome_json().unwrap(), b.outcome_json().unwrap());
    }
    for method in [CoresetMethod::Entropy, CoresetMethod::Kcenters, CoresetMethod::Forgetting, CoresetMethod::Random] {
        let cfg = coreset(method, 0.4, 4);
        let a = run_coreset(&cfg, &d.train, &d.test, &mut FixedTimer::default()).unwrap();
        let b = run_coreset(&cfg, &d.train, &d.test, &mut FixedTimer::default()).unwrap();
        assert_eq!(a.outcome, b.outcome);
    }
}

#[test]
fn proxy_equal_to_target_is_the_classical_baseline() {
    let d = small(5);
    let mut cfg = al(AlMethod::LeastConfidence, 0.3, 5);
    cfg.proxy = cfg.target.clone();
    let svp = run_active_learning(&cfg, &d.train, &d.test, &mut FixedTimer::default()).unwrap();
    let base = run_classical_active_learning(
        &al(AlMethod::LeastConfidence, 0.3, 5),
        &d.train,
        &d.test,
        &mut FixedTimer::default(),
    )
    .unwrap();
    assert_eq!(svp.outcome_json().unwrap(), base.outcome_json().unwrap());
}

#[test]
fn different_seeds_pick_different_sets() {
    let d = small(6);
    let a = run_active_learning(&al(AlMethod::Random, 0.3, 1), &d.train, &d.test, &mut FixedTimer::default()).unwrap();
    let b = run_active_learning(&al(AlMethod::Random, 0.3, 2), &d.train, &d.test, &mut FixedTimer::default()).unwrap();
    assert_ne!(a.outcome.selected, b.outcome.selected);
}

#[test]
fn full_fraction_coreset_matches_full_training() {
    let d = small(7);
    for method in [CoresetMethod::Entropy, CoresetMethod::Kcenters, CoresetMethod::Forgetting, CoresetMethod::Random] {
        let mut cfg = coreset(method, 1.0, 7);
        cfg.compare_full = true;
        let r = run_coreset(&cfg, &d.train, &d.test, &mut FixedTimer::default()).unwrap();
        assert_eq!(r.outcome.selected.len(), d.train.len());
        assert_eq!(Some(r.outcome.target_error), r.outcome.full_data_error, "{method:?}");
    }
}

#[test]
fn coreset_sizes_and_membership() {
    let d = small(8);
    for method in [CoresetMethod::Entropy, CoresetMethod::Kcenters, CoresetMethod::Forgetting, CoresetMethod::Random] {
        let r = run_coreset(&coreset(method, 0.25, 8), &d.train, &d.test, &mut FixedTimer::default()).unwrap();
        let sel = &r.outcome.selected;
        assert_eq!(sel.len(), 75);
        assert_eq!(sel.iter().collect::<HashSet<_>>().len(), 75);
        assert!(sel.iter().all(|&i| i < d.train.len()));
    }
}

#[test]
fn forgetting_drops_mostly_easy_examples() {
    let d = three_blob(11, 1000);
    let cfg = CoresetConfig {
        proxy: forgetting_proxy(11),
        target: LearnerSpec::mlp(16, 20, 0.05, 32, 11),
        method: CoresetMethod::Forgetting,
        subset_fraction: 0.5,
        seed: 11,
        compare_full: false,
    };
    let r = run_coreset(&cfg, &d.train, &d.test, &mut FixedTimer::default()).unwrap();
    let kept: HashSet<usize> = r.outcome.selected.iter().copied().collect();
    let removed: Vec<usize> = (0..d.train.len()).filter(|i| !kept.contains(i)).collect();
    let easy = removed.iter().filter(|&&i| d.train.labels[i] == 2).count();
    let share = easy as f64 / removed.len() as f64;
    assert!(share >= 0.7, "easy share of removed points {share}");
}

#[test]
fn fixed_timer_speedup() {
    let d = small(9);
    let cfg = al(AlMethod::LeastConfidence, 0.5, 9);
    let mut slow = FixedTimer { proxy_fit: 15.0, selection: 5.0, target_fit: 1.0 };
    let mut fast = FixedTimer { proxy_fit: 3.0, selection: 2.0, target_fit: 1.0 };
    let base = run_classical_active_learning(&cfg, &d.train, &d.test, &mut slow).unwrap();
    let svp = run_active_learning(&cfg, &d.train, &d.test, &mut fast).unwrap();
    assert_eq!(base.timing.selection_seconds, 100.0);
    assert_eq!(svp.timing.selection_seconds, 25.0);
    assert_eq!(svp.speedup_over(&base).unwrap(), 4.0);
    assert!((speedup(240.0, 34.3).unwrap() - 7.0).abs() < 0.01);
}

#[test]
fn random_select_rejects_oversized_requests() {
    assert!(random_select(&[1, 2, 3], 4, 0).is_err());
    assert_eq!(random_select(&[1, 2, 3], 0, 0).unwrap(), Vec::<usize>::new());
}
