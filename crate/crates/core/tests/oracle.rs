use dynclus_core::gen::{generate, GenParams, Layout};
use dynclus_core::oracle::{
    brute_force_dks, brute_force_dks_outlier, brute_force_dokm, brute_force_tm_mfl, search_space, OracleError, DEFAULT_CAP,
};
use dynclus_core::{evaluate_schedule, Instance, Metric, ProblemKind, TimeStep};
use proptest::prelude::*;

fn gen(kind: ProblemKind, seed: u64) -> Instance {
    let f = 1 + (seed % 4) as usize;
    let mut p = GenParams::new(kind, 2, 1 + (seed / 4 % 5) as usize, f, 1 + (seed / 20) as usize % f.min(3), seed);
    p.layout = if seed.is_multiple_of(2) { Layout::Line } else { Layout::Square };
    generate(&p).unwrap()
}

fn objective_matches_evaluation(inst: &Instance, obj: f64, open: &[Vec<usize>], moves: &[Vec<(usize, usize)>]) {
    let s = evaluate_schedule(inst, open, moves).unwrap();
    assert!((s.costs.total - obj).abs() <= 1e-9 * (1.0 + obj), "{} vs {obj}", s.costs.total);
}

#[test]
fn full_facility_sets_are_optimal_when_k_equals_their_size() {
    let m = Metric::line(&[0.0, 4.0, 1.0, 5.0]).unwrap();
    let steps = vec![
        TimeStep::new(vec![0, 1], vec![0, 1]).with_weights(vec![1.0, 1.0]),
        TimeStep::new(vec![2, 3], vec![2, 3]).with_weights(vec![1.0, 1.0]),
    ];
    let inst = Instance::new(m, steps, 2, 1.0, None, ProblemKind::Dokm).unwrap();
    let r = brute_force_dokm(&inst, DEFAULT_CAP).unwrap();
    // open sets are multisets: C(3, 2) per step times 2! matchings
    assert_eq!(r.search_space, 18);
    assert!((r.objective - 2.0).abs() < 1e-12);
    let mut a = r.schedule.open_sets.clone();
    a.iter_mut().for_each(|s| s.sort());
    assert_eq!(a, vec![vec![0, 1], vec![2, 3]]);
}

#[test]
fn oracle_schedules_evaluate_to_their_objective() {
    for seed in 0..40 {
        for kind in [ProblemKind::Dokm, ProblemKind::Dks, ProblemKind::DksOutlier] {
            let inst = gen(kind, seed);
            let r = match kind {
                ProblemKind::Dokm => brute_force_dokm(&inst, DEFAULT_CAP),
                ProblemKind::Dks => brute_force_dks(&inst, DEFAULT_CAP),
                _ => brute_force_dks_outlier(&inst, DEFAULT_CAP),
            }
            .unwrap();
            objective_matches_evaluation(&inst, r.objective, &r.schedule.open_sets, &r.schedule.transitions);
            assert_eq!(r.search_space, search_space(&inst));
        }
        let inst = gen(ProblemKind::TmMfl, seed);
        let r = brute_force_tm_mfl(&inst, DEFAULT_CAP).unwrap();
        objective_matches_evaluation(&inst, r.objective, &r.schedule.open_sets, &r.schedule.transitions);
    }
}

#[test]
fn supplier_transitions_respect_the_bound() {
    for seed in 0..40 {
        let inst = gen(ProblemKind::Dks, seed);
        let r = brute_force_dks(&inst, DEFAULT_CAP).unwrap();
        let b = inst.movement_bound.unwrap();
        assert!(r.schedule.transitions.iter().flatten().all(|&(a, c)| inst.dist(a, c) <= b + 1e-12));
    }
}

#[test]
fn single_pair_radius_is_its_distance() {
    let m = Metric::line(&[0.0, 2.5]).unwrap();
    let steps = vec![TimeStep::new(vec![1], vec![0])];
    let inst = Instance::new(m, steps, 1, 1.0, Some(0.0), ProblemKind::Dks).unwrap();
    assert_eq!(brute_force_dks(&inst, DEFAULT_CAP).unwrap().objective, 2.5);
}

#[test]
fn cap_exceeded_is_an_error() {
    let inst = gen(ProblemKind::Dokm, 7);
    if search_space(&inst) > 1 {
        assert!(matches!(brute_force_dokm(&inst, 1), Err(OracleError::CapExceeded { .. })));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn larger_bound_never_increases_the_radius(seed in 0u64..100_000, factor in 1.0f64..3.0) {
        for kind in [ProblemKind::Dks, ProblemKind::DksOutlier] {
            let inst = gen(kind, seed);
            let base = brute_force_dks_outlier_or_plain(&inst);
            let mut relaxed = inst.clone();
            relaxed.movement_bound = relaxed.movement_bound.map(|b| b * factor + 1.0);
            prop_assert!(brute_force_dks_outlier_or_plain(&relaxed) <= base + 1e-12);
        }
    }

    #[test]
    fn smaller_outlier_target_never_increases_the_radius(seed in 0u64..100_000) {
        let inst = gen(ProblemKind::DksOutlier, seed);
        let base = brute_force_dks_outlier(&inst, DEFAULT_CAP).unwrap().objective;
        let mut relaxed = inst.clone();
        for s in relaxed.steps.iter_mut() {
            s.outlier_target = s.outlier_target.saturating_sub(1);
        }
        prop_assert!(brute_force_dks_outlier(&relaxed, DEFAULT_CAP).unwrap().objective <= base + 1e-12);
    }

    #[test]
    fn cheaper_movement_never_increases_dokm_cost(seed in 0u64..100_000) {
        let inst = gen(ProblemKind::Dokm, seed);
        let base = brute_force_dokm(&inst, DEFAULT_CAP).unwrap().objective;
        let mut relaxed = inst.clone();
        relaxed.gamma *= 0.5;
        prop_assert!(brute_force_dokm(&relaxed, DEFAULT_CAP).unwrap().objective <= base + 1e-9);
    }
}

fn brute_force_dks_outlier_or_plain(inst: &Instance) -> f64 {
    match inst.kind {
        ProblemKind::Dks => brute_force_dks(inst, DEFAULT_CAP).unwrap().objective,
        _ => brute_force_dks_outlier(inst, DEFAULT_CAP).unwrap().objective,
    }
}
