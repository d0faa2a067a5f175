use dynclus_core::cost::service_distances;
use dynclus_core::gen::{generate, GenParams, Layout};
use dynclus_core::lp::LpError;
use dynclus_core::oracle::{brute_force_dks_outlier, DEFAULT_CAP};
use dynclus_core::outlier::matching::patch_matchings_exhaustive;
use dynclus_core::outlier::{
    build_outlier_lp, decompose_basic, enumerate_guesses, greedy_filter, guess_size, min_cardinality_lp, patch_matchings, reduce_instance,
    solve_dks_outlier, split, BudgetedMatchingProblem, GuessTuple, MatchEdge, MatchNode, OutlierError, OutlierLpSolution, OutlierParams,
    ReducedProblem, Route,
};
use dynclus_core::{Instance, Metric, ProblemKind, TimeStep};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn outlier_instance(xs: &[f64], steps: Vec<TimeStep>, k: usize, b: f64) -> Instance {
    Instance::new(Metric::line(xs).unwrap(), steps, k, 1.0, Some(b), ProblemKind::DksOutlier).unwrap()
}

fn empty_guess() -> GuessTuple {
    GuessTuple { t1: vec![], t2: vec![], g: vec![], h: vec![] }
}

// ---- guesses and reduction ----

#[test]
fn single_facility_per_step_gives_one_guess() {
    // facility 0 at step 1, facility 1 at step 2, one client each
    let steps = vec![TimeStep::new(vec![2], vec![0]).with_outlier_target(1), TimeStep::new(vec![3], vec![1]).with_outlier_target(1)];
    let inst = outlier_instance(&[0.0, 1.0, 0.5, 1.5], steps, 1, 1.0);
    let size = guess_size(1.0, 1.0);
    assert_eq!(size, 1);
    let list = enumerate_guesses(&inst, 0.5, size, 1000);
    assert_eq!(list.total, 1);
    assert_eq!(list.guesses, vec![GuessTuple { t1: vec![0], t2: vec![1], g: vec![1], h: vec![0] }]);
}

#[test]
fn two_facilities_per_step_count() {
    let steps = vec![TimeStep::new(vec![4], vec![0, 1]).with_outlier_target(1), TimeStep::new(vec![5], vec![2, 3]).with_outlier_target(1)];
    let inst = outlier_instance(&[0.0, 1.0, 2.0, 3.0, 0.0, 3.0], steps, 2, 100.0);
    // size 1: 2 sets times 2 targets per side, every pair has at most 2 moves
    assert_eq!(enumerate_guesses(&inst, 1.0, 1, 1000).total, 16);
    // size 2 adds 1 set times 4 maps per side: (4 + 4)^2, minus pairs with
    // more than k = 2 distinct moves
    let list = enumerate_guesses(&inst, 1.0, 2, 1000);
    let brute = {
        let mut n = 0;
        let sets = |own: [usize; 2], other: [usize; 2]| {
            let mut v: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
            for &a in &own {
                for &o in &other {
                    v.push((vec![a], vec![o]));
                }
            }
            for &o1 in &other {
                for &o2 in &other {
                    v.push((own.to_vec(), vec![o1, o2]));
                }
            }
            v
        };
        for (t1, g) in sets([0, 1], [2, 3]) {
            for (t2, h) in sets([2, 3], [0, 1]) {
                let mut e: Vec<(usize, usize)> = t1.iter().cloned().zip(g.iter().cloned()).collect();
                e.extend(h.iter().cloned().zip(t2.iter().cloned()));
                e.sort();
                e.dedup();
                if e.len() <= 2 {
                    n += 1;
                }
            }
        }
        n
    };
    assert_eq!(list.total, brute);
    assert!(list.guesses.len() == brute && !list.truncated);
    let small = enumerate_guesses(&inst, 1.0, 2, 5);
    assert_eq!(small.guesses.len(), 5);
    assert!(small.truncated);
}

#[test]
fn zero_bound_without_colocated_facilities_has_no_guess() {
    let steps = vec![TimeStep::new(vec![2], vec![0]).with_outlier_target(1), TimeStep::new(vec![3], vec![1]).with_outlier_target(1)];
    let inst = outlier_instance(&[0.0, 1.0, 0.5, 1.5], steps, 1, 0.0);
    assert!(enumerate_guesses(&inst, 1.0, 4, 1000).guesses.is_empty());
}

#[test]
fn guesses_are_ordered_by_coverage() {
    let inst = random_outlier(11);
    let list = enumerate_guesses(&inst, 10.0, 2, 10_000);
    let r3 = 30.0 + 1e-6;
    let score = |g: &GuessTuple| {
        let c = |t: usize, fs: Vec<usize>| inst.steps[t].clients.iter().filter(|&&j| fs.iter().any(|&i| inst.dist(i, j) <= r3)).count();
        c(0, g.t1.iter().chain(&g.h).cloned().collect()) + c(1, g.t2.iter().chain(&g.g).cloned().collect())
    };
    let s: Vec<usize> = list.guesses.iter().map(score).collect();
    assert!(s.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn guess_covering_the_target_leaves_nothing() {
    let steps = vec![TimeStep::new(vec![2, 3], vec![0]).with_outlier_target(2), TimeStep::new(vec![2, 3], vec![1]).with_outlier_target(2)];
    let inst = outlier_instance(&[0.0, 0.0, 1.0, 2.0], steps, 1, 1.0);
    let g = GuessTuple { t1: vec![0], t2: vec![1], g: vec![1], h: vec![0] };
    let red = reduce_instance(&inst, &g, 1.0);
    assert_eq!(red.targets, [0, 0]);
    assert!(red.clients.iter().all(|c| c.is_empty()));
    assert!(red.survives);
}

#[test]
fn partial_guess_leaves_the_difference() {
    // step 1: facility 0 at 0 covers clients at 1, 2, 3 within 3R = 3; the
    // clients at 50 and 60 stay
    let xs = [0.0, 100.0, 1.0, 2.0, 3.0, 50.0, 60.0];
    let steps = vec![
        TimeStep::new(vec![2, 3, 4, 5, 6], vec![0]).with_outlier_target(4),
        TimeStep::new(vec![2, 3, 4, 5, 6], vec![1]).with_outlier_target(0),
    ];
    let inst = outlier_instance(&xs, steps, 1, 1000.0);
    let g = GuessTuple { t1: vec![0], t2: vec![], g: vec![1], h: vec![] };
    let red = reduce_instance(&inst, &g, 1.0);
    assert_eq!(red.order[0], vec![(0, 3)]);
    assert_eq!(red.targets[0], 1);
    assert_eq!(red.clients[0], vec![5, 6]);
    assert_eq!(red.removed[0], 3);
    assert_eq!(red.u0, [0, 0]);
}

#[test]
fn pruning_drops_facilities_better_than_the_guess() {
    // guessed facility 0 covers one client; facility 1 covers two residual
    // clients and is pruned, facility 2 covers one and stays
    let xs = [0.0, 20.0, 40.0, 1.0, 19.0, 21.0, 41.0];
    let steps =
        vec![TimeStep::new(vec![3, 4, 5, 6], vec![0, 1, 2]).with_outlier_target(3), TimeStep::new(vec![3], vec![0]).with_outlier_target(0)];
    let inst = outlier_instance(&xs, steps, 2, 1000.0);
    let g = GuessTuple { t1: vec![0], t2: vec![], g: vec![0], h: vec![] };
    let red = reduce_instance(&inst, &g, 1.0);
    assert_eq!(red.order[0], vec![(0, 1)]);
    assert_eq!(red.facilities[0], vec![0, 2]);
    assert_eq!(red.min_u(0), 1);
    assert_eq!(red.targets[0], 2);
}

// ---- coverage LP ----

#[test]
fn unreachable_residual_target_is_infeasible() {
    // only one client is within R of any facility but l' = 2
    let xs = [0.0, 0.5, 50.0];
    let steps = vec![TimeStep::new(vec![1, 2], vec![0]).with_outlier_target(2), TimeStep::new(vec![1, 2], vec![0]).with_outlier_target(0)];
    let inst = outlier_instance(&xs, steps, 1, 0.0);
    let red = reduce_instance(&inst, &empty_guess(), 1.0);
    assert_eq!(red.targets, [2, 0]);
    let lp = build_outlier_lp(&inst, &red, &empty_guess(), 1.0);
    assert_eq!(lp.solve().unwrap_err(), LpError::Infeasible);
}

#[test]
fn reserved_moves_are_pinned() {
    let xs = [0.0, 1.0, 2.0, 0.2, 1.2];
    let steps =
        vec![TimeStep::new(vec![3, 4], vec![0, 1]).with_outlier_target(2), TimeStep::new(vec![3, 4], vec![1, 2]).with_outlier_target(2)];
    let inst = outlier_instance(&xs, steps, 2, 1.0);
    let g = GuessTuple { t1: vec![0], t2: vec![2], g: vec![1], h: vec![1] };
    let red = reduce_instance(&inst, &g, 0.5);
    let sol = build_outlier_lp(&inst, &red, &g, 0.5).solve().unwrap();
    for (a, b) in g.reserved_edges() {
        let u = red.facilities[0].iter().position(|&i| i == a).unwrap();
        let v = red.facilities[1].iter().position(|&i| i == b).unwrap();
        assert!(sol.z[u][v] >= 1.0 - 1e-9);
    }
    for t in 0..2 {
        assert!((sol.y[t].iter().sum::<f64>() - 2.0).abs() < 1e-9);
    }
}

#[test]
fn pin_beyond_the_bound_is_infeasible() {
    let xs = [0.0, 5.0, 0.1];
    let steps = vec![TimeStep::new(vec![2], vec![0]).with_outlier_target(0), TimeStep::new(vec![2], vec![0, 1]).with_outlier_target(0)];
    let inst = outlier_instance(&xs, steps, 1, 1.0);
    let g = GuessTuple { t1: vec![0], t2: vec![], g: vec![1], h: vec![] };
    let red = reduce_instance(&inst, &g, 1.0);
    assert_eq!(build_outlier_lp(&inst, &red, &g, 1.0).solve().unwrap_err(), LpError::Infeasible);
}

// ---- greedy filter ----

fn one_step(x: Vec<Vec<f64>>) -> OutlierLpSolution {
    let nf = x.first().map_or(0, |r| r.len());
    OutlierLpSolution { x: [x, vec![]], y: [vec![1.0; nf], vec![]], z: vec![] }
}

#[test]
fn single_client_is_its_own_count() {
    let f = greedy_filter(&one_step(vec![vec![0.5, 0.5]]));
    assert_eq!(f[0].kept, vec![0]);
    assert_eq!(f[0].counts, vec![1]);
    assert!((f[0].mass[0] - 1.0).abs() < 1e-12);
}

#[test]
fn shared_facility_keeps_the_heavier_cluster() {
    let f = greedy_filter(&one_step(vec![vec![0.3, 0.0, 0.0], vec![0.4, 0.5, 0.0]]));
    assert_eq!(f[0].kept, vec![1]);
    assert_eq!(f[0].counts, vec![2]);
    assert_eq!(f[0].marked_by, vec![Some(1), Some(1)]);
}

#[test]
fn disjoint_clusters_are_all_kept() {
    let f = greedy_filter(&one_step(vec![vec![0.2, 0.0, 0.0], vec![0.0, 0.9, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.5]]));
    assert_eq!(f[0].kept, vec![1, 3, 0]);
    assert_eq!(f[0].counts, vec![1, 1, 1]);
    assert_eq!(f[0].marked_by[2], None);
}

// ---- split ----

fn bare_reduced(f1: Vec<usize>, f2: Vec<usize>, c1: Vec<usize>, c2: Vec<usize>) -> ReducedProblem {
    ReducedProblem {
        clients: [c1, c2],
        facilities: [f1, f2],
        targets: [0, 0],
        u0: [0, 0],
        order: [vec![], vec![]],
        removed: [0, 0],
        survives: true,
    }
}

#[test]
fn split_makes_unit_and_fractional_copies() {
    let steps = vec![TimeStep::new(vec![], vec![0]), TimeStep::new(vec![], vec![1])];
    let inst = outlier_instance(&[0.0, 1.0], steps, 2, 5.0);
    let red = bare_reduced(vec![0], vec![1], vec![], vec![]);
    let sol = OutlierLpSolution { x: [vec![], vec![]], y: [vec![1.6], vec![1.6]], z: vec![vec![1.6]] };
    let filt = greedy_filter(&sol);
    let p = split(&inst, &red, &empty_guess(), &sol, &filt);
    let ys = |n: &[MatchNode]| n.iter().map(|m| m.y).collect::<Vec<_>>();
    for side in [ys(&p.left), ys(&p.right)] {
        assert_eq!(side.len(), 2);
        assert_eq!(side[0], 1.0);
        assert!((side[1] - 0.6).abs() < 1e-12);
    }
    let vals = p.values();
    let expect = [1.0 / 1.6, 0.6 / 1.6, 0.6 / 1.6, 0.36 / 1.6];
    for (v, e) in vals.iter().zip(expect) {
        assert!((v - e).abs() < 1e-12);
    }
    assert!((vals.iter().sum::<f64>() - 1.6).abs() < 1e-12);
    assert_eq!(p.cardinality, 2);
}

#[test]
fn merged_node_carries_the_cluster_mass() {
    // two facilities per step, a client assigned half to each
    let steps = vec![TimeStep::new(vec![4], vec![0, 1]), TimeStep::new(vec![5], vec![2, 3])];
    let inst = outlier_instance(&[0.0, 1.0, 0.0, 1.0, 0.5, 0.5], steps, 1, 5.0);
    let red = bare_reduced(vec![0, 1], vec![2, 3], vec![4], vec![5]);
    let sol = OutlierLpSolution {
        x: [vec![vec![0.5, 0.5]], vec![vec![0.5, 0.5]]],
        y: [vec![0.5, 0.5], vec![0.5, 0.5]],
        z: vec![vec![0.5, 0.0], vec![0.0, 0.5]],
    };
    let filt = greedy_filter(&sol);
    let p = split(&inst, &red, &empty_guess(), &sol, &filt);
    assert_eq!(p.left.len(), 1);
    assert_eq!(p.right.len(), 1);
    assert!((p.left[0].y - filt[0].mass[0]).abs() < 1e-12);
    assert_eq!(p.left[0].budget, 1);
    assert_eq!(p.left[0].underlying, vec![0, 1]);
    assert_eq!(p.edges.len(), 1);
    assert!((p.edges[0].value - 1.0).abs() < 1e-12);
    assert_eq!((p.edges[0].l1, p.edges[0].l2), (1.0, 1.0));
}

// ---- decomposition and patching on hand-built matchings ----

fn node() -> MatchNode {
    MatchNode { underlying: vec![0], cluster: None, y: 1.0, budget: 0 }
}

fn problem(nl: usize, nr: usize, edges: &[(usize, usize, f64, f64)], targets: [f64; 2], card: usize) -> BudgetedMatchingProblem {
    BudgetedMatchingProblem {
        left: vec![node(); nl],
        right: vec![node(); nr],
        edges: edges.iter().map(|&(a, b, l1, l2)| MatchEdge { a, b, value: 0.0, l1, l2, moves: vec![(0, 0)] }).collect(),
        targets,
        cardinality: card,
        reserved: vec![],
    }
}

fn is_matching(p: &BudgetedMatchingProblem, m: &[usize]) -> bool {
    let mut l = vec![false; p.left.len()];
    let mut r = vec![false; p.right.len()];
    m.iter().all(|&e| {
        let (a, b) = (p.edges[e].a, p.edges[e].b);
        let fresh = !l[a] && !r[b];
        l[a] = true;
        r[b] = true;
        fresh
    })
}

fn rebuild(n: usize, ms: &[Vec<usize>], cs: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for (m, &c) in ms.iter().zip(cs) {
        for &e in m {
            v[e] += c;
        }
    }
    v
}

#[test]
fn integral_point_is_one_matching() {
    let p = problem(2, 2, &[(0, 0, 1.0, 1.0), (0, 1, 1.0, 1.0), (1, 1, 1.0, 1.0)], [0.0, 0.0], 2);
    let d = decompose_basic(&p, &[1.0, 0.0, 1.0]).unwrap();
    let nonzero: Vec<_> = d.matchings.iter().zip(&d.coeffs).filter(|(_, &c)| c > 1e-12).collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(nonzero[0].0, &vec![0, 2]);
    assert!((nonzero[0].1 - 1.0).abs() < 1e-12);
}

#[test]
fn half_four_cycle_is_two_perfect_matchings() {
    let p = problem(2, 2, &[(0, 0, 1.0, 0.0), (0, 1, 0.0, 1.0), (1, 0, 0.0, 1.0), (1, 1, 1.0, 0.0)], [0.0, 0.0], 2);
    let d = decompose_basic(&p, &[0.5; 4]).unwrap();
    let mut got: Vec<(Vec<usize>, f64)> = d.matchings.iter().cloned().zip(d.coeffs.iter().cloned()).filter(|(_, c)| *c > 1e-12).collect();
    got.iter_mut().for_each(|(m, _)| m.sort());
    got.sort_by(|a, b| a.0.cmp(&b.0));
    assert_eq!(got.len(), 2);
    assert_eq!(got[0].0, vec![0, 3]);
    assert_eq!(got[1].0, vec![1, 2]);
    assert!(got.iter().all(|(_, c)| (c - 0.5).abs() < 1e-12));
}

#[test]
fn patch_identity_cases() {
    let p = problem(2, 2, &[(0, 0, 1.0, 0.0), (0, 1, 0.0, 1.0), (1, 0, 0.0, 1.0), (1, 1, 1.0, 0.0)], [0.0, 0.0], 2);
    let (a, b) = (vec![0, 3], vec![1, 2]);
    assert_eq!(patch_matchings(&p, &a, &b, 1.0).matching, a);
    assert_eq!(patch_matchings(&p, &a, &b, 0.0).matching, b);
    let same = patch_matchings(&p, &a, &a, 0.3);
    assert_eq!((same.matching, same.route, same.ok), (a.clone(), Route::Primary, true));
}

fn random_problem(seed: u64) -> BudgetedMatchingProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nl = rng.gen_range(1..=4);
    let nr = rng.gen_range(1..=4);
    let mut edges = Vec::new();
    for a in 0..nl {
        for b in 0..nr {
            if rng.gen_bool(0.6) {
                edges.push((a, b, rng.gen_range(0..4) as f64, rng.gen_range(0..4) as f64));
            }
        }
    }
    let t1: f64 = edges.iter().map(|e| e.2).sum();
    let t2: f64 = edges.iter().map(|e| e.3).sum();
    let targets = [(t1 * rng.gen_range(0.0..0.4)).floor(), (t2 * rng.gen_range(0.0..0.4)).floor()];
    problem(nl, nr, &edges, targets, nl.min(nr))
}

fn random_matching<R: Rng>(p: &BudgetedMatchingProblem, rng: &mut R) -> Vec<usize> {
    let mut m = Vec::new();
    let mut order: Vec<usize> = (0..p.edges.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    for e in order {
        let mut t = m.clone();
        t.push(e);
        if rng.gen_bool(0.7) && is_matching(p, &t) {
            m = t;
        }
    }
    m.sort();
    m
}

struct Contract {
    l1: f64,
    l2: f64,
    card: f64,
}

fn contract(p: &BudgetedMatchingProblem, a: &[usize], b: &[usize], lambda: f64) -> Contract {
    let sum = |m: &[usize], f: fn(&MatchEdge) -> f64| m.iter().map(|&e| f(&p.edges[e])).sum::<f64>();
    Contract {
        l1: lambda * sum(a, |e| e.l1) + (1.0 - lambda) * sum(b, |e| e.l1) - 4.0 * p.max_l1(),
        l2: lambda * sum(a, |e| e.l2) + (1.0 - lambda) * sum(b, |e| e.l2) - 4.0 * p.max_l2(),
        card: lambda * a.len() as f64 + (1.0 - lambda) * b.len() as f64,
    }
}

fn meets(p: &BudgetedMatchingProblem, m: &[usize], c: &Contract) -> bool {
    let l1: f64 = m.iter().map(|&e| p.edges[e].l1).sum();
    let l2: f64 = m.iter().map(|&e| p.edges[e].l2).sum();
    l1 >= c.l1 - 1e-9 && l2 >= c.l2 - 1e-9 && m.len() as f64 <= c.card + 1e-9
}

#[test]
fn random_decompositions_reproduce_the_point() {
    let mut solved = 0;
    for seed in 0..300 {
        let p = random_problem(seed);
        let Ok(z0) = min_cardinality_lp(&p) else { continue };
        if z0.is_empty() {
            continue;
        }
        solved += 1;
        let d = decompose_basic(&p, &z0).unwrap_or_else(|| panic!("seed {seed}: no decomposition"));
        assert!(d.matchings.len() <= 3, "seed {seed}: {} matchings", d.matchings.len());
        assert!(d.residual < 1e-9, "seed {seed}: residual {}", d.residual);
        let back = rebuild(p.edges.len(), &d.matchings, &d.coeffs);
        for (x, y) in back.iter().zip(&z0) {
            assert!((x - y).abs() < 1e-9, "seed {seed}");
        }
        assert!(d.coeffs.iter().all(|&c| c >= -1e-12));
        assert!(d.coeffs.iter().sum::<f64>() <= 1.0 + 1e-9);
        assert!(d.matchings.iter().all(|m| is_matching(&p, m)));
        // the basic point meets both budgets with at most the matching size
        assert!(p.l1(&z0) >= p.targets[0] - 1e-9 && p.l2(&z0) >= p.targets[1] - 1e-9);
    }
    assert!(solved > 100);
}

#[test]
fn random_patches_meet_the_contract() {
    for seed in 0..400 {
        let p = random_problem(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let a = random_matching(&p, &mut rng);
        let b = random_matching(&p, &mut rng);
        let lambda = rng.gen_range(0.05..0.95);
        let c = contract(&p, &a, &b, lambda);
        let pr = patch_matchings(&p, &a, &b, lambda);
        let ex = patch_matchings_exhaustive(&p, &a, &b, lambda);
        for r in [&pr, &ex] {
            assert!(is_matching(&p, &r.matching), "seed {seed}");
            assert!(r.matching.iter().all(|e| a.contains(e) || b.contains(e)), "seed {seed}: edge outside the union");
            assert_eq!(r.ok, meets(&p, &r.matching, &c), "seed {seed}: ok flag disagrees");
        }
        assert!(pr.ok, "seed {seed}: contract missed");
        // the exhaustive search finds a compliant matching whenever any exists
        assert!(ex.ok, "seed {seed}: exhaustive route missed");
    }
}

// ---- whole solver ----

fn random_outlier(seed: u64) -> Instance {
    let mut p = GenParams::new(ProblemKind::DksOutlier, 2, 2 + (seed % 4) as usize, 1 + (seed / 4 % 3) as usize, 1, seed);
    p.k = 1 + (seed / 12) as usize % p.facilities.min(2);
    p.layout = match seed % 3 {
        0 => Layout::Line,
        1 => Layout::Square,
        _ => Layout::Clustered { centers: 2 },
    };
    generate(&p).unwrap()
}

fn check_outcome(inst: &Instance, out: &dynclus_core::outlier::OutlierOutcome, eps: f64) {
    let b = inst.movement_bound.unwrap();
    let moves = &out.schedule.transitions[0];
    assert_eq!(moves.len(), inst.k);
    assert!(moves.iter().all(|&(x, y)| inst.dist(x, y) <= b + 1e-9));
    let c = &out.certificate;
    for t in 0..2 {
        assert_eq!(out.schedule.open_sets[t].len(), inst.k);
        let need = ((1.0 - eps) * inst.steps[t].outlier_target as f64 - 1e-9).ceil().max(0.0) as usize;
        assert_eq!(c.required[t], need);
        let d = service_distances(&inst.metric, &inst.steps[t].clients, &out.schedule.open_sets[t]);
        let covered = d.iter().filter(|&&x| x <= c.cover_radius * (1.0 + 1e-9) + 1e-9).count();
        assert!(covered >= need);
        assert_eq!(covered, c.covered[t].len());
    }
}

#[test]
fn zero_targets_give_a_schedule_at_the_smallest_radius() {
    let xs = [0.0, 10.0, 3.0, 7.0];
    let steps =
        vec![TimeStep::new(vec![2, 3], vec![0, 1]).with_outlier_target(0), TimeStep::new(vec![2, 3], vec![0, 1]).with_outlier_target(0)];
    let inst = outlier_instance(&xs, steps, 1, 0.0);
    let out = solve_dks_outlier(&inst, &OutlierParams::default()).unwrap();
    assert_eq!(out.radius_index, 0);
    check_outcome(&inst, &out, 0.25);
}

#[test]
fn epsilon_one_needs_no_coverage() {
    let inst = random_outlier(5);
    let p = OutlierParams { epsilon: 1.0, ..OutlierParams::default() };
    let out = solve_dks_outlier(&inst, &p).unwrap();
    assert_eq!(out.certificate.required, [0, 0]);
    check_outcome(&inst, &out, 1.0);
}

#[test]
fn bad_parameters_are_rejected() {
    let inst = random_outlier(3);
    for p in [
        OutlierParams { epsilon: 0.0, ..OutlierParams::default() },
        OutlierParams { epsilon: 1.5, ..OutlierParams::default() },
        OutlierParams { gamma: 0.0, ..OutlierParams::default() },
        OutlierParams { max_guesses: 0, ..OutlierParams::default() },
    ] {
        assert!(matches!(solve_dks_outlier(&inst, &p), Err(OutlierError::BadParameter(_))));
    }
    let mut three = inst.clone();
    three.steps.push(three.steps[0].clone());
    assert_eq!(solve_dks_outlier(&three, &OutlierParams::default()).unwrap_err(), OutlierError::NotTwoSteps(3));
}

#[test]
fn certified_schedules_against_the_oracle() {
    for seed in 0..24 {
        let inst = random_outlier(seed);
        let opt = brute_force_dks_outlier(&inst, DEFAULT_CAP).unwrap().objective;
        let out = solve_dks_outlier(&inst, &OutlierParams::default()).unwrap();
        check_outcome(&inst, &out, 0.25);
        assert!(out.certificate.radius_guess <= opt + 1e-9, "seed {seed}: guess {} above {opt}", out.certificate.radius_guess);
        assert!(out.certificate.cover_radius <= 3.0 * opt + 1e-9);
        let (worst, min_u) = out.certificate.pruning[0];
        assert!(out.reduced.order[0].is_empty() || worst <= min_u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn solver_output_is_feasible(seed in 0u64..10_000) {
        let inst = random_outlier(seed);
        let out = solve_dks_outlier(&inst, &OutlierParams::default()).unwrap();
        check_outcome(&inst, &out, 0.25);
    }

    #[test]
    fn filter_keeps_disjoint_clusters(rows in prop::collection::vec(prop::collection::vec(0u8..3, 4), 1..6)) {
        let x: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64 * 0.25).collect()).collect();
        let f = &greedy_filter(&one_step(x))[0];
        for (i, &a) in f.kept.iter().enumerate() {
            for &b in &f.kept[i + 1..] {
                prop_assert!(f.clusters[a].iter().all(|u| !f.clusters[b].contains(u)));
            }
            prop_assert!(f.kept[i + 1..].iter().all(|&b| f.mass[b] <= f.mass[a] + 1e-12));
        }
        // every marked client shares a facility with a heavier kept cluster
        for (j, m) in f.marked_by.iter().enumerate() {
            match m {
                Some(k) => {
                    prop_assert!(f.clusters[j].iter().any(|u| f.clusters[*k].contains(u)));
                    prop_assert!(f.mass[*k] >= f.mass[j] - 1e-12);
                }
                None => prop_assert!(f.clusters[j].is_empty()),
            }
        }
        prop_assert_eq!(f.counts.iter().sum::<usize>(), f.marked_by.iter().filter(|m| m.is_some()).count());
    }
}
