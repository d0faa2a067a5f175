use dynclus::format::{instance_from_json, instance_to_json, InstanceFile, ScheduleFile};
use dynclus_core::gen::{generate, GenParams, Layout};
use dynclus_core::{evaluate_schedule, Metric, ProblemKind};
use proptest::prelude::*;

fn gen(kind: ProblemKind, seed: u64, layout: Layout) -> dynclus_core::Instance {
    let mut p = GenParams::new(kind, 2, 4, 3, 2, seed);
    p.layout = layout;
    generate(&p).unwrap()
}

#[test]
fn save_then_load_is_the_identity() {
    for kind in [ProblemKind::Dokm, ProblemKind::Dks, ProblemKind::DksOutlier, ProblemKind::TmMfl] {
        for layout in [Layout::Square, Layout::Line, Layout::Clustered { centers: 2 }] {
            let inst = gen(kind, 9, layout);
            let back = instance_from_json(&instance_to_json(&inst)).unwrap();
            assert_eq!(back, inst, "{kind:?}");
        }
    }
}

#[test]
fn matrix_instances_round_trip() {
    let inst = dynclus_core::dks::reduce_3dm(2, &[(0, 0, 0), (1, 1, 1)], 3.0).unwrap();
    let json = instance_to_json(&inst);
    assert!(json.contains("distance_matrix") && !json.contains("\"points\""));
    assert_eq!(instance_from_json(&json).unwrap(), inst);
}

#[test]
fn same_seed_gives_byte_identical_files() {
    let a = instance_to_json(&gen(ProblemKind::Dks, 4, Layout::Square));
    let b = instance_to_json(&gen(ProblemKind::Dks, 4, Layout::Square));
    assert_eq!(a, b);
    let c = instance_to_json(&gen(ProblemKind::Dks, 5, Layout::Square));
    assert_ne!(a, c);
    let f = |s: &str| serde_json::from_str::<InstanceFile>(s).unwrap().digest();
    assert_eq!(f(&a), f(&b));
    assert_ne!(f(&a), f(&c));
}

#[test]
fn triangle_violation_is_a_load_error() {
    let s = r#"{"distance_matrix": [[0, 1, 5], [1, 0, 1], [5, 1, 0]], "k": 1, "gamma": 1, "B": 1,
        "problem": "dks", "steps": [{"clients": [0], "facilities": [1]}, {"clients": [2], "facilities": [1]}]}"#;
    let e = instance_from_json(s).unwrap_err();
    assert!(format!("{e:#}").contains("metric"), "{e:#}");
}

#[test]
fn bad_files_are_rejected() {
    let both = r#"{"points": [[0]], "distance_matrix": [[0]], "k": 1, "problem": "dks", "steps": []}"#;
    assert!(instance_from_json(both).is_err());
    let kind = r#"{"points": [[0]], "k": 1, "problem": "kmeans", "steps": [{"clients": [0], "facilities": [0]}]}"#;
    assert!(format!("{:#}", instance_from_json(kind).unwrap_err()).contains("unknown problem"));
    let missing_b = r#"{"points": [[0]], "k": 1, "problem": "dks", "steps": [{"clients": [0], "facilities": [0]}]}"#;
    assert!(instance_from_json(missing_b).is_err());
}

#[test]
fn gamma_defaults_to_one() {
    let s = r#"{"points": [[0], [2]], "k": 1, "problem": "dokm",
        "steps": [{"clients": [0], "facilities": [1], "weights": [1]}, {"clients": [1], "facilities": [0], "weights": [1]}]}"#;
    assert_eq!(instance_from_json(s).unwrap().gamma, 1.0);
}

#[test]
fn schedule_files_round_trip() {
    let inst = gen(ProblemKind::Dks, 2, Layout::Square);
    let open = vec![inst.steps[0].facilities[..2].to_vec(), inst.steps[1].facilities[..2].to_vec()];
    let s = evaluate_schedule(&inst, &open, &[]).unwrap();
    let f = ScheduleFile::new(&s, Some(serde_json::json!({ "note": 1 })));
    let back: ScheduleFile = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
    assert_eq!(back, f);
    assert_eq!(back.transitions.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn coordinates_give_the_euclidean_matrix(pts in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 2), 2..8)) {
        let n = pts.len();
        let json = serde_json::json!({
            "points": pts, "k": 1, "B": 0.0, "problem": "dks",
            "steps": [{"clients": [0], "facilities": (0..n).collect::<Vec<_>>()}, {"clients": [1], "facilities": (0..n).collect::<Vec<_>>()}]
        });
        let inst = instance_from_json(&json.to_string()).unwrap();
        for a in 0..n {
            for b in 0..n {
                let d = ((pts[a][0] - pts[b][0]).powi(2) + (pts[a][1] - pts[b][1]).powi(2)).sqrt();
                prop_assert!((inst.dist(a, b) - d).abs() <= 1e-12 * (1.0 + d));
            }
        }
        let m = Metric::from_points(pts.clone()).unwrap();
        prop_assert_eq!(&inst.metric, &m);
    }
}
