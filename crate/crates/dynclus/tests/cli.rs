use std::path::Path;
use std::process::{Command, Output};

use dynclus::format::{read_schedule, ScheduleFile};
use tempfile::TempDir;

fn dynclus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynclus")).args(args).output().unwrap()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn generate(dir: &TempDir, kind: &str, name: &str, extra: &[&str]) -> String {
    let out = p(dir, name);
    let mut args = vec!["generate", "--kind", kind, "--clients", "4", "--facilities", "3", "--k", "2", "--seed", "7", "--out", &out];
    args.extend_from_slice(extra);
    let o = dynclus(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn report(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = generate(&dir, "dks", "a.json", &[]);
    let b = generate(&dir, "dks", "b.json", &[]);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn solve_then_verify_every_kind() {
    let dir = TempDir::new().unwrap();
    for (kind, solve_args) in [
        ("dokm", vec!["dokm", "--delta", "0.5", "--samples", "40", "--seed", "1"]),
        ("dks", vec!["dks"]),
        ("dks-outlier", vec!["dks-outlier", "--epsilon", "0.25"]),
        ("tmmfl", vec!["tmmfl", "--samples", "40"]),
    ] {
        let inst = generate(&dir, kind, &format!("{kind}.json"), &[]);
        let sched = p(&dir, &format!("{kind}-s.json"));
        let mut args = vec!["solve"];
        args.extend(solve_args.iter().cloned());
        args.extend(["--instance", inst.as_str(), "--out", sched.as_str()]);
        let o = dynclus(&args);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(report(&o)["pass"], true);
        let o = dynclus(&["verify", "--instance", &inst, "--schedule", &sched, "--against-oracle", "--delta", "0.5"]);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stdout));
        let r = report(&o);
        assert!(r["ratio"].as_f64().unwrap() <= r["bound"].as_f64().unwrap());
    }
}

#[test]
fn tampered_schedule_fails_verification() {
    let dir = TempDir::new().unwrap();
    let inst = generate(&dir, "dks", "i.json", &[]);
    let sched = p(&dir, "s.json");
    assert!(dynclus(&["solve", "dks", "--instance", &inst, "--out", &sched]).status.success());
    let mut f: ScheduleFile = read_schedule(Path::new(&sched)).unwrap();
    f.costs.radius = Some(f.costs.radius.unwrap() / 2.0);
    std::fs::write(&sched, serde_json::to_string(&f).unwrap()).unwrap();
    let o = dynclus(&["verify", "--instance", &inst, "--schedule", &sched]);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&o);
    assert_eq!(r["pass"], false);
    assert!(!r["failures"].as_array().unwrap().is_empty());

    f.open_sets[0].pop();
    std::fs::write(&sched, serde_json::to_string(&f).unwrap()).unwrap();
    let o = dynclus(&["verify", "--instance", &inst, "--schedule", &sched]);
    assert_eq!(o.status.code(), Some(1));
    assert!(report(&o)["failures"][0].as_str().unwrap().starts_with("invalid schedule"));
}

#[test]
fn errors_exit_with_two() {
    let o = dynclus(&["solve", "dks", "--instance", "/nonexistent/file.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let dir = TempDir::new().unwrap();
    let inst = generate(&dir, "dokm", "i.json", &[]);
    let o = dynclus(&["solve", "dks", "--instance", &inst]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn schedule_goes_to_stdout_without_out() {
    let dir = TempDir::new().unwrap();
    let inst = generate(&dir, "dks", "i.json", &[]);
    let o = dynclus(&["solve", "dks", "--instance", &inst]);
    assert!(o.status.success());
    let f: ScheduleFile = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(f.open_sets.len(), 2);
    let r: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(r["command"], "solve dks");
}

#[test]
fn reduce_3dm_yes_instance() {
    let dir = TempDir::new().unwrap();
    let t = p(&dir, "t.json");
    std::fs::write(&t, r#"{"n": 1, "triplets": [[0, 0, 0], [0, 0, 0]]}"#).unwrap();
    let out = p(&dir, "r.json");
    assert!(dynclus(&["reduce-3dm", "--elements", &t, "--alpha", "3", "--out", &out]).status.success());
    let inst = dynclus::read_instance(Path::new(&out)).unwrap();
    assert_eq!(inst.num_steps(), 3);
    assert_eq!(inst.movement_bound, Some(3.0));
}

#[test]
fn bench_writes_csv_and_reports_failures_by_exit_code() {
    let dir = TempDir::new().unwrap();
    let suite = p(&dir, "suite.json");
    std::fs::write(&suite, r#"{"seed": 2, "runs": [{"kind": "dks", "instances": 4, "clients": 4, "facilities": 3, "k": 2}]}"#).unwrap();
    let csv = p(&dir, "out.csv");
    let json = p(&dir, "out.json");
    let o = Command::new(env!("CARGO_BIN_EXE_dynclus"))
        .args(["bench", "--suite", &suite, "--csv", &csv, "--json", &json])
        .env("DYNCLUS_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("instance,seed,objective,oracle,ratio,bound,pass"));
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 4);
}
