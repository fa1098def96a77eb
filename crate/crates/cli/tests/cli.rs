use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const TWO_STRAIGHT: &str = r#"{"subpaths":[{"start":[0,0],"end":[1,0]},{"start":[2,0],"end":[3,0]}]}"#;

fn spp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spp")).args(args).output().expect("spawn spp")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn exact_on_two_straight_subpaths() {
    let dir = TempDir::new().unwrap();
    let input = fixture(&dir, "two.json", TWO_STRAIGHT);
    let out = spp(&["solve", "--input", p(&input), "--method", "exact"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out).trim(),
        r#"{"order":[{"subpath":1,"orientation":"forward"},{"subpath":2,"orientation":"forward"}],"length":6.00000000}"#
    );
}

#[test]
fn cspp_output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("ws.json");
    assert!(spp(&["gen", "--n", "30", "--seed", "11", "--out", p(&input)]).status.success());
    let first = spp(&["solve", "--input", p(&input)]);
    assert!(first.status.success());
    for _ in 0..3 {
        assert_eq!(spp(&["solve", "--input", p(&input)]).stdout, first.stdout);
    }
    let json: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(json["order"].as_array().unwrap().len(), 30);
    assert!(json["length"].as_f64().unwrap() > 0.0);
}

#[test]
fn single_subpath_closes_on_the_chord() {
    let dir = TempDir::new().unwrap();
    let input = fixture(&dir, "one.json", r#"{"subpaths":[{"start":[0,0],"end":[3,4],"length":7.5}]}"#);
    for method in ["cspp", "exact", "ga"] {
        let out = spp(&["solve", "--input", p(&input), "--method", method]);
        assert!(out.status.success(), "{method}");
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(json["length"].as_f64().unwrap(), 12.5, "{method}");
    }
    let verify = spp(&["verify", "--input", p(&input)]);
    assert!(verify.status.success(), "{}", stdout(&verify));
    assert!(stdout(&verify).lines().any(|l| l == "ieti: no-op"));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let short = fixture(&dir, "short.json", r#"{"subpaths":[{"start":[0,0],"end":[3,4],"length":4.0}]}"#);
    let out = spp(&["solve", "--input", p(&short)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("shorter"));

    let garbage = fixture(&dir, "garbage.json", "{ not json");
    assert_eq!(spp(&["solve", "--input", p(&garbage)]).status.code(), Some(1));
    assert_eq!(spp(&["solve", "--input", p(&dir.path().join("missing.json"))]).status.code(), Some(1));
}

#[test]
fn oracle_cap_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("big.json");
    assert!(spp(&["gen", "--n", "20", "--out", p(&input)]).status.success());
    assert_eq!(spp(&["solve", "--input", p(&input), "--method", "exact"]).status.code(), Some(2));
}

#[test]
fn verify_passes_on_random_workspaces() {
    let dir = TempDir::new().unwrap();
    for seed in 0..3 {
        let input = dir.path().join(format!("ws{seed}.json"));
        let seed = seed.to_string();
        assert!(spp(&["gen", "--n", "8", "--curvature-max", "3", "--seed", &seed, "--out", p(&input)]).status.success());
        let out = spp(&["verify", "--input", p(&input)]);
        assert!(out.status.success(), "{}", stdout(&out));
        assert_eq!(stdout(&out).lines().count(), 9);
    }
}

#[test]
fn ga_writes_generation_stats() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("ws.json");
    let stats = dir.path().join("stats.csv");
    assert!(spp(&["gen", "--n", "10", "--out", p(&input)]).status.success());
    let out = spp(&["solve", "--input", p(&input), "--method", "ga", "--seed", "4", "--stats", p(&stats)]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&stats).unwrap();
    assert_eq!(csv.lines().next(), Some("generation,best,mean"));
    assert!(csv.lines().count() > 1);
    // --stats needs the GA
    assert_eq!(spp(&["solve", "--input", p(&input), "--stats", p(&stats)]).status.code(), Some(1));
}

#[test]
fn bench_emits_one_row_per_env_and_method() {
    let dir = TempDir::new().unwrap();
    let envs: Vec<PathBuf> = (0..2)
        .map(|k| {
            let path = dir.path().join(format!("env{k}.json"));
            let seed = k.to_string();
            assert!(spp(&["gen", "--n", "12", "--seed", &seed, "--out", p(&path)]).status.success());
            path
        })
        .collect();
    let out = spp(&[
        "bench", "--envs", p(&envs[0]), p(&envs[1]), "--methods", "cspp", "ga", "--reps", "3", "--ga-pop", "20",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(
        lines[0],
        "env,method,length_mean,length_std,time_mean,time_std,time_improving_pct,length_improving_pct"
    );
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 8);
        if cols[1] == "cspp" {
            assert_eq!(cols[3].parse::<f64>().unwrap(), 0.0);
            assert!(!cols[7].is_empty());
        }
    }
}

#[test]
fn graph_dump_marks_infinite_edges() {
    let dir = TempDir::new().unwrap();
    let input = fixture(&dir, "two.json", TWO_STRAIGHT);
    let out = spp(&["graph", "--input", p(&input), "--stage", "transformed"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("node,s1,s2,e1,e2,m1,m2"));
    assert_eq!(text.matches("inf").count(), 10);
}
