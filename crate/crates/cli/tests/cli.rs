use std::path::Path;
use std::process::{Command, Output};

fn sfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfl"))
        .args(args)
        .env_remove("SFL_SEED")
        .output()
        .expect("sfl runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn directed_ring_second_order_critical_size() {
    let out = sfl(&["critical-n", "--family", "directed-ring", "--n-order", "2", "--gains", "1,3", "--N-max", "200"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "N_bar = 14");
}

#[test]
fn single_node_graph_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("one.json");
    std::fs::write(&graph, r#"{"n": 1, "directed": false, "edges": []}"#).unwrap();
    let out = sfl(&["verdict", "--graph", path_str(&graph), "--gains", "0.5,1,1", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["status"], "stable");
}

#[test]
fn config_replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let out = sfl(&[
        "sweep-q", "--family", "path-fuzz", "--q", "2,4,6", "--gains", "0.1,0.8,1", "--N-max", "400", "--out",
        path_str(&first),
    ]);
    assert!(out.status.success());
    let config = dir.path().join("first.csv.config.json");
    assert!(config.exists());

    let second = dir.path().join("second.csv");
    let out = sfl(&["--config", path_str(&config), "--out", path_str(&second)]);
    assert!(out.status.success());
    let a = std::fs::read(&first).unwrap();
    assert_eq!(a, std::fs::read(&second).unwrap());
    assert!(String::from_utf8(a).unwrap().starts_with("q,n,N_bar,lambda2_at_crit,binding_condition\n2,3,9,"));
}

#[test]
fn repeated_random_runs_are_identical() {
    let args = ["gen", "--family", "random-planar", "--N", "40", "--seed", "5", "--format", "json"];
    let a = sfl(&args);
    let b = sfl(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = sfl(&["gen", "--family", "random-planar", "--N", "40", "--seed", "6", "--format", "json"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn seed_environment_variable_overrides_flag() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_sfl"))
        .args(["gen", "--family", "random-tree", "--N", "20", "--seed", "1"])
        .env("SFL_SEED", "9")
        .output()
        .unwrap();
    let flag = sfl(&["gen", "--family", "random-tree", "--N", "20", "--seed", "9"]);
    assert!(with_env.status.success());
    assert_eq!(with_env.stdout, flag.stdout);
}

#[test]
fn worker_count_does_not_change_output() {
    let run = |jobs: &str| {
        sfl(&["critical-n", "--family", "random-planar", "--gains", "0.2,1,1", "--N", "3", "--N-max", "200", "--jobs", jobs, "--format", "json", "--out", "/dev/stdout"])
    };
    let one = run("1");
    let four = run("4");
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(sfl(&["verdict", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(sfl(&["critical-n", "--family", "directed-ring", "--n-order", "3", "--gains", "1,3"]).status.code(), Some(1));
    assert_eq!(sfl(&["spectrum", "--family", "lattice-fuzz", "--d", "2", "--N", "10"]).status.code(), Some(1));
    assert_eq!(sfl(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("split.json");
    std::fs::write(&graph, r#"{"n": 2, "directed": false, "edges": []}"#).unwrap();
    assert_eq!(sfl(&["verdict", "--graph", path_str(&graph), "--gains", "1,2"]).status.code(), Some(2));
}

#[test]
fn resolved_config_is_logged() {
    let out = sfl(&["cheeger", "--family", "ring-fuzz", "--q", "2", "--N", "8"]);
    assert!(out.status.success());
    let log = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(log.contains("resolved config"));
    assert!(log.contains(r#""seed":1"#));
    assert_eq!(stdout(&out), "h,set\n0.5,1;2;3;4\n");
}

#[test]
fn svg_chart_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("sim.svg");
    let out = sfl(&[
        "simulate", "--family", "directed-ring", "--N", "6", "--gains", "1,3", "--horizon", "5", "--init", "step",
        "--svg", path_str(&svg),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("polyline"));
    assert!(stdout(&out).starts_with("t,x1_d0,"));
}

#[test]
fn leader_follower_and_bounds() {
    let out = sfl(&["critical-n", "--family", "path-fuzz", "--q", "4", "--gains", "0.1,1,1", "--leader", "1", "--N", "10", "--N-max", "400"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("N_bar = "));

    let out = sfl(&["bounds", "--bound", "fuzz-lattice", "--d", "2", "--sides", "12,18,24,36"]);
    assert!(out.status.success());
    let body = stdout(&out);
    assert!(body.lines().nth(1).unwrap().starts_with("fuzz-lattice,within,-1,"));
}
