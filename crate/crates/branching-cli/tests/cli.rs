use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_branching")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("branching-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// CSV body without the `#` metadata line.
fn body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn count_ballot_example() {
    let o = run(&["count", "--ballot", "0,0..4,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(body(&stdout(&o)), ["kind,from,to,count", "ballot,\"0,0\",\"4,2\",3"]);
}

#[test]
fn count_tables() {
    let o = run(&["count", "--motzkin-numbers", "0..6", "--fuss-catalan", "0..4", "--s", "2"]);
    let out = stdout(&o);
    assert!(out.contains("6,51\n"));
    assert!(out.contains("2,4,55\n"));
    let o = run(&["count", "--bracket", "s=2", "n=0..3", "w=2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(body(&stdout(&o))[0] == "s,n,w,walk_level,dim");
}

#[test]
fn ballot_centrality_passes() {
    let o = run(&["chain", "ballot", "--lambda", "3/4", "--levels", "10", "--verify-centrality", "10", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"result\": \"PASS\""));
}

#[test]
fn control_chain_exits_2() {
    let o = run(&["chain", "control", "--p", "7/10", "--levels", "6", "--verify-centrality", "6", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("{\"error\":\"verification_failed\""));
}

#[test]
fn config_errors_exit_1() {
    for args in [
        &["chain", "ballot"][..],
        &["chain", "ballot", "--lambda", "1/3"],
        &["chain", "motzkin", "--l1", "3/10", "--l2", "1/5"],
        &["count"],
        &["nonsense"],
        &["simulate", "returns", "--count", "0"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{args:?}");
        assert!(err.contains("\"invalid_config\""), "{args:?}");
    }
}

#[test]
fn motzkin_marginals_on_curve_sum_to_one() {
    let o = run(&["chain", "motzkin", "--l1", "4/7", "--l2", "1/7", "--levels", "8", "--marginals"]);
    assert_eq!(o.status.code(), Some(0));
    let mut sums = [0.0f64; 9];
    for line in &body(&stdout(&o))[1..] {
        let level: usize = line.split(',').next().unwrap().parse().unwrap();
        let x: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        sums[level] += x;
    }
    assert!(sums.iter().all(|s| (s - 1.0).abs() < 1e-12), "{sums:?}");
}

#[test]
fn fib_crossing_is_eta() {
    let o = run(&["chain", "fib", "--eta", "1/20", "--levels", "6", "--crossing"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("\"edges_off_eta\":0"));
    assert!(body(&out)[1..].iter().all(|l| l.ends_with(",1/20")));
}

#[test]
fn graph_outputs() {
    let o = run(&["graph", "--verify-iso", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"isomorphic\": true"));
    let o = run(&["graph", "--half-line", "--pascalize", "--levels", "4"]);
    assert_eq!(body(&stdout(&o)), ["level,vertex,dim", "0,0,1", "1,1,1", "2,0,1", "2,2,1", "3,1,2", "3,3,1"]);
    let o = run(&["graph", "--bsharp", "--levels", "3", "--dot"]);
    assert!(stdout(&o).starts_with("// {"));
}

#[test]
fn simulate_writes_pair_under_out_dir() {
    let dir = scratch("pair");
    let o = Command::new(env!("CARGO_BIN_EXE_branching"))
        .args(["simulate", "exit-times", "--eta", "0.1", "--k", "5", "--count", "200", "--seed", "4", "--out", "run/et"])
        .env("BRANCHING_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.join("run/et.csv")).unwrap();
    assert_eq!(body(&csv)[0], "traj_id,k,N_k,r_k,ratio,censored");
    assert_eq!(body(&csv).len(), 1 + 200 * 5);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("run/et.json")).unwrap()).unwrap();
    assert_eq!(json["meta"]["tool"], "branching");
    assert_eq!(json["records"], 1000);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn same_seed_same_rows() {
    let args = ["simulate", "trajectories", "--walk", "aux", "--steps", "40", "--count", "30", "--seed", "7"];
    let dir = scratch("seed");
    let mut outs = Vec::new();
    for name in ["a", "b"] {
        let prefix = dir.join(name);
        let mut full = args.to_vec();
        let p = prefix.to_str().unwrap().to_string();
        full.extend(["--out", &p]);
        assert_eq!(run(&full).status.code(), Some(0));
        outs.push(fs::read_to_string(dir.join(format!("{name}.csv"))).unwrap());
    }
    // the metadata line names the output prefix, so compare the rows
    assert_eq!(body(&outs[0]), body(&outs[1]));
    let other = run(&["simulate", "returns", "--n", "2", "--count", "1000", "--seed", "1"]);
    let again = run(&["simulate", "returns", "--n", "2", "--count", "1000", "--seed", "1"]);
    assert_eq!(other.stdout, again.stdout);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn su2_summary() {
    let o = run(&["simulate", "su2", "--l1", "1/2", "--l2", "1/2", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((json["su2"]["value"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}
