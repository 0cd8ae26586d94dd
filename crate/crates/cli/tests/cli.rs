use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// Runs `cycleswitch` with whitespace-separated `line`; a token `@k` stands
/// for `paths[k]`, so paths may contain spaces.
fn run(line: &str, paths: &[&Path]) -> Output {
    let args: Vec<OsString> = line
        .split_whitespace()
        .map(|tok| match tok.strip_prefix('@').and_then(|k| k.parse::<usize>().ok()) {
            Some(k) => paths[k].as_os_str().to_owned(),
            None => tok.into(),
        })
        .collect();
    Command::new(env!("CARGO_BIN_EXE_cycleswitch")).args(args).output().expect("spawn cycleswitch")
}

fn ok(line: &str, paths: &[&Path]) -> String {
    let out = run(line, paths);
    assert!(out.status.success(), "{line}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn generate_detect_synthesize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.json");
    let gen = "generate --n-stable 60 --n-unstable 4 --phi-coeff 0.4 --dwell 2 4 --A 2.5 --B 5 --seed 3 --out @0";
    ok(gen, &[&graph]);
    let first = std::fs::read(&graph).unwrap();
    ok(gen, &[&graph]);
    assert_eq!(first, std::fs::read(&graph).unwrap());

    let json: serde_json::Value = serde_json::from_str(&ok("detect --graph @0 --seed 9 --json", &[&graph])).unwrap();
    let vertices: Vec<u64> = json["vertices"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(json["length"].as_u64().unwrap() as usize, vertices.len());
    assert!(vertices.iter().all(|&v| v < 60));
    assert!(vertices.len() >= 3);

    let text = ok("detect --graph @0 --seed 9", &[&graph]);
    assert!(text.contains(&format!("length: {}", vertices.len())));

    let inline: Vec<String> = vertices.iter().map(u64::to_string).collect();
    let signal = dir.path().join("sig.csv");
    ok(&format!("synthesize --graph @0 --cycle {} --horizon 50 --out @1", inline.join(",")), &[&graph, &signal]);
    let csv = std::fs::read_to_string(&signal).unwrap();
    let rows: Vec<(u64, u64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let (t, s) = l.split_once(',').unwrap();
            (t.parse().unwrap(), s.parse().unwrap())
        })
        .collect();
    assert_eq!(csv.lines().next(), Some("t,sigma"));
    assert_eq!(rows.len(), 51);
    // uniform dwell at the window minimum
    assert_eq!(rows[0].1, vertices[0]);
    assert_eq!(rows[1].1, vertices[0]);
    assert_eq!(rows[2].1, vertices[1]);
}

#[test]
fn simulate_two_scalar_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let (sys, graph) = (data("two_scalar_system.json"), data("two_scalar_graph.json"));
    ok("simulate --system @0 --graph @1 --cycle 0:1,1:1 --x0 1 --horizon 4 --out @2", &[&sys, &graph, &out]);
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,sigma,x_1,y_1");
    let x: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    let expected = [1.0, 0.5, 0.3, 0.15, 0.09];
    for (a, b) in x.iter().zip(expected) {
        assert!((a - b).abs() <= 1e-12, "{x:?}");
    }

    let with_input = dir.path().join("traj_in.csv");
    ok(
        "simulate --system @0 --graph @1 --cycle 0,1 --delta 2 --x0 -1 --input const:0 --horizon 3 --out @2",
        &[&sys, &graph, &with_input],
    );
    let text = std::fs::read_to_string(&with_input).unwrap();
    let sigma: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(sigma, ["0", "0", "1", "1"]);
}

#[test]
fn certify_reports_and_json() {
    let (sys, graph) = (data("two_scalar_system.json"), data("two_scalar_graph.json"));
    let out = ok("certify --system @0 --graph @1 --samples 500 --cycle 0,1 --x0 1 --json", &[&sys, &graph]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["certificate"]["decrease"]["violations"], 0);
    assert_eq!(v["equilibrium_failures"], 0);
    let ratio = v["contraction"]["ratio"].as_f64().unwrap();
    assert!((ratio - 0.09).abs() <= 1e-9 * 0.09);

    let young =
        ok("certify --system @0 --graph @1 --radius 1000", &[&data("young_system.json"), &data("young_graph.json")]);
    assert!(young.contains("decrease: ok"));
}

#[test]
fn certify_flags_a_false_rate() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("young_system.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["certificate"]["rates"] = serde_json::json!([0.2]);
    v["certificate"]["gamma1"] = serde_json::json!({ "c": 0.0, "q": 1.0 });
    let sys = dir.path().join("bad.json");
    std::fs::write(&sys, v.to_string()).unwrap();
    let graph = dir.path().join("g.json");
    let g = std::fs::read_to_string(data("young_graph.json"))
        .unwrap()
        .replace("-0.6931471805599453", "-1.6094379124341003");
    std::fs::write(&graph, g).unwrap();
    let out = ok("certify --system @0 --graph @1 --samples 100", &[&sys, &graph]);
    assert!(out.contains("VIOLATED"), "{out}");
    assert!(out.contains("counterexample at sample"));
}

#[test]
fn experiment_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    ok("experiment --n-stable 100 --phi-coeff 0.3 --trials 50 --sweep 5 --seed 4 --out @0", &[&out]);
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,trials,contractive,empirical_prob,theoretical_bound,seconds"));
    for l in lines {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f.len(), 6);
        assert_eq!(f[1], "50");
        assert_eq!(f[5], "0.000000");
        assert_eq!(f[3].len(), 8);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.json");

    // bad arguments and bad configuration: 2
    assert_eq!(run("generate --n-stable 10", &[]).status.code(), Some(2));
    let bad = run("generate --n-stable 10 --phi-coeff 5 --dwell 2 4 --A 1 --B 1 --seed 0 --out @0", &[&graph]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!graph.exists());
    assert_eq!(run("detect --graph @0 --seed 0", &[&dir.path().join("missing.json")]).status.code(), Some(2));

    let positive_stable = r#"{
  "stable": [0],
  "unstable": [],
  "vertex_weights": {"0": 1.0},
  "edges": [],
  "dwell_min": 1,
  "dwell_max": 1
}
"#;
    std::fs::write(&graph, positive_stable).unwrap();
    let out = run("detect --graph @0 --seed 0", &[&graph]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    // well-formed graph whose only stable vertex has no stable outneighbor: runtime failure, 3
    let dead_end = r#"{"stable": [0], "unstable": [1], "vertex_weights": {"0": -1.0, "1": 1.0},
        "edges": [{"from": 0, "to": 1, "weight": 0.0}], "dwell_min": 1, "dwell_max": 2}"#;
    std::fs::write(&graph, dead_end).unwrap();
    let out = run("detect --graph @0 --seed 0", &[&graph]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    // cycle not in the graph: 2
    let out = run("synthesize --graph @0 --cycle 0,2 --horizon 5 --out @1", &[&data("two_scalar_graph.json"), &graph]);
    assert_eq!(out.status.code(), Some(2));
}
