use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use convex_layers::io::{parse_layers, parse_pset, read_sweep};
use convex_layers::peeling::peel;
use serde_json::Value;
use tempfile::TempDir;

fn onion(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onion"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_base_line() {
    let dir = TempDir::new().unwrap();
    let o = onion(&["generate", "--kind", "base_line", "--dim", "1", "--n", "4", "--out", "a.pset"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("a.pset")).unwrap();
    // header plus 2n + 1 points
    assert_eq!(text.lines().count(), 10);
    let x = parse_pset(&text).unwrap();
    assert_eq!(x.len(), 9);
    assert_eq!(x.point(0), &[-1.0]);
    assert_eq!(x.point(8), &[1.0]);

    let m = json(&dir.path().join("a.pset.manifest.json"));
    assert_eq!(m["spec"]["kind"], "base_line");
    assert_eq!(m["spec"]["size_param"], 4);
    assert_eq!(m["outputs"][0], "a.pset");
    assert!(m["timestamp"].as_str().is_some_and(|t| !t.is_empty()));
    assert!(m["command_line"].as_array().unwrap().len() > 3);
}

#[test]
fn generate_recursive_matches_trace() {
    let dir = TempDir::new().unwrap();
    let o = onion(&["generate", "--kind", "recursive", "--dim", "2", "--n", "256", "--out", "r.pset"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let x = parse_pset(&fs::read_to_string(dir.path().join("r.pset")).unwrap()).unwrap();
    let t = json(&dir.path().join("r.pset.trace.json"));
    let level = &t["levels"][0];
    let big = level["N"].as_u64().unwrap();
    let net = level["net_size"].as_u64().unwrap();
    let m = level["m"].as_u64().unwrap();
    // each net point carries a copy of the 2m + 1 point line
    assert_eq!(m, 4);
    assert_eq!(x.len() as u64, big * net * (2 * m + 1) + 1);
    assert_eq!(t["size"].as_u64().unwrap(), x.len() as u64);
    assert_eq!(t["predicted_layers"], 21);
    let outputs = json(&dir.path().join("r.pset.manifest.json"))["outputs"].clone();
    assert_eq!(outputs.as_array().unwrap().len(), 2);
}

#[test]
fn generate_refusals_exit_2() {
    let dir = TempDir::new().unwrap();
    let o = onion(&["generate", "--kind", "grid", "--dim", "2", "--n", "10", "--out", "g.pset"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("perfect square"));
    let o = onion(&["generate", "--kind", "recursive", "--dim", "3", "--n", "4000", "--out", "r.pset"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("minimal admissible n is 4096"), "{}", stderr(&o));
    let o = onion(&["generate", "--kind", "grid", "--n", "16", "--out", "g.pset"], dir.path());
    assert_eq!(code(&o), 2);
    let o = onion(&["generate", "--kind", "grid", "--dim", "2", "--n", "16"], dir.path());
    assert_eq!(code(&o), 2);
    let o = onion(&["generate", "--kind", "nonsense", "--dim", "2", "--n", "16", "--out", "x"], dir.path());
    assert_eq!(code(&o), 2);
}

fn generate_and_peel(dir: &Path, kind: &str, dim: &str, n: &str) -> Output {
    let o = onion(&["generate", "--kind", kind, "--dim", dim, "--n", n, "--out", "x.pset"], dir);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    onion(&["peel", "--in", "x.pset", "--out", "x.layers"], dir)
}

#[test]
fn peel_summaries() {
    let dir = TempDir::new().unwrap();
    let o = generate_and_peel(dir.path(), "base_line", "1", "4");
    assert_eq!(stdout(&o).trim(), "n=9 L=5 max_layer=2 mu=0.25");

    let o = generate_and_peel(dir.path(), "base_line", "1", "1");
    assert!(stdout(&o).contains("L=2"));

    let o = generate_and_peel(dir.path(), "shell_family", "2", "6");
    assert!(stdout(&o).contains(" L=6 "), "{}", stdout(&o));

    fs::write(dir.path().join("one.pset"), "3 1\n0.1 0.2 0.3\n").unwrap();
    let o = onion(&["peel", "--in", "one.pset", "--out", "one.layers"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "n=1 L=1 max_layer=1 mu=inf");
    let m = json(&dir.path().join("one.layers.manifest.json"));
    assert_eq!(m["inputs"][0], "one.pset");
}

#[test]
fn peel_round_trip_is_exact() {
    let dir = TempDir::new().unwrap();
    let o = generate_and_peel(dir.path(), "random_ball", "3", "300");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let x = parse_pset(&fs::read_to_string(dir.path().join("x.pset")).unwrap()).unwrap();
    let read = parse_layers(&fs::read_to_string(dir.path().join("x.layers")).unwrap()).unwrap();
    assert_eq!(read, peel(&x).unwrap());
}

#[test]
fn malformed_pset_reports_line() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.pset"), "2 3\n0 0\n1 x\n0 1\n").unwrap();
    let o = onion(&["peel", "--in", "bad.pset", "--out", "bad.layers"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    let o = onion(&["peel", "--in", "missing.pset", "--out", "m.layers"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn sweep_rows_and_refusals() {
    let dir = TempDir::new().unwrap();
    let o = onion(
        &["sweep", "--kind", "grid", "--dim", "2", "--sizes", "25,10,9", "--seeds", "2,1", "--out", "s.csv", "--log-out", "s.log"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(text.starts_with("kind,dim,size_param,seed,n,mu,layers,max_layer,wall_seconds"));
    let rows = read_sweep(text.as_bytes()).unwrap();
    let keys: Vec<(u64, u64)> = rows.iter().map(|r| (r.spec().size_param, r.spec().seed)).collect();
    assert_eq!(keys, vec![(9, 1), (9, 2), (10, 1), (10, 2), (25, 1), (25, 2)]);
    let refused: Vec<&str> = text.lines().filter(|l| l.contains(",-1,")).collect();
    assert_eq!(refused.len(), 2);
    assert!(refused[0].contains("perfect square"));
    assert_eq!(rows[0].record().unwrap().layers, 3);

    let log = fs::read_to_string(dir.path().join("s.log")).unwrap();
    assert_eq!(log.lines().next(), Some("log_n log_L"));
    assert_eq!(log.lines().count(), 5);
    let m = json(&dir.path().join("s.csv.manifest.json"));
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);

    let o = onion(&["sweep", "--kind", "grid", "--dim", "2", "--sizes", "", "--out", "e.csv"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn sweep_then_fit() {
    let dir = TempDir::new().unwrap();
    let o = onion(
        &["sweep", "--kind", "base_line", "--dim", "1", "--sizes", "10,20,40,80,160", "--out", "b.csv"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = onion(&["fit", "--in", "b.csv", "--out", "fit.json", "--expect", "1", "--tol", "0.05"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let fit = json(&dir.path().join("fit.json"));
    for key in ["slope", "intercept", "r2", "count", "discarded_prefix"] {
        assert!(fit.get(key).is_some(), "missing {key}");
    }
    // L = n + 1 on 2n + 1 points: slope just under 1
    let slope = fit["slope"].as_f64().unwrap();
    assert!(slope > 0.95 && slope < 1.0, "{slope}");
    assert_eq!(fit["discarded_prefix"], 1);

    let o = onion(&["fit", "--in", "b.csv", "--expect", "0.5", "--tol", "0.05"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn verify_suites() {
    let dir = TempDir::new().unwrap();
    let o = onion(&["verify", "shells", "--dim", "2", "--n", "256", "--out", "sh.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&dir.path().join("sh.json"));
    assert_eq!(r["pass"], true);
    assert_eq!(r["checks"][0]["layers"], 21);
    assert_eq!(r["checks"][0]["expected"], 21);
    assert!(dir.path().join("sh.json.manifest.json").exists());

    let o = onion(&["verify", "push", "--random", "20"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["checks"].as_array().unwrap().len(), 3);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["worst_distance_drop"].as_f64().unwrap() <= 1e-9));

    let o = onion(&["verify", "tangent", "--dim", "3", "--delta", "0.3"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let lemmas: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["lemma"].as_str().unwrap()).collect();
    assert_eq!(lemmas, ["outer_radius", "inner_radius", "face_inradius"]);

    let o = onion(&["verify", "nets", "--dim", "2", "--delta", "0.1,0.5", "--save-nets", "."], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let meta = json(&dir.path().join("net_d2_delta0.1.pset.json"));
    assert_eq!(meta["dim"], 2);
    assert_eq!(meta["delta"], 0.1);

    let o = onion(&["verify", "nope"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn failing_check_exits_1() {
    let dir = TempDir::new().unwrap();
    // a margin this coarse merges neighbouring points of the embedded copies
    let o = onion(&["verify", "shells", "--dim", "2", "--n", "256", "--eps", "0.003"], dir.path());
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["pass"], false);
    assert_ne!(r["checks"][0]["layers"], 21);
    assert_eq!(code(&o), 1);
}
