use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn contracts(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contracts")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

#[test]
fn additive_sweep_is_tight_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "pof",
        "--family",
        "additive-lb",
        "--n",
        "10",
        "--B",
        "1",
        "--grid",
        "b=0.2:0.8:0.2",
        "--objective",
        "reward",
        "--out",
        "report.csv",
    ];
    let out = contracts(&args, dir.path());
    assert!(out.status.success());
    let body = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next().unwrap(), "family,n,b,B,objective,max_b,max_B,ratio,bound,tight");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[7], cols[8], "{row}");
        assert_eq!(cols[9], "true");
    }
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"][0], "report.csv");

    let mut verify = args.to_vec();
    verify.push("--verify");
    assert!(contracts(&verify, dir.path()).status.success());

    write(dir.path(), "report.csv", &body.replace("9.0", "8.0"));
    let failed = contracts(&verify, dir.path());
    assert_eq!(failed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failed.stderr).starts_with("error: verify:"));
}

#[test]
fn sweep_output_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["pof", "--family", "additive-lb", "--n", "4,8", "--B", "0.5,1", "--objective", "reward,welfare"];
    let one = contracts(&[&base[..], &["--threads", "1"]].concat(), dir.path());
    let many = contracts(&[&base[..], &["--threads", "4"]].concat(), dir.path());
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
    // cells with b > B are skipped
    let rows = String::from_utf8(one.stdout).unwrap().lines().count() - 1;
    assert_eq!(rows, 2 * 2 * (9 + 5));
}

#[test]
fn profit_families_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = contracts(
        &[
            "pof",
            "--family",
            "profit-k",
            "--grid",
            "b=1/3",
            "--k",
            "3",
            "--epsilon",
            "0.001",
            "--objective",
            "profit",
            "--emit-curve",
            "curve.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let ratio: f64 = csv.lines().nth(1).unwrap().split(',').nth(7).unwrap().parse().unwrap();
    assert!(ratio >= 1.795);
    let curve = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert!(curve.starts_with("family,n,b,B,objective,payment,value,team"));
    assert!(curve.lines().count() > 2);
}

#[test]
fn fptas_on_two_agents() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "two.json", r#"{"n":2,"costs":[0.1,"1/10"],"reward":{"type":"additive","values":[0.5,0.5]}}"#);
    let out = contracts(
        &[
            "solve",
            "--instance",
            "two.json",
            "--method",
            "fptas",
            "--epsilon",
            "0.1",
            "--objective",
            "profit",
            "--budget",
            "1",
        ],
        dir.path(),
    );
    let v = stdout_json(&out);
    assert!(v["result"]["value"].as_f64().unwrap() >= 0.54);
}

#[test]
fn check_separation_instance() {
    let dir = tempfile::tempdir().unwrap();
    assert!(contracts(&["gen", "--family", "xos-sep", "--b", "0.5", "--B", "1", "--out", "sep.json"], dir.path())
        .status
        .success());
    let v = stdout_json(&contracts(&["check", "--instance", "sep.json"], dir.path()));
    assert_eq!(v["monotone"], true);
    assert_eq!(v["subadditive"], true);
    assert_eq!(v["submodular"], false);

    let failed = contracts(
        &["downsize", "--instance", "sep.json", "--set", "0,1,2", "--m", "3", "--mode", "submodular"],
        dir.path(),
    );
    assert_eq!(failed.status.code(), Some(2));
    let err = String::from_utf8(failed.stderr).unwrap();
    assert!(err.starts_with("error: precondition:"));
    assert_eq!(err.lines().count(), 1);

    let v = stdout_json(&contracts(
        &["downsize", "--instance", "sep.json", "--set", "0,1,2", "--m", "5", "--mode", "xos"],
        dir.path(),
    ));
    assert!(v["result"]["objective_after"].as_f64().unwrap() >= 1.0 / 8.0);

    let v = stdout_json(&contracts(
        &["reduce", "--instance", "sep.json", "--from", "welfare@1.0", "--to", "profit@0.5"],
        dir.path(),
    ));
    assert_eq!(v["result"]["guarantee_factor"], 820.0);
    assert!(v["result"]["budget_used"].as_f64().unwrap() <= 1.0 + 1e-9);
}

#[test]
fn seeded_corpus_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "--corpus", "xos", "--seed", "42", "--index", "3", "--n", "6"];
    let a = contracts(&args, dir.path());
    let b = contracts(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = contracts(&["gen", "--corpus", "xos", "--seed", "43", "--index", "3", "--n", "6"], dir.path());
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = contracts(&["check", "--instance", "nope.json"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error: io:"));

    write(dir.path(), "bad.json", r#"{"n":1,"costs":[0.1],"reward":{"type":"additive","values":[1.5]}}"#);
    let bad = contracts(&["check", "--instance", "bad.json"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error: input:"));

    write(dir.path(), "zero.json", r#"{"n":1,"costs":[0.0],"reward":{"type":"additive","values":[0.0]}}"#);
    let undefined = contracts(&["pof", "--instance", "zero.json", "--grid", "b=0.5"], dir.path());
    assert_eq!(undefined.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&undefined.stderr).starts_with("error: undefined-ratio:"));
}
