use std::path::Path;
use std::process::{Command, Output};

fn xsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xsolve"))
        .args(args)
        .env_remove("XSOLVE_CATALOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sat = write(dir.path(), "sat.cnf", "p cnf 3 2\n1 2 3 0\n-1 2 0\n");
    let unsat = write(dir.path(), "unsat.cnf", "p cnf 2 3\n1 2 0\n1 0\n2 0\n");
    let broken = write(dir.path(), "bad.cnf", "p cnf 2 1\n1 x 0\n");

    let o = xsolve(&["solve", &sat, "--model"]);
    assert_eq!(o.status.code(), Some(10));
    assert!(stdout(&o).starts_with("s SATISFIABLE\nv "));
    assert_eq!(xsolve(&["solve", &unsat]).status.code(), Some(20));

    let o = xsolve(&["solve", &broken]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert_eq!(xsolve(&["solve", "/nonexistent/file.cnf"]).status.code(), Some(1));
    assert_eq!(xsolve(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(xsolve(&["--help"]).status.code(), Some(0));
}

#[test]
fn tau_prints_six_decimals() {
    let o = xsolve(&["tau", "5", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1.167304\n");
    assert_eq!(xsolve(&["tau", "1", "0"]).status.code(), Some(1));
}

#[test]
fn generator_is_reproducible() {
    let args = ["gen", "--seed", "77", "--vars", "12", "--clauses", "9", "--len-min", "2", "--len-max", "4"];
    let a = xsolve(&args);
    let b = xsolve(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("p cnf 12 9"));
}

#[test]
fn solver_matches_oracle_on_generated_instances() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..20 {
        let path = dir.path().join(format!("g{seed}.cnf"));
        let p = path.to_str().unwrap();
        let s = seed.to_string();
        let g = xsolve(&["gen", "--seed", &s, "--vars", "10", "--clauses", "6", "--len-min", "2", "--len-max", "4", "-o", p]);
        assert_eq!(g.status.code(), Some(0));
        let solved = xsolve(&["solve", p]);
        let oracle = xsolve(&["oracle", p]);
        assert_eq!(solved.status.code(), oracle.status.code(), "seed {seed}");
        assert_eq!(
            stdout(&solved).lines().next(),
            stdout(&oracle).lines().next()
        );
        assert!(stdout(&oracle).contains("c models "));
    }
}

#[test]
fn stats_json_has_expected_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "f.cnf", "p cnf 6 4\n1 2 3 0\n1 4 5 0\n2 4 6 0\n3 5 6 0\n");
    let json = dir.path().join("stats.json");
    let o = xsolve(&["solve", &cnf, "--stats-json", json.to_str().unwrap()]);
    assert!(matches!(o.status.code(), Some(10) | Some(20)));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    for key in ["version", "nodes", "leaves", "maxDepth", "ruleFires", "muInitial", "minBranchDrop"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["nodes"].as_u64().unwrap() >= 1);
}

#[test]
fn catalog_commands() {
    let o = xsolve(&["catalog-eval", "--w", "0.8823"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().last().unwrap().starts_with("max 1.167304"));

    let o = xsolve(&["weight-search", "--lo", "0.8", "--hi", "0.95", "--step", "0.001"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bestTau 1.167304"));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "nonsense line\n");
    assert_eq!(xsolve(&["catalog-eval", "--w", "0.9", "--catalog", &bad]).status.code(), Some(1));
}
