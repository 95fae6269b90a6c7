use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mdrsp::instance::{CostModel, Instance, SolutionFile};
use mdrsp::polylab::{brute_force_opt, oracle_instance};
use mdrsp::table::CSV_HEADER;
use mdrsp::{Report, Termination};
use serde_json::Value;
use tempfile::TempDir;

fn mdrsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdrsp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn tsplib(dir: &TempDir, customers: usize, seed: u64) -> PathBuf {
    let p = dir.path().join(format!("base{customers}.tsp"));
    std::fs::write(&p, CostModel::random_points(customers, 1000.0, seed).to_tsplib()).unwrap();
    p
}

fn write_instance(dir: &TempDir, name: &str, inst: &Instance) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, inst.to_json()).unwrap();
    p
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let base = tsplib(&dir, 51, 7);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = mdrsp(&["generate", path_str(&base), "--depots", "3", "--class", "I", "--seed", "7", "--out", path_str(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let inst = Instance::from_json(std::str::from_utf8(&text).unwrap()).unwrap();
    assert_eq!((inst.n_customers(), inst.n_depots()), (51, 3));
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let base = tsplib(&dir, 5, 1);
    let out = dir.path().join("x.json");
    let o = mdrsp(&["generate", path_str(&base), "--depots", "2", "--class", "II", "--out", path_str(&out)]);
    assert_eq!(code(&o), 1);
    assert!(!o.stderr.is_empty());
    assert_eq!(code(&mdrsp(&["frobnicate"])), 1);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&mdrsp(&["solve", path_str(&missing)])), 1);
    std::fs::write(&missing, "{ not json").unwrap();
    assert_eq!(code(&mdrsp(&["solve", path_str(&missing)])), 1);
}

#[test]
fn solve_matches_the_oracle() {
    let dir = TempDir::new().unwrap();
    let inst = oracle_instance(7);
    let path = write_instance(&dir, "tiny.json", &inst);
    let out = dir.path().join("tiny.sol.json");
    let o = mdrsp(&["solve", path_str(&path), "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let sol = SolutionFile::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap().solution();
    assert!(sol.is_feasible(&inst));
    let opt = brute_force_opt(&inst).unwrap().cost(&inst);
    assert!((sol.cost(&inst) - opt).abs() <= 1e-6 * opt.max(1.0));

    let text = std::fs::read_to_string(dir.path().join("tiny.sol.report.json")).unwrap();
    let report = Report::from_json(&text).unwrap();
    assert_eq!(report.termination, Termination::Optimal);
    assert_eq!(report.time_limit, 7200.0);
    assert_eq!(report.incumbent.as_ref(), Some(&sol));
    let v: Value = serde_json::from_str(&text).unwrap();
    for key in ["name", "depots", "opt", "pct_lb", "pair", "sec", "two_mat", "pec", "nodes", "time_seconds"] {
        assert!(v["row"].get(key).is_some(), "row lacks {key}");
    }
}

#[test]
fn time_limit_exits_two() {
    let dir = TempDir::new().unwrap();
    let base = tsplib(&dir, 60, 2);
    let inst_path = dir.path().join("big.json");
    let o = mdrsp(&["generate", path_str(&base), "--depots", "3", "--seed", "1", "--out", path_str(&inst_path)]);
    assert_eq!(code(&o), 0);
    let out = dir.path().join("big.sol.json");
    let o = mdrsp(&["solve", path_str(&inst_path), "--time-limit", "0.01", "--out", path_str(&out)]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let report = Report::from_json(&std::fs::read_to_string(dir.path().join("big.sol.report.json")).unwrap()).unwrap();
    assert_eq!(report.termination, Termination::TimeLimit);
    assert!(report.lb <= report.ub + 1e-6);
}

#[test]
fn bench_writes_the_table() {
    let dir = TempDir::new().unwrap();
    write_instance(&dir, "one.json", &oracle_instance(0));
    write_instance(&dir, "two.json", &oracle_instance(1));
    let manifest = dir.path().join("manifest.txt");
    std::fs::write(&manifest, "# two tiny instances\none.json\n\ntwo.json  # class II\n").unwrap();
    let csv = dir.path().join("table.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_mdrsp"))
        .args(["bench", path_str(&manifest), "--out", path_str(&csv)])
        .env("MDRSP_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines[0], "Name,|D|,α,opt,%-LB,Pair,SEC,2mat,PEC,Nodes,Time");
    assert!(lines[1].starts_with("oracle-0,2,,"));
    assert!(lines[2].starts_with("oracle-1,2,3,"));
    assert!(lines[3].starts_with("Averages,"));
    assert!(lines[1..3].iter().all(|l| l.split(',').count() == 11));
}

#[test]
fn verify_reports() {
    let o = mdrsp(&["verify", "--dim", "4", "2"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim_formula"], 30);
    assert_eq!(v["dim_measured"], 30);
    assert_eq!(v["pass"], true);

    let o = mdrsp(&["verify", "--facets", "prop2", "--size", "3", "2"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], false);
    assert!(v["note"].as_str().unwrap().contains("requires |T| ≥ 4"));

    let o = mdrsp(&["verify", "--facets", "prop3"]);
    assert_eq!(code(&o), 0);

    let o = mdrsp(&["verify", "--oracle-suite", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    assert_eq!(code(&mdrsp(&["verify", "--dim", "9", "2"])), 1);
}
