//! End-to-end checks of the binary: flag validation, exit codes, output
//! determinism, and the documented defaults.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_meshforce"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn write_grid(dir: &Path) -> String {
    let out = path_str(&dir.join("grid.json"));
    let res = run(&["gen-grid", "--out", &out]);
    assert_eq!(res.status.code(), Some(0));
    out
}

#[test]
fn gen_grid_defaults_write_25_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let out = write_grid(dir.path());
    let t = meshforce::Topology::load(&out).unwrap();
    assert_eq!(t.node_count(), 25);
    assert_eq!(t.coverage_radius(), 262.5);
}

#[test]
fn gen_grid_accepts_single_node() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_str(&dir.path().join("one.json"));
    let res = run(&["gen-grid", "--rows", "1", "--cols", "1", "--out", &out]);
    assert_eq!(res.status.code(), Some(0));
    assert_eq!(meshforce::Topology::load(&out).unwrap().node_count(), 1);
}

#[test]
fn gen_grid_rejects_oversized_footprint() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_str(&dir.path().join("big.json"));
    let res = run(&["gen-grid", "--spacing", "300", "--out", &out]);
    assert_eq!(
        res.status.code(),
        Some(2),
        "1200 m footprint in a 1000 m area"
    );
    assert!(!Path::new(&out).exists());
}

#[test]
fn gen_random_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = path_str(&dir.path().join("a.json"));
    let b = path_str(&dir.path().join("b.json"));
    assert_eq!(
        run(&["gen-random", "--seed", "42", "--out", &a])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["gen-random", "--seed", "42", "--out", &b])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let t = meshforce::Topology::load(&a).unwrap();
    assert_eq!(t.node_count(), 25);
    assert!(t.is_connected());
}

#[test]
fn gen_random_requires_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_str(&dir.path().join("x.json"));
    let res = run(&["gen-random", "--out", &out]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn gen_random_exits_3_when_connectivity_is_unreachable() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_str(&dir.path().join("sparse.json"));
    let res = run(&["gen-random", "--radius", "1", "--seed", "7", "--out", &out]);
    assert_eq!(res.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("seed 7"), "stderr: {stderr}");
}

#[test]
fn score_lists_the_grid_center_first() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(dir.path());
    let res = run(&["score", "--topology", &grid]);
    assert_eq!(res.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&res.stdout);
    let first_row = stdout.lines().nth(2).unwrap();
    let fields: Vec<&str> = first_row.split_whitespace().collect();
    assert_eq!(fields[0], "1", "rank column");
    assert_eq!(fields[1], "12", "node column");
}

#[test]
fn score_degree_metric_breaks_ties_by_id() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(dir.path());
    let res = run(&["score", "--topology", &grid, "--metric", "degree"]);
    assert_eq!(res.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&res.stdout);
    let fields: Vec<&str> = stdout.lines().nth(2).unwrap().split_whitespace().collect();
    assert_eq!(fields[1], "6", "lowest-id degree-4 node");
}

#[test]
fn score_rejects_malformed_topology_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    let res = run(&["score", "--topology", &path_str(&bad)]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn route_prints_hops_and_rejects_unknown_gateways() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(dir.path());
    let res = run(&["route", "--topology", &grid, "--gateway", "12"]);
    assert_eq!(res.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&res.stdout);
    let node0: Vec<&str> = stdout.lines().nth(2).unwrap().split_whitespace().collect();
    assert_eq!(node0, vec!["0", "4", "1"], "node 0: 4 hops via node 1");

    let res = run(&["route", "--topology", &grid, "--gateway", "99"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn route_exits_4_on_disconnected_topologies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("apart.json");
    fs::write(
        &path,
        r#"{"area_side": 1000.0, "coverage_radius": 100.0,
            "nodes": [{"id": 0, "x": 0.0, "y": 0.0}, {"id": 1, "x": 900.0, "y": 0.0}]}"#,
    )
    .unwrap();
    let res = run(&["route", "--topology", &path_str(&path), "--gateway", "0"]);
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn simulate_favors_the_center_gateway() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(dir.path());
    let avg = |gw: &str| -> f64 {
        let res = run(&["simulate", "--topology", &grid, "--gateway", gw]);
        assert_eq!(res.status.code(), Some(0));
        let stdout = String::from_utf8_lossy(&res.stdout);
        let line = stdout
            .lines()
            .find(|l| l.starts_with("average_throughput_mbps:"))
            .unwrap()
            .to_string();
        line.split(": ").nth(1).unwrap().trim().parse().unwrap()
    };
    assert!(avg("12") > avg("0"));
}

#[test]
fn sweep_writes_a_deterministic_csv_and_summarizes_last() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(dir.path());
    let csv_a = path_str(&dir.path().join("a.csv"));
    let csv_b = path_str(&dir.path().join("b.csv"));
    let res = run(&["sweep", "--topology", &grid, "--out", &csv_a]);
    assert_eq!(res.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&res.stdout);
    let last = stdout.lines().last().unwrap();
    assert!(
        last.starts_with("correlation: pearson="),
        "last line: {last}"
    );
    assert!(last.contains("n=25"));

    assert_eq!(
        run(&["sweep", "--topology", &grid, "--out", &csv_b])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(fs::read(&csv_a).unwrap(), fs::read(&csv_b).unwrap());

    let csv = fs::read_to_string(&csv_a).unwrap();
    assert!(csv
        .lines()
        .any(|l| l == "node_id,force,degree,avg_throughput_mbps,force_rank,throughput_rank"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 26);
    let spearman_line = csv.lines().find(|l| l.starts_with("# spearman=")).unwrap();
    let rho: f64 = spearman_line
        .trim_start_matches("# spearman=")
        .parse()
        .unwrap();
    assert!(rho > 0.0);
}

#[test]
fn sweep_exits_4_on_disconnected_topologies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("apart.json");
    fs::write(
        &path,
        r#"{"area_side": 1000.0, "coverage_radius": 100.0,
            "nodes": [{"id": 0, "x": 0.0, "y": 0.0}, {"id": 1, "x": 900.0, "y": 0.0}]}"#,
    )
    .unwrap();
    let csv = path_str(&dir.path().join("x.csv"));
    let res = run(&["sweep", "--topology", &path_str(&path), "--out", &csv]);
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn sweep_supports_thread_caps() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(dir.path());
    let csv_serial = path_str(&dir.path().join("serial.csv"));
    let csv_parallel = path_str(&dir.path().join("parallel.csv"));
    assert_eq!(
        run(&[
            "sweep",
            "--topology",
            &grid,
            "--threads",
            "1",
            "--out",
            &csv_serial
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        run(&[
            "sweep",
            "--topology",
            &grid,
            "--threads",
            "4",
            "--out",
            &csv_parallel
        ])
        .status
        .code(),
        Some(0)
    );
    // Worker count must never leak into the results.
    assert_eq!(
        fs::read(&csv_serial).unwrap(),
        fs::read(&csv_parallel).unwrap()
    );
}

#[test]
fn batch_writes_one_csv_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("runs");
    let res = run(&[
        "batch",
        "--n-topologies",
        "2",
        "--base-seed",
        "42",
        "--out-dir",
        &path_str(&out_dir),
    ]);
    assert_eq!(res.status.code(), Some(0));
    assert!(out_dir.join("sweep_42.csv").exists());
    assert!(out_dir.join("sweep_43.csv").exists());
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("seed 42:"));
    assert!(stdout.contains("batch complete: 2 succeeded, 0 failed"));
    let csv = fs::read_to_string(out_dir.join("sweep_42.csv")).unwrap();
    assert!(csv.contains("# seed=42"));
}

#[test]
fn unwritable_output_paths_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(dir.path());
    let missing = path_str(&dir.path().join("no/such/dir/out.csv"));
    let res = run(&["sweep", "--topology", &grid, "--out", &missing]);
    assert_eq!(res.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("error"), "stderr: {stderr}");
}

#[test]
fn every_subcommand_documents_flags_and_defaults() {
    for (cmd, needle, has_defaults) in [
        ("gen-grid", "250", true),
        ("gen-random", "275", true),
        ("score", "force-radius", true),
        ("route", "gateway", false),
        ("simulate", "capacity", true),
        ("sweep", "threads", true),
        ("batch", "base-seed", true),
    ] {
        let res = run(&[cmd, "--help"]);
        assert_eq!(res.status.code(), Some(0), "{cmd} --help failed");
        let text = String::from_utf8_lossy(&res.stdout);
        assert!(text.contains(needle), "{cmd} --help lacks {needle}");
        if has_defaults {
            assert!(text.contains("default"), "{cmd} --help lists no defaults");
        }
    }
}
