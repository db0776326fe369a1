use std::fs;
use std::process::Command;

fn cipa() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cipa"))
}

#[test]
fn table1_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    for _ in 0..2 {
        let status = cipa().args(["table1", "--out"]).arg(&out).output().unwrap();
        assert!(status.status.success());
    }
    let first = fs::read(out.join("table1.csv")).unwrap();
    let manifest = fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("experiment = \"table1\""));
    assert!(out.join("plot_table1.py").exists());

    // rerun from the manifest's own config
    let again = dir.path().join("again");
    let cfg_path = dir.path().join("cfg.toml");
    let m = cipa_cli::output::Manifest::read(&out.join("manifest.toml")).unwrap();
    fs::write(&cfg_path, m.config.to_toml()).unwrap();
    let status = cipa().arg("table1").arg("--config").arg(&cfg_path).arg("--out").arg(&again).output().unwrap();
    assert!(status.status.success());
    assert_eq!(first, fs::read(again.join("table1.csv")).unwrap());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t2");
    let o = cipa()
        .args(["table2", "--trials", "3", "--iters", "2", "--degree", "2", "--seed", "9", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("table2.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "algorithm,m=1,m=2");
    let m = cipa_cli::output::Manifest::read(&out.join("manifest.toml")).unwrap();
    assert_eq!((m.seed, m.config.table2.trials, m.config.table2.degree), (9, 3, 2));
}

#[test]
fn errors_map_to_categories() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[table2]\nnope = 1\n").unwrap();
    let o = cipa().arg("table2").arg("--config").arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(cipa_cli::exit_code("parse")));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error[parse]"));

    let cfg = dir.path().join("graph.toml");
    fs::write(&cfg, "[graph]\nkind = \"circulant\"\nn = 10\ngenerators = [5]\n").unwrap();
    let o = cipa()
        .args(["graph", "gen", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(cipa_cli::exit_code("invalid-input")));
}

#[test]
fn empty_distributed_list_warns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("d.toml");
    fs::write(&cfg, "[distributed]\nsizes = []\n").unwrap();
    let o = cipa()
        .args(["distributed-check", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn graph_gen_writes_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let o = cipa().args(["graph", "gen", "--out"]).arg(dir.path()).output().unwrap();
    assert!(o.status.success());
    let edges = fs::read_to_string(dir.path().join("graph.edges")).unwrap();
    let g = cipa_core::Graph::read_edge_list(edges.as_bytes(), Some(1000)).unwrap();
    assert_eq!(g.edge_count(), 3000);
}
