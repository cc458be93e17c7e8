use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_splicer"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("splicer-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn strip_metadata(text: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    assert!(v["metadata"]["timestamp"].is_u64());
    v.as_object_mut().unwrap().remove("metadata");
    v
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let out = bin().args(["preset", "thm-nonexistent"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let cfg = scratch("bad.cfg");
    fs::write(&cfg, "preset = uniformity\nalpha = 81\n").unwrap();
    let out = bin().args(["preset", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn config_runs_are_identical_apart_from_metadata() {
    let cfg = scratch("thm.cfg");
    fs::write(&cfg, "preset = thm-complete-graph\nseed = 3\nn = 10\nseeds = 4\nsizes = 32,64\nruns = 2\n").unwrap();
    let mut summaries = Vec::new();
    for i in 0..2 {
        let json = scratch(&format!("thm-{i}.json"));
        let csv = scratch(&format!("thm-{i}.csv"));
        let status = bin()
            .args(["preset", "--config", cfg.to_str().unwrap()])
            .args(["--out", json.to_str().unwrap(), "--csv", csv.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(matches!(status.code(), Some(0) | Some(1)));
        summaries.push((strip_metadata(&fs::read_to_string(&json).unwrap()), fs::read_to_string(&csv).unwrap()));
    }
    assert_eq!(summaries[0], summaries[1]);
    assert!(summaries[0].1.starts_with("check,n,seed_index,value\n"));
}

#[test]
fn failing_assertion_exits_one() {
    // Five trees of K_4 cannot be within 0.01 of uniform over 16 outcomes.
    let out = bin()
        .args(["preset", "uniformity", "--trials", "5", "--no-metadata"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
    assert!(v.get("metadata").is_none());
}

#[test]
fn generate_and_reload_edge_list() {
    let path = scratch("k4.txt");
    let status = bin().args(["generate", "--kind", "complete", "--n", "4", "--out", path.to_str().unwrap()]).status().unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text, "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let tree = bin().args(["sample-tree", "--graph", path.to_str().unwrap(), "--seed", "9"]).output().unwrap();
    assert!(tree.status.success());
    assert!(String::from_utf8_lossy(&tree.stdout).starts_with("tree 4 0\n"));
}

#[test]
fn malformed_graph_file_names_the_line() {
    let path = scratch("loop.txt");
    fs::write(&path, "4 2\n0 1\n3 3\n").unwrap();
    let out = bin().args(["expansion", "--graph", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn verify_correlation_exactly_on_k4() {
    let out = bin()
        .args(["verify", "--kind", "complete", "--n", "4", "--check", "correlation", "--set", "0-1,2-3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["exact"]["joint"], 4);
    assert_eq!(v["report"]["exact"]["total"], 16);
}

#[test]
fn sparsify_writes_weighted_edges() {
    let out = bin().args(["sparsify", "--n", "120", "--seed", "2"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let w = splicer_core::io::read_weighted(&text).unwrap();
    assert!(w.graph().m() <= 2 * 119);
    assert_eq!(splicer_core::io::write_weighted(&w), text);
}

#[test]
fn route_sim_csv_has_one_row_per_trial() {
    let out = bin()
        .args(["route-sim", "--n", "30", "--trials", "4", "--pairs", "20", "--failure-prob", "0.1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial,seed,failure_prob,delivered_fraction,ceiling_fraction,mean_hops,mean_switches"
    );
    assert_eq!(lines.count(), 4);
}
