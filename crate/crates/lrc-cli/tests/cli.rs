//! Integration tests driving the `lrc` binary end to end.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ex1_params(dir: &Path) -> String {
    let path = dir.join("params.json");
    let out = lrc(&[
        "params", "--n", "14", "--M", "9", "--r", "4", "--delta", "2", "--alpha", "1", "--q",
        "2", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path.to_str().unwrap().to_string()
}

fn encode_input(dir: &Path, params: &str, bytes: &[u8]) -> (String, String) {
    let input = dir.join("input.bin");
    fs::write(&input, bytes).unwrap();
    let shares = dir.join("shares");
    let out = lrc(&[
        "encode",
        "--params",
        params,
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        shares.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (
        input.to_str().unwrap().to_string(),
        shares.to_str().unwrap().to_string(),
    )
}

fn test_bytes(len: usize) -> Vec<u8> {
    (0..len).map(|i| (i * 131 + 17) as u8).collect()
}

#[test]
fn params_reports_example_values() {
    let out = lrc(&[
        "params", "--n", "14", "--M", "9", "--r", "4", "--delta", "2", "--alpha", "1", "--q", "2",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["N"], 11);
    assert_eq!(v["dmin"], 4);
    assert_eq!(v["beta0"], 3);
    assert_eq!(v["optimality_case"], "remainder_group");

    let out = lrc(&[
        "params", "--n", "15", "--M", "28", "--r", "3", "--delta", "3", "--alpha", "4", "--q", "8",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["N"], 36);
    assert_eq!(v["dmin"], 5);
    assert_eq!(v["optimality_case"], "full_groups");
}

#[test]
fn nonconforming_params_exit_2_naming_the_inequality() {
    let out = lrc(&[
        "params", "--n", "14", "--M", "12", "--r", "4", "--delta", "2", "--alpha", "1", "--q", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ceil(M/alpha) mod r"), "stderr: {stderr}");
}

#[test]
fn forced_params_build_with_warning() {
    let out = lrc(&[
        "params", "--n", "13", "--M", "7", "--r", "4", "--delta", "2", "--alpha", "1", "--q", "2",
        "--force",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["certified"], false);
    assert_eq!(v["optimality_case"], "forced");
}

#[test]
fn encode_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let params = ex1_params(dir.path());
    let bytes = test_bytes(100);
    let (_, shares_a) = encode_input(dir.path(), &params, &bytes);

    let dir_b = tempfile::tempdir().unwrap();
    let params_b = ex1_params(dir_b.path());
    let (_, shares_b) = encode_input(dir_b.path(), &params_b, &bytes);

    for id in 0..14 {
        let a = fs::read(format!("{shares_a}/node_{id}.lrc")).unwrap();
        let b = fs::read(format!("{shares_b}/node_{id}.lrc")).unwrap();
        assert_eq!(a, b, "share {id} differs between runs");
    }
}

#[test]
fn nine_symbol_input_yields_fourteen_shares() {
    // one byte per symbol under example-1 parameters: a single codeword
    let dir = tempfile::tempdir().unwrap();
    let params = ex1_params(dir.path());
    let (_, shares) = encode_input(dir.path(), &params, &test_bytes(9));
    let mut files: Vec<String> = fs::read_dir(&shares)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files.len(), 14);
    for id in 0..14 {
        assert!(files.contains(&format!("node_{id}.lrc")));
    }
    let output = dir.path().join("out.bin");
    let out = lrc(&[
        "reconstruct",
        "--share-dir",
        &shares,
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read(&output).unwrap(), test_bytes(9));
}

#[test]
fn empty_input_round_trips_to_empty() {
    let dir = tempfile::tempdir().unwrap();
    let params = ex1_params(dir.path());
    let (_, shares) = encode_input(dir.path(), &params, &[]);
    let output = dir.path().join("out.bin");
    let out = lrc(&[
        "reconstruct",
        "--share-dir",
        &shares,
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read(&output).unwrap().len(), 0);
}

#[test]
fn repair_rewrites_byte_identical_share() {
    let dir = tempfile::tempdir().unwrap();
    let params = ex1_params(dir.path());
    let (_, shares) = encode_input(dir.path(), &params, &test_bytes(64));
    for target in [1usize, 4, 12] {
        let path = format!("{shares}/node_{target}.lrc");
        let original = fs::read(&path).unwrap();
        fs::remove_file(&path).unwrap();
        let out = lrc(&["repair", "--share-dir", &shares, "--node", &target.to_string()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(fs::read(&path).unwrap(), original, "node {target} not byte-identical");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains("rebuilt from"), "stderr: {stderr}");
    }
}

#[test]
fn repair_of_overwhelmed_group_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let params = ex1_params(dir.path());
    let (_, shares) = encode_input(dir.path(), &params, &test_bytes(64));
    fs::remove_file(format!("{shares}/node_0.lrc")).unwrap();
    fs::remove_file(format!("{shares}/node_1.lrc")).unwrap();
    let out = lrc(&["repair", "--share-dir", &shares, "--node", "0"]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("overwhelmed"), "stderr: {stderr}");
}

#[test]
fn reconstruct_survives_any_sampled_triple() {
    let dir = tempfile::tempdir().unwrap();
    let params = ex1_params(dir.path());
    let bytes = test_bytes(200);
    let (_, shares) = encode_input(dir.path(), &params, &bytes);
    let pristine = dir.path().join("pristine");
    fs::create_dir(&pristine).unwrap();
    for id in 0..14 {
        fs::copy(
            format!("{shares}/node_{id}.lrc"),
            pristine.join(format!("node_{id}.lrc")),
        )
        .unwrap();
    }
    for (a, b, c) in [(0usize, 1, 2), (0, 5, 10), (3, 4, 13), (10, 11, 12)] {
        for id in 0..14 {
            let dst = format!("{shares}/node_{id}.lrc");
            let _ = fs::remove_file(&dst);
            if id != a && id != b && id != c {
                fs::copy(pristine.join(format!("node_{id}.lrc")), &dst).unwrap();
            }
        }
        let output = dir.path().join("out.bin");
        let out = lrc(&[
            "reconstruct",
            "--share-dir",
            &shares,
            "--output",
            output.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "triple ({a},{b},{c})");
        assert_eq!(fs::read(&output).unwrap(), bytes, "triple ({a},{b},{c})");
    }
}

#[test]
fn reconstruct_fails_cleanly_past_dmin() {
    let dir = tempfile::tempdir().unwrap();
    let params = ex1_params(dir.path());
    let (_, shares) = encode_input(dir.path(), &params, &test_bytes(64));
    // a worst-case pattern of size dmin = 4 extended to 5 erasures
    for id in [0usize, 1, 2, 3, 5] {
        fs::remove_file(format!("{shares}/node_{id}.lrc")).unwrap();
    }
    let output = dir.path().join("out.bin");
    let out = lrc(&[
        "reconstruct",
        "--share-dir",
        &shares,
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_quick_is_labeled_and_exits_0() {
    let out = lrc(&[
        "verify", "--n", "14", "--M", "9", "--r", "4", "--delta", "2", "--alpha", "1", "--q", "2",
        "--level", "quick", "--samples", "40",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["exhaustive"], false);
    assert_eq!(v["mode"], "probe");
}

#[test]
fn verify_exhaustive_example1() {
    let out = lrc(&[
        "verify", "--n", "14", "--M", "9", "--r", "4", "--delta", "2", "--alpha", "1", "--q", "2",
        "--workers", "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dmin"]["bound"], 4);
    assert_eq!(v["dmin"]["agree"], true);
    assert_eq!(v["dmin"]["achieves_bound"], true);
    assert!(v["worst_case"].as_array().map(|a| !a.is_empty()).unwrap_or(false));
}

#[test]
fn verify_exhaustive_refuses_oversized_enumeration() {
    // (40, 28, 7, 2): dmin = 10, and C(40, 9) far exceeds the budget.
    let out = lrc(&[
        "verify", "--n", "40", "--M", "28", "--r", "7", "--delta", "2", "--alpha", "1", "--q",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("budget"), "stderr: {stderr}");
}

#[test]
fn simulate_deterministic_and_accounts_bandwidth() {
    let dir = tempfile::tempdir().unwrap();
    let params = ex1_params(dir.path());
    let run = |seed: &str| {
        let out = lrc(&[
            "simulate", "--params", &params, "--rounds", "60", "--failures", "const:1", "--seed",
            seed,
        ]);
        assert!(out.status.success());
        out.stdout
    };
    let a = run("11");
    let b = run("11");
    assert_eq!(a, b, "same seed must give identical output");
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["local_repairs"], 60);
    assert_eq!(v["data_loss_events"], 0);
    // alpha = 1: downloads equal contacts, and contacts stay within r = 4
    assert_eq!(v["total_symbols_downloaded"], v["total_nodes_contacted"]);
    let mean = v["mean_nodes_contacted_per_local_repair"].as_f64().unwrap();
    assert!(mean <= 4.0);

    let out = lrc(&[
        "simulate", "--params", &params, "--rounds", "1", "--failures", "const:0", "--seed", "1",
        "--inject", "0,1,2,3",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["data_loss_events"], 1);

    let out = lrc(&[
        "simulate", "--params", &params, "--rounds", "20", "--failures", "const:0", "--seed", "1",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["total_symbols_downloaded"], 0);
    assert_eq!(v["data_loss_events"], 0);
}
