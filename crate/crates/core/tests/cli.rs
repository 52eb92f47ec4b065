use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hlog(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hlog"));
    cmd.args(args).env_remove("HLOG_CONSTANTS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let run = || {
        let result = hlog(&["atomic", "--depth", "5", "--seed", "9", "--out", out.to_str().unwrap()], &[]);
        assert!(String::from_utf8_lossy(&result.stdout).contains("criterion"));
        let files = listing(&out);
        fs::remove_dir_all(&out).unwrap();
        files
    };
    let first = run();
    let names: Vec<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    for expected in ["atomic.config.json", "atomic.atoms.csv", "atomic.decomposition.json", "atomic.report.json"] {
        assert!(names.contains(&expected), "{names:?}");
    }
    let second = run();
    for ((name, a), (_, b)) in first.iter().zip(&second) {
        assert!(a == b, "{name} differs between runs");
    }
    assert_eq!(first.len(), second.len());
}

#[test]
fn stein_with_a_single_delta() {
    let dir = tempfile::tempdir().unwrap();
    let out = hlog(
        &["stein", "--out", dir.path().to_str().unwrap(), "--param", "delta=0.001"],
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("stein.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2, "{csv}");
}

#[test]
fn config_file_drives_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let config = dir.path().join("run.json");
    let text = serde_json::json!({
        "experiment": "fourier",
        "depth": 6,
        "seed": 3,
        "params": { "order": 4.0 },
        "output_path": out_dir,
    });
    fs::write(&config, text.to_string()).unwrap();
    let out = hlog(&["--config", config.to_str().unwrap()], &[]);
    assert!(out.status.code().is_some(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("fourier.a_4.csv").exists(), "{:?}", listing(&out_dir).iter().map(|f| &f.0).collect::<Vec<_>>());
    let echoed = fs::read_to_string(out_dir.join("fourier.config.json")).unwrap();
    assert!(echoed.contains("\"seed\": 3"), "{echoed}");
}

#[test]
fn excessive_depth_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = hlog(&["atomic", "--depth", "15", "--out", dir.path().to_str().unwrap()], &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("depth"));
}

#[test]
fn corrupted_constants_manifest_names_the_entry() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("constants.json");
    let mut k: serde_json::Value =
        serde_json::from_str(include_str!("../constants.json")).unwrap();
    k["constants"]["atomic_c0"]["value"] = serde_json::json!(-3.0);
    fs::write(&manifest, k.to_string()).unwrap();
    let out = hlog(
        &["atomic", "--depth", "4", "--out", dir.path().join("o").to_str().unwrap()],
        &[("HLOG_CONSTANTS", &manifest)],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("atomic_c0"));
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let out = hlog(&["nonsense", "--out", "/tmp/x"], &[]);
    assert_eq!(out.status.code(), Some(2));
}
