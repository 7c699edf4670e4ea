use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_revoqsim"));
    cmd.env_remove("REVOQSIM_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn revoqsim")
}

fn manifest(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("manifest on stdout")
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn schema() -> Value {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/manifest.schema.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn revenc_defaults_finish_quickly() {
    let start = Instant::now();
    let out = run(&["revenc"]);
    assert!(start.elapsed() < Duration::from_secs(10), "took {:?}", start.elapsed());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&out);
    assert_eq!(m["config"]["trials"], 10_000);
    assert_eq!(m["passed"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ok   honest-return-accepted"));
}

#[test]
fn exit_codes() {
    let bad = run(&["revenc", "--n", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("`n`"));

    assert_eq!(run(&["revenc", "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(run(&["forge", "--strategy", "nope"]).status.code(), Some(2));

    let failing = run(&["sponge", "--trials", "300", "--bound-scale", "0.0001", "--quiet"]);
    assert_eq!(failing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failing.stderr).contains("FAIL bound-dominates-curves"));
}

#[test]
fn file_and_flags_merge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# unforge sweep\nn = 4\ns = 6\nk = 2\ntrials = 300\nseed = 5\n").unwrap();
    let out = run(&["unforge", "--config", cfg.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let c = &manifest(&out)["config"];
    assert_eq!(c["params"]["n"], "4");
    assert_eq!(c["params"]["s"], "6");
    assert_eq!(c["params"]["k"], "1");
    assert_eq!(c["trials"], 300);
    assert_eq!(c["seed"], 5);
    assert_eq!(c["seed_source"], "file");
}

#[test]
fn seed_sources() {
    let out = bin().args(["forge", "--trials", "50"]).env("REVOQSIM_SEED", "77").output().unwrap();
    let c = &manifest(&out)["config"];
    assert_eq!((c["seed"].as_u64(), c["seed_source"].as_str()), (Some(77), Some("env")));

    let out = bin().args(["forge", "--trials", "50", "--seed", "9"]).env("REVOQSIM_SEED", "77").output().unwrap();
    let c = &manifest(&out)["config"];
    assert_eq!((c["seed"].as_u64(), c["seed_source"].as_str()), (Some(9), Some("flag")));

    let c = &manifest(&run(&["forge", "--trials", "50"]))["config"];
    assert_eq!(c["seed_source"], "default");
}

#[test]
fn digests_are_reproducible() {
    let args = ["pointfn", "--trials", "400", "--seed", "11", "--strategy", "wrong-key-decryptor"];
    let (a, b) = (manifest(&run(&args)), manifest(&run(&args)));
    assert_eq!(a["digest"], b["digest"]);
    assert_eq!(a["results"], b["results"]);
    let c = manifest(&run(&["pointfn", "--trials", "400", "--seed", "12", "--strategy", "wrong-key-decryptor"]));
    assert_ne!(a["digest"], c["digest"]);
}

#[test]
fn manifests_match_the_schema() {
    let validator = jsonschema::validator_for(&schema()).unwrap();
    let runs: [&[&str]; 8] = [
        &["revenc", "--trials", "100"],
        &["revprog", "--trials", "100"],
        &["pointfn", "--trials", "100"],
        &["unforge", "--trials", "100", "--mode", "classical", "--strategy", "random-guess"],
        &["forge", "--trials", "20"],
        &["hybrid-audit", "--trials", "50"],
        &["distinct-extraction", "--trials", "20", "--instances", "5"],
        &["sponge", "--trials", "50", "--queries", "0,2"],
    ];
    for args in runs {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let m = manifest(&out);
        let errors: Vec<String> = validator.iter_errors(&m).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
    let mut broken = manifest(&run(&["revenc", "--trials", "10"]));
    broken["digest"] = Value::from("short");
    assert!(!validator.is_valid(&broken));
}

#[test]
fn csv_and_transcript_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("nested/summary.csv");
    let jsonl = dir.path().join("t.jsonl");
    let out = run(&[
        "revenc",
        "--trials",
        "25",
        "--format",
        "csv",
        "--out",
        csv_path.to_str().unwrap(),
        "--transcripts",
        jsonl.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.get(0), Some("experiment"));
    assert!(headers.iter().any(|h| h == "p_hat"));
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "revenc");

    let text = std::fs::read_to_string(&jsonl).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 25);
    for (i, line) in lines.iter().enumerate() {
        assert_eq!(line["trial"], i);
        assert_eq!(line["experiment"], "revenc");
        assert!(line["win"].is_boolean());
        assert!(line["revocation"].is_string());
    }
}

#[test]
fn sponge_csv_is_the_attack_curve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = run(&["sponge", "--trials", "40", "--queries", "0,4", "--format", "csv", "--out", path.to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    // Two budgets for each of the three default strategies.
    assert_eq!(reader.records().count(), 6);
}

#[test]
fn regenerated_fixtures_match_the_committed_ones() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["regen-fixtures", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let committed = workspace_root().join("fixtures/v1");
    let mut names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 8);
    for name in names {
        let fresh = std::fs::read_to_string(dir.path().join(&name)).unwrap();
        let old = std::fs::read_to_string(committed.join(&name)).unwrap();
        assert_eq!(fresh, old, "{name:?} drifted; rerun regen-fixtures");
    }
}
