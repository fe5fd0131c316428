use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn nomlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nomlab")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = nomlab(args);
    assert!(
        out.status.success(),
        "{args:?} failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn error_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("stderr has a line");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

#[test]
fn version_lists_bundled_digests() {
    let out = ok(&["--version"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("nomlab "), "{text}");
    for name in ["prefixes.txt", "suffixes.txt", "stems.txt.gz", "prompts.json"] {
        let line = text.lines().find(|l| l.contains(name)).unwrap_or_else(|| panic!("{name} missing: {text}"));
        let hex = line.split("sha256:").nth(1).expect("sha256 digest");
        assert!(hex.len() == 64 && hex.chars().all(|c| c.is_ascii_hexdigit()), "{line}");
    }
}

#[test]
fn usage_errors_exit_one() {
    let out = nomlab(&["count", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(nomlab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(nomlab(&[]).status.code(), Some(1));
}

#[test]
fn missing_input_is_a_json_input_error() {
    let out = nomlab(&["stats", "--lexicon", "/nonexistent/lexicon.tsv"]);
    assert_eq!(out.status.code(), Some(1));
    let err = error_json(&out);
    assert_eq!(err["error"]["kind"], "input");
    assert!(err["error"]["message"].as_str().unwrap().contains("/nonexistent/lexicon.tsv"));
}

#[test]
fn computation_failure_exits_two() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("mgl.tsv");
    let bases = dir.path().join("bases.tsv");
    ok(&["mgl-train", "--lexicon", s(&fixture("lexicon.tsv.gz")), "--classes", "ish", "--out", s(&model)]);
    fs::write(&bases, "form\tclass\nzorbable\table\n").unwrap();
    let out = nomlab(&["mgl-predict", "--model", s(&model), "--in", s(&bases)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["kind"], "internal");
}

#[test]
fn extract_writes_lexicon_and_manifest() {
    let dir = TempDir::new().unwrap();
    let lexicon = dir.path().join("lexicon.tsv");
    ok(&["extract", "--corpus", s(&fixture("mini.txt")), "--out", s(&lexicon)]);
    let text = fs::read_to_string(&lexicon).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("base\tclass\tbase_count\tity_count\tness_count"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    assert!(rows.iter().any(|r| r[..2] == ["selfish", "ish"] && r[4] == "2"), "{text}");
    assert!(rows.iter().any(|r| r[..2] == ["readable", "able"] && r[3] == "2"), "{text}");

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("lexicon.tsv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "extract");
    assert_eq!(manifest["inputs"].as_object().unwrap().len(), 1);
    let digest = manifest["outputs"][s(&lexicon)].as_str().expect("output digest");
    assert_eq!(digest.len(), 64);
}

#[test]
fn stdout_output_writes_manifest_only_on_request() {
    let dir = TempDir::new().unwrap();
    let out = ok(&["count", "--corpus", s(&fixture("mini.txt"))]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("word\tcount\n"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    let manifest = dir.path().join("m.json");
    ok(&["--manifest", s(&manifest), "count", "--corpus", s(&fixture("mini.txt"))]);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(manifest).unwrap()).unwrap();
    assert!(m["outputs"]["-"].is_string());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("nomlab.conf");
    fs::write(&config, "# nonce defaults\nper_length = 2\nclasses = ish\nseed = 7\n").unwrap();
    let from_config = dir.path().join("a.tsv");
    let from_flags = dir.path().join("b.tsv");
    ok(&["--config", s(&config), "nonce", "--out", s(&from_config)]);
    ok(&["nonce", "--per-length", "2", "--classes", "ish", "--seed", "7", "--out", s(&from_flags)]);
    assert_eq!(fs::read(&from_config).unwrap(), fs::read(&from_flags).unwrap());
    let rows = fs::read_to_string(&from_config).unwrap();
    assert!(rows.lines().skip(1).all(|l| l.ends_with("\tish")), "{rows}");

    let overridden = dir.path().join("c.tsv");
    ok(&["--config", s(&config), "nonce", "--seed", "8", "--out", s(&overridden)]);
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("c.tsv.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"]["seed"], "8");
    assert_eq!(m["config"]["per_length"], "2");

    fs::write(&config, "no_such_option = 1\n").unwrap();
    let out = nomlab(&["--config", s(&config), "nonce"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"]["kind"], "input");
}

#[test]
fn bases_table_for_the_probing_adapter() {
    let dir = TempDir::new().unwrap();
    let bases = dir.path().join("bases.tsv");
    ok(&["nonce", "--per-length", "1", "--seed", "42", "--bases-out", s(&bases), "--out", s(&dir.path().join("n.tsv"))]);
    let text = fs::read_to_string(&bases).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("base\tclass\td_ity\td_ness"));
    let mut n = 0;
    for line in lines {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 4, "{line}");
        assert!(cols[0].ends_with(cols[1]), "{line}");
        assert!(cols[2].ends_with("ity") && cols[3] == format!("{}ness", cols[0]), "{line}");
        n += 1;
    }
    assert!(n >= 4, "{text}");
}

#[test]
fn subcommands_chain_through_files() {
    let dir = TempDir::new().unwrap();
    let p = |name: &str| dir.path().join(name);
    ok(&["count", "--corpus", s(&fixture("corpus.txt")), "--out", s(&p("freq.tsv"))]);
    ok(&["extract", "--corpus", s(&p("freq.tsv")), "--out", s(&p("lexicon.tsv"))]);
    ok(&["stats", "--lexicon", s(&p("lexicon.tsv")), "--out", s(&p("stats.tsv"))]);
    ok(&["mgl-train", "--lexicon", s(&p("lexicon.tsv")), "--out", s(&p("mgl.tsv"))]);
    ok(&["mgl-predict", "--model", s(&p("mgl.tsv")), "--in", s(&fixture("nonces.tsv")), "--out", s(&p("mgl_pred.tsv"))]);
    ok(&[
        "gcm-train",
        "--lexicon",
        s(&p("lexicon.tsv")),
        "--fit",
        "--max-queries",
        "200",
        "--out",
        s(&p("gcm.tsv")),
    ]);
    ok(&["gcm-predict", "--model", s(&p("gcm.tsv")), "--in", s(&fixture("nonces.tsv")), "--out", s(&p("gcm_pred.tsv"))]);

    let fitted: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(p("gcm.tsv.manifest.json")).unwrap()).unwrap();
    assert!(fitted["config"]["fitted_sensitivity"].is_string() || fitted["config"]["fitted_sensitivity"].is_number());

    let nonces = fs::read_to_string(fixture("nonces.tsv")).unwrap().lines().count() - 1;
    for name in ["mgl_pred.tsv", "gcm_pred.tsv"] {
        let text = fs::read_to_string(p(name)).unwrap();
        assert_eq!(text.lines().count() - 1, nonces, "{name}");
        assert!(text.lines().skip(1).all(|l| {
            let choice = l.split('\t').nth(2).unwrap();
            choice == "ity" || choice == "ness"
        }));
    }

    let out = p("report");
    ok(&[
        "eval",
        "--lexicon",
        s(&p("lexicon.tsv")),
        "--nonce-probes",
        s(&fixture("probes_nonce.jsonl.gz")),
        "--predictions",
        &format!("mgl={}", s(&p("mgl_pred.tsv"))),
        "--predictions",
        &format!("gcm={}", s(&p("gcm_pred.tsv"))),
        "--out",
        s(&out),
    ]);
    let files: Vec<String> =
        fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert!(files.iter().any(|f| f.ends_with(".csv")), "{files:?}");
    assert!(files.iter().any(|f| f.ends_with(".svg")), "{files:?}");
    assert!(files.iter().any(|f| f == "manifest.json"), "{files:?}");
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = TempDir::new().unwrap();
    let run = |threads: &str| {
        let out = dir.path().join(format!("gcm_{threads}.tsv"));
        let curve = dir.path().join(format!("curve_{threads}.csv"));
        ok(&[
            "--threads",
            threads,
            "gcm-train",
            "--lexicon",
            s(&fixture("lexicon.tsv.gz")),
            "--classes",
            "able,ish",
            "--fit",
            "--max-queries",
            "150",
            "--curve",
            s(&curve),
            "--out",
            s(&out),
        ]);
        (fs::read(out).unwrap(), fs::read(curve).unwrap())
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("nonces.tsv");
    let args = ["nonce", "--per-length", "3", "--seed", "42", "--out", s(&out)];
    ok(&args);
    let first = (fs::read(&out).unwrap(), fs::read(dir.path().join("nonces.tsv.manifest.json")).unwrap());
    ok(&args);
    let second = (fs::read(&out).unwrap(), fs::read(dir.path().join("nonces.tsv.manifest.json")).unwrap());
    assert_eq!(first, second);
}

#[test]
fn parse_emits_json_lines() {
    let out = ok(&["parse", "happiness", "precancellation", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let records: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 3);
    assert_eq!(records[0]["stem"], "happy");
    assert_eq!(records[1]["is_complex"], true);
    assert_eq!(records[2]["is_complex"], false);
}

#[test]
fn documented_invocations() {
    let dir = TempDir::new().unwrap();
    let p = |name: &str| dir.path().join(name);
    ok(&["extract", "--corpus", s(&fixture("mini.txt")), "--out", s(&p("lexicon.tsv"))]);

    ok(&["gcm-train", "--lexicon", s(&fixture("lexicon.tsv.gz")), "--classes", "able,ish", "--out", s(&p("m.tsv"))]);
    fs::write(p("nonce.tsv"), "form\tclass\nturgeish\tish\nvorable\table\n").unwrap();
    let out = ok(&["gcm-predict", "--model", s(&p("m.tsv")), "--in", s(&p("nonce.tsv")), "--mode", "token"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("base\tclass\tchoice\tp_ity\tp_ness"));
    assert_eq!(text.lines().count(), 3);

    let report = p("report");
    ok(&[
        "eval",
        "--probes",
        s(&fixture("probes_seen.jsonl.gz")),
        "--lexicon",
        s(&fixture("lexicon.tsv.gz")),
        "--out",
        s(&report),
    ]);
    let names: Vec<String> =
        fs::read_dir(&report).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert!(names.iter().filter(|f| f.ends_with(".csv")).count() >= 2, "{names:?}");
    assert!(names.iter().any(|f| f.ends_with(".svg")), "{names:?}");
}
