//! End-to-end tests of the qent binary: exit codes, report shapes, and
//! byte-level determinism of emitted files.

use std::path::Path;
use std::process::{Command, Output};

fn qent(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qent"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("stdout is JSON")
}

#[test]
fn measure_reports_pinned_values_for_named_states() {
    let dir = tempfile::tempdir().unwrap();
    for (name, expected) in [
        ("ghz", 1.0),
        ("eq8_max", 2.0),
        ("product", 0.0),
        ("w", 3f64.log2()),
    ] {
        let file = format!("{name}.json");
        let out = qent(&["named", "--name", name, "--out", &file], dir.path());
        assert!(out.status.success(), "{name}: {out:?}");
        let out = qent(&["measure", "--input", &file], dir.path());
        assert!(out.status.success());
        let doc = json(&out);
        let value = doc["value"].as_f64().unwrap();
        assert!(
            (value - expected).abs() <= 1e-9,
            "{name}: measured {value}, expected {expected}"
        );
        assert_eq!(doc["log_base"], "bits");
    }
}

#[test]
fn classify_labels_the_fixture_states() {
    let dir = tempfile::tempdir().unwrap();
    for (name, class) in [
        ("product", "I"),
        ("bell_times_pure", "II"),
        ("ghz", "III-a"),
    ] {
        let file = format!("{name}.json");
        qent(&["named", "--name", name, "--out", &file], dir.path());
        let out = qent(&["classify", "--input", &file], dir.path());
        assert!(out.status.success());
        let doc = json(&out);
        assert_eq!(doc["class"], class, "{name}: {doc}");
        assert!(doc["Ec_bits"].is_number());
        assert!(doc["p"].as_array().unwrap().len() == 4);
    }
}

#[test]
fn decompose_and_verify_pass_on_ghz() {
    let dir = tempfile::tempdir().unwrap();
    qent(&["named", "--name", "ghz", "--out", "ghz.json"], dir.path());
    let out = qent(
        &["decompose", "--input", "ghz.json", "--all-orderings"],
        dir.path(),
    );
    assert!(out.status.success());
    let doc = json(&out);
    let trees = doc["trees"].as_array().unwrap();
    assert_eq!(trees.len(), 3);
    for t in trees {
        assert_eq!(t["report"]["pass"], true);
        assert_eq!(t["tree"]["leaf_weights"].as_array().unwrap().len(), 2);
    }

    let out = qent(&["verify", "--input", "ghz.json"], dir.path());
    assert!(out.status.success());
    let doc = json(&out);
    for m in doc["memberships"].as_array().unwrap() {
        assert_eq!(m["support_contained"], true);
        assert!(m["marginal_residual"].as_f64().unwrap() <= 1e-8);
    }
}

#[test]
fn random_emission_reparses_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = qent(
        &["random", "--dims", "2,3", "--seed", "7", "--out", "s.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("s.json")).unwrap();
    // validate re-emits nothing; re-run random with the same seed and compare
    let out = qent(&["random", "--dims", "2,3", "--seed", "7"], dir.path());
    assert_eq!(stdout(&out).trim_end(), text);

    // density output with rank
    let out = qent(
        &[
            "random", "--dims", "2,2", "--rank", "2", "--seed", "3", "--out", "d.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let out = qent(&["validate", "--input", "d.json"], dir.path());
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    qent(&["named", "--name", "w", "--out", "w.json"], dir.path());
    let a = qent(&["measure", "--input", "w.json"], dir.path());
    let b = qent(&["measure", "--input", "w.json"], dir.path());
    assert_eq!(a.stdout, b.stdout);

    let a = qent(
        &[
            "roof",
            "--input",
            "w.json",
            "--restarts",
            "3",
            "--max-iters",
            "30",
            "--seed",
            "11",
        ],
        dir.path(),
    );
    let b = qent(
        &[
            "roof",
            "--input",
            "w.json",
            "--restarts",
            "3",
            "--max-iters",
            "30",
            "--seed",
            "11",
        ],
        dir.path(),
    );
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    let dir = tempfile::tempdir().unwrap();

    // malformed JSON -> 2
    std::fs::write(dir.path().join("bad.json"), "{not json").unwrap();
    let out = qent(&["measure", "--input", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // wrong amplitude count -> 2 with a size diagnostic
    std::fs::write(
        dir.path().join("short.json"),
        r#"{"dims": [2,2], "amplitudes": [[1.0,0.0],[0.0,0.0],[0.0,0.0]]}"#,
    )
    .unwrap();
    let out = qent(&["measure", "--input", "short.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("size mismatch"), "stderr: {err}");

    // unnormalized amplitudes -> 1 (invariant failure)
    std::fs::write(
        dir.path().join("unnorm.json"),
        r#"{"dims": [2], "amplitudes": [[1.0,0.0],[1.0,0.0]]}"#,
    )
    .unwrap();
    let out = qent(&["measure", "--input", "unnorm.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = qent(&["validate", "--input", "unnorm.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // missing file -> 2
    let out = qent(&["measure", "--input", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // unknown named state -> 2
    let out = qent(&["named", "--name", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // dimension cap on the optimization subcommands -> 2
    qent(
        &[
            "random",
            "--dims",
            "2,2,2,2,2,2,2",
            "--seed",
            "1",
            "--out",
            "big.json",
        ],
        dir.path(),
    );
    let out = qent(&["ree", "--input", "big.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("exceeds the cap"), "stderr: {err}");
}

#[test]
fn nats_mode_scales_entropies() {
    let dir = tempfile::tempdir().unwrap();
    qent(&["named", "--name", "ghz", "--out", "ghz.json"], dir.path());
    let out = qent(
        &["measure", "--input", "ghz.json", "--log-base", "nats"],
        dir.path(),
    );
    let doc = json(&out);
    let value = doc["value"].as_f64().unwrap();
    assert!((value - std::f64::consts::LN_2).abs() <= 1e-9);
    assert_eq!(doc["log_base"], "nats");
}

#[test]
fn measure_with_explicit_ordering_subset() {
    let dir = tempfile::tempdir().unwrap();
    qent(&["named", "--name", "w", "--out", "w.json"], dir.path());
    let out = qent(
        &["measure", "--input", "w.json", "--ordering", "BAC"],
        dir.path(),
    );
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["per_ordering"].as_array().unwrap().len(), 1);

    let out = qent(
        &["measure", "--input", "w.json", "--sample-orderings", "2"],
        dir.path(),
    );
    let doc = json(&out);
    assert_eq!(doc["per_ordering"].as_array().unwrap().len(), 2);

    // ordering that is not a permutation -> 2
    let out = qent(
        &["measure", "--input", "w.json", "--ordering", "ABD"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn roof_subcommand_matches_oracle_on_a_mixture() {
    let dir = tempfile::tempdir().unwrap();
    qent(
        &[
            "random", "--dims", "2,2", "--rank", "2", "--seed", "21", "--out", "mix.json",
        ],
        dir.path(),
    );
    let out = qent(
        &[
            "roof",
            "--input",
            "mix.json",
            "--ensemble-size",
            "4",
            "--restarts",
            "12",
            "--max-iters",
            "200",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["ensemble_size"], 4);
    assert!(doc["value"].as_f64().unwrap() >= 0.0);
}
