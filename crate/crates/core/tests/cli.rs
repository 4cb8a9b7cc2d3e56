use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ppoll(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppoll")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const PIECE: &str = "onset,pitch,duration\n0,60,1\n1,62,1\n2,64,1\n3,65,1\n4,60,1\n5,62,1\n6,64,1\n7,65,1\n8,70,1\n";

fn with_piece() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("piece.csv"), PIECE).unwrap();
    dir
}

#[test]
fn discover_writes_json_and_summary() {
    let dir = with_piece();
    let o = ppoll(dir.path(), &["discover", "--in", "piece.csv", "--alg", "cosiatec", "--out", "p.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o);
    assert!(line.starts_with("patterns=") && line.contains(" occurrences="), "{line}");
    let v = json(&dir.path().join("p.json"));
    assert_eq!(v["piece"], "piece");
    assert_eq!(v["algorithm"], "cosiatec");
}

#[test]
fn discover_default_output_name() {
    let dir = with_piece();
    let o = ppoll(dir.path(), &["--out-dir", "out", "discover", "--in", "piece.csv", "--alg", "siar:2"]);
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("out/piece.siar_2.json").exists());
}

#[test]
fn discover_exit_codes() {
    let dir = with_piece();
    assert_eq!(code(&ppoll(dir.path(), &["discover", "--in", "piece.csv", "--alg", "nope"])), 3);
    assert_eq!(code(&ppoll(dir.path(), &["discover", "--in", "missing.csv", "--alg", "sia"])), 2);
    fs::write(dir.path().join("bad.csv"), "onset,pitch,duration\n0,sixty,1\n").unwrap();
    assert_eq!(code(&ppoll(dir.path(), &["discover", "--in", "bad.csv", "--alg", "sia"])), 2);
    assert_eq!(code(&ppoll(dir.path(), &["discover", "--in", "piece.csv"])), 3);
}

#[test]
fn monophonic_flag_rejects_overlaps() {
    let dir = with_piece();
    fs::write(dir.path().join("poly.csv"), "onset,pitch,duration\n0,60,2\n1,62,1\n").unwrap();
    let o = ppoll(dir.path(), &["discover", "--in", "poly.csv", "--alg", "sia", "--monophonic"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&ppoll(dir.path(), &["discover", "--in", "poly.csv", "--alg", "sia"])), 0);
}

fn synth(dir: &Path, name: &str, seed: &str) {
    let o = ppoll(dir, &["synth", "--seed", seed, "--name", name]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn synth_writes_three_files_and_echoes_seed() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "s", "42");
    for f in ["s.csv", "s.truth.json", "s.config.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert_eq!(json(&dir.path().join("s.config.json"))["seed"], 42);

    let o = ppoll(dir.path(), &["synth", "--name", "e"]);
    assert_eq!(code(&o), 0);
    let seed = json(&dir.path().join("e.config.json"))["seed"].as_u64().unwrap();
    assert!(stdout(&o).contains(&format!("seed={seed}")));

    // the echoed config reproduces the piece
    let o = ppoll(dir.path(), &["synth", "--synth-config", "e.config.json", "--name", "e2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(dir.path().join("e.csv")).unwrap(), fs::read(dir.path().join("e2.csv")).unwrap());
}

#[test]
fn synth_rejects_cap_at_or_above_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ppoll(dir.path(), &["synth", "--seed", "1", "--cap", "1"])), 3);
    assert_eq!(code(&ppoll(dir.path(), &["synth", "--seed", "1", "--cap", "1.5"])), 3);
}

fn discovered(dir: &Path, name: &str) {
    for alg in ["cosiatec", "siar:2"] {
        let o = ppoll(dir, &["discover", "--in", &format!("{name}.csv"), "--alg", alg]);
        assert_eq!(code(&o), 0);
    }
}

fn curve(dir: &Path, file: &str) -> Vec<f64> {
    fs::read_to_string(dir.join(file))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn poll_curve_is_sum_and_weights_scale() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "s", "5");
    discovered(d, "s");
    let run = |args: &[&str]| {
        let mut all = vec!["poll", "--piece", "s.csv"];
        all.extend_from_slice(args);
        let o = ppoll(d, &all);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(&["--patterns", "s.cosiatec.json", "--name", "a"]);
    run(&["--patterns", "s.siar_2.json", "--name", "b"]);
    run(&["--patterns", "s.cosiatec.json", "s.siar_2.json", "--name", "ab"]);
    run(&["--patterns", "s.cosiatec.json", "s.siar_2.json", "--weights", "cosiatec=2", "--name", "w"]);
    let (a, b, ab, w) = (curve(d, "a.curve.csv"), curve(d, "b.curve.csv"), curve(d, "ab.curve.csv"), curve(d, "w.curve.csv"));
    for i in 0..ab.len() {
        assert_eq!(ab[i], a[i] + b[i]);
        assert_eq!(w[i], 2.0 * a[i] + b[i]);
    }
    for f in ["ab.smoothed.csv", "ab.d1.csv", "ab.d2.csv", "ab.boundaries.csv", "ab.boundaries.json", "ab.presence.csv"] {
        assert!(d.join(f).exists(), "{f}");
    }
    assert!(!d.join("ab.scores.csv").exists());
}

#[test]
fn poll_presence_rows_put_truth_last() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "s", "6");
    discovered(d, "s");
    let o = ppoll(d, &["poll", "--patterns", "s.siar_2.json", "s.cosiatec.json", "--truth", "s.truth.json", "--name", "p"]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(d.join("p.presence.csv")).unwrap();
    let algs: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    let first_truth = algs.iter().position(|a| *a == "truth").unwrap();
    assert!(algs[first_truth..].iter().all(|a| *a == "truth"));
    assert!(algs[..first_truth].windows(2).filter(|w| w[0] != w[1]).count() <= 1, "algorithms are grouped");
    let width = text.lines().next().unwrap().split(',').count();
    assert!(text.lines().all(|l| l.split(',').count() == width));

    let scores = fs::read_to_string(d.join("p.scores.csv")).unwrap();
    let lines: Vec<&str> = scores.lines().collect();
    assert_eq!(lines[0], "piece,algorithm,precision,recall,f1");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("s,pp,"));
}

#[test]
fn poll_conflicting_pieces_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "s", "1");
    synth(d, "t", "2");
    let o = ppoll(d, &["poll", "--patterns", "s.truth.json", "t.truth.json"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn train_then_poll_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (n, s) in [("a", "1"), ("b", "2"), ("c", "3")] {
        synth(d, n, s);
        discovered(d, n);
    }
    let o = ppoll(
        d,
        &[
            "train-pp", "--seed", "4", "--windows", "3,5", "--orders", "1", "--lambdas", "0", "--flags", "second",
            "--patterns", "a.cosiatec.json", "b.cosiatec.json", "c.cosiatec.json", "--truth", "a.truth.json",
            "b.truth.json", "c.truth.json",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = json(&d.join("trained_params.json"));
    assert_eq!(t["seed"], 4);
    assert_eq!(t["params"]["use_first"], false);

    for n in ["a", "b"] {
        let o = ppoll(d, &["poll", "--patterns", &format!("{n}.cosiatec.json"), "--params", "trained_params.json", "--name", n]);
        assert_eq!(code(&o), 0);
        assert_eq!(json(&d.join(format!("{n}.boundaries.json")))["params"], t["params"]);
    }
    let o = ppoll(d, &["eval-boundaries", "--predicted", "a.boundaries.json", "b.boundaries.json", "--truth", "a.truth.json", "b.truth.json"]);
    assert_eq!(code(&o), 0);
    let eval = fs::read_to_string(d.join("eval.csv")).unwrap();
    let rows: Vec<&str> = eval.lines().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(rows, ["piece", "a", "b", "mean", "variance"]);

    let o = ppoll(d, &["eval-boundaries", "--predicted", "a.boundaries.json", "--truth", "b.truth.json"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn train_rejects_missing_annotations() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (n, s) in [("a", "1"), ("b", "2")] {
        synth(d, n, s);
    }
    let o = ppoll(d, &["train-pp", "--folds", "2", "--patterns", "a.truth.json", "b.truth.json", "--truth", "a.truth.json"]);
    assert_eq!(code(&o), 4);
}

fn feature_table(d: &Path) {
    for (n, s) in [("a", "1"), ("b", "2"), ("c", "3"), ("e", "4"), ("f", "5")] {
        synth(d, n, s);
    }
    let o = ppoll(
        d,
        &[
            "features", "--seed", "2", "--patterns", "a.truth.json", "b.truth.json", "c.truth.json", "e.truth.json",
            "f.truth.json", "--pieces", "a.csv", "b.csv", "c.csv", "e.csv", "f.csv", "--baseline-repeats", "1",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn features_classify_importance() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    feature_table(d);
    let text = fs::read_to_string(d.join("features.csv")).unwrap();
    assert!(text.starts_with("# seed=2\n"));

    let o = ppoll(d, &["classify", "--features", "features.csv", "--folds", "5", "--repeats", "1", "--trees", "20"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&d.join("cv_report.json"));
    assert_eq!(r["folds"], 5);
    assert_eq!(r["seed"], 0);
    assert_eq!(r["results"].as_array().unwrap().len(), 3);
    assert_eq!(stdout(&o).lines().count(), 3);

    let o = ppoll(d, &["importance", "--features", "features.csv", "--runs", "2", "--trees", "10", "--seed", "8"]);
    assert_eq!(code(&o), 0);
    let r = json(&d.join("importance.json"));
    assert_eq!(r["seed"], 8);
    assert_eq!(r["features"].as_array().unwrap().len(), 26);
}

#[test]
fn classify_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    feature_table(d);
    let o = ppoll(d, &["classify", "--features", "features.csv", "--folds", "500"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("class '"));
    fs::write(d.join("nolabel.csv"), "a,b\n1,2\n3,4\n").unwrap();
    assert_eq!(code(&ppoll(d, &["classify", "--features", "nolabel.csv"])), 2);
    assert_eq!(code(&ppoll(d, &["classify", "--features", "features.csv", "--pca", "1.5"])), 3);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("cfg.json"), r#"{"seed": 11, "synth": {"name": "cfg", "occurrences": 3}}"#).unwrap();
    assert_eq!(code(&ppoll(d, &["--config", "cfg.json", "synth"])), 0);
    let c = json(&d.join("cfg.config.json"));
    assert_eq!((c["seed"].as_u64(), c["occurrences"].as_u64()), (Some(11), Some(3)));

    assert_eq!(code(&ppoll(d, &["--config", "cfg.json", "synth", "--seed", "12", "--name", "flag"])), 0);
    let c = json(&d.join("flag.config.json"));
    assert_eq!((c["seed"].as_u64(), c["occurrences"].as_u64()), (Some(12), Some(3)));

    fs::write(d.join("bad.json"), r#"{"synth": {"colour": "red"}}"#).unwrap();
    assert_eq!(code(&ppoll(d, &["--config", "bad.json", "synth"])), 3);
    fs::write(d.join("bad2.json"), r#"{"colour": "red"}"#).unwrap();
    assert_eq!(code(&ppoll(d, &["--config", "bad2.json", "synth"])), 3);
}

#[test]
fn help_and_usage_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ppoll(dir.path(), &["--help"])), 0);
    assert_eq!(code(&ppoll(dir.path(), &["frobnicate"])), 3);
}

#[test]
fn no_temporary_files_left_behind() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "s", "3");
    let leftovers: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}
