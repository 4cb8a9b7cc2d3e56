//! Runs a fixed `ppoll` pipeline covering every subcommand, twice in separate directories,
//! and compares the outputs byte for byte with each other and with `tests/golden/`.
//! Set `UPDATE_GOLDEN=1` to rewrite the golden files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

const PIECES: [(&str, u64); 3] = [("a", 42), ("b", 43), ("c", 44)];
const ALGORITHMS: [&str; 2] = ["cosiatec", "siar:2"];

fn pattern_file(piece: &str, alg: &str) -> String {
    format!("{piece}.{}.json", alg.replace(':', "_"))
}

/// The pipeline as `(label, args)` steps, run in order inside the work directory.
pub fn steps() -> Vec<(String, Vec<String>)> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let mut out = Vec::new();
    for (name, seed) in PIECES {
        out.push(("synth".into(), s(&["synth", "--seed", &seed.to_string(), "--name", name, "--midi"])));
        for alg in ALGORITHMS {
            out.push(("discover".into(), s(&["discover", "--in", &format!("{name}.csv"), "--alg", alg])));
        }
    }
    out.push(("discover".into(), s(&["discover", "--in", "a.mid", "--alg", "siatec-compress:cr", "--out", "a.mid.json"])));
    out.push((
        "poll".into(),
        s(&[
            "poll", "--patterns", &pattern_file("a", "cosiatec"), &pattern_file("a", "siar:2"), "--truth", "a.truth.json",
            "--piece", "a.csv", "--window", "3", "--order", "1", "--name", "a",
        ]),
    ));
    let mut train = s(&["train-pp", "--seed", "1", "--windows", "3,5", "--orders", "1,2", "--lambdas", "0,0.5", "--patterns"]);
    for (name, _) in PIECES {
        for alg in ALGORITHMS {
            train.push(pattern_file(name, alg));
        }
    }
    train.push("--truth".into());
    train.extend(PIECES.iter().map(|(n, _)| format!("{n}.truth.json")));
    out.push(("train-pp".into(), train));
    for (name, _) in PIECES {
        out.push((
            "poll".into(),
            s(&[
                "poll", "--patterns", &pattern_file(name, "cosiatec"), &pattern_file(name, "siar:2"), "--truth",
                &format!("{name}.truth.json"), "--params", "trained_params.json", "--weights", "cosiatec=2",
                "--normalize", "--name", &format!("{name}.trained"),
            ]),
        ));
    }
    out.push((
        "eval-boundaries".into(),
        s(&[
            "eval-boundaries", "--predicted", "a.trained.boundaries.json", "b.trained.boundaries.json",
            "c.trained.boundaries.json", "--truth", "a.truth.json", "b.truth.json", "c.truth.json",
        ]),
    ));
    out.push((
        "features".into(),
        s(&[
            "features", "--seed", "3", "--patterns", "a.truth.json", "b.truth.json", "c.truth.json", "--pieces", "a.csv",
            "b.csv", "c.csv", "--baseline-repeats", "2",
        ]),
    ));
    out.push(("classify".into(), s(&["--config", "classify.json", "classify", "--features", "features.csv"])));
    out.push((
        "importance".into(),
        s(&["importance", "--features", "features.csv", "--runs", "4", "--trees", "25", "--seed", "5"]),
    ));
    out
}

const CLASSIFY_CONFIG: &str = r#"{"seed": 7, "classify": {"folds": 3, "repeats": 2, "trees": 25}}"#;

fn run_pipeline(bin: &str, dir: &Path) -> Result<Vec<String>, String> {
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    fs::write(dir.join("classify.json"), CLASSIFY_CONFIG).map_err(|e| e.to_string())?;
    let mut labels = Vec::new();
    for (label, args) in steps() {
        let out = Command::new(bin).args(&args).current_dir(dir).output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!(
                "`ppoll {}` exited with {:?}: {}",
                args.join(" "),
                out.status.code(),
                String::from_utf8_lossy(&out.stderr).trim()
            ));
        }
        fs::write(dir.join(format!("stdout.{:02}.txt", labels.len())), &out.stdout).map_err(|e| e.to_string())?;
        labels.push(label);
    }
    Ok(labels)
}

fn files(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut m = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        m.insert(name, fs::read(&path).map_err(|e| e.to_string())?);
    }
    Ok(m)
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn diff(a: &BTreeMap<String, Vec<u8>>, b: &BTreeMap<String, Vec<u8>>, what: &str) -> Vec<String> {
    let mut out = Vec::new();
    for (name, bytes) in a {
        match b.get(name) {
            Some(other) if other == bytes => {}
            Some(_) => out.push(format!("{name} ({what})")),
            None => out.push(format!("{name} (missing from {what})")),
        }
    }
    out.extend(b.keys().filter(|k| !a.contains_key(*k)).map(|k| format!("{k} (only in {what})")));
    out
}

/// Returns the number of output files and the names of those that differ.
pub fn run_twice_and_compare(bin: &str, dir: &Path) -> Result<(usize, Vec<String>), String> {
    let (first, second) = (dir.join("first"), dir.join("second"));
    let labels = run_pipeline(bin, &first)?;
    run_pipeline(bin, &second)?;
    let (a, b) = (files(&first)?, files(&second)?);
    let mut diffs = diff(&a, &b, "rerun");

    let golden = golden_dir();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        let _ = fs::remove_dir_all(&golden);
        fs::create_dir_all(&golden).map_err(|e| e.to_string())?;
        for (name, bytes) in &a {
            fs::write(golden.join(name), bytes).map_err(|e| e.to_string())?;
        }
    }
    match files(&golden) {
        Ok(g) => diffs.extend(diff(&a, &g, "golden")),
        Err(e) => diffs.push(format!("golden files unreadable: {e}")),
    }
    let mut covered: Vec<String> = labels;
    covered.sort();
    covered.dedup();
    if covered.len() < 8 {
        diffs.push(format!("pipeline covers only {} subcommands", covered.len()));
    }
    Ok((a.len(), diffs))
}
