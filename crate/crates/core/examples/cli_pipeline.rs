//! Drives the `ppoll` front end in-process: synthesize, discover, poll and score.

use pattern_poll::cli;

fn main() {
    let dir = std::env::temp_dir().join("ppoll-pipeline");
    let out = dir.to_string_lossy().into_owned();
    let path = |f: &str| dir.join(f).to_string_lossy().into_owned();

    let steps: Vec<Vec<String>> = vec![
        vec!["synth".into(), "--seed".into(), "42".into(), "--name".into(), "demo".into()],
        vec!["discover".into(), "--in".into(), path("demo.csv"), "--alg".into(), "cosiatec".into()],
        vec!["discover".into(), "--in".into(), path("demo.csv"), "--alg".into(), "siar:2".into()],
        vec![
            "poll".into(),
            "--patterns".into(),
            path("demo.cosiatec.json"),
            path("demo.siar_2.json"),
            "--truth".into(),
            path("demo.truth.json"),
            "--name".into(),
            "demo".into(),
        ],
    ];
    for step in steps {
        let mut args = vec!["ppoll".to_string(), "--out-dir".into(), out.clone()];
        args.extend(step);
        println!("$ {}", args.join(" "));
        let code = cli::run(&args);
        if code != 0 {
            std::process::exit(code);
        }
    }
    println!("outputs in {out}");
}
