//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod oracles;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use oracles::{keys, max_matching, mtp_table, random_point_set, rng};
use pattern_poll::analysis::{
    cross_validate, feature_importance, fit_scaler_pca, sample_random_excerpts, Annotation, ClassifierKind,
    ClassifierParams, CvConfig, FeatureStatus, ImportanceConfig, LabeledDataset,
};
use pattern_poll::discovery::{cosiatec, sia, siatec, AlgorithmSpec};
use pattern_poll::evaluation::{boundary_prf, occurrence_recovery, truth_boundaries};
use pattern_poll::polling::{extract_boundaries, polling_curve, savgol_smooth, AlgorithmWeights, BoundarySet, PpParams};
use pattern_poll::synthesis::{synthesize, SynthConfig, SyntheticPiece};
use pattern_poll::{PatternOccurrence, PatternRecord, Point, Time};
use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, TestRunner};
use rand::seq::SliceRandom;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn pieces(n: u64) -> Vec<SyntheticPiece> {
    (0..n).map(|s| synthesize(&SynthConfig::default().with_seed(s)).unwrap()).collect()
}

fn c1_sia_oracle() -> Outcome {
    const LIMIT: Duration = Duration::from_secs(5);
    let mut r = rng(1);
    let sets: Vec<_> = (0..200).map(|_| random_point_set(&mut r, 12)).collect();
    let t = Instant::now();
    let mut bad = 0;
    for d in &sets {
        let got: Vec<_> = sia(d)
            .into_iter()
            .map(|m| ((m.vector.dt, m.vector.dp), keys(&m.points)))
            .collect();
        let want: Vec<_> = mtp_table(d).into_iter().collect();
        if got != want {
            bad += 1;
        }
    }
    let el = t.elapsed();
    outcome(bad == 0 && el < LIMIT, format!("{bad}/200 mismatches, {} (limit 5s)", secs(el)))
}

fn c2_tec_invariants() -> Outcome {
    let mut r = rng(1);
    let sets: Vec<_> = (0..200).map(|_| random_point_set(&mut r, 12)).collect();
    let (mut unsound, mut incomplete, mut not_partition) = (0, 0, 0);
    for d in &sets {
        let all = keys(d.points());
        // completeness is a siatec property; cosiatec translators refer to the points left at
        // each step and are only checked for soundness
        let tecs = siatec(d);
        let cover = cosiatec(d);
        for t in tecs.iter().chain(&cover) {
            for u in &t.translators {
                if !t.pattern.iter().all(|p| all.contains(&(p.onset + u.dt, p.pitch as i32 + u.dp))) {
                    unsound += 1;
                }
            }
        }
        if d.len() <= 10 {
            for t in &tecs {
                let got: BTreeSet<_> = t.translators.iter().map(|u| (u.dt, u.dp)).collect();
                if got != oracles::translators(&t.pattern, d) {
                    incomplete += 1;
                }
            }
        }
        let mut seen = BTreeSet::new();
        let mut disjoint = true;
        for t in &cover {
            for p in &t.covered {
                disjoint &= seen.insert(p.key());
            }
        }
        if !disjoint || seen != all {
            not_partition += 1;
        }
    }
    outcome(
        unsound == 0 && incomplete == 0 && not_partition == 0,
        format!("unsound translators {unsound}, incomplete translator lists {incomplete}, cosiatec non-partitions {not_partition}/200"),
    )
}

fn c3_planted_recovery(pieces: &[SyntheticPiece]) -> Outcome {
    const LIMIT: Duration = Duration::from_secs(60);
    let t = Instant::now();
    let mut not_contained = 0;
    let mut recovered_pieces = 0;
    let mut worst = Ratio::from_integer(1);
    for p in pieces {
        // an MTP occurs at its points and at their translation by its vector
        let mtps: Vec<BTreeSet<_>> = sia(&p.piece)
            .iter()
            .flat_map(|m| {
                let moved: Vec<_> = m.points.iter().map(|q| (q.onset + m.vector.dt, q.pitch as i32 + m.vector.dp)).collect();
                [keys(&m.points), moved.into_iter().collect()]
            })
            .collect();
        let planted = p.planted();
        for occ in &planted {
            let k = keys(occ.points());
            if !mtps.iter().any(|m| k.is_subset(m)) {
                not_contained += 1;
            }
        }
        let found = AlgorithmSpec::Cosiatec.run(&p.piece);
        let report = occurrence_recovery(&found, &planted, Ratio::new(4, 5));
        if report.all_recovered() {
            recovered_pieces += 1;
        }
        for pr in &report.planted {
            worst = worst.min(pr.best_jaccard);
        }
    }
    let el = t.elapsed();
    let frac = recovered_pieces as f64 / pieces.len() as f64;
    outcome(
        not_contained == 0 && frac >= 0.9 && el < LIMIT,
        format!(
            "uncontained planted occurrences {not_contained}; cosiatec full recovery in {recovered_pieces}/{} pieces ({frac:.2}, need 0.90), worst jaccard {worst}; {} (limit 60s)",
            pieces.len(),
            secs(el)
        ),
    )
}

fn c4_pp_self_consistency(pieces: &[SyntheticPiece]) -> Outcome {
    let params = PpParams { window: 3, order: 1, lambda: 0.0, use_first: false, use_second: true };
    let mut imperfect = Vec::new();
    for p in pieces {
        let curve = polling_curve(&p.ground_truth, &AlgorithmWeights::new(), Time::ONE, p.span()).unwrap();
        let pred = extract_boundaries(&curve, &params).unwrap();
        let truth = truth_boundaries(&p.ground_truth, curve.origin, curve.resolution);
        let s = boundary_prf(&pred, &truth, Time::ONE);
        if s.f1 != Ratio::from_integer(1) {
            imperfect.push(p.seed);
        }
    }
    outcome(imperfect.is_empty(), format!("F1 < 1 on {} of {} pieces {:?}", imperfect.len(), pieces.len(), imperfect))
}

fn records_strategy() -> impl Strategy<Value = Vec<(usize, Vec<(i64, i64)>)>> {
    prop::collection::vec((0usize..3, prop::collection::vec((0i64..36, 1i64..12), 1..4)), 0..6)
}

fn build(spec: &[(usize, Vec<(i64, i64)>)]) -> Vec<PatternRecord> {
    spec.iter()
        .enumerate()
        .map(|(i, (alg, occs))| {
            let occs = occs
                .iter()
                .map(|&(s, len)| {
                    let e = (s + len).min(40);
                    PatternOccurrence::new((s..e.max(s + 1)).map(|t| Point::crotchet(t, 60)).collect()).unwrap()
                })
                .collect();
            PatternRecord::new(format!("alg{alg}"), format!("p{i}"), occs).unwrap()
        })
        .collect()
}

fn c5_polling_properties() -> Outcome {
    let span = (Time::ZERO, Time::from_int(41));
    let mut weights = AlgorithmWeights::new();
    weights.set("alg0", Ratio::new(3, 2)).set("alg1", Ratio::from_integer(1)).set("alg2", Ratio::new(1, 3));
    let mut runner = TestRunner::new(PtConfig { cases: 256, failure_persistence: None, ..PtConfig::default() });
    let linear = runner.run(&(records_strategy(), records_strategy()), |(a, b)| {
        let (a, b) = (build(&a), build(&b));
        let mut ab = a.clone();
        ab.extend(b.iter().cloned());
        let whole = polling_curve(&ab, &weights, Time::ONE, span).unwrap();
        let parts = polling_curve(&a, &weights, Time::ONE, span)
            .unwrap()
            .add(&polling_curve(&b, &weights, Time::ONE, span).unwrap())
            .unwrap();
        prop_assert_eq!(whole, parts);
        Ok(())
    });
    let mut runner = TestRunner::new(PtConfig { cases: 256, failure_persistence: None, ..PtConfig::default() });
    let scaling = runner.run(&(records_strategy(), 1i64..7, 1i64..5), |(a, num, den)| {
        let recs = build(&a);
        let k = Ratio::new(num, den);
        let algs = ["alg0", "alg1", "alg2"];
        let base = polling_curve(&recs, &weights, Time::ONE, span).unwrap();
        let scaled = polling_curve(&recs, &weights.scaled(k, &algs), Time::ONE, span).unwrap();
        prop_assert_eq!(&base.scaled(k), &scaled);
        for params in [PpParams::default(), PpParams { window: 3, order: 1, ..PpParams::default() }] {
            prop_assert_eq!(extract_boundaries(&base, &params).unwrap(), extract_boundaries(&scaled, &params).unwrap());
        }
        Ok(())
    });
    outcome(
        linear.is_ok() && scaling.is_ok(),
        format!("linearity over 256 cases: {}; weight scaling and lambda=0 boundary invariance over 256 cases: {}", describe(&linear), describe(&scaling)),
    )
}

fn describe<T: std::fmt::Debug>(r: &Result<(), proptest::test_runner::TestError<T>>) -> String {
    match r {
        Ok(()) => "ok".to_string(),
        Err(e) => format!("{e}"),
    }
}

fn c6_savgol_reproduction() -> Outcome {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for window in [5usize, 7, 9] {
        for order in 0..window {
            for _ in 0..20 {
                let degree = r.random_range(0..=order);
                let coeffs: Vec<f64> = (0..=degree).map(|_| r.random_range(-1.0..1.0)).collect();
                let n = r.random_range(window..60);
                let x0 = r.random_range(0.0..n as f64);
                let values: Vec<f64> = (0..n)
                    .map(|t| {
                        let x = (t as f64 - x0) / n as f64;
                        coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
                    })
                    .collect();
                let s = savgol_smooth(&values, window, order).unwrap();
                let h = window / 2;
                for t in h..n - h {
                    worst = worst.max((s[t] - values[t]).abs());
                }
                cases += 1;
            }
        }
    }
    outcome(worst < 1e-9, format!("{cases} polynomials, max interior error {worst:.2e} (limit 1e-9)"))
}

fn c7_matching_oracle() -> Outcome {
    let mut r = rng(7);
    let mut bad = 0;
    for _ in 0..500 {
        let draw = |r: &mut rand_chacha::ChaCha8Rng| {
            let n = r.random_range(0..=8);
            let mut v: Vec<i64> = (0..n).map(|_| r.random_range(0..16)).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let (p, t) = (draw(&mut r), draw(&mut r));
        let tol = r.random_range(0..=2);
        let s = boundary_prf(&BoundarySet::from_indices(p.clone()), &BoundarySet::from_indices(t.clone()), Time::from_int(tol));
        let m = max_matching(&p, &t, tol);
        let frac = |a: usize, b: usize| if b == 0 { Ratio::from_integer(0) } else { Ratio::new(a as i64, b as i64) };
        if s.matches != m || s.precision != frac(m, p.len()) || s.recall != frac(m, t.len()) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{bad}/500 disagreements with exhaustive matching"))
}

fn c8_pca_numerics() -> Outcome {
    let mut r = rng(8);
    let (mut ortho, mut recon, mut mono) = (0.0f64, 0.0f64, true);
    for _ in 0..100 {
        let n = r.random_range(5..40);
        let d = r.random_range(2..9);
        let mix: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let z: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
                (0..d).map(|j| (0..d).map(|k| mix[j][k] * z[k]).sum::<f64>() + 3.0 * j as f64).collect()
            })
            .collect();
        let m = fit_scaler_pca(&rows, d).unwrap();
        for a in 0..d {
            for b in 0..d {
                let dot: f64 = m.components[a].iter().zip(&m.components[b]).map(|(x, y)| x * y).sum();
                ortho = ortho.max((dot - if a == b { 1.0 } else { 0.0 }).abs());
            }
        }
        for row in &rows {
            let back = m.inverse_transform(&m.transform(row));
            for (x, y) in back.iter().zip(row) {
                recon = recon.max((x - y).abs());
            }
        }
        mono &= m.explained_variance_ratio.windows(2).all(|w| w[0] >= w[1]);
        mono &= m.explained_variance_ratio.iter().sum::<f64>() <= 1.0 + 1e-12;
    }
    outcome(
        ortho < 1e-9 && recon < 1e-9 && mono,
        format!("max gram deviation {ortho:.2e}, max reconstruction error {recon:.2e} (limits 1e-9), variance ratios monotone: {mono}"),
    )
}

fn p1_fixture() -> LabeledDataset {
    let synth = pieces(100);
    let corpus: Vec<_> = synth.iter().map(|p| p.piece.clone()).collect();
    let annotations: Vec<Annotation> = synth
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            let p1 = p.ground_truth.iter().find(|r| r.id == "P1").unwrap();
            p1.occurrences().iter().map(move |o| Annotation { piece: i, occurrence: o.clone() }).collect::<Vec<_>>()
        })
        .collect();
    let planted: Vec<PatternOccurrence> = annotations.iter().map(|a| a.occurrence.clone()).collect();
    let random = sample_random_excerpts(&corpus, &annotations, 1, 9).unwrap();
    assert_eq!((planted.len(), random.len()), (200, 200));
    LabeledDataset::from_occurrences([("P1", planted.as_slice()), ("random", random.as_slice())])
}

fn c9_classifier_baselines() -> Outcome {
    let data = p1_fixture();
    let cfg = CvConfig {
        seed: 9,
        classifiers: vec![ClassifierKind::Rf],
        params: ClassifierParams { trees: 100, ..ClassifierParams::default() },
        ..CvConfig::default()
    };
    assert_eq!((cfg.folds, cfg.repeats), (10, 3));
    let real = cross_validate(&data, &cfg).unwrap().results[0].accuracy_mean;
    let mut labels = data.labels.clone();
    labels.shuffle(&mut rng(10));
    let shuffled = cross_validate(&data.with_labels(labels).unwrap(), &cfg).unwrap().results[0].accuracy_mean;
    let baseline = 0.5;
    outcome(
        real >= 0.9 && (shuffled - baseline).abs() <= 0.10,
        format!("rf accuracy {real:.3} (need >= 0.90); label-shuffled {shuffled:.3} (need {baseline:.2} +/- 0.10)"),
    )
}

fn c10_importance() -> Outcome {
    let mut r = rng(11);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..200 {
        let c = i % 2;
        let mut row = vec![c as f64];
        row.extend((0..5).map(|_| r.random::<f64>()));
        rows.push(row);
        labels.push(format!("g{c}"));
    }
    let names = std::iter::once("label_copy".to_string()).chain((0..5).map(|j| format!("noise{j}"))).collect();
    let data = LabeledDataset::new(names, rows, labels).unwrap();
    let report = feature_importance(&data, &ImportanceConfig { runs: 20, seed: 42, ..ImportanceConfig::default() }).unwrap();
    let label_ok = report.status_of("label_copy") == Some(FeatureStatus::Confirmed);
    let noise: Vec<String> = report.features[1..].iter().map(|f| format!("{}:{}/20", f.name, f.hits)).collect();
    let noise_ok = report.features[1..].iter().all(|f| f.status == FeatureStatus::Rejected);
    outcome(label_ok && noise_ok, format!("label_copy {:?}; noise hits {}", report.features[0].status, noise.join(" ")))
}

fn c11_cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mismatches = cli_golden::run_twice_and_compare(env!("CARGO_BIN_EXE_ppoll"), dir.path());
    match mismatches {
        Ok((n, diffs)) if diffs.is_empty() => outcome(true, format!("{n} output files byte-identical across reruns and golden files")),
        Ok((n, diffs)) => outcome(false, format!("{}/{n} outputs differ: {}", diffs.len(), diffs.join(", "))),
        Err(e) => outcome(false, e),
    }
}

mod cli_golden;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let synth = pieces(50);
    let criteria: Vec<Criterion> = vec![
        ("sia oracle equivalence", Box::new(c1_sia_oracle)),
        ("siatec/cosiatec invariants", Box::new(c2_tec_invariants)),
        ("planted-repeat guarantee", Box::new(|| c3_planted_recovery(&synth))),
        ("pattern polling self-consistency", Box::new(|| c4_pp_self_consistency(&synth))),
        ("polling curve linearity and scaling", Box::new(c5_polling_properties)),
        ("savitzky-golay polynomial reproduction", Box::new(c6_savgol_reproduction)),
        ("boundary metric oracle", Box::new(c7_matching_oracle)),
        ("pca numerics", Box::new(c8_pca_numerics)),
        ("classifier baselines", Box::new(c9_classifier_baselines)),
        ("shadow-feature importance", Box::new(c10_importance)),
        ("cli determinism", Box::new(c11_cli_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
