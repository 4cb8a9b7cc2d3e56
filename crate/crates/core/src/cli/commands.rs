use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::args::*;
use super::{CliError, Output};
use crate::analysis::{
    cross_validate, feature_importance, sample_random_excerpts, Annotation, ClassifierParams, Components, CvConfig,
    ImportanceConfig, LabeledDataset, Preprocess,
};
use crate::evaluation::{boundary_prf, truth_boundaries, PrfScore};
use crate::io::{
    emit_pattern_json, emit_points_csv, load_pattern_file, load_piece_with, write_smf, MidiOptions, PatternFile,
};
use crate::model::{group_by_algorithm, PatternRecord, PointSet};
use crate::polling::{
    extract_boundaries, polling_curve, savgol_smooth, train_pp, AlgorithmWeights, BoundarySet, ParamGrid,
    PollingCurve, PpParams, TrainConfig, TrainingPiece,
};
use crate::synthesis::{synthesize, SynthConfig, TRUTH_ALGORITHM};
use crate::time::{Rational, Time};

type CliResult<T> = Result<T, CliError>;

pub(crate) fn dispatch(cli: &Cli) -> CliResult<()> {
    let mut out = Output::new(cli);
    match &cli.command {
        Command::Discover(a) => discover(cli, a, &mut out),
        Command::Poll(a) => poll(a, &mut out),
        Command::TrainPp(a) => train(cli, a, &mut out),
        Command::EvalBoundaries(a) => eval(a, &mut out),
        Command::Synth(a) => synth(cli, a, &mut out),
        Command::Features(a) => features(cli, a, &mut out),
        Command::Classify(a) => classify(cli, a, &mut out),
        Command::Importance(a) => importance(cli, a, &mut out),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn read_patterns(path: &Path) -> CliResult<PatternFile> {
    load_pattern_file(&read_text(path)?).map_err(|e| CliError::from(e).context(path))
}

fn read_piece(path: &Path, opts: &InputArgs) -> CliResult<PointSet> {
    let midi = MidiOptions { track: opts.track, monophonic: opts.monophonic };
    let ps = load_piece_with(path, &midi).map_err(|e| CliError::from(e).context(path))?;
    if opts.monophonic {
        ps.check_monophonic().map_err(|e| CliError::from(e).context(path))?;
    }
    Ok(ps)
}

fn piece_id(ps: &PointSet) -> String {
    ps.title.clone().unwrap_or_else(|| "piece".into())
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn safe_name(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

/// All files must name the same piece.
fn common_piece<'a>(files: impl IntoIterator<Item = (&'a Path, &'a str)>) -> CliResult<String> {
    let mut seen: Option<(&Path, &str)> = None;
    for (path, piece) in files {
        match seen {
            None => seen = Some((path, piece)),
            Some((p0, id)) if id != piece => {
                return Err(CliError::inconsistent(format!(
                    "{} is for piece '{piece}' but {} is for piece '{id}'",
                    path.display(),
                    p0.display()
                )))
            }
            Some(_) => {}
        }
    }
    Ok(seen.map(|(_, id)| id.to_string()).unwrap_or_default())
}

fn occurrence_span<'a>(records: impl IntoIterator<Item = &'a PatternRecord>) -> Option<(Time, Time)> {
    records.into_iter().flat_map(|r| r.occurrences()).map(|o| o.span()).reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
}

fn union(a: Option<(Time, Time)>, b: Option<(Time, Time)>) -> Option<(Time, Time)> {
    match (a, b) {
        (Some(a), Some(b)) => Some((a.0.min(b.0), a.1.max(b.1))),
        (a, b) => a.or(b),
    }
}

fn ratio_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn prf_row(piece: &str, algorithm: &str, (p, r, f): (f64, f64, f64)) -> String {
    format!("{piece},{algorithm},{p},{r},{f}\n")
}

// ---------------------------------------------------------------------------------------------

fn discover(cli: &Cli, a: &DiscoverArgs, out: &mut Output) -> CliResult<()> {
    let spec = a.spec().map_err(CliError::config)?;
    let ps = read_piece(&a.input, &a.input_opts)?;
    let piece = piece_id(&ps);
    let records = spec.run(&ps);
    let occurrences: usize = records.iter().map(|r| r.occurrences().len()).sum();
    let file = PatternFile { piece: piece.clone(), algorithm: spec.to_string(), records };
    let json = emit_pattern_json(&file);
    let path = match &a.out {
        Some(p) => p.clone(),
        None => cli.out_dir.join(format!("{}.{}.json", safe_name(&piece), safe_name(&spec.to_string()))),
    };
    super::write_atomic(&path, json.as_bytes())?;
    out.say(format!("patterns={} occurrences={occurrences}", file.records.len()));
    Ok(())
}

// ---------------------------------------------------------------------------------------------

/// A file holding either bare polling parameters or a `train-pp` result.
fn read_params(path: &Path) -> CliResult<PpParams> {
    let v: Value = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::input(format!("{}: invalid JSON: {e}", path.display())))?;
    let inner = v.get("params").cloned().unwrap_or(v);
    serde_json::from_value(inner).map_err(|e| CliError::input(format!("{}: not polling parameters: {e}", path.display())))
}

fn resolve_params(pp: &PpArgs) -> CliResult<PpParams> {
    let mut p = match &pp.params {
        Some(path) => read_params(path)?,
        None => PpParams::default(),
    };
    if let Some(w) = pp.window {
        p.window = w;
    }
    if let Some(o) = pp.order {
        p.order = o;
    }
    if let Some(l) = pp.lambda {
        p.lambda = l;
    }
    if pp.no_first {
        p.use_first = false;
    }
    if pp.no_second {
        p.use_second = false;
    }
    p.validate()?;
    if !p.use_first && !p.use_second {
        return Err(CliError::config("--no-first and --no-second together leave nothing to detect"));
    }
    Ok(p)
}

/// Written by `poll`, read by `eval-boundaries`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryFile {
    piece: String,
    algorithm: String,
    origin: Time,
    resolution: Time,
    params: PpParams,
    normalize: bool,
    boundaries: Vec<Time>,
}

fn curve_for(
    records: &[PatternRecord],
    weights: &AlgorithmWeights,
    resolution: Time,
    span: (Time, Time),
    normalize: bool,
) -> CliResult<PollingCurve> {
    let curve = polling_curve(records, weights, resolution, span)?;
    if !normalize {
        return Ok(curve);
    }
    let groups = group_by_algorithm(records);
    let algorithms: Vec<&str> = groups.iter().map(|(a, _)| a.as_str()).collect();
    let total = weights.total(&algorithms);
    if total.is_zero() {
        return Err(CliError::config("--normalize with a total weight of zero"));
    }
    Ok(curve.scaled(total.recip()))
}

fn series_csv(points: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut s = String::from("t,value\n");
    for (t, v) in points {
        let _ = writeln!(s, "{t},{v}");
    }
    s
}

fn poll(a: &PollArgs, out: &mut Output) -> CliResult<()> {
    let params = resolve_params(&a.pp)?;
    let files: Vec<(PathBuf, PatternFile)> =
        a.patterns.iter().map(|p| Ok((p.clone(), read_patterns(p)?))).collect::<CliResult<_>>()?;
    let truth = a.truth.as_ref().map(|p| Ok::<_, CliError>((p.clone(), read_patterns(p)?))).transpose()?;
    let mut ids: Vec<(&Path, &str)> = files.iter().map(|(p, f)| (p.as_path(), f.piece.as_str())).collect();
    if let Some((p, f)) = &truth {
        ids.push((p.as_path(), f.piece.as_str()));
    }
    let piece_ps = a.piece.as_ref().map(|p| read_piece(p, &InputArgs::default())).transpose()?;
    if let (Some(ps), Some(path)) = (&piece_ps, &a.piece) {
        ids.push((path.as_path(), ps.title.as_deref().unwrap_or("")));
    }
    let piece = common_piece(ids)?;

    let records: Vec<PatternRecord> = files.iter().flat_map(|(_, f)| f.records.iter().cloned()).collect();
    let mut span = occurrence_span(&records);
    if let Some((_, t)) = &truth {
        span = union(span, occurrence_span(&t.records));
    }
    if let Some(ps) = &piece_ps {
        span = union(span, ps.span());
    }
    let span = span.ok_or_else(|| CliError::input("the pattern files contain no occurrences"))?;

    let curve = curve_for(&records, &a.weights, a.resolution, span, a.normalize)?;
    let boundaries = extract_boundaries(&curve, &params)?;
    let smoothed = savgol_smooth(&curve.to_f64(), params.window, params.order)?;
    let t = |k: f64| curve.origin.to_f64() + k * curve.resolution.to_f64();

    let name = &a.name;
    out.write(&format!("{name}.curve.csv"), series_csv(curve.to_f64().into_iter().enumerate().map(|(i, v)| (t(i as f64), v))))?;
    out.write(&format!("{name}.smoothed.csv"), series_csv(smoothed.iter().enumerate().map(|(i, &v)| (t(i as f64), v))))?;
    // the same edge-extended differences the boundary extraction sees
    let n = smoothed.len();
    let mut ext = Vec::with_capacity(n + 2);
    ext.push(smoothed[0]);
    ext.extend_from_slice(&smoothed);
    ext.push(smoothed[n - 1]);
    let d1: Vec<f64> = ext.windows(2).map(|w| w[1] - w[0]).collect();
    let d2: Vec<f64> = d1.windows(2).map(|w| w[1] - w[0]).collect();
    out.write(&format!("{name}.d1.csv"), series_csv(d1.iter().enumerate().map(|(i, &v)| (t(i as f64 - 0.5), v))))?;
    out.write(&format!("{name}.d2.csv"), series_csv(d2.iter().enumerate().map(|(i, &v)| (t(i as f64), v))))?;

    let bfile = BoundaryFile {
        piece: piece.clone(),
        algorithm: "pp".into(),
        origin: curve.origin,
        resolution: curve.resolution,
        params,
        normalize: a.normalize,
        boundaries: boundaries.times(),
    };
    out.write(&format!("{name}.boundaries.json"), pretty(&bfile))?;
    out.write(
        &format!("{name}.boundaries.csv"),
        series_csv(boundaries.indices().iter().map(|&k| (t(k as f64), smoothed[(k as usize).min(n - 1)]))),
    )?;

    let mut presence = String::from("algorithm,pattern,occurrence");
    for k in 0..curve.len() {
        let _ = write!(presence, ",{}", t(k as f64));
    }
    presence.push('\n');
    let mut rows: Vec<&PatternRecord> = Vec::new();
    for (_, group) in group_by_algorithm(&records) {
        rows.extend(group);
    }
    if let Some((_, tf)) = &truth {
        rows.extend(tf.records.iter());
    }
    for r in rows {
        for (oi, occ) in r.occurrences().iter().enumerate() {
            let (s, e) = occ.span();
            let _ = write!(presence, "{},{},{oi}", r.algorithm, r.id);
            for k in 0..curve.len() as i64 {
                let g = curve.time_at(k);
                presence.push_str(if s <= g && g < e { ",1" } else { ",0" });
            }
            presence.push('\n');
        }
    }
    out.write(&format!("{name}.presence.csv"), presence)?;

    let mut summary = format!("boundaries={}", boundaries.len());
    if let Some((_, tf)) = &truth {
        let gt = truth_boundaries(&tf.records, curve.origin, curve.resolution);
        let mut csv = String::from("piece,algorithm,precision,recall,f1\n");
        for (alg, group) in group_by_algorithm(&records) {
            let own: Vec<PatternRecord> = group.into_iter().cloned().collect();
            let c = curve_for(&own, &a.weights, a.resolution, span, a.normalize)?;
            let b = extract_boundaries(&c, &params)?;
            csv.push_str(&prf_row(&piece, &alg, boundary_prf(&b, &gt, a.tolerance).as_f64()));
        }
        let score = boundary_prf(&boundaries, &gt, a.tolerance);
        csv.push_str(&prf_row(&piece, "pp", score.as_f64()));
        out.write(&format!("{name}.scores.csv"), csv)?;
        let _ = write!(summary, " f1={}", ratio_f64(score.f1));
    }
    out.say(summary);
    Ok(())
}

// ---------------------------------------------------------------------------------------------

fn by_piece(paths: &[PathBuf]) -> CliResult<BTreeMap<String, Vec<(PathBuf, PatternFile)>>> {
    let mut m: BTreeMap<String, Vec<(PathBuf, PatternFile)>> = BTreeMap::new();
    for p in paths {
        let f = read_patterns(p)?;
        m.entry(f.piece.clone()).or_default().push((p.clone(), f));
    }
    Ok(m)
}

fn unique_truth(paths: &[PathBuf]) -> CliResult<BTreeMap<String, PatternFile>> {
    let mut m = BTreeMap::new();
    for (piece, mut files) in by_piece(paths)? {
        if files.len() > 1 {
            return Err(CliError::inconsistent(format!(
                "{} and {} both annotate piece '{piece}'",
                files[0].0.display(),
                files[1].0.display()
            )));
        }
        m.insert(piece, files.remove(0).1);
    }
    Ok(m)
}

fn train(cli: &Cli, a: &TrainArgs, out: &mut Output) -> CliResult<()> {
    let patterns = by_piece(&a.patterns)?;
    let truth = unique_truth(&a.truth)?;
    if let Some(p) = truth.keys().find(|p| !patterns.contains_key(*p)) {
        return Err(CliError::inconsistent(format!("piece '{p}' has annotations but no pattern files")));
    }
    let mut pieces = Vec::new();
    for (piece, files) in &patterns {
        let gt = truth
            .get(piece)
            .ok_or_else(|| CliError::inconsistent(format!("piece '{piece}' has pattern files but no annotations")))?;
        let records: Vec<PatternRecord> = files.iter().flat_map(|(_, f)| f.records.iter().cloned()).collect();
        let span = union(occurrence_span(&records), occurrence_span(&gt.records))
            .ok_or_else(|| CliError::input(format!("piece '{piece}' has no occurrences")))?;
        let gt = truth_boundaries(&gt.records, span.0, a.resolution);
        pieces.push(TrainingPiece::from_records(piece.clone(), &records, &a.weights, a.resolution, span, gt)?);
    }
    let grid = ParamGrid {
        windows: a.windows.clone(),
        orders: a.orders.clone(),
        lambdas: a.lambdas.clone(),
        flags: a.flags.iter().map(|f| f.flags()).collect(),
    };
    let config =
        TrainConfig { folds: a.folds, objective: a.objective, tolerance: a.tolerance, seed: cli.seed.unwrap_or(0) };
    let outcome = train_pp(&pieces, &grid, &config)?;
    out.write(&a.name, pretty(&outcome))?;
    let p = outcome.params;
    out.say(format!(
        "window={} order={} lambda={} first={} second={} {}={} candidates={}",
        p.window, p.order, p.lambda, p.use_first, p.use_second, outcome.objective, outcome.score, outcome.candidates
    ));
    Ok(())
}

// ---------------------------------------------------------------------------------------------

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() < 2 { 0.0 } else { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) };
    (mean, var)
}

fn eval(a: &EvalArgs, out: &mut Output) -> CliResult<()> {
    let truth = unique_truth(&a.truth)?;
    let mut csv = String::from("piece,algorithm,precision,recall,f1\n");
    let mut scores: BTreeMap<String, Vec<PrfScore>> = BTreeMap::new();
    for path in &a.predicted {
        let b: BoundaryFile = serde_json::from_str(&read_text(path)?)
            .map_err(|e| CliError::input(format!("{}: not a boundary file: {e}", path.display())))?;
        let gt = truth
            .get(&b.piece)
            .ok_or_else(|| CliError::inconsistent(format!("no annotations for piece '{}'", b.piece)))?;
        let predicted = BoundarySet::from_times(b.boundaries.iter().copied(), b.origin, b.resolution);
        let gt = truth_boundaries(&gt.records, b.origin, b.resolution);
        let s = boundary_prf(&predicted, &gt, a.tolerance);
        csv.push_str(&prf_row(&b.piece, &b.algorithm, s.as_f64()));
        scores.entry(b.algorithm).or_default().push(s);
    }
    for (alg, ss) in &scores {
        let cols: Vec<(f64, f64)> = (0..3)
            .map(|i| {
                let xs: Vec<f64> = ss.iter().map(|s| [s.as_f64().0, s.as_f64().1, s.as_f64().2][i]).collect();
                mean_var(&xs)
            })
            .collect();
        csv.push_str(&prf_row("mean", alg, (cols[0].0, cols[1].0, cols[2].0)));
        csv.push_str(&prf_row("variance", alg, (cols[0].1, cols[1].1, cols[2].1)));
        out.say(format!("{alg} pieces={} mean_f1={}", ss.len(), cols[2].0));
    }
    out.write(&a.name, csv)?;
    Ok(())
}

// ---------------------------------------------------------------------------------------------

fn synth(cli: &Cli, a: &SynthArgs, out: &mut Output) -> CliResult<()> {
    let mut config = match &a.synth_config {
        Some(path) => serde_json::from_str::<SynthConfig>(&read_text(path)?)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?,
        None => SynthConfig { seed: rand::random(), ..SynthConfig::default() },
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(n) = a.occurrences {
        config.occurrences = n;
    }
    if let Some(p) = a.rest_probability {
        config.rest_probability = p;
    }
    if let Some(c) = a.cap {
        config.random_cap = c;
    }
    config.validate()?;
    let mut piece = synthesize(&config)?;
    piece.piece.title = Some(a.name.clone());
    let truth = PatternFile {
        piece: a.name.clone(),
        algorithm: TRUTH_ALGORITHM.into(),
        records: piece.ground_truth.clone(),
    };
    let name = &a.name;
    out.write(&format!("{name}.csv"), emit_points_csv(&piece.piece))?;
    out.write(&format!("{name}.truth.json"), emit_pattern_json(&truth))?;
    out.write(&format!("{name}.config.json"), pretty(&config))?;
    if a.midi {
        out.write(&format!("{name}.mid"), write_smf(&piece.piece, 480)?)?;
    }
    out.say(format!(
        "seed={} notes={} duration={} random_fraction={}",
        config.seed,
        piece.piece.len(),
        piece.duration,
        piece.random_fraction()
    ));
    Ok(())
}

// ---------------------------------------------------------------------------------------------

const RANDOM_LABEL: &str = "random";

fn features(cli: &Cli, a: &FeaturesArgs, out: &mut Output) -> CliResult<()> {
    let files: Vec<(PathBuf, PatternFile)> =
        a.patterns.iter().map(|p| Ok((p.clone(), read_patterns(p)?))).collect::<CliResult<_>>()?;
    let mut groups: Vec<(String, Vec<crate::model::PatternOccurrence>)> = Vec::new();
    for (_, f) in &files {
        let label = a.label.clone().unwrap_or_else(|| f.algorithm.clone());
        groups.push((label, f.records.iter().flat_map(|r| r.occurrences().iter().cloned()).collect()));
    }
    let seed = cli.seed.unwrap_or(0);
    if a.baseline_repeats > 0 {
        if a.pieces.is_empty() {
            return Err(CliError::config("--baseline-repeats needs --pieces"));
        }
        let corpus: Vec<PointSet> = a.pieces.iter().map(|p| read_piece(p, &a.input_opts)).collect::<CliResult<_>>()?;
        let mut index = BTreeMap::new();
        for (i, (ps, path)) in corpus.iter().zip(&a.pieces).enumerate() {
            if let Some(j) = index.insert(piece_id(ps), i) {
                return Err(CliError::inconsistent(format!(
                    "{} and {} are both piece '{}'",
                    a.pieces[j].display(),
                    path.display(),
                    piece_id(ps)
                )));
            }
        }
        let mut annotations = Vec::new();
        for (path, f) in &files {
            let &piece = index.get(&f.piece).ok_or_else(|| {
                CliError::inconsistent(format!("{} is for piece '{}', which is not among --pieces", path.display(), f.piece))
            })?;
            for occ in f.records.iter().flat_map(|r| r.occurrences()) {
                annotations.push(Annotation { piece, occurrence: occ.clone() });
            }
        }
        let random = sample_random_excerpts(&corpus, &annotations, a.baseline_repeats, seed)?;
        groups.push((RANDOM_LABEL.into(), random));
    }
    let data = LabeledDataset::from_occurrences(groups.iter().map(|(l, o)| (l.as_str(), o.as_slice())));
    let mut csv = String::new();
    if a.baseline_repeats > 0 {
        let _ = writeln!(csv, "# seed={seed}");
    }
    csv.push_str(&data.to_csv());
    out.write(&a.name, csv)?;
    let counts: Vec<String> = data
        .classes()
        .iter()
        .map(|c| format!("{c}={}", data.labels.iter().filter(|l| *l == c).count()))
        .collect();
    out.say(format!("rows={} {}", data.len(), counts.join(" ")));
    Ok(())
}

fn read_dataset(path: &Path) -> CliResult<LabeledDataset> {
    LabeledDataset::from_csv(&read_text(path)?).map_err(|e| CliError::from(e).context(path))
}

fn parse_preprocess(s: &str) -> CliResult<Preprocess> {
    let bad = || CliError::config(format!("--pca expects none, scale, all, a component count or a fraction in (0, 1), got '{s}'"));
    Ok(match s {
        "none" => Preprocess::None,
        "scale" => Preprocess::Scale,
        "all" => Preprocess::Pca(Components::All),
        _ if !s.contains('.') => match s.parse::<usize>() {
            Ok(k) if k >= 1 => Preprocess::Pca(Components::Count(k)),
            _ => return Err(bad()),
        },
        _ => match s.parse::<f64>() {
            Ok(f) if f > 0.0 && f < 1.0 => Preprocess::Pca(Components::Variance(f)),
            _ => return Err(bad()),
        },
    })
}

fn classify(cli: &Cli, a: &ClassifyArgs, out: &mut Output) -> CliResult<()> {
    let data = read_dataset(&a.features)?;
    let seed = cli.seed.unwrap_or(0);
    let config = CvConfig {
        folds: a.folds,
        repeats: a.repeats,
        balance: !a.no_balance,
        seed,
        preprocess: parse_preprocess(&a.pca)?,
        classifiers: a.classifiers.clone(),
        params: ClassifierParams { trees: a.trees, mtry: a.mtry, seed, ..ClassifierParams::default() },
    };
    let report = cross_validate(&data, &config)?;
    out.write(&a.name, pretty(&report))?;
    for r in &report.results {
        out.say(format!("{} accuracy_mean={:.4} accuracy_variance={:.6}", r.classifier, r.accuracy_mean, r.accuracy_variance));
    }
    Ok(())
}

fn importance(cli: &Cli, a: &ImportanceArgs, out: &mut Output) -> CliResult<()> {
    let data = read_dataset(&a.features)?;
    let config = ImportanceConfig { runs: a.runs, trees: a.trees, seed: cli.seed.unwrap_or(0), ..ImportanceConfig::default() };
    let report = feature_importance(&data, &config)?;
    out.write(&a.name, pretty(&report))?;
    for f in &report.features {
        out.say(format!("{} hits={}/{} status={:?}", f.name, f.hits, report.runs, f.status));
    }
    Ok(())
}
