use std::collections::BTreeMap;

use crate::model::{PatternOccurrence, Point};
use crate::time::Time;

pub const FEATURE_COUNT: usize = 26;

/// Canonical feature order, also used as the features CSV header.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "pitch_range",
    "mean_pitch",
    "pitch_std",
    "distinct_pitches",
    "distinct_pitch_classes",
    "common_pitch_prevalence",
    "mean_abs_interval",
    "max_abs_interval",
    "most_common_interval",
    "common_interval_prevalence",
    "prop_repeats",
    "prop_steps",
    "prop_thirds",
    "prop_leaps",
    "prop_tritones",
    "prop_sevenths",
    "prop_octaves",
    "direction_change_ratio",
    "ascending_proportion",
    "note_count",
    "total_duration",
    "note_density",
    "mean_duration",
    "duration_std",
    "distinct_durations",
    "rest_proportion",
];

pub type FeatureVector = [f64; FEATURE_COUNT];

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn pop_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Most frequent key and its count; ties go to the smallest key.
fn mode<K: Ord + Copy>(keys: impl Iterator<Item = K>) -> Option<(K, usize)> {
    let mut counts = BTreeMap::new();
    for k in keys {
        *counts.entry(k).or_insert(0usize) += 1;
    }
    counts.into_iter().fold(None, |best, (k, c)| match best {
        Some((_, bc)) if bc >= c => best,
        _ => Some((k, c)),
    })
}

/// Union length of the notes' sounding intervals.
fn covered(points: &[Point]) -> Time {
    let mut spans: Vec<(Time, Time)> = points.iter().map(|p| (p.onset, p.end())).collect();
    spans.sort();
    let mut total = Time::ZERO;
    let mut cur: Option<(Time, Time)> = None;
    for (s, e) in spans {
        cur = match cur {
            Some((cs, ce)) if s <= ce => Some((cs, ce.max(e))),
            Some((cs, ce)) => {
                total += ce - cs;
                Some((s, e))
            }
            None => Some((s, e)),
        };
    }
    if let Some((cs, ce)) = cur {
        total += ce - cs;
    }
    total
}

/// Pitch, melodic-interval and rhythm statistics of one occurrence. Intervals are taken
/// between consecutive notes in onset order.
pub fn extract_features(occ: &PatternOccurrence) -> FeatureVector {
    let pts = occ.points();
    let mut f = [0.0; FEATURE_COUNT];
    if pts.is_empty() {
        return f;
    }
    let n = pts.len() as f64;
    let pitches: Vec<f64> = pts.iter().map(|p| p.pitch as f64).collect();
    let lo = pts.iter().map(|p| p.pitch).min().expect("nonempty");
    let hi = pts.iter().map(|p| p.pitch).max().expect("nonempty");
    f[0] = (hi - lo) as f64;
    f[1] = mean(&pitches);
    f[2] = pop_std(&pitches);
    let mut distinct: Vec<u8> = pts.iter().map(|p| p.pitch).collect();
    distinct.sort_unstable();
    distinct.dedup();
    f[3] = distinct.len() as f64;
    let mut pcs: Vec<u8> = pts.iter().map(|p| p.pitch % 12).collect();
    pcs.sort_unstable();
    pcs.dedup();
    f[4] = pcs.len() as f64;
    f[5] = mode(pts.iter().map(|p| p.pitch)).map_or(0.0, |(_, c)| c as f64 / n);

    let intervals: Vec<i32> = pts.windows(2).map(|w| w[1].pitch as i32 - w[0].pitch as i32).collect();
    if !intervals.is_empty() {
        let m = intervals.len() as f64;
        let abs: Vec<i32> = intervals.iter().map(|i| i.abs()).collect();
        let prop = |pred: &dyn Fn(i32) -> bool| abs.iter().filter(|&&a| pred(a)).count() as f64 / m;
        f[6] = abs.iter().sum::<i32>() as f64 / m;
        f[7] = *abs.iter().max().expect("nonempty") as f64;
        let (common, count) = mode(abs.iter().copied()).expect("nonempty");
        f[8] = common as f64;
        f[9] = count as f64 / m;
        f[10] = prop(&|a| a == 0);
        f[11] = prop(&|a| (1..=2).contains(&a));
        f[12] = prop(&|a| (3..=4).contains(&a));
        f[13] = prop(&|a| a >= 5);
        f[14] = prop(&|a| a == 6);
        f[15] = prop(&|a| (10..=11).contains(&a));
        f[16] = prop(&|a| a == 12);
        let moving: Vec<i32> = intervals.iter().copied().filter(|&i| i != 0).collect();
        let pairs = moving.len().saturating_sub(1);
        if pairs > 0 {
            let changes = moving.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
            f[17] = changes as f64 / pairs as f64;
        }
        f[18] = intervals.iter().filter(|&&i| i > 0).count() as f64 / m;
    }

    let (start, end) = occ.span();
    let total = (end - start).to_f64();
    let durations: Vec<f64> = pts.iter().map(|p| p.duration.to_f64()).collect();
    f[19] = n;
    f[20] = total;
    f[21] = if total > 0.0 { n / total } else { 0.0 };
    f[22] = mean(&durations);
    f[23] = pop_std(&durations);
    let mut ds: Vec<Time> = pts.iter().map(|p| p.duration).collect();
    ds.sort();
    ds.dedup();
    f[24] = ds.len() as f64;
    f[25] = if total > 0.0 { (1.0 - covered(pts).to_f64() / total).max(0.0) } else { 0.0 };
    f
}
