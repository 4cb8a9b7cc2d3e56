use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;

use super::compactness::{compactness_with, CompactnessMode};
use super::{cmp_point_keys, sia, Tec, Vector2};
use crate::model::{Point, PointSet};
use crate::time::{Rational, Time};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TecQuality {
    /// `|covered| / (|pattern| + |translators| - 1)`.
    pub compression_ratio: Rational,
    pub compactness: Rational,
    pub coverage: usize,
}

/// All vectors `u` (zero included) with `pattern + u` contained in `d`, sorted.
pub fn translators(pattern: &[Point], d: &PointSet) -> Vec<Vector2> {
    let Some(first) = pattern.first() else {
        return Vec::new();
    };
    d.points()
        .iter()
        .map(|q| Vector2::between(first, q))
        .filter(|u| {
            pattern.iter().all(|p| {
                let (t, pitch) = u.apply(p);
                d.contains_key(t, pitch)
            })
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn shape(pattern: &[Point]) -> Vec<(Time, i32)> {
    let first = pattern[0];
    pattern.iter().map(|p| (p.onset - first.onset, p.pitch as i32 - first.pitch as i32)).collect()
}

pub(crate) fn build_tec(pattern: &[Point], d: &PointSet) -> Tec {
    let found = translators(pattern, d);
    let base = found[0];
    let lookup = |key: (Time, i32)| *d.find(key.0, key.1).expect("translated point in source");
    let rebased: Vec<Point> = pattern.iter().map(|p| lookup(base.apply(p))).collect();
    let translators: Vec<Vector2> = found.iter().map(|&u| u - base).collect();
    let covered: BTreeSet<Point> = translators
        .iter()
        .flat_map(|u| rebased.iter().map(move |p| u.apply(p)))
        .map(lookup)
        .collect();
    Tec { pattern: rebased, translators, covered: covered.into_iter().collect() }
}

/// One TEC per class of translationally equivalent SIA patterns. Each pattern is
/// represented by its lexicographically least occurrence, so the zero vector is the
/// smallest translator.
pub fn siatec(d: &PointSet) -> Vec<Tec> {
    let mut classes: BTreeMap<Vec<(Time, i32)>, Vec<Point>> = BTreeMap::new();
    for mtp in sia(d) {
        classes.entry(shape(&mtp.points)).or_insert(mtp.points);
    }
    let mut tecs: Vec<Tec> = classes.values().map(|p| build_tec(p, d)).collect();
    tecs.sort_by(|a, b| cmp_point_keys(&a.pattern, &b.pattern));
    tecs
}

pub fn tec_quality(t: &Tec, d: &PointSet) -> TecQuality {
    tec_quality_with(t, d, CompactnessMode::TemporalWindow)
}

pub(crate) fn tec_quality_with(t: &Tec, d: &PointSet, mode: CompactnessMode) -> TecQuality {
    let denom = (t.pattern.len() + t.translators.len()).saturating_sub(1).max(1);
    TecQuality {
        compression_ratio: Ratio::new(t.covered.len() as i64, denom as i64),
        compactness: compactness_with(&t.pattern, d, mode).unwrap_or_else(|_| Ratio::new(0, 1)),
        coverage: t.covered.len(),
    }
}

/// Best first: compression ratio, compactness, coverage and pattern size all descending,
/// then the lexicographically smaller pattern.
pub fn quality_order(a: (&Tec, &TecQuality), b: (&Tec, &TecQuality)) -> Ordering {
    b.1.compression_ratio
        .cmp(&a.1.compression_ratio)
        .then(b.1.compactness.cmp(&a.1.compactness))
        .then(b.1.coverage.cmp(&a.1.coverage))
        .then(b.0.pattern.len().cmp(&a.0.pattern.len()))
        .then_with(|| cmp_point_keys(&a.0.pattern, &b.0.pattern))
}
