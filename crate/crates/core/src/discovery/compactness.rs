use std::collections::BTreeMap;

use num_rational::Ratio;

use super::tec::{build_tec, quality_order, tec_quality_with};
use super::{siar, Tec};
use crate::error::{invalid, Error, Result};
use crate::model::{Point, PointSet};
use crate::time::{Rational, Time};

/// Which source points count against a pattern's size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CompactnessMode {
    /// Every source note whose onset lies between the pattern's first and last onsets.
    #[default]
    TemporalWindow,
    /// Source notes inside the pattern's (onset, pitch) bounding box.
    BoundingBox,
}

pub fn compactness(pattern: &[Point], d: &PointSet) -> Result<Rational> {
    compactness_with(pattern, d, CompactnessMode::TemporalWindow)
}

pub fn compactness_with(pattern: &[Point], d: &PointSet, mode: CompactnessMode) -> Result<Rational> {
    if pattern.is_empty() {
        return Err(invalid("compactness of an empty pattern"));
    }
    if !pattern.iter().all(|p| d.contains_key(p.onset, p.pitch as i32)) {
        return Err(Error::NotSubset);
    }
    let lo = pattern.iter().map(|p| p.onset).min().expect("nonempty");
    let hi = pattern.iter().map(|p| p.onset).max().expect("nonempty");
    let pts = d.points();
    let from = pts.partition_point(|q| q.onset < lo);
    let to = pts.partition_point(|q| q.onset <= hi);
    let window = &pts[from..to];
    let count = match mode {
        CompactnessMode::TemporalWindow => window.len(),
        CompactnessMode::BoundingBox => {
            let pmin = pattern.iter().map(|p| p.pitch).min().expect("nonempty");
            let pmax = pattern.iter().map(|p| p.pitch).max().expect("nonempty");
            window.iter().filter(|q| (pmin..=pmax).contains(&q.pitch)).count()
        }
    };
    let distinct = {
        let mut keys: Vec<_> = pattern.iter().map(Point::key).collect();
        keys.sort();
        keys.dedup();
        keys.len()
    };
    Ok(Ratio::new(distinct as i64, count as i64))
}

/// Splits an onset-sorted pattern into maximal left-to-right segments whose compactness stays
/// at least `a`; segments with fewer than `b` points are discarded.
pub fn compactness_trawl(pattern: &[Point], d: &PointSet, a: Rational, b: usize) -> Vec<Vec<Point>> {
    trawl_with(pattern, d, a, b, CompactnessMode::TemporalWindow)
}

pub(crate) fn trawl_with(
    pattern: &[Point],
    d: &PointSet,
    a: Rational,
    b: usize,
    mode: CompactnessMode,
) -> Vec<Vec<Point>> {
    let ok = |seg: &[Point]| compactness_with(seg, d, mode).map(|c| c >= a).unwrap_or(false);
    let mut out = Vec::new();
    let mut current: Vec<Point> = Vec::new();
    let close = |seg: Vec<Point>, out: &mut Vec<Vec<Point>>| {
        if seg.len() >= b && ok(&seg) {
            out.push(seg);
        }
    };
    for &p in pattern {
        if current.is_empty() {
            current.push(p);
            continue;
        }
        current.push(p);
        if !ok(&current) {
            current.pop();
            close(std::mem::replace(&mut current, vec![p]), &mut out);
        }
    }
    if !current.is_empty() {
        close(current, &mut out);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiarctParams {
    /// Successor window for the restricted vector table.
    pub r: usize,
    /// Minimum compactness of a trawled segment.
    pub a: Rational,
    /// Minimum points per trawled segment.
    pub b: usize,
}

impl Default for SiarctParams {
    fn default() -> Self {
        SiarctParams { r: 3, a: Ratio::new(2, 3), b: 3 }
    }
}

/// SIAR vector table, compactness trawl of every MTP, then TEC construction for each
/// distinct trawled segment. Sorted best first by [`quality_order`].
pub fn siarct(d: &PointSet, params: SiarctParams) -> Vec<Tec> {
    let mut shapes: BTreeMap<Vec<(Time, i32)>, Vec<Point>> = BTreeMap::new();
    for mtp in siar(d, params.r) {
        for seg in trawl_with(&mtp.points, d, params.a, params.b, CompactnessMode::TemporalWindow) {
            let first = seg[0];
            let shape = seg
                .iter()
                .map(|p| (p.onset - first.onset, p.pitch as i32 - first.pitch as i32))
                .collect();
            shapes.entry(shape).or_insert(seg);
        }
    }
    let mut scored: Vec<_> = shapes
        .values()
        .map(|seg| {
            let tec = build_tec(seg, d);
            let q = tec_quality_with(&tec, d, CompactnessMode::TemporalWindow);
            (tec, q)
        })
        .collect();
    scored.sort_by(|x, y| quality_order((&x.0, &x.1), (&y.0, &y.1)));
    scored.into_iter().map(|(t, _)| t).collect()
}
