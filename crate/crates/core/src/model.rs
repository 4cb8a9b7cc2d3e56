//! Notes, pieces and pattern occurrences.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::time::Time;

/// A sounding note: onset in crotchets, MIDI pitch (middle C = 60) and duration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub onset: Time,
    pub pitch: u8,
    pub duration: Time,
}

impl Point {
    pub fn new(onset: Time, pitch: u8, duration: Time) -> Result<Self> {
        if pitch > 127 {
            return Err(invalid(format!("pitch {pitch} outside 0..=127")));
        }
        if !duration.is_positive() {
            return Err(invalid(format!("duration must be > 0, got {duration}")));
        }
        Ok(Point { onset, pitch, duration })
    }

    /// Shorthand for integral onsets and crotchet durations; panics on invalid pitch.
    pub fn crotchet(onset: i64, pitch: u8) -> Self {
        Point::new(Time::from_int(onset), pitch, Time::ONE).expect("valid pitch")
    }

    pub fn key(&self) -> (Time, i32) {
        (self.onset, self.pitch as i32)
    }

    pub fn end(&self) -> Time {
        self.onset + self.duration
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic by (onset, pitch); duration only breaks ties so `Ord` agrees with `Eq`.
impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.onset
            .cmp(&other.onset)
            .then(self.pitch.cmp(&other.pitch))
            .then(self.duration.cmp(&other.duration))
    }
}

/// A piece: notes sorted lexicographically by (onset, pitch) with no duplicate pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<Point>,
    pub title: Option<String>,
    pub source: Option<String>,
}

impl PointSet {
    /// Sorts and merges duplicate (onset, pitch) pairs, keeping the longest duration.
    pub fn new(mut points: Vec<Point>) -> Self {
        points.sort();
        let mut merged: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            match merged.last_mut() {
                Some(last) if last.key() == p.key() => {
                    if p.duration > last.duration {
                        last.duration = p.duration;
                    }
                }
                _ => merged.push(p),
            }
        }
        PointSet { points: merged, title: None, source: None }
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains_key(&self, onset: Time, pitch: i32) -> bool {
        self.find(onset, pitch).is_some()
    }

    pub fn find(&self, onset: Time, pitch: i32) -> Option<&Point> {
        self.points
            .binary_search_by(|p| p.key().cmp(&(onset, pitch)))
            .ok()
            .map(|i| &self.points[i])
    }

    /// `[first onset, latest note end)`, or `None` for an empty piece.
    pub fn span(&self) -> Option<(Time, Time)> {
        let first = self.points.first()?.onset;
        let end = self.points.iter().map(Point::end).max()?;
        Some((first, end))
    }

    /// Fails on the first pair of notes that overlap in time.
    pub fn check_monophonic(&self) -> Result<()> {
        for w in self.points.windows(2) {
            if w[1].onset < w[0].end() {
                return Err(Error::MonophonyViolation { first: w[0].onset, second: w[1].onset });
            }
        }
        Ok(())
    }
}

impl FromIterator<Point> for PointSet {
    fn from_iter<I: IntoIterator<Item = Point>>(iter: I) -> Self {
        PointSet::new(iter.into_iter().collect())
    }
}

/// Snaps each onset to the nearest multiple of `grid` (ties go earlier) and merges duplicates.
pub fn quantize(ps: &PointSet, grid: Time) -> Result<PointSet> {
    if !grid.is_positive() {
        return Err(invalid("quantization grid must be > 0"));
    }
    let snapped = ps
        .points
        .iter()
        .map(|p| Point { onset: grid * p.onset.nearest_multiple(grid), ..*p })
        .collect();
    Ok(PointSet { title: ps.title.clone(), source: ps.source.clone(), ..PointSet::new(snapped) })
}

/// One temporally placed instance of a pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternOccurrence {
    points: Vec<Point>,
    start: Time,
    end: Time,
}

impl PatternOccurrence {
    pub fn new(mut points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("pattern occurrence must contain at least one point"));
        }
        points.sort();
        points.dedup_by(|a, b| a.key() == b.key());
        let start = points[0].onset;
        let last_onset = points.last().map(|p| p.onset).unwrap_or(start);
        let end = points
            .iter()
            .filter(|p| p.onset == last_onset)
            .map(Point::end)
            .max()
            .unwrap_or(start);
        Ok(PatternOccurrence { points, start, end })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Start-inclusive, end-exclusive.
    pub fn span(&self) -> (Time, Time) {
        (self.start, self.end)
    }
}

/// A discovered or annotated pattern with all of its occurrences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternRecord {
    pub algorithm: String,
    pub id: String,
    occurrences: Vec<PatternOccurrence>,
}

impl PatternRecord {
    pub fn new(
        algorithm: impl Into<String>,
        id: impl Into<String>,
        mut occurrences: Vec<PatternOccurrence>,
    ) -> Result<Self> {
        if occurrences.is_empty() {
            return Err(invalid("pattern record must have at least one occurrence"));
        }
        occurrences.sort_by(|a, b| a.start.cmp(&b.start).then_with(|| a.points.cmp(&b.points)));
        Ok(PatternRecord { algorithm: algorithm.into(), id: id.into(), occurrences })
    }

    pub fn occurrences(&self) -> &[PatternOccurrence] {
        &self.occurrences
    }
}

/// Groups records by algorithm id, preserving first-seen order of algorithms.
pub fn group_by_algorithm(records: &[PatternRecord]) -> Vec<(String, Vec<&PatternRecord>)> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<&PatternRecord>> = BTreeMap::new();
    for r in records {
        if !groups.contains_key(&r.algorithm) {
            order.push(r.algorithm.clone());
        }
        groups.entry(r.algorithm.clone()).or_default().push(r);
    }
    order
        .into_iter()
        .map(|a| {
            let g = groups.remove(&a).unwrap_or_default();
            (a, g)
        })
        .collect()
}
