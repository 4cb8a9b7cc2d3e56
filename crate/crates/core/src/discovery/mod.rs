//! Geometric repeated-pattern discovery over (onset, pitch) point sets.
//!
//! A piece is treated as a set of points in the plane. [`sia`] finds, for every
//! translation vector between two notes, the maximal set of notes that can be translated by
//! it and still land on notes (the MTP). [`siatec`] groups those patterns into translational
//! equivalence classes and finds all their occurrences. [`cosiatec`] and [`siatec_compress`]
//! choose a covering subset of TECs by compression ratio and compactness, and
//! [`siar`] / [`siarct`] restrict the vector table to nearby notes and trawl the results
//! for compact segments.

mod compactness;
mod cover;
mod sia;
mod spec;
mod tec;

use std::cmp::Ordering;
use std::fmt;

use crate::model::Point;
use crate::time::Time;

pub use compactness::{compactness, compactness_trawl, compactness_with, siarct, CompactnessMode, SiarctParams};
pub use cover::{cosiatec, siatec_compress, SortKey};
pub use sia::{sia, siar};
pub use spec::AlgorithmSpec;
pub use tec::{quality_order, siatec, tec_quality, translators, TecQuality};

/// A translation in (onset, pitch) space, ordered lexicographically by (dt, dp).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vector2 {
    pub dt: Time,
    pub dp: i32,
}

impl Vector2 {
    pub const ZERO: Vector2 = Vector2 { dt: Time::ZERO, dp: 0 };

    pub fn new(dt: Time, dp: i32) -> Self {
        Vector2 { dt, dp }
    }

    pub fn between(from: &Point, to: &Point) -> Self {
        Vector2 { dt: to.onset - from.onset, dp: to.pitch as i32 - from.pitch as i32 }
    }

    pub fn apply(&self, p: &Point) -> (Time, i32) {
        (p.onset + self.dt, p.pitch as i32 + self.dp)
    }

    pub fn is_zero(&self) -> bool {
        self.dt.is_zero() && self.dp == 0
    }
}

impl std::ops::Sub for Vector2 {
    type Output = Vector2;
    fn sub(self, rhs: Vector2) -> Vector2 {
        Vector2 { dt: self.dt - rhs.dt, dp: self.dp - rhs.dp }
    }
}

impl fmt::Display for Vector2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.dt, self.dp)
    }
}

/// Maximal translatable pattern: every source point `p` with `p + vector` also in the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mtp {
    pub vector: Vector2,
    pub points: Vec<Point>,
}

/// Translational equivalence class: a pattern and every vector that maps it into the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tec {
    pub pattern: Vec<Point>,
    /// Sorted, duplicate-free, always contains [`Vector2::ZERO`].
    pub translators: Vec<Vector2>,
    /// Union of `pattern + u` over all translators, as source points.
    pub covered: Vec<Point>,
}

impl Tec {
    /// A TEC whose only occurrence is the pattern itself.
    pub fn residual(mut points: Vec<Point>) -> Tec {
        points.sort();
        Tec { covered: points.clone(), pattern: points, translators: vec![Vector2::ZERO] }
    }

    pub fn occurrences(&self) -> Vec<Vec<Point>> {
        self.translators
            .iter()
            .map(|u| {
                self.pattern
                    .iter()
                    .map(|p| {
                        let (onset, pitch) = u.apply(p);
                        Point { onset, pitch: pitch as u8, duration: p.duration }
                    })
                    .collect()
            })
            .collect()
    }
}

pub(crate) fn cmp_point_keys(a: &[Point], b: &[Point]) -> Ordering {
    a.iter().map(Point::key).cmp(b.iter().map(Point::key))
}
