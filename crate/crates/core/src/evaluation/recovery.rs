use std::collections::BTreeSet;

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use super::ratio_as_f64;
use crate::model::{PatternOccurrence, PatternRecord, Point};
use crate::time::{Rational, Time};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlantedRecovery {
    #[serde(serialize_with = "ratio_as_f64")]
    pub best_jaccard: Rational,
    pub recovered: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecoveryReport {
    pub planted: Vec<PlantedRecovery>,
    /// Discovered patterns none of whose occurrences share a point with any planted occurrence.
    pub spurious: usize,
}

impl RecoveryReport {
    pub fn all_recovered(&self) -> bool {
        self.planted.iter().all(|p| p.recovered)
    }
}

fn keys(points: &[Point]) -> BTreeSet<(Time, i32)> {
    points.iter().map(Point::key).collect()
}

/// Jaccard index of two occurrences' (onset, pitch) sets.
pub fn jaccard(a: &PatternOccurrence, b: &PatternOccurrence) -> Rational {
    let (a, b) = (keys(a.points()), keys(b.points()));
    let union = a.union(&b).count();
    if union == 0 {
        return Rational::zero();
    }
    Ratio::new(a.intersection(&b).count() as i64, union as i64)
}

pub fn occurrence_recovery(
    discovered: &[PatternRecord],
    planted: &[PatternOccurrence],
    jaccard_threshold: Rational,
) -> RecoveryReport {
    let planted_report = planted
        .iter()
        .map(|p| {
            let best = discovered
                .iter()
                .flat_map(|r| r.occurrences())
                .map(|o| jaccard(o, p))
                .max()
                .unwrap_or_else(Rational::zero);
            PlantedRecovery { best_jaccard: best, recovered: best >= jaccard_threshold && !best.is_zero() }
        })
        .collect();
    let spurious = discovered
        .iter()
        .filter(|r| r.occurrences().iter().all(|o| planted.iter().all(|p| jaccard(o, p).is_zero())))
        .count();
    RecoveryReport { planted: planted_report, spurious }
}
