//! Scoring discovered boundaries and occurrences against ground truth.

mod recovery;

pub use recovery::{jaccard, occurrence_recovery, PlantedRecovery, RecoveryReport};

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::model::PatternRecord;
use crate::polling::BoundarySet;
use crate::time::{Rational, Time};

/// Precision, recall and F1 of a boundary prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrfScore {
    #[serde(serialize_with = "ratio_as_f64")]
    pub precision: Rational,
    #[serde(serialize_with = "ratio_as_f64")]
    pub recall: Rational,
    #[serde(serialize_with = "ratio_as_f64")]
    pub f1: Rational,
    pub matches: usize,
}

impl PrfScore {
    pub fn from_counts(matches: usize, predicted: usize, truth: usize) -> Self {
        let frac = |num: usize, den: usize| {
            if den == 0 {
                Rational::zero()
            } else {
                Ratio::new(num as i64, den as i64)
            }
        };
        let precision = frac(matches, predicted);
        let recall = frac(matches, truth);
        let f1 = if (precision + recall).is_zero() {
            Rational::zero()
        } else {
            Ratio::from_integer(2) * precision * recall / (precision + recall)
        };
        PrfScore { precision, recall, f1, matches }
    }

    pub fn as_f64(&self) -> (f64, f64, f64) {
        let f = |r: Rational| r.to_f64().unwrap_or(f64::NAN);
        (f(self.precision), f(self.recall), f(self.f1))
    }
}

pub(crate) fn ratio_as_f64<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(r.to_f64().unwrap_or(f64::NAN))
}

/// Size of a maximum one-to-one matching between `left` and `right` where a pair may match
/// when `close(l, r)`. Augmenting paths (Kuhn's algorithm).
pub fn maximum_matching<L, R>(left: &[L], right: &[R], close: impl Fn(&L, &R) -> bool) -> usize {
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|l| right.iter().enumerate().filter(|(_, r)| close(l, r)).map(|(j, _)| j).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; right.len()];

    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none_or(|w| augment(w, adj, seen, owner)) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }

    (0..left.len())
        .filter(|&u| {
            let mut seen = vec![false; right.len()];
            augment(u, &adj, &mut seen, &mut owner)
        })
        .count()
}

/// Maximum one-to-one matching of predicted to true boundaries within `tolerance`.
pub fn boundary_prf(predicted: &BoundarySet, truth: &BoundarySet, tolerance: Time) -> PrfScore {
    let p = predicted.times();
    let t = truth.times();
    let matches = maximum_matching(&p, &t, |a, b| (*a - *b).abs() <= tolerance);
    PrfScore::from_counts(matches, p.len(), t.len())
}

/// Every occurrence's start and end, pooled, snapped to the grid and deduplicated.
pub fn truth_boundaries(annotations: &[PatternRecord], origin: Time, resolution: Time) -> BoundarySet {
    let times = annotations
        .iter()
        .flat_map(|r| r.occurrences())
        .flat_map(|o| {
            let (s, e) = o.span();
            [s, e]
        });
    BoundarySet::from_times(times, origin, resolution)
}
