use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use super::tec::{quality_order, tec_quality};
use super::{siatec, Tec};
use crate::error::{invalid, Error};
use crate::model::{Point, PointSet};

/// Greedily covers `d`: take the best TEC of the remaining points, emit it, delete what it
/// covers, repeat. Leftovers with no compressing TEC are emitted as one residual TEC.
/// The emitted covers partition `d`.
pub fn cosiatec(d: &PointSet) -> Vec<Tec> {
    let mut remaining = d.clone();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        if remaining.len() < 2 {
            out.push(Tec::residual(remaining.points().to_vec()));
            break;
        }
        let best = siatec(&remaining)
            .into_iter()
            .map(|t| {
                let q = tec_quality(&t, &remaining);
                (t, q)
            })
            .min_by(|a, b| quality_order((&a.0, &a.1), (&b.0, &b.1)));
        match best {
            Some((tec, q)) if q.compression_ratio > Ratio::new(1, 1) => {
                let covered: BTreeSet<Point> = tec.covered.iter().copied().collect();
                remaining = PointSet::new(
                    remaining.points().iter().filter(|p| !covered.contains(p)).copied().collect(),
                );
                out.push(tec);
            }
            _ => {
                out.push(Tec::residual(remaining.points().to_vec()));
                break;
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SortKey {
    CompressionRatio,
    Compactness,
    Coverage,
}

impl FromStr for SortKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cr" => Ok(SortKey::CompressionRatio),
            "comp" => Ok(SortKey::Compactness),
            "cov" => Ok(SortKey::Coverage),
            other => Err(invalid(format!("unknown sort key '{other}' (expected cr, comp or cov)"))),
        }
    }
}

impl fmt::Display for SortKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SortKey::CompressionRatio => "cr",
            SortKey::Compactness => "comp",
            SortKey::Coverage => "cov",
        })
    }
}

/// One SIATEC pass, TECs ranked by `key`, then accepted greedily while each adds at least one
/// uncovered point. Covers may overlap; their union is `d`.
pub fn siatec_compress(d: &PointSet, key: SortKey) -> Vec<Tec> {
    if d.is_empty() {
        return Vec::new();
    }
    let mut scored: Vec<_> = siatec(d)
        .into_iter()
        .map(|t| {
            let q = tec_quality(&t, d);
            (t, q)
        })
        .collect();
    scored.sort_by(|a, b| {
        let primary = match key {
            SortKey::CompressionRatio => b.1.compression_ratio.cmp(&a.1.compression_ratio),
            SortKey::Compactness => b.1.compactness.cmp(&a.1.compactness),
            SortKey::Coverage => b.1.coverage.cmp(&a.1.coverage),
        };
        primary.then_with(|| quality_order((&a.0, &a.1), (&b.0, &b.1)))
    });

    let mut covered: BTreeSet<Point> = BTreeSet::new();
    let mut out = Vec::new();
    for (tec, _) in scored {
        if covered.len() == d.len() {
            break;
        }
        if tec.covered.iter().any(|p| !covered.contains(p)) {
            covered.extend(tec.covered.iter().copied());
            out.push(tec);
        }
    }
    let residue: Vec<Point> = d.points().iter().filter(|p| !covered.contains(p)).copied().collect();
    if !residue.is_empty() {
        out.push(Tec::residual(residue));
    }
    out
}
