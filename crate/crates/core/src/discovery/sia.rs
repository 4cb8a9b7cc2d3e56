use std::collections::BTreeSet;

use super::{Mtp, Vector2};
use crate::model::{Point, PointSet};

/// One MTP per distinct positive vector between two points, sorted by vector.
pub fn sia(d: &PointSet) -> Vec<Mtp> {
    let pts = d.points();
    let n = pts.len();
    if n < 2 {
        return Vec::new();
    }
    let mut table: Vec<(Vector2, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            table.push((Vector2::between(&pts[i], &pts[j]), i));
        }
    }
    table.sort_unstable();
    let mut out: Vec<Mtp> = Vec::new();
    for (v, i) in table {
        match out.last_mut() {
            Some(m) if m.vector == v => m.points.push(pts[i]),
            _ => out.push(Mtp { vector: v, points: vec![pts[i]] }),
        }
    }
    out
}

/// Vectors from each point to its next `r` successors, each expanded to its full MTP over `d`.
pub fn siar(d: &PointSet, r: usize) -> Vec<Mtp> {
    let pts = d.points();
    let n = pts.len();
    let mut vectors = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n.min(i + 1 + r) {
            vectors.insert(Vector2::between(&pts[i], &pts[j]));
        }
    }
    vectors.into_iter().map(|v| Mtp { vector: v, points: mtp_of(d, v) }).collect()
}

/// `{p in d : p + v in d}` in source order.
pub(crate) fn mtp_of(d: &PointSet, v: Vector2) -> Vec<Point> {
    d.points()
        .iter()
        .filter(|p| {
            let (t, q) = v.apply(p);
            d.contains_key(t, q)
        })
        .copied()
        .collect()
}
