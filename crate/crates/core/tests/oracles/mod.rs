//! Brute-force reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use pattern_poll::{Point, PointSet, Time};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Key = (Time, i32);

pub fn keys(points: &[Point]) -> BTreeSet<Key> {
    points.iter().map(Point::key).collect()
}

/// `(dt, dp) -> {p : p + v in D}` over every positive difference vector.
pub fn mtp_table(d: &PointSet) -> BTreeMap<Key, BTreeSet<Key>> {
    let all = keys(d.points());
    let mut out: BTreeMap<Key, BTreeSet<Key>> = BTreeMap::new();
    for a in &all {
        for b in &all {
            let v = (b.0 - a.0, b.1 - a.1);
            if v > (Time::ZERO, 0) {
                let members = all.iter().filter(|p| all.contains(&(p.0 + v.0, p.1 + v.1))).copied().collect();
                out.insert(v, members);
            }
        }
    }
    out
}

/// Every vector (including zero) translating `pattern` into `d`.
pub fn translators(pattern: &[Point], d: &PointSet) -> BTreeSet<Key> {
    let all = keys(d.points());
    let first = pattern[0].key();
    all.iter()
        .map(|q| (q.0 - first.0, q.1 - first.1))
        .filter(|v| pattern.iter().all(|p| all.contains(&(p.onset + v.0, p.pitch as i32 + v.1))))
        .collect()
}

/// Size of a maximum matching by exhaustive search over subsets of `right`.
pub fn max_matching(left: &[i64], right: &[i64], tol: i64) -> usize {
    fn go(i: usize, used: u32, left: &[i64], right: &[i64], tol: i64, memo: &mut BTreeMap<(usize, u32), usize>) -> usize {
        if i == left.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, used)) {
            return v;
        }
        let mut best = go(i + 1, used, left, right, tol, memo);
        for (j, &r) in right.iter().enumerate() {
            if used & (1 << j) == 0 && (left[i] - r).abs() <= tol {
                best = best.max(1 + go(i + 1, used | (1 << j), left, right, tol, memo));
            }
        }
        memo.insert((i, used), best);
        best
    }
    go(0, 0, left, right, tol, &mut BTreeMap::new())
}

/// Random point set with up to `max_points` distinct points on a small integer lattice.
pub fn random_point_set(rng: &mut ChaCha8Rng, max_points: usize) -> PointSet {
    let n = rng.random_range(1..=max_points);
    let pts = (0..n)
        .map(|_| {
            let onset = Time::from_int(rng.random_range(0..10));
            Point::new(onset, rng.random_range(58..66), Time::ONE).unwrap()
        })
        .collect::<Vec<_>>();
    PointSet::new(pts)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
