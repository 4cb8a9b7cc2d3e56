use serde::{Deserialize, Serialize};

use super::curve::PollingCurve;
use super::savgol::savgol_smooth;
use crate::error::{invalid, Result};
use crate::time::Time;

/// Sorted, duplicate-free grid indices on `origin + k * resolution`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySet {
    pub origin: Time,
    pub resolution: Time,
    indices: Vec<i64>,
}

impl BoundarySet {
    pub fn new(mut indices: Vec<i64>, origin: Time, resolution: Time) -> Self {
        indices.sort_unstable();
        indices.dedup();
        BoundarySet { origin, resolution, indices }
    }

    /// Indices on the unit crotchet grid starting at 0.
    pub fn from_indices(indices: Vec<i64>) -> Self {
        BoundarySet::new(indices, Time::ZERO, Time::ONE)
    }

    pub fn empty(origin: Time, resolution: Time) -> Self {
        BoundarySet::new(Vec::new(), origin, resolution)
    }

    /// Snaps each time to its nearest grid index; halves go earlier.
    pub fn from_times(times: impl IntoIterator<Item = Time>, origin: Time, resolution: Time) -> Self {
        let idx = times.into_iter().map(|t| (t - origin).nearest_multiple(resolution)).collect();
        BoundarySet::new(idx, origin, resolution)
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn times(&self) -> Vec<Time> {
        self.indices.iter().map(|&k| self.origin + self.resolution * k).collect()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Boundary extraction parameters: Savitzky-Golay `window` / `order`, steepness threshold
/// `lambda`, and which derivatives contribute crossings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PpParams {
    pub window: usize,
    pub order: usize,
    pub lambda: f64,
    pub use_first: bool,
    pub use_second: bool,
}

impl Default for PpParams {
    fn default() -> Self {
        PpParams { window: 5, order: 2, lambda: 0.0, use_first: true, use_second: true }
    }
}

impl PpParams {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(invalid(format!("window must be odd and >= 3, got {}", self.window)));
        }
        if self.order < 1 || self.order >= self.window {
            return Err(invalid(format!("order must be in 1..{}, got {}", self.window, self.order)));
        }
        if self.lambda.is_nan() || self.lambda < 0.0 {
            return Err(invalid(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Crossing {
    index: i64,
    steepness: f64,
}

/// Sign changes of `f`, possibly through a run of zeros. `position(i)` is where sample `i`
/// sits on the curve grid; the crossing is placed at the linear zero between the two
/// bracketing nonzero samples and reported at the nearest grid index (halves round up).
/// Steepness is the change between the bracketing samples per sample step.
fn crossings(f: &[f64], eps: f64, position: impl Fn(usize) -> f64) -> Vec<Crossing> {
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for j in 0..f.len() {
        if f[j].abs() <= eps {
            continue;
        }
        if let Some(i) = last {
            if f[i].signum() != f[j].signum() {
                let (a, b) = (f[i].abs(), f[j].abs());
                let (xi, xj) = (position(i), position(j));
                let zero = xi + (xj - xi) * a / (a + b);
                out.push(Crossing {
                    // the nudge keeps exact halves rounding up despite float noise
                    index: (zero + 0.5 + 1e-9).floor() as i64,
                    steepness: (f[j] - f[i]).abs() / (j - i) as f64,
                });
            }
        }
        last = Some(j);
    }
    out
}

/// Smooths the curve, differentiates it, and keeps the zero-crossings of the first and/or
/// second derivative whose steepness reaches `lambda`. Crossings closer than two grid steps
/// are merged, keeping the steeper one.
///
/// Before differencing, the smoothed curve is extended by one repeated sample at each end so
/// that changes of direction on the first and last grid points can be seen.
pub fn extract_boundaries(curve: &PollingCurve, params: &PpParams) -> Result<BoundarySet> {
    params.validate()?;
    let smoothed = savgol_smooth(&curve.to_f64(), params.window, params.order)?;
    Ok(boundaries_from_smoothed(&smoothed, curve.origin, curve.resolution, params))
}

pub(crate) fn boundaries_from_smoothed(
    smoothed: &[f64],
    origin: Time,
    resolution: Time,
    params: &PpParams,
) -> BoundarySet {
    let n = smoothed.len();
    let scale = smoothed.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if n == 0 || scale == 0.0 || !scale.is_finite() {
        return BoundarySet::empty(origin, resolution);
    }
    let eps = scale * 1e-9;

    let mut ext = Vec::with_capacity(n + 2);
    ext.push(smoothed[0]);
    ext.extend_from_slice(smoothed);
    ext.push(smoothed[n - 1]);
    let first: Vec<f64> = ext.windows(2).map(|w| w[1] - w[0]).collect();
    let second: Vec<f64> = first.windows(2).map(|w| w[1] - w[0]).collect();

    let mut candidates = Vec::new();
    if params.use_first {
        // first[i] lies between ext[i] and ext[i+1], i.e. at curve position i - 1/2
        candidates.extend(crossings(&first, eps, |i| i as f64 - 0.5));
    }
    if params.use_second {
        // second[i] is centred on ext[i+1], i.e. curve position i
        candidates.extend(crossings(&second, eps, |i| i as f64));
    }
    candidates.retain(|c| c.steepness + eps >= params.lambda);
    for c in &mut candidates {
        c.index = c.index.clamp(0, n as i64);
    }
    // steepness is compared relative to the curve's scale so that float noise cannot reorder
    // crossings that are equally steep in exact arithmetic
    let rank = |c: &Crossing| (c.steepness / eps).round() as i64;
    candidates.sort_by(|a, b| rank(b).cmp(&rank(a)).then(a.index.cmp(&b.index)));

    let mut kept: Vec<i64> = Vec::new();
    for c in candidates {
        if kept.iter().all(|&k| (k - c.index).abs() > 1) {
            kept.push(c.index);
        }
    }
    BoundarySet::new(kept, origin, resolution)
}
