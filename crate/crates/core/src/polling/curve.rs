use std::collections::BTreeMap;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::model::PatternRecord;
use crate::time::{parse_rational, Rational, Time};

/// Per-algorithm vote weights; algorithms not listed weigh 1.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AlgorithmWeights {
    weights: BTreeMap<String, Rational>,
}

impl AlgorithmWeights {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, algorithm: impl Into<String>, weight: Rational) -> &mut Self {
        self.weights.insert(algorithm.into(), weight);
        self
    }

    pub fn get(&self, algorithm: &str) -> Rational {
        self.weights.get(algorithm).copied().unwrap_or_else(|| Ratio::from_integer(1))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Rational)> {
        self.weights.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Every weight multiplied by `factor`, with unlisted algorithms made explicit.
    pub fn scaled(&self, factor: Rational, algorithms: &[&str]) -> Self {
        let mut out = AlgorithmWeights::new();
        for a in algorithms {
            out.set(*a, self.get(a) * factor);
        }
        for (a, w) in &self.weights {
            out.set(a.clone(), *w * factor);
        }
        out
    }

    /// Sum of the weights of the given algorithms.
    pub fn total(&self, algorithms: &[&str]) -> Rational {
        algorithms.iter().map(|a| self.get(a)).sum()
    }
}

/// Parses `vm1=2,sia=1/2`.
impl FromStr for AlgorithmWeights {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut w = AlgorithmWeights::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| invalid(format!("weight '{part}' is not name=value")))?;
            let value = parse_rational(value).map_err(invalid)?;
            w.set(name.trim(), value);
        }
        Ok(w)
    }
}

/// Weighted vote counts on a regular grid `origin + k * resolution`, `k = 0..len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PollingCurve {
    pub origin: Time,
    pub resolution: Time,
    pub values: Vec<Rational>,
}

impl PollingCurve {
    pub fn zeros(origin: Time, resolution: Time, len: usize) -> Self {
        PollingCurve { origin, resolution, values: vec![Rational::zero(); len] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time_at(&self, index: i64) -> Time {
        self.origin + self.resolution * index
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Pointwise sum; both curves must share a grid.
    pub fn add(&self, other: &PollingCurve) -> Result<PollingCurve> {
        if self.origin != other.origin || self.resolution != other.resolution || self.len() != other.len() {
            return Err(invalid("curves are on different grids"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(PollingCurve { values, ..self.clone() })
    }

    pub fn scaled(&self, factor: Rational) -> PollingCurve {
        PollingCurve { values: self.values.iter().map(|v| v * factor).collect(), ..self.clone() }
    }
}

/// `P(t) = sum over algorithms, patterns and occurrences of w_a * [t in occurrence span]`,
/// with spans start-inclusive and end-exclusive.
pub fn polling_curve(
    records: &[PatternRecord],
    weights: &AlgorithmWeights,
    resolution: Time,
    piece_span: (Time, Time),
) -> Result<PollingCurve> {
    if !resolution.is_positive() {
        return Err(invalid("resolution must be > 0"));
    }
    let (start, end) = piece_span;
    if end <= start {
        return Err(invalid(format!("empty piece span [{start}, {end})")));
    }
    let n = (end - start).div_ceil(resolution) as usize;
    let mut curve = PollingCurve::zeros(start, resolution, n);
    for rec in records {
        let w = weights.get(&rec.algorithm);
        if w < Rational::zero() {
            return Err(invalid(format!("algorithm '{}' has negative weight {w}", rec.algorithm)));
        }
        for occ in rec.occurrences() {
            let (s, e) = occ.span();
            if s < start || e > end {
                return Err(invalid(format!(
                    "occurrence [{s}, {e}) of pattern '{}' lies outside the piece span [{start}, {end})",
                    rec.id
                )));
            }
            let lo = (s - start).div_ceil(resolution).max(0) as usize;
            let hi = ((e - start).div_ceil(resolution) as usize).min(n);
            for v in &mut curve.values[lo..hi.max(lo)] {
                *v += w;
            }
        }
    }
    Ok(curve)
}
