use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boundaries::{boundaries_from_smoothed, BoundarySet, PpParams};
use super::curve::{polling_curve, AlgorithmWeights, PollingCurve};
use super::savgol::savgol_smooth;
use crate::error::{invalid, Result};
use crate::evaluation::{boundary_prf, PrfScore};
use crate::model::PatternRecord;
use crate::time::Time;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Precision,
    Recall,
    #[default]
    F1,
}

impl Objective {
    pub fn pick(self, s: &PrfScore) -> f64 {
        let (p, r, f) = s.as_f64();
        match self {
            Objective::Precision => p,
            Objective::Recall => r,
            Objective::F1 => f,
        }
    }
}

impl FromStr for Objective {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "precision" | "p" => Ok(Objective::Precision),
            "recall" | "r" => Ok(Objective::Recall),
            "f1" | "f" => Ok(Objective::F1),
            other => Err(format!("unknown objective '{other}' (expected precision, recall or f1)")),
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Objective::Precision => "precision",
            Objective::Recall => "recall",
            Objective::F1 => "f1",
        })
    }
}

/// A piece's polling curve together with its annotated boundaries.
#[derive(Clone, Debug)]
pub struct TrainingPiece {
    pub name: String,
    pub curve: PollingCurve,
    pub truth: BoundarySet,
}

impl TrainingPiece {
    pub fn from_records(
        name: impl Into<String>,
        records: &[PatternRecord],
        weights: &AlgorithmWeights,
        resolution: Time,
        span: (Time, Time),
        truth: BoundarySet,
    ) -> Result<Self> {
        let curve = polling_curve(records, weights, resolution, span)?;
        Ok(TrainingPiece { name: name.into(), curve, truth })
    }
}

/// Candidate values for every parameter. Combinations with `order >= window` are skipped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub windows: Vec<usize>,
    pub orders: Vec<usize>,
    pub lambdas: Vec<f64>,
    /// `(use_first, use_second)` pairs.
    pub flags: Vec<(bool, bool)>,
}

impl Default for ParamGrid {
    fn default() -> Self {
        ParamGrid {
            windows: vec![3, 5, 7, 9, 11],
            orders: vec![1, 2, 3],
            lambdas: vec![0.0, 0.1, 0.25, 0.5, 1.0, 2.0],
            flags: vec![(true, true), (true, false), (false, true)],
        }
    }
}

impl ParamGrid {
    pub fn single(p: PpParams) -> Self {
        ParamGrid {
            windows: vec![p.window],
            orders: vec![p.order],
            lambdas: vec![p.lambda],
            flags: vec![(p.use_first, p.use_second)],
        }
    }

    pub fn candidates(&self) -> Vec<PpParams> {
        let mut out = Vec::new();
        for &window in &self.windows {
            for &order in &self.orders {
                for &lambda in &self.lambdas {
                    for &(use_first, use_second) in &self.flags {
                        let p = PpParams { window, order, lambda, use_first, use_second };
                        if p.validate().is_ok() && (use_first || use_second) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub folds: usize,
    pub objective: Objective,
    pub tolerance: Time,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { folds: 3, objective: Objective::F1, tolerance: Time::ONE, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldResult {
    pub pieces: Vec<String>,
    /// Best parameters on the remaining folds.
    pub params: PpParams,
    /// Their mean objective on this fold.
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainOutcome {
    pub params: PpParams,
    /// Mean over folds of the per-fold mean objective.
    pub score: f64,
    pub objective: Objective,
    pub seed: u64,
    pub candidates: usize,
    pub folds: Vec<FoldResult>,
}

const TIE_EPS: f64 = 1e-12;

/// `(window, order)`.
type SmoothKey = (usize, usize);

/// Orders candidates by score, then by smaller window, smaller lambda, smaller order and
/// earlier grid position.
fn better(a: (f64, &PpParams, usize), b: (f64, &PpParams, usize)) -> bool {
    if (a.0 - b.0).abs() > TIE_EPS {
        return a.0 > b.0;
    }
    a.1.window
        .cmp(&b.1.window)
        .then(a.1.lambda.total_cmp(&b.1.lambda))
        .then(a.1.order.cmp(&b.1.order))
        .then(a.2.cmp(&b.2))
        .is_lt()
}

fn argmax(scores: &[f64], cands: &[PpParams]) -> usize {
    let mut best = 0;
    for i in 1..cands.len() {
        if better((scores[i], &cands[i], i), (scores[best], &cands[best], best)) {
            best = i;
        }
    }
    best
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Exhaustive grid search scored by k-fold cross-validation over pieces.
///
/// Pieces are shuffled with `config.seed` and dealt into folds round-robin. The returned
/// parameters maximize the mean over folds of the fold's mean objective. Each fold also
/// reports the parameters chosen on the other folds and how they score on it.
pub fn train_pp(pieces: &[TrainingPiece], grid: &ParamGrid, config: &TrainConfig) -> Result<TrainOutcome> {
    let k = config.folds;
    if k < 2 {
        return Err(invalid(format!("need at least 2 folds, got {k}")));
    }
    if pieces.len() < k {
        return Err(invalid(format!("{} pieces cannot fill {k} folds", pieces.len())));
    }
    if config.tolerance < Time::ZERO {
        return Err(invalid("tolerance must be >= 0"));
    }
    let shortest = pieces.iter().map(|p| p.curve.len()).min().unwrap_or(0);
    let mut cands = grid.candidates();
    cands.retain(|c| c.window <= shortest);
    if cands.is_empty() {
        return Err(invalid(format!("parameter grid has no valid combination for curves of length {shortest}")));
    }

    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let mut fold_of = vec![0usize; pieces.len()];
    for (slot, &piece) in order.iter().enumerate() {
        fold_of[piece] = slot % k;
    }

    // per_piece[c][p]: objective of candidate c on piece p
    let mut smooth_keys: Vec<(usize, usize)> = cands.iter().map(|c| (c.window, c.order)).collect();
    smooth_keys.sort_unstable();
    smooth_keys.dedup();
    let smoothed: Vec<(SmoothKey, Vec<Vec<f64>>)> = smooth_keys
        .par_iter()
        .map(|&(w, o)| {
            let per = pieces.iter().map(|p| savgol_smooth(&p.curve.to_f64(), w, o)).collect::<Result<Vec<_>>>();
            per.map(|v| ((w, o), v))
        })
        .collect::<Result<_>>()?;
    let per_piece: Vec<Vec<f64>> = cands
        .par_iter()
        .map(|c| {
            let sm = &smoothed.iter().find(|(key, _)| *key == (c.window, c.order)).expect("smoothed").1;
            pieces
                .iter()
                .zip(sm)
                .map(|(p, s)| {
                    let pred = boundaries_from_smoothed(s, p.curve.origin, p.curve.resolution, c);
                    config.objective.pick(&boundary_prf(&pred, &p.truth, config.tolerance))
                })
                .collect()
        })
        .collect();

    let fold_mean = |c: usize, f: usize| {
        mean((0..pieces.len()).filter(|&p| fold_of[p] == f).map(|p| per_piece[c][p]))
    };
    let overall: Vec<f64> = (0..cands.len()).map(|c| mean((0..k).map(|f| fold_mean(c, f)))).collect();
    let best = argmax(&overall, &cands);

    let folds = (0..k)
        .map(|f| {
            let rest: Vec<f64> = (0..cands.len())
                .map(|c| mean((0..k).filter(|&g| g != f).map(|g| fold_mean(c, g))))
                .collect();
            let chosen = argmax(&rest, &cands);
            let names = (0..pieces.len()).filter(|&p| fold_of[p] == f).map(|p| pieces[p].name.clone()).collect();
            FoldResult { pieces: names, params: cands[chosen], score: fold_mean(chosen, f) }
        })
        .collect();

    Ok(TrainOutcome {
        params: cands[best],
        score: overall[best],
        objective: config.objective,
        seed: config.seed,
        candidates: cands.len(),
        folds,
    })
}
