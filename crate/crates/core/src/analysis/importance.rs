use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::forest::{ForestParams, RandomForest};
use super::{mix_seed, LabeledDataset};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureStatus {
    Confirmed,
    Tentative,
    Rejected,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImportanceConfig {
    pub runs: usize,
    pub trees: usize,
    pub seed: u64,
    /// Hit rate at or above which a feature is confirmed.
    pub confirm: f64,
    /// Hit rate at or below which a feature is rejected.
    pub reject: f64,
}

impl Default for ImportanceConfig {
    fn default() -> Self {
        ImportanceConfig { runs: 20, trees: 200, seed: 0, confirm: 0.75, reject: 0.25 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub name: String,
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    /// Runs in which the feature beat the strongest shadow.
    pub hits: usize,
    pub status: FeatureStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub runs: usize,
    pub trees: usize,
    pub seed: u64,
    /// Strongest shadow importance in each run.
    pub shadow_max: Vec<f64>,
    pub features: Vec<FeatureImportance>,
}

impl ImportanceReport {
    pub fn status_of(&self, name: &str) -> Option<FeatureStatus> {
        self.features.iter().find(|f| f.name == name).map(|f| f.status)
    }
}

/// Shadow-feature selection: every run appends an independently permuted copy of each
/// column, fits a random forest and compares each real feature's Gini importance against
/// the largest shadow importance.
pub fn feature_importance(data: &LabeledDataset, config: &ImportanceConfig) -> Result<ImportanceReport> {
    let (classes, y) = data.targets();
    if classes.len() < 2 {
        return Err(invalid(format!("need at least 2 groups, found {}", classes.len())));
    }
    if config.runs == 0 {
        return Err(invalid("need at least one run"));
    }
    let d = data.dim();
    let n = data.len();
    let mut per_run: Vec<Vec<f64>> = Vec::with_capacity(config.runs);
    let mut shadow_max = Vec::with_capacity(config.runs);
    for run in 0..config.runs {
        let run_seed = mix_seed(config.seed, run as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
        let mut x: Vec<Vec<f64>> = data.rows.iter().map(|r| { let mut v = r.clone(); v.resize(2 * d, 0.0); v }).collect();
        for j in 0..d {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            for (i, &p) in perm.iter().enumerate() {
                x[i][d + j] = data.rows[p][j];
            }
        }
        let forest = RandomForest::fit(
            &x,
            &y,
            classes.len(),
            ForestParams { trees: config.trees, mtry: None, seed: mix_seed(run_seed, 1) },
        );
        let imp = forest.importances();
        shadow_max.push(imp[d..].iter().copied().fold(0.0, f64::max));
        per_run.push(imp[..d].to_vec());
    }

    let features = (0..d)
        .map(|j| {
            let vals: Vec<f64> = per_run.iter().map(|r| r[j]).collect();
            let hits = vals.iter().zip(&shadow_max).filter(|(v, s)| v > s).count();
            let rate = hits as f64 / config.runs as f64;
            let status = if rate >= config.confirm {
                FeatureStatus::Confirmed
            } else if rate <= config.reject {
                FeatureStatus::Rejected
            } else {
                FeatureStatus::Tentative
            };
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            let variance = if vals.len() > 1 {
                vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (vals.len() - 1) as f64
            } else {
                0.0
            };
            FeatureImportance {
                name: data.feature_names[j].clone(),
                mean: m,
                variance,
                min: vals.iter().copied().fold(f64::INFINITY, f64::min),
                max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                hits,
                status,
            }
        })
        .collect();
    Ok(ImportanceReport { runs: config.runs, trees: config.trees, seed: config.seed, shadow_max, features })
}
