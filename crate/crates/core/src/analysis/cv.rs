use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pca::{fit_scaler_pca_with, Components};
use super::{mix_seed, train_classifier, ClassifierKind, ClassifierParams, LabeledDataset};
use crate::error::{invalid, Error, Result};

/// Per-fold preprocessing, fitted on the training part only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Preprocess {
    None,
    Scale,
    Pca(Components),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub balance: bool,
    pub seed: u64,
    pub preprocess: Preprocess,
    pub classifiers: Vec<ClassifierKind>,
    pub params: ClassifierParams,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            repeats: 3,
            balance: true,
            seed: 0,
            preprocess: Preprocess::Pca(Components::Variance(0.95)),
            classifiers: ClassifierKind::ALL.to_vec(),
            params: ClassifierParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub classifier: ClassifierKind,
    pub accuracy_mean: f64,
    pub accuracy_variance: f64,
    /// Rows are predicted classes, columns true classes.
    pub confusion_mean: Vec<Vec<f64>>,
    pub confusion_variance: Vec<Vec<f64>>,
    /// One accuracy per (repeat, fold), repeat-major.
    pub accuracies: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub classes: Vec<String>,
    pub folds: usize,
    pub repeats: usize,
    pub balance: bool,
    pub seed: u64,
    /// Rows per class entering the folds (after balancing).
    pub class_counts: Vec<usize>,
    pub results: Vec<ClassifierReport>,
}

impl CvReport {
    pub fn result(&self, kind: ClassifierKind) -> Option<&ClassifierReport> {
        self.results.iter().find(|r| r.classifier == kind)
    }
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = if xs.len() > 1 { xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (m, v)
}

/// Stratified fold index for every selected row: each class is shuffled and dealt round
/// robin, continuing where the previous class stopped.
fn stratified_folds(by_class: &[Vec<usize>], folds: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); folds];
    let mut slot = 0;
    for members in by_class {
        let mut m = members.clone();
        m.shuffle(rng);
        for i in m {
            out[slot % folds].push(i);
            slot += 1;
        }
    }
    out
}

type Fold = Vec<(f64, Vec<Vec<usize>>)>;

/// Repeated stratified k-fold cross-validation of every configured classifier.
///
/// With balancing on, each repeat downsamples every class to the minority count using that
/// repeat's seed. Scaling and PCA are fitted on each training split and applied to the held
/// out split.
pub fn cross_validate(data: &LabeledDataset, config: &CvConfig) -> Result<CvReport> {
    if config.folds < 2 {
        return Err(invalid(format!("need at least 2 folds, got {}", config.folds)));
    }
    if config.repeats < 1 {
        return Err(invalid("need at least 1 repeat"));
    }
    if config.classifiers.is_empty() {
        return Err(invalid("no classifiers selected"));
    }
    let (classes, y) = data.targets();
    if classes.len() < 2 {
        return Err(invalid(format!("need at least 2 groups, found {}", classes.len())));
    }
    let k = classes.len();
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &c) in y.iter().enumerate() {
        by_class[c].push(i);
    }
    let minority = by_class.iter().map(Vec::len).min().expect("classes");
    let class_counts: Vec<usize> =
        by_class.iter().map(|m| if config.balance { minority } else { m.len() }).collect();
    // balancing keeps every class at the minority size, so checking raw sizes names the culprit
    for (c, m) in by_class.iter().enumerate() {
        if m.len() < config.folds {
            return Err(Error::ClassTooSmall { class: classes[c].clone(), count: m.len(), required: config.folds });
        }
    }

    let plans: Vec<Vec<Vec<usize>>> = (0..config.repeats)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, r as u64));
            let chosen: Vec<Vec<usize>> = by_class
                .iter()
                .map(|m| {
                    let mut m = m.clone();
                    if config.balance {
                        m.shuffle(&mut rng);
                        m.truncate(minority);
                        m.sort_unstable();
                    }
                    m
                })
                .collect();
            stratified_folds(&chosen, config.folds, &mut rng)
        })
        .collect();

    let tasks: Vec<(usize, usize)> = (0..config.repeats).flat_map(|r| (0..config.folds).map(move |f| (r, f))).collect();
    let outcomes: Vec<Fold> = tasks
        .par_iter()
        .map(|&(r, f)| -> Result<Fold> {
            let plan = &plans[r];
            let test = &plan[f];
            let train: Vec<usize> = (0..config.folds).filter(|&g| g != f).flat_map(|g| plan[g].iter().copied()).collect();
            let raw_train: Vec<Vec<f64>> = train.iter().map(|&i| data.rows[i].clone()).collect();
            let raw_test: Vec<Vec<f64>> = test.iter().map(|&i| data.rows[i].clone()).collect();
            let (xtr, xte) = match config.preprocess {
                Preprocess::None => (raw_train, raw_test),
                Preprocess::Scale | Preprocess::Pca(_) => {
                    let keep = match config.preprocess {
                        Preprocess::Pca(c) => c,
                        _ => Components::Count(0),
                    };
                    let model = fit_scaler_pca_with(&raw_train, keep)?;
                    if matches!(config.preprocess, Preprocess::Scale) {
                        let s = |rows: &[Vec<f64>]| rows.iter().map(|r| model.scale_row(r)).collect::<Vec<_>>();
                        (s(&raw_train), s(&raw_test))
                    } else {
                        (model.transform_all(&raw_train), model.transform_all(&raw_test))
                    }
                }
            };
            let ytr: Vec<usize> = train.iter().map(|&i| y[i]).collect();
            let yte: Vec<usize> = test.iter().map(|&i| y[i]).collect();
            let task_seed = mix_seed(mix_seed(config.seed, r as u64), (f + 1) as u64);
            config
                .classifiers
                .iter()
                .enumerate()
                .map(|(ci, &kind)| {
                    let params = ClassifierParams { seed: mix_seed(task_seed, ci as u64), ..config.params };
                    let model = train_classifier(kind, &xtr, &ytr, k, &params)?;
                    let mut confusion = vec![vec![0usize; k]; k];
                    for (row, &truth) in xte.iter().zip(&yte) {
                        confusion[model.predict(row)][truth] += 1;
                    }
                    let hits: usize = (0..k).map(|c| confusion[c][c]).sum();
                    Ok((hits as f64 / yte.len() as f64, confusion))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let results = config
        .classifiers
        .iter()
        .enumerate()
        .map(|(ci, &kind)| {
            let accuracies: Vec<f64> = outcomes.iter().map(|o| o[ci].0).collect();
            let (accuracy_mean, accuracy_variance) = mean_var(&accuracies);
            let cell = |a: usize, b: usize| {
                let xs: Vec<f64> = outcomes.iter().map(|o| o[ci].1[a][b] as f64).collect();
                mean_var(&xs)
            };
            let confusion_mean = (0..k).map(|a| (0..k).map(|b| cell(a, b).0).collect()).collect();
            let confusion_variance = (0..k).map(|a| (0..k).map(|b| cell(a, b).1).collect()).collect();
            ClassifierReport { classifier: kind, accuracy_mean, accuracy_variance, confusion_mean, confusion_variance, accuracies }
        })
        .collect();

    Ok(CvReport {
        classes,
        folds: config.folds,
        repeats: config.repeats,
        balance: config.balance,
        seed: config.seed,
        class_counts,
        results,
    })
}
