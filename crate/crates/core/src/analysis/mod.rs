//! Comparative classification of pattern groups: feature extraction, scaling and PCA,
//! three classifiers, repeated stratified cross-validation and shadow-feature importance.

mod cv;
mod dataset;
mod features;
mod forest;
mod importance;
mod linear;
mod pca;

pub use cv::{cross_validate, ClassifierReport, CvConfig, CvReport, Preprocess};
pub use dataset::{sample_random_excerpts, Annotation, LabeledDataset};
pub use features::{extract_features, FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
pub use forest::{DecisionTree, ForestParams, RandomForest, TreeParams};
pub use importance::{feature_importance, FeatureImportance, FeatureStatus, ImportanceConfig, ImportanceReport};
pub use linear::{GaussianNb, Lda, LDA_RIDGE};
pub use pca::{fit_scaler_pca, fit_scaler_pca_with, Components, PcaModel};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// splitmix64 of `seed` offset by `stream`, for independent per-task generators.
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Rf,
    Nb,
    Lda,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [ClassifierKind::Rf, ClassifierKind::Nb, ClassifierKind::Lda];
}

impl FromStr for ClassifierKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rf" => Ok(ClassifierKind::Rf),
            "nb" => Ok(ClassifierKind::Nb),
            "lda" => Ok(ClassifierKind::Lda),
            other => Err(format!("unknown classifier '{other}' (expected rf, nb or lda)")),
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierKind::Rf => "rf",
            ClassifierKind::Nb => "nb",
            ClassifierKind::Lda => "lda",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierParams {
    pub trees: usize,
    /// Features per split for the forest; `None` means floor(sqrt(dim)).
    pub mtry: Option<usize>,
    /// Laplace smoothing of the naive Bayes class priors.
    pub nb_alpha: f64,
    pub seed: u64,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams { trees: 200, mtry: None, nb_alpha: 1.0, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classifier {
    Rf(RandomForest),
    Nb(GaussianNb),
    Lda(Lda),
}

impl Classifier {
    pub fn predict(&self, row: &[f64]) -> usize {
        match self {
            Classifier::Rf(m) => m.predict(row),
            Classifier::Nb(m) => m.predict(row),
            Classifier::Lda(m) => m.predict(row),
        }
    }

    pub fn accuracy(&self, x: &[Vec<f64>], y: &[usize]) -> f64 {
        let hits = x.iter().zip(y).filter(|(r, &c)| self.predict(r) == c).count();
        hits as f64 / x.len().max(1) as f64
    }
}

/// `y` holds class indices below `classes`; at least two must occur.
pub fn train_classifier(
    kind: ClassifierKind,
    x: &[Vec<f64>],
    y: &[usize],
    classes: usize,
    params: &ClassifierParams,
) -> Result<Classifier> {
    let mut seen: Vec<usize> = y.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() < 2 {
        return Err(invalid("a classifier needs at least two classes"));
    }
    Ok(match kind {
        ClassifierKind::Rf => Classifier::Rf(RandomForest::fit(
            x,
            y,
            classes,
            ForestParams { trees: params.trees, mtry: params.mtry, seed: params.seed },
        )),
        ClassifierKind::Nb => Classifier::Nb(GaussianNb::fit(x, y, classes, params.nb_alpha)?),
        ClassifierKind::Lda => Classifier::Lda(Lda::fit(x, y, classes)?),
    })
}
