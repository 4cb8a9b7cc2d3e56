use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::{extract_features, FEATURE_NAMES};
use crate::error::{invalid, Error, Result};
use crate::model::{PatternOccurrence, PointSet};

/// Feature rows with one group label each. Class indices follow the sorted label names.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

impl LabeledDataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(invalid(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != feature_names.len()) {
            return Err(invalid(format!("row {i} has {} values, expected {}", r.len(), feature_names.len())));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("feature values must be finite"));
        }
        Ok(LabeledDataset { feature_names, rows, labels })
    }

    /// Feature vectors of every occurrence, labelled by `label`.
    pub fn from_occurrences<'a>(groups: impl IntoIterator<Item = (&'a str, &'a [PatternOccurrence])>) -> Self {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (label, occs) in groups {
            for o in occs {
                rows.push(extract_features(o).to_vec());
                labels.push(label.to_string());
            }
        }
        LabeledDataset { feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(), rows, labels }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn classes(&self) -> Vec<String> {
        let mut c = self.labels.clone();
        c.sort();
        c.dedup();
        c
    }

    /// Class index of every row.
    pub fn targets(&self) -> (Vec<String>, Vec<usize>) {
        let classes = self.classes();
        let index: BTreeMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let y = self.labels.iter().map(|l| index[l.as_str()]).collect();
        (classes, y)
    }

    pub fn with_labels(&self, labels: Vec<String>) -> Result<Self> {
        LabeledDataset::new(self.feature_names.clone(), self.rows.clone(), labels)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.feature_names.join(",");
        out.push_str(",group\n");
        for (r, l) in self.rows.iter().zip(&self.labels) {
            for v in r {
                let _ = write!(out, "{v},");
            }
            out.push_str(l);
            out.push('\n');
        }
        out
    }

    /// Header row of feature names plus a `group` column, anywhere in the header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Csv { line: 1, message: "empty features file".into() })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let label_col = cols.iter().position(|c| *c == "group").ok_or(Error::Csv {
            line: hline + 1,
            message: "missing 'group' label column".into(),
        })?;
        let names = cols.iter().enumerate().filter(|&(i, _)| i != label_col).map(|(_, c)| c.to_string()).collect();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (i, line) in lines {
            let cells: Vec<&str> = line.trim_end_matches('\r').split(',').map(str::trim).collect();
            if cells.len() != cols.len() {
                return Err(Error::Csv {
                    line: i + 1,
                    message: format!("expected {} fields, found {}", cols.len(), cells.len()),
                });
            }
            let mut row = Vec::with_capacity(cols.len() - 1);
            for (j, c) in cells.iter().enumerate() {
                if j == label_col {
                    continue;
                }
                let v: f64 = c.parse().map_err(|_| Error::Csv {
                    line: i + 1,
                    message: format!("column '{}': '{c}' is not a number", cols[j]),
                })?;
                if !v.is_finite() {
                    return Err(Error::Csv { line: i + 1, message: format!("column '{}': non-finite value", cols[j]) });
                }
                row.push(v);
            }
            rows.push(row);
            labels.push(cells[label_col].to_string());
        }
        LabeledDataset::new(names, rows, labels)
    }
}

/// An annotated occurrence and the index of the corpus piece it was taken from.
#[derive(Clone, Debug, PartialEq)]
pub struct Annotation {
    pub piece: usize,
    pub occurrence: PatternOccurrence,
}

/// For every annotation and repeat, a run of consecutive notes from the same piece with the
/// annotation's note count and a uniformly drawn start. Annotations longer than their piece
/// are skipped with a warning.
pub fn sample_random_excerpts(
    corpus: &[PointSet],
    annotations: &[Annotation],
    repeats: usize,
    seed: u64,
) -> Result<Vec<PatternOccurrence>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(annotations.len() * repeats);
    for (i, a) in annotations.iter().enumerate() {
        let piece = corpus
            .get(a.piece)
            .ok_or_else(|| invalid(format!("annotation {i} refers to missing piece {}", a.piece)))?;
        let len = a.occurrence.len();
        let n = piece.len();
        if len == 0 || len > n {
            log::warn!("annotation {i}: {len} notes do not fit in piece {} ({n} notes); skipped", a.piece);
            continue;
        }
        for _ in 0..repeats {
            let start = rng.random_range(0..=n - len);
            out.push(PatternOccurrence::new(piece.points()[start..start + len].to_vec())?);
        }
    }
    Ok(out)
}
