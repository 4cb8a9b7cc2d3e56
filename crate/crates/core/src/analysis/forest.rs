use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mix_seed;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Leaf(usize),
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// A CART classification tree grown with the Gini criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    /// Total weighted Gini decrease per feature, normalized to sum 1 (all zero for a stump).
    pub importances: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Features tried at each split; `None` tries all.
    pub mtry: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { mtry: None, max_depth: None, min_samples_split: 2 }
    }
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / nf).powi(2)).sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

struct Grower<'a, R: Rng> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    classes: usize,
    params: TreeParams,
    rng: &'a mut R,
    nodes: Vec<Node>,
    importances: Vec<f64>,
}

impl<R: Rng> Grower<'_, R> {
    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.classes];
        for &i in idx {
            c[self.y[i]] += 1;
        }
        c
    }

    /// Best (gain, feature, threshold) over a random subset of features.
    fn best_split(&mut self, idx: &[usize], parent: f64) -> Option<(f64, usize, f64)> {
        let d = self.x[0].len();
        let m = self.params.mtry.unwrap_or(d).clamp(1, d);
        let features = sample(self.rng, d, m).into_vec();
        let n = idx.len();
        let total = self.counts(idx);
        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted = idx.to_vec();
        for f in features {
            sorted.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let mut left = vec![0usize; self.classes];
            for k in 0..n - 1 {
                left[self.y[sorted[k]]] += 1;
                let (a, b) = (self.x[sorted[k]][f], self.x[sorted[k + 1]][f]);
                if a == b {
                    continue;
                }
                let nl = k + 1;
                let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
                let child = (nl as f64 * gini(&left, nl) + (n - nl) as f64 * gini(&right, n - nl)) / n as f64;
                let gain = parent - child;
                if gain > 1e-12 && best.is_none_or(|(g, _, _)| gain > g + 1e-15) {
                    best = Some((gain, f, a + (b - a) / 2.0));
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let counts = self.counts(&idx);
        let n = idx.len();
        let impurity = gini(&counts, n);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(majority(&counts)));
        let stop = impurity <= 0.0
            || n < self.params.min_samples_split.max(2)
            || self.params.max_depth.is_some_and(|m| depth >= m);
        if stop {
            return id;
        }
        let Some((gain, feature, threshold)) = self.best_split(&idx, impurity) else {
            return id;
        };
        self.importances[feature] += gain * n as f64;
        let (l, r): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| self.x[i][feature] <= threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }
}

impl DecisionTree {
    /// Grows on the rows listed in `sample` (repeats allowed).
    pub fn fit_rows<R: Rng>(
        x: &[Vec<f64>],
        y: &[usize],
        classes: usize,
        sample: Vec<usize>,
        params: TreeParams,
        rng: &mut R,
    ) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let mut g = Grower { x, y, classes, params, rng, nodes: Vec::new(), importances: vec![0.0; d] };
        g.grow(sample, 0);
        let total: f64 = g.importances.iter().sum();
        let importances = if total > 0.0 {
            g.importances.iter().map(|v| v / total).collect()
        } else {
            vec![0.0; d]
        };
        DecisionTree { nodes: g.nodes, importances }
    }

    pub fn fit<R: Rng>(x: &[Vec<f64>], y: &[usize], classes: usize, params: TreeParams, rng: &mut R) -> Self {
        Self::fit_rows(x, y, classes, (0..x.len()).collect(), params, rng)
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(c) => return c,
                Node::Split { feature, threshold, left, right } => {
                    i = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub trees: usize,
    /// Features tried per split; `None` means floor(sqrt(dim)).
    pub mtry: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { trees: 200, mtry: None, seed: 0 }
    }
}

/// Bootstrap-aggregated CART trees voting by majority.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    classes: usize,
}

impl RandomForest {
    /// Each tree draws its bootstrap sample and split features from its own stream derived
    /// from the seed, so the forest does not depend on thread scheduling.
    pub fn fit(x: &[Vec<f64>], y: &[usize], classes: usize, params: ForestParams) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let mtry = params.mtry.unwrap_or(((d as f64).sqrt().floor() as usize).max(1));
        let tree_params = TreeParams { mtry: Some(mtry), ..TreeParams::default() };
        let n = x.len();
        let trees = (0..params.trees.max(1))
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(params.seed, t as u64));
                let boot = (0..n).map(|_| rng.random_range(0..n)).collect();
                DecisionTree::fit_rows(x, y, classes, boot, tree_params, &mut rng)
            })
            .collect();
        RandomForest { trees, classes }
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        let mut votes = vec![0usize; self.classes];
        for t in &self.trees {
            votes[t.predict(row)] += 1;
        }
        majority(&votes)
    }

    /// Mean decrease in Gini impurity per feature, averaged over trees.
    pub fn importances(&self) -> Vec<f64> {
        let d = self.trees[0].importances.len();
        let mut acc = vec![0.0; d];
        for t in &self.trees {
            for (a, v) in acc.iter_mut().zip(&t.importances) {
                *a += v;
            }
        }
        acc.iter().map(|v| v / self.trees.len() as f64).collect()
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }
}
