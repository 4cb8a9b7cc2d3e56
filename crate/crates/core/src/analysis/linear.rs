use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};

fn class_means(x: &[Vec<f64>], y: &[usize], classes: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let d = x[0].len();
    let mut sums = vec![vec![0.0; d]; classes];
    let mut counts = vec![0usize; classes];
    for (r, &c) in x.iter().zip(y) {
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(r) {
            *s += v;
        }
    }
    for (s, &n) in sums.iter_mut().zip(&counts) {
        if n > 0 {
            s.iter_mut().for_each(|v| *v /= n as f64);
        }
    }
    (sums, counts)
}

fn check(x: &[Vec<f64>], y: &[usize], classes: usize) -> Result<()> {
    if x.is_empty() || x.len() != y.len() {
        return Err(invalid("training data is empty or labels do not match rows"));
    }
    let mut seen = vec![false; classes];
    for &c in y {
        if c >= classes {
            return Err(invalid(format!("label {c} out of range")));
        }
        seen[c] = true;
    }
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(invalid("need at least two classes"));
    }
    Ok(())
}

/// Gaussian class-conditional naive Bayes with Laplace-smoothed class priors.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianNb {
    means: Vec<Vec<f64>>,
    vars: Vec<Vec<f64>>,
    log_priors: Vec<f64>,
}

impl GaussianNb {
    pub fn fit(x: &[Vec<f64>], y: &[usize], classes: usize, alpha: f64) -> Result<Self> {
        check(x, y, classes)?;
        let d = x[0].len();
        let (means, counts) = class_means(x, y, classes);
        let mut vars = vec![vec![0.0; d]; classes];
        for (r, &c) in x.iter().zip(y) {
            for j in 0..d {
                vars[c][j] += (r[j] - means[c][j]).powi(2);
            }
        }
        // variance floor relative to the widest column keeps constant columns finite
        let mut widest = 0.0f64;
        for (v, &n) in vars.iter_mut().zip(&counts) {
            for e in v.iter_mut() {
                *e /= n.max(1) as f64;
                widest = widest.max(*e);
            }
        }
        let floor = 1e-9 * widest.max(1e-12);
        vars.iter_mut().flatten().for_each(|v| *v += floor);
        let n = x.len() as f64;
        let log_priors = counts
            .iter()
            .map(|&c| ((c as f64 + alpha) / (n + alpha * classes as f64)).ln())
            .collect();
        Ok(GaussianNb { means, vars, log_priors })
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        let score = |c: usize| {
            self.log_priors[c]
                - 0.5
                    * row
                        .iter()
                        .zip(&self.means[c])
                        .zip(&self.vars[c])
                        .map(|((x, m), v)| (x - m).powi(2) / v + v.ln())
                        .sum::<f64>()
        };
        argmax((0..self.means.len()).map(score))
    }
}

fn argmax(scores: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, s) in scores.enumerate() {
        if s > best.1 {
            best = (i, s);
        }
    }
    best.0
}

/// Ridge added to the pooled covariance when it is not positive definite.
pub const LDA_RIDGE: f64 = 1e-6;

/// Linear discriminant with pooled within-class covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct Lda {
    weights: Vec<DVector<f64>>,
    offsets: Vec<f64>,
    /// Ridge actually added to the covariance diagonal (0 when none was needed).
    pub ridge: f64,
}

impl Lda {
    pub fn fit(x: &[Vec<f64>], y: &[usize], classes: usize) -> Result<Self> {
        check(x, y, classes)?;
        let d = x[0].len();
        let n = x.len();
        let (means, counts) = class_means(x, y, classes);
        let mut cov = DMatrix::<f64>::zeros(d, d);
        for (r, &c) in x.iter().zip(y) {
            let dv = DVector::from_iterator(d, r.iter().zip(&means[c]).map(|(a, b)| a - b));
            cov += &dv * dv.transpose();
        }
        let present = counts.iter().filter(|&&c| c > 0).count();
        cov /= (n.saturating_sub(present)).max(1) as f64;

        let mut ridge = 0.0;
        let chol = loop {
            let mut m = cov.clone();
            for i in 0..d {
                m[(i, i)] += ridge;
            }
            // a pivot this small relative to the diagonal counts as singular
            if let Some(ch) = m.clone().cholesky() {
                let l = ch.l();
                let diag_max = (0..d).map(|i| m[(i, i)]).fold(0.0f64, f64::max);
                let piv_min = (0..d).map(|i| l[(i, i)].powi(2)).fold(f64::INFINITY, f64::min);
                if piv_min > 1e-12 * diag_max.max(1e-300) {
                    break ch;
                }
            }
            ridge = if ridge == 0.0 { LDA_RIDGE } else { ridge * 10.0 };
            if ridge > 1e6 {
                return Err(invalid("pooled covariance cannot be regularized"));
            }
        };
        let total = n as f64;
        let mut weights = Vec::with_capacity(classes);
        let mut offsets = Vec::with_capacity(classes);
        for (m, &c) in means.iter().zip(&counts) {
            let mu = DVector::from_column_slice(m);
            let w = chol.solve(&mu);
            let prior = if c > 0 { (c as f64 / total).ln() } else { f64::NEG_INFINITY };
            offsets.push(-0.5 * mu.dot(&w) + prior);
            weights.push(w);
        }
        Ok(Lda { weights, offsets, ridge })
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        let x = DVector::from_column_slice(row);
        argmax(self.weights.iter().zip(&self.offsets).map(|(w, b)| x.dot(w) + b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn blobs(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let c = i % 2;
            let centre = if c == 0 { -5.0 } else { 5.0 };
            x.push((0..3).map(|_| centre + rng.random_range(-1.0..1.0)).collect());
            y.push(c);
        }
        (x, y)
    }

    #[test]
    fn separated_blobs() {
        let (x, y) = blobs(100, 1);
        let nb = GaussianNb::fit(&x, &y, 2, 1.0).unwrap();
        let lda = Lda::fit(&x, &y, 2).unwrap();
        for (r, &c) in x.iter().zip(&y) {
            assert_eq!(nb.predict(r), c);
            assert_eq!(lda.predict(r), c);
        }
        assert_eq!(lda.ridge, 0.0);
    }

    #[test]
    fn singular_covariance_gets_ridge() {
        let (mut x, y) = blobs(40, 2);
        for r in &mut x {
            r.push(r[0] * 2.0);
            r.push(7.0);
        }
        let lda = Lda::fit(&x, &y, 2).unwrap();
        assert!(lda.ridge >= LDA_RIDGE);
        assert!(x.iter().zip(&y).all(|(r, &c)| lda.predict(r) == c));
        let nb = GaussianNb::fit(&x, &y, 2, 1.0).unwrap();
        assert!(x.iter().zip(&y).all(|(r, &c)| nb.predict(r) == c));
    }

    #[test]
    fn one_class_is_an_error() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(GaussianNb::fit(&x, &[0, 0], 2, 1.0).is_err());
        assert!(Lda::fit(&x, &[1, 1], 2).is_err());
    }
}
