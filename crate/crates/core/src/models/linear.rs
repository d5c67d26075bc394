//! Linear models trained by mini-batch gradient descent with L2 penalty.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, check_diverged, LinearParams};
use crate::error::Result;
use crate::features::{FeatureMatrix, SparseVec};

/// Class-major dense weights plus one bias per class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearScores {
    pub n_features: usize,
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LinearScores {
    fn zeros(n_classes: usize, n_features: usize) -> Self {
        LinearScores {
            n_features,
            weights: vec![vec![0.0; n_features]; n_classes],
            bias: vec![0.0; n_classes],
        }
    }

    pub fn scores(&self, row: &SparseVec) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| row.dot_dense(w) + b)
            .collect()
    }

    fn penalty(&self, lambda: f64) -> f64 {
        0.5 * lambda * self.weights.iter().flatten().map(|w| w * w).sum::<f64>()
    }
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

/// Runs the shared epoch loop. `grad` receives the current model and one
/// row, returns the loss for that row and adds its score gradient into the
/// per-class buffer.
fn descend<F>(data: &FeatureMatrix, hp: &LinearParams, seed: u64, loss_grad: F) -> Result<(LinearScores, Vec<f64>)>
where
    F: Fn(&LinearScores, &SparseVec, usize, &mut [f64]) -> f64,
{
    let n_classes = data.n_classes();
    let mut model = LinearScores::zeros(n_classes, data.n_features);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..data.rows.len()).collect();
    let mut history = Vec::with_capacity(hp.epochs);
    let mut dscore = vec![0.0; n_classes];

    for epoch in 0..hp.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(hp.batch_size) {
            let scale = 1.0 / batch.len() as f64;
            let mut gw: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_classes];
            let mut gb = vec![0.0; n_classes];
            for &i in batch {
                dscore.iter_mut().for_each(|d| *d = 0.0);
                loss_grad(&model, &data.rows[i], data.labels[i], &mut dscore);
                for (c, &d) in dscore.iter().enumerate() {
                    if d != 0.0 {
                        gb[c] += d * scale;
                        gw[c].extend(data.rows[i].iter().map(|(f, x)| (f, d * x * scale)));
                    }
                }
            }
            let shrink = 1.0 - hp.learning_rate * hp.lambda;
            for c in 0..n_classes {
                let w = &mut model.weights[c];
                if shrink != 1.0 {
                    w.iter_mut().for_each(|v| *v *= shrink);
                }
                for &(f, g) in &gw[c] {
                    w[f] -= hp.learning_rate * g;
                }
                model.bias[c] -= hp.learning_rate * gb[c];
            }
        }
        let mut total = 0.0;
        for (row, &y) in data.rows.iter().zip(&data.labels) {
            dscore.iter_mut().for_each(|d| *d = 0.0);
            total += loss_grad(&model, row, y, &mut dscore);
        }
        let loss = total / data.rows.len().max(1) as f64 + model.penalty(hp.lambda);
        check_diverged(epoch, loss)?;
        history.push(loss);
    }
    Ok((model, history))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxRegression {
    pub linear: LinearScores,
}

impl SoftmaxRegression {
    pub fn fit(data: &FeatureMatrix, hp: &LinearParams, seed: u64) -> Result<(Self, Vec<f64>)> {
        let (linear, history) = descend(data, hp, seed, |m, row, y, d| {
            let p = softmax(&m.scores(row));
            for (c, pc) in p.iter().enumerate() {
                d[c] = pc - if c == y { 1.0 } else { 0.0 };
            }
            -p[y].max(f64::MIN_POSITIVE).ln()
        })?;
        Ok((SoftmaxRegression { linear }, history))
    }

    pub fn probabilities(&self, row: &SparseVec) -> Vec<f64> {
        softmax(&self.linear.scores(row))
    }

    pub fn predict(&self, row: &SparseVec) -> usize {
        argmax(&self.probabilities(row))
    }
}

/// One binary hinge-loss classifier per class; the highest margin wins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneVsRestSvm {
    pub linear: LinearScores,
}

impl OneVsRestSvm {
    pub fn fit(data: &FeatureMatrix, hp: &LinearParams, seed: u64) -> Result<(Self, Vec<f64>)> {
        let (linear, history) = descend(data, hp, seed, |m, row, y, d| {
            let mut loss = 0.0;
            for (c, s) in m.scores(row).into_iter().enumerate() {
                let t = if c == y { 1.0 } else { -1.0 };
                let margin = 1.0 - t * s;
                if margin > 0.0 {
                    loss += margin;
                    d[c] = -t;
                }
            }
            loss
        })?;
        Ok((OneVsRestSvm { linear }, history))
    }

    pub fn predict(&self, row: &SparseVec) -> usize {
        argmax(&self.linear.scores(row))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::testutil::separable;

    #[test]
    fn full_batch_logreg_loss_never_increases() {
        let data = separable(40, 7);
        let hp = LinearParams {
            epochs: 30,
            batch_size: 40,
            learning_rate: 0.1,
            lambda: 1e-4,
        };
        let (_, history) = SoftmaxRegression::fit(&data, &hp, 1).unwrap();
        for w in history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{history:?}");
        }
    }

    #[test]
    fn softmax_matches_direct_formula() {
        let p = softmax(&[1.0, 2.0, 3.0]);
        let z: f64 = [1.0f64, 2.0, 3.0].iter().map(|v| v.exp()).sum();
        for (i, v) in [1.0f64, 2.0, 3.0].iter().enumerate() {
            assert!((p[i] - v.exp() / z).abs() < 1e-15);
        }
    }

    #[test]
    fn svm_separates_training_data() {
        let data = separable(40, 9);
        let (m, _) = OneVsRestSvm::fit(&data, &LinearParams::default(), 3).unwrap();
        let correct = data.rows.iter().zip(&data.labels).filter(|(r, &y)| m.predict(r) == y).count();
        assert_eq!(correct, 40);
    }

    #[test]
    fn huge_learning_rate_reports_divergence() {
        let data = separable(20, 1);
        let hp = LinearParams {
            learning_rate: 1e300,
            lambda: 1.0,
            ..LinearParams::default()
        };
        assert!(matches!(
            SoftmaxRegression::fit(&data, &hp, 1),
            Err(crate::Error::Diverged { .. })
        ));
    }
}
