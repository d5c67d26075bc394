//! Multinomial naive Bayes with additive smoothing.

use serde::{Deserialize, Serialize};

use super::{argmax, NaiveBayesParams};
use crate::features::{FeatureMatrix, SparseVec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultinomialNb {
    pub log_prior: Vec<f64>,
    /// `log_likelihood[c][f]` is ln P(feature f | class c).
    pub log_likelihood: Vec<Vec<f64>>,
}

impl MultinomialNb {
    pub fn fit(data: &FeatureMatrix, hp: &NaiveBayesParams) -> Self {
        let n_classes = data.n_classes();
        let width = data.n_features;
        let mut counts = vec![vec![0.0; width]; n_classes];
        let mut docs = vec![0usize; n_classes];
        for (row, &y) in data.rows.iter().zip(&data.labels) {
            docs[y] += 1;
            for (f, x) in row.iter() {
                counts[y][f] += x;
            }
        }
        let total_docs = data.rows.len() as f64;
        let log_prior = docs
            .iter()
            .map(|&d| if d == 0 { f64::NEG_INFINITY } else { (d as f64 / total_docs).ln() })
            .collect();
        let log_likelihood = counts
            .into_iter()
            .map(|c| {
                let denom = c.iter().sum::<f64>() + hp.alpha * width as f64;
                c.into_iter().map(|n| ((n + hp.alpha) / denom).ln()).collect()
            })
            .collect();
        MultinomialNb { log_prior, log_likelihood }
    }

    pub fn joint_log_likelihood(&self, row: &SparseVec) -> Vec<f64> {
        self.log_prior
            .iter()
            .zip(&self.log_likelihood)
            .map(|(p, ll)| p + row.dot_dense(ll))
            .collect()
    }

    pub fn predict(&self, row: &SparseVec) -> usize {
        argmax(&self.joint_log_likelihood(row))
    }
}
