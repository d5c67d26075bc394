//! k-nearest neighbours under cosine distance.

use serde::{Deserialize, Serialize};

use super::{argmax, KnnParams};
use crate::features::{FeatureMatrix, SparseVec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearestNeighbors {
    pub k: usize,
    pub n_classes: usize,
    pub rows: Vec<SparseVec>,
    pub labels: Vec<usize>,
}

pub fn cosine_distance(a: &SparseVec, b: &SparseVec) -> f64 {
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        1.0
    } else {
        1.0 - a.dot(b) / denom
    }
}

impl NearestNeighbors {
    pub fn fit(data: &FeatureMatrix, hp: &KnnParams) -> Self {
        NearestNeighbors {
            k: hp.k,
            n_classes: data.n_classes(),
            rows: data.rows.clone(),
            labels: data.labels.clone(),
        }
    }

    /// Training row indices of the k nearest rows, nearest first; equal
    /// distances keep training order.
    pub fn neighbors(&self, row: &SparseVec) -> Vec<usize> {
        let mut dist: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (cosine_distance(row, r), i))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        dist.into_iter().take(self.k).map(|(_, i)| i).collect()
    }

    pub fn predict(&self, row: &SparseVec) -> usize {
        let mut votes = vec![0.0; self.n_classes];
        for i in self.neighbors(row) {
            votes[self.labels[i]] += 1.0;
        }
        argmax(&votes)
    }
}
