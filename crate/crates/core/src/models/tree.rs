//! CART classification tree with Gini impurity.
//!
//! Rows go left when `x[feature] <= threshold`. Among equally good splits
//! the lowest feature, then the lowest threshold, wins.

use serde::{Deserialize, Serialize};

use super::{argmax, TreeParams};
use crate::features::{FeatureMatrix, SparseVec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        class: usize,
        counts: Vec<usize>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Node 0 is the root.
    pub nodes: Vec<Node>,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

pub(crate) fn value_at(row: &SparseVec, feature: usize) -> f64 {
    match row.indices.binary_search(&feature) {
        Ok(i) => row.values[i],
        Err(_) => 0.0,
    }
}

struct Builder<'a> {
    data: &'a FeatureMatrix,
    /// Column-major view: per feature, (row, value) for every nonzero.
    columns: Vec<Vec<(usize, f64)>>,
    hp: &'a TreeParams,
    nodes: Vec<Node>,
    in_node: Vec<bool>,
}

struct Candidate {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_> {
    fn class_counts(&self, samples: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.data.n_classes()];
        for &i in samples {
            counts[self.data.labels[i]] += 1;
        }
        counts
    }

    fn best_split(&mut self, samples: &[usize], counts: &[usize]) -> Option<Candidate> {
        let n = samples.len();
        let k = counts.len();
        for &i in samples {
            self.in_node[i] = true;
        }
        let mut best: Option<Candidate> = None;
        let mut entries: Vec<(f64, usize)> = Vec::new();
        for (feature, column) in self.columns.iter().enumerate() {
            entries.clear();
            entries.extend(
                column
                    .iter()
                    .filter(|(r, _)| self.in_node[*r])
                    .map(|&(r, v)| (v, self.data.labels[r])),
            );
            if entries.is_empty() {
                continue;
            }
            let zeros = n - entries.len();
            let mut zero_counts = counts.to_vec();
            for &(_, y) in &entries {
                zero_counts[y] -= 1;
            }
            entries.sort_by(|a, b| a.0.total_cmp(&b.0));

            // Sweep sorted distinct values with the zero block merged in place.
            let mut groups: Vec<(f64, Vec<usize>, usize)> = Vec::new();
            let mut zero_pending = zeros > 0;
            for &(v, y) in &entries {
                if zero_pending && v >= 0.0 {
                    groups.push((0.0, zero_counts.clone(), zeros));
                    zero_pending = false;
                }
                match groups.last_mut() {
                    Some((gv, gc, gn)) if *gv == v => {
                        gc[y] += 1;
                        *gn += 1;
                    }
                    _ => {
                        let mut c = vec![0; k];
                        c[y] = 1;
                        groups.push((v, c, 1));
                    }
                }
            }
            if zero_pending {
                groups.push((0.0, zero_counts, zeros));
            }

            let mut left = vec![0; k];
            let mut left_n = 0;
            for pair in groups.windows(2) {
                let (v, c, gn) = &pair[0];
                for (l, x) in left.iter_mut().zip(c) {
                    *l += x;
                }
                left_n += gn;
                let right: Vec<usize> = counts.iter().zip(&left).map(|(t, l)| t - l).collect();
                let right_n = n - left_n;
                let impurity =
                    (left_n as f64 * gini(&left, left_n) + right_n as f64 * gini(&right, right_n)) / n as f64;
                let threshold = v + (pair[1].0 - v) / 2.0;
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    best = Some(Candidate {
                        impurity,
                        feature,
                        threshold,
                    });
                }
            }
        }
        for &i in samples {
            self.in_node[i] = false;
        }
        best
    }

    fn grow(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let counts = self.class_counts(&samples);
        let id = self.nodes.len();
        let leaf = Node::Leaf {
            class: argmax(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>()),
            counts: counts.clone(),
        };
        self.nodes.push(leaf);
        let impurity = gini(&counts, samples.len());
        if depth >= self.hp.max_depth || samples.len() < self.hp.min_samples_split || impurity == 0.0 {
            return id;
        }
        let Some(best) = self.best_split(&samples, &counts) else {
            return id;
        };
        if best.impurity >= impurity {
            return id;
        }
        let (l, r): (Vec<usize>, Vec<usize>) = samples
            .iter()
            .partition(|&&i| value_at(&self.data.rows[i], best.feature) <= best.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }
}

impl DecisionTree {
    pub fn fit(data: &FeatureMatrix, hp: &TreeParams) -> Self {
        let mut columns = vec![Vec::new(); data.n_features];
        for (r, row) in data.rows.iter().enumerate() {
            for (f, v) in row.iter() {
                columns[f].push((r, v));
            }
        }
        let mut builder = Builder {
            data,
            columns,
            hp,
            nodes: Vec::new(),
            in_node: vec![false; data.rows.len()],
        };
        builder.grow((0..data.rows.len()).collect(), 0);
        DecisionTree { nodes: builder.nodes }
    }

    pub fn leaf_for(&self, row: &SparseVec) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { .. } => return at,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if value_at(row, *feature) <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict(&self, row: &SparseVec) -> usize {
        match &self.nodes[self.leaf_for(row)] {
            Node::Leaf { class, .. } => *class,
            Node::Split { .. } => unreachable!("leaf_for stops at leaves"),
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::testutil::separable;

    /// (feature, threshold, goes_left)
    type Test = (usize, f64, bool);

    /// Every root-to-leaf path as its leaf class and tests.
    fn paths(tree: &DecisionTree) -> Vec<(usize, Vec<Test>)> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((at, conds)) = stack.pop() {
            match &tree.nodes[at] {
                Node::Leaf { class, .. } => out.push((*class, conds)),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let mut l = conds.clone();
                    l.push((*feature, *threshold, true));
                    let mut r = conds;
                    r.push((*feature, *threshold, false));
                    stack.push((*left, l));
                    stack.push((*right, r));
                }
            }
        }
        out
    }

    #[test]
    fn prediction_agrees_with_exhaustive_path_evaluation() {
        let data = separable(50, 11);
        let tree = DecisionTree::fit(&data, &TreeParams::default());
        let all = paths(&tree);
        for row in &data.rows {
            let hits: Vec<usize> = all
                .iter()
                .filter(|(_, conds)| {
                    conds.iter().all(|&(f, t, goes_left)| (value_at(row, f) <= t) == goes_left)
                })
                .map(|(c, _)| *c)
                .collect();
            assert_eq!(hits.len(), 1);
            assert_eq!(hits[0], tree.predict(row));
        }
    }

    #[test]
    fn fits_training_data_within_depth() {
        let data = separable(50, 4);
        let tree = DecisionTree::fit(&data, &TreeParams::default());
        assert!(tree.depth() <= 20);
        for (row, &y) in data.rows.iter().zip(&data.labels) {
            assert_eq!(tree.predict(row), y);
        }
        let stump = DecisionTree::fit(&data, &TreeParams { max_depth: 1, min_samples_split: 2 });
        assert!(stump.depth() <= 1);
    }

    #[test]
    fn equal_splits_pick_lowest_feature() {
        // features 0 and 1 are identical copies of the label
        let rows = [[1.0, 1.0], [0.0, 0.0], [1.0, 1.0], [0.0, 0.0]];
        let data = FeatureMatrix {
            keys: (0..4).map(|i| i.to_string()).collect(),
            rows: rows.iter().map(|r| SparseVec::from_dense(r)).collect(),
            n_features: 2,
            labels: vec![1, 0, 1, 0],
            classes: vec!["a".into(), "b".into()],
        };
        let tree = DecisionTree::fit(&data, &TreeParams::default());
        match &tree.nodes[0] {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 0.5);
            }
            leaf => panic!("expected a split, got {leaf:?}"),
        }
    }

    #[test]
    fn negative_values_split_correctly() {
        let rows = [[-1.0], [0.0], [2.0], [-3.0]];
        let data = FeatureMatrix {
            keys: (0..4).map(|i| i.to_string()).collect(),
            rows: rows.iter().map(|r| SparseVec::from_dense(r)).collect(),
            n_features: 1,
            labels: vec![0, 1, 1, 0],
            classes: vec!["a".into(), "b".into()],
        };
        let tree = DecisionTree::fit(&data, &TreeParams::default());
        for (row, &y) in data.rows.iter().zip(&data.labels) {
            assert_eq!(tree.predict(row), y);
        }
    }
}
