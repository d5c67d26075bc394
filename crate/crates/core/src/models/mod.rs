//! From-scratch classifiers over sparse TF-IDF rows.
//!
//! Every model trains single-threaded from a seeded generator, so identical
//! data, hyperparameters and seed give bit-identical parameters. Prediction
//! is a pure function of the model and may run in parallel over rows.

pub mod knn;
pub mod linear;
pub mod mlp;
pub mod naive_bayes;
pub mod tree;

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::features::{FeatureMatrix, SparseVec};

pub use mlp::{gradient_check, Activation, MlpParams, Probe, ProbeTargets};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Logreg,
    NaiveBayes,
    LinearSvc,
    Knn,
    DecisionTree,
    Mlp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Logreg,
        ModelKind::NaiveBayes,
        ModelKind::LinearSvc,
        ModelKind::Knn,
        ModelKind::DecisionTree,
        ModelKind::Mlp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Logreg => "logreg",
            ModelKind::NaiveBayes => "naive-bayes",
            ModelKind::LinearSvc => "linear-svc",
            ModelKind::Knn => "knn",
            ModelKind::DecisionTree => "decision-tree",
            ModelKind::Mlp => "mlp",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown model kind `{}`", s.trim())))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinearParams {
    /// L2 strength.
    pub lambda: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 20,
            min_samples_split: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NaiveBayesParams {
    /// Laplace smoothing.
    pub alpha: f64,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        NaiveBayesParams { alpha: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub mlp: MlpParams,
    pub logreg: LinearParams,
    pub svc: LinearParams,
    pub knn: KnnParams,
    pub tree: TreeParams,
    pub naive_bayes: NaiveBayesParams,
    pub seed: u64,
}

impl Default for LinearParams {
    fn default() -> Self {
        LinearParams {
            lambda: 1e-4,
            epochs: 100,
            learning_rate: 0.5,
            batch_size: 32,
        }
    }
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            mlp: MlpParams::default(),
            logreg: LinearParams::default(),
            svc: LinearParams {
                epochs: 50,
                learning_rate: 0.1,
                ..LinearParams::default()
            },
            knn: KnnParams::default(),
            tree: TreeParams::default(),
            naive_bayes: NaiveBayesParams::default(),
            seed: 42,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mlp.hidden_units", self.mlp.hidden_units),
            ("mlp.epochs", self.mlp.epochs),
            ("mlp.batch_size", self.mlp.batch_size),
            ("logreg.epochs", self.logreg.epochs),
            ("logreg.batch_size", self.logreg.batch_size),
            ("svc.epochs", self.svc.epochs),
            ("svc.batch_size", self.svc.batch_size),
            ("knn.k", self.knn.k),
            ("tree.max_depth", self.tree.max_depth),
            ("tree.min_samples_split", self.tree.min_samples_split),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Validation(format!("{name} must be positive")));
        }
        if !(0.0..1.0).contains(&self.mlp.dropout) {
            return Err(Error::Validation("mlp.dropout must lie in [0, 1)".into()));
        }
        if self.logreg.lambda < 0.0 || self.svc.lambda < 0.0 {
            return Err(Error::Validation("lambda must be non-negative".into()));
        }
        if self.naive_bayes.alpha <= 0.0 {
            return Err(Error::Validation("naive_bayes.alpha must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub epochs_run: usize,
    /// Training loss after each epoch, for iterative models.
    pub loss_history: Vec<f64>,
    pub final_loss: Option<f64>,
    pub notes: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum Params {
    Logreg(linear::SoftmaxRegression),
    NaiveBayes(naive_bayes::MultinomialNb),
    LinearSvc(linear::OneVsRestSvm),
    Knn(knn::NearestNeighbors),
    DecisionTree(tree::DecisionTree),
    Mlp(mlp::Network),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub n_features: usize,
    pub classes: Vec<String>,
    pub hyperparams: Hyperparams,
    pub meta: TrainingMeta,
    pub params: Params,
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn check_diverged(epoch: usize, loss: f64) -> Result<()> {
    if loss.is_finite() {
        Ok(())
    } else {
        Err(Error::Diverged { epoch, loss })
    }
}

pub fn train(kind: ModelKind, data: &FeatureMatrix, hp: &Hyperparams) -> Result<TrainedModel> {
    hp.validate()?;
    if data.labels.len() != data.rows.len() {
        return Err(Error::Contract("row and label counts differ".into()));
    }
    let n_classes = data.n_classes();
    if let Some(&bad) = data.labels.iter().find(|&&l| l >= n_classes) {
        return Err(Error::Contract(format!("label id {bad} outside class table")));
    }
    let mut present: Vec<usize> = data.labels.clone();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(Error::Validation(format!(
            "training needs at least 2 classes, found {}",
            present.len()
        )));
    }
    if let Some(row) = data.rows.iter().find(|r| r.max_index().is_some_and(|i| i >= data.n_features)) {
        return Err(Error::Contract(format!(
            "row index {} exceeds feature count {}",
            row.max_index().unwrap_or(0),
            data.n_features
        )));
    }

    let mut meta = TrainingMeta {
        seed: hp.seed,
        ..TrainingMeta::default()
    };
    let params = match kind {
        ModelKind::Logreg => {
            let (m, history) = linear::SoftmaxRegression::fit(data, &hp.logreg, hp.seed)?;
            meta.loss_history = history;
            Params::Logreg(m)
        }
        ModelKind::LinearSvc => {
            let (m, history) = linear::OneVsRestSvm::fit(data, &hp.svc, hp.seed)?;
            meta.loss_history = history;
            Params::LinearSvc(m)
        }
        ModelKind::NaiveBayes => Params::NaiveBayes(naive_bayes::MultinomialNb::fit(data, &hp.naive_bayes)),
        ModelKind::Knn => Params::Knn(knn::NearestNeighbors::fit(data, &hp.knn)),
        ModelKind::DecisionTree => Params::DecisionTree(tree::DecisionTree::fit(data, &hp.tree)),
        ModelKind::Mlp => {
            let (m, history) = mlp::Network::fit(data, &hp.mlp, hp.seed)?;
            meta.notes = format!(
                "hidden activation {}; adam beta1 {} beta2 {} eps {}; output {}",
                hp.mlp.activation.name(),
                hp.mlp.beta1,
                hp.mlp.beta2,
                hp.mlp.adam_epsilon,
                m.head_name()
            );
            meta.loss_history = history;
            Params::Mlp(m)
        }
    };
    meta.epochs_run = meta.loss_history.len();
    meta.final_loss = meta.loss_history.last().copied();
    Ok(TrainedModel {
        kind,
        n_features: data.n_features,
        classes: data.classes.clone(),
        hyperparams: hp.clone(),
        meta,
        params,
    })
}

impl TrainedModel {
    fn predict_row(&self, row: &SparseVec) -> usize {
        match &self.params {
            Params::Logreg(m) => m.predict(row),
            Params::NaiveBayes(m) => m.predict(row),
            Params::LinearSvc(m) => m.predict(row),
            Params::Knn(m) => m.predict(row),
            Params::DecisionTree(m) => m.predict(row),
            Params::Mlp(m) => m.predict(row),
        }
    }

    pub fn predict(&self, rows: &[SparseVec]) -> Result<Vec<usize>> {
        self.predict_with(rows, Execution::default())
    }

    /// Rows narrower than the model are zero-padded; wider rows are an error.
    pub fn predict_with(&self, rows: &[SparseVec], exec: Execution) -> Result<Vec<usize>> {
        if let Some(i) = rows
            .iter()
            .filter_map(SparseVec::max_index)
            .find(|&i| i >= self.n_features)
        {
            return Err(Error::Contract(format!(
                "row has feature index {i} but the model has {} features",
                self.n_features
            )));
        }
        Ok(exec.map(rows, |r| self.predict_row(r)))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::features::{FeatureMatrix, SparseVec};

    /// Two well separated classes on features 0 and 1 plus noise columns.
    pub fn separable(n: usize, seed: u64) -> FeatureMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let class = i % 2;
            let mut dense = vec![0.0; 6];
            dense[class] = 1.0 + rng.random::<f64>();
            for x in dense.iter_mut().skip(2) {
                *x = rng.random::<f64>() * 0.3;
            }
            rows.push(SparseVec::from_dense(&dense));
            labels.push(class);
        }
        FeatureMatrix {
            rows,
            n_features: 6,
            keys: (0..n).map(|i| format!("r{i}")).collect(),
            labels,
            classes: vec!["neg".into(), "pos".into()],
        }
    }
}
