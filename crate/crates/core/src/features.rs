//! Preprocessing and TF-IDF vectorization.
//!
//! Weights are `tf(t) * (ln((1 + N) / (1 + df(t))) + 1)` with raw term
//! counts, followed by L2 row normalization. Vocabulary columns follow the
//! lexicographic order of the tokens.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Category, NewsArticle};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::inference::{augment_text, InferenceSet, SENTIMENT_TOKEN_PREFIX};
use crate::labeler::{BarrierKind, EventAnnotation};
use crate::sentiment::SentimentScore;

const BUILTIN_STOPWORDS: &str = include_str!("../data/stopwords.txt");

#[derive(Clone, Debug, PartialEq)]
pub struct TokenizerConfig {
    pub stopwords: HashSet<String>,
    pub case_fold: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            stopwords: parse_stopwords(BUILTIN_STOPWORDS),
            case_fold: true,
        }
    }
}

impl TokenizerConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(TokenizerConfig {
            stopwords: parse_stopwords(&text),
            case_fold: true,
        })
    }
}

fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Case-folded alphanumeric tokens with stopwords removed. Reserved
/// `SENTTOKEN_*` tokens pass through verbatim.
pub fn preprocess(text: &str, config: &TokenizerConfig) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let bare = chunk.trim_matches(|c: char| !(c.is_alphanumeric() || c == '_'));
        if bare.starts_with(SENTIMENT_TOKEN_PREFIX) {
            tokens.push(bare.to_string());
            continue;
        }
        for run in chunk.split(|c: char| !c.is_alphanumeric()) {
            if run.is_empty() {
                continue;
            }
            let token = if config.case_fold {
                run.to_lowercase()
            } else {
                run.to_string()
            };
            if !config.stopwords.contains(&token.to_lowercase()) {
                tokens.push(token);
            }
        }
    }
    tokens
}

/// Sparse row with strictly increasing column indices.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVec {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVec {
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_by_key(|&(i, _)| i);
        let mut v = SparseVec::default();
        for (i, x) in pairs {
            if v.indices.last() == Some(&i) {
                *v.values.last_mut().unwrap() += x;
            } else {
                v.indices.push(i);
                v.values.push(x);
            }
        }
        v
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0.0)
            .map(|(i, &x)| (i, x))
            .unzip();
        SparseVec { indices, values }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Dot product with a dense vector; indices past its end count as zero.
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.iter()
            .filter(|&(i, _)| i < dense.len())
            .map(|(i, x)| x * dense[i])
            .sum()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.indices.last().copied()
    }

    pub fn to_dense(&self, width: usize) -> Vec<f64> {
        let mut out = vec![0.0; width];
        for (i, x) in self.iter() {
            if i < width {
                out[i] = x;
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vectorizer {
    pub vocabulary: BTreeMap<String, usize>,
    pub document_frequency: Vec<usize>,
    pub corpus_size: usize,
    pub fitted: bool,
}

impl Vectorizer {
    pub fn fitted(documents: &[Vec<String>]) -> Result<Self> {
        let mut v = Vectorizer::default();
        v.fit(documents)?;
        Ok(v)
    }

    /// Rebuilds vocabulary and document frequencies from scratch.
    pub fn fit(&mut self, documents: &[Vec<String>]) -> Result<()> {
        if documents.is_empty() {
            return Err(Error::Validation("cannot fit a vectorizer on an empty corpus".into()));
        }
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in documents {
            let distinct: BTreeSet<&str> = doc.iter().map(String::as_str).collect();
            for t in distinct {
                *df.entry(t).or_default() += 1;
            }
        }
        self.vocabulary = df
            .keys()
            .enumerate()
            .map(|(i, t)| (t.to_string(), i))
            .collect();
        self.document_frequency = df.into_values().collect();
        self.corpus_size = documents.len();
        self.fitted = true;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocabulary.is_empty()
    }

    pub fn idf(&self, column: usize) -> f64 {
        let n = self.corpus_size as f64;
        ((1.0 + n) / (1.0 + self.document_frequency[column] as f64)).ln() + 1.0
    }

    /// TF-IDF weights before normalization; unseen tokens are ignored.
    pub fn raw_weights(&self, doc: &[String]) -> Result<SparseVec> {
        if !self.fitted {
            return Err(Error::Contract("vectorizer used before fit".into()));
        }
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for t in doc {
            if let Some(&col) = self.vocabulary.get(t) {
                *counts.entry(col).or_default() += 1.0;
            }
        }
        let pairs = counts
            .into_iter()
            .map(|(col, tf)| (col, tf * self.idf(col)))
            .collect();
        Ok(SparseVec::from_pairs(pairs))
    }

    pub fn transform(&self, doc: &[String]) -> Result<SparseVec> {
        let mut v = self.raw_weights(doc)?;
        let norm = v.norm();
        if norm > 0.0 {
            v.values.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(v)
    }

    pub fn transform_batch(&self, docs: &[Vec<String>], exec: Execution) -> Result<Vec<SparseVec>> {
        exec.map(docs, |d| self.transform(d)).into_iter().collect()
    }

    /// Tokens in column order.
    pub fn terms(&self) -> Vec<&str> {
        let mut terms = vec![""; self.vocabulary.len()];
        for (t, &i) in &self.vocabulary {
            terms[i] = t;
        }
        terms
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub rows: Vec<SparseVec>,
    pub n_features: usize,
    pub labels: Vec<usize>,
    pub keys: Vec<String>,
    pub classes: Vec<String>,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn subset(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            n_features: self.n_features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            keys: indices.iter().map(|&i| self.keys[i].clone()).collect(),
            classes: self.classes.clone(),
        }
    }

    /// Writes `matrix.txt` (row col weight triplets, with a `rows cols nnz`
    /// first line), `labels.tsv` (article_id, label) and `classes.tsv`.
    /// A stamp becomes a leading `# ` comment line in every file.
    pub fn export(&self, dir: &Path, vectorizer: Option<&Vectorizer>, stamp: Option<&str>) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, body: &[u8]| {
            let path = dir.join(name);
            let mut out = Vec::with_capacity(body.len() + 64);
            if let Some(s) = stamp {
                writeln!(out, "# {s}").unwrap();
            }
            out.extend_from_slice(body);
            fs::write(&path, out).map_err(|e| Error::io(path, e))
        };
        let mut m = Vec::new();
        let nnz: usize = self.rows.iter().map(SparseVec::nnz).sum();
        writeln!(m, "{} {} {}", self.rows.len(), self.n_features, nnz).unwrap();
        for (r, row) in self.rows.iter().enumerate() {
            for (c, w) in row.iter() {
                writeln!(m, "{r} {c} {w}").unwrap();
            }
        }
        write("matrix.txt", &m)?;
        let mut l = Vec::new();
        for (key, &label) in self.keys.iter().zip(&self.labels) {
            writeln!(l, "{key}\t{}", self.classes[label]).unwrap();
        }
        write("labels.tsv", &l)?;
        let mut c = Vec::new();
        for (i, name) in self.classes.iter().enumerate() {
            writeln!(c, "{i}\t{name}").unwrap();
        }
        write("classes.tsv", &c)?;
        if let Some(v) = vectorizer {
            let mut voc = Vec::new();
            for (i, t) in v.terms().iter().enumerate() {
                writeln!(voc, "{i}\t{t}\t{}", v.document_frequency[i]).unwrap();
            }
            write("vocab.tsv", &voc)?;
        }
        Ok(())
    }

    /// Reads a directory written by [`FeatureMatrix::export`].
    pub fn import(dir: &Path) -> Result<FeatureMatrix> {
        let read = |name: &str| {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|e| Error::io(path, e))
        };
        let bad = |what: &str, line: usize| Error::Parse(format!("{what} line {line} is malformed"));

        let classes: Vec<String> = read("classes.tsv")?
            .lines()
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .enumerate()
            .map(|(i, l)| {
                l.split_once('\t')
                    .map(|(_, name)| name.to_string())
                    .ok_or_else(|| bad("classes.tsv", i + 1))
            })
            .collect::<Result<_>>()?;
        let mut keys = Vec::new();
        let mut labels = Vec::new();
        for (i, l) in read("labels.tsv")?
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        {
            let (key, name) = l.split_once('\t').ok_or_else(|| bad("labels.tsv", i + 1))?;
            let id = classes
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::Parse(format!("label `{name}` not in classes.tsv")))?;
            keys.push(key.to_string());
            labels.push(id);
        }
        let matrix = read("matrix.txt")?;
        let mut lines = matrix.lines().enumerate().filter(|(_, l)| !l.starts_with('#'));
        let header: Vec<usize> = lines
            .next()
            .map(|(_, l)| l.split_whitespace().filter_map(|x| x.parse().ok()).collect())
            .unwrap_or_default();
        if header.len() != 3 || header[0] != keys.len() {
            return Err(bad("matrix.txt", 1));
        }
        let mut pairs: Vec<Vec<(usize, f64)>> = vec![Vec::new(); header[0]];
        for (i, l) in lines.filter(|(_, l)| !l.is_empty()) {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let parsed = (|| {
                let r: usize = parts.first()?.parse().ok()?;
                let c: usize = parts.get(1)?.parse().ok()?;
                let w: f64 = parts.get(2)?.parse().ok()?;
                (r < header[0] && c < header[1]).then_some((r, c, w))
            })();
            let (r, c, w) = parsed.ok_or_else(|| bad("matrix.txt", i + 1))?;
            pairs[r].push((c, w));
        }
        Ok(FeatureMatrix {
            rows: pairs.into_iter().map(SparseVec::from_pairs).collect(),
            n_features: header[1],
            labels,
            keys,
            classes,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    Plain,
    #[default]
    Augmented,
}

impl FeatureMode {
    pub fn name(self) -> &'static str {
        match self {
            FeatureMode::Plain => "plain",
            FeatureMode::Augmented => "augmented",
        }
    }
}

impl std::str::FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plain" => Ok(FeatureMode::Plain),
            "augmented" => Ok(FeatureMode::Augmented),
            other => Err(Error::Parse(format!("unknown feature mode `{other}`"))),
        }
    }
}

/// Tokenized rows of one (barrier, category) selection before vectorizing.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDocuments {
    pub keys: Vec<String>,
    pub texts: Vec<String>,
    pub tokens: Vec<Vec<String>>,
    pub labels: Vec<usize>,
    pub classes: Vec<String>,
}

impl LabeledDocuments {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Fits a vectorizer on the given rows only and transforms `rows`.
    pub fn vectorize(
        &self,
        fit_rows: &[usize],
        rows: &[usize],
        exec: Execution,
    ) -> Result<(Vectorizer, FeatureMatrix)> {
        let fit_docs: Vec<Vec<String>> = fit_rows.iter().map(|&i| self.tokens[i].clone()).collect();
        let vectorizer = Vectorizer::fitted(&fit_docs)?;
        let matrix = self.transform_with(&vectorizer, rows, exec)?;
        Ok((vectorizer, matrix))
    }

    pub fn transform_with(
        &self,
        vectorizer: &Vectorizer,
        rows: &[usize],
        exec: Execution,
    ) -> Result<FeatureMatrix> {
        let docs: Vec<Vec<String>> = rows.iter().map(|&i| self.tokens[i].clone()).collect();
        Ok(FeatureMatrix {
            rows: vectorizer.transform_batch(&docs, exec)?,
            n_features: vectorizer.len(),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            keys: rows.iter().map(|&i| self.keys[i].clone()).collect(),
            classes: self.classes.clone(),
        })
    }
}

pub struct DatasetInputs<'a> {
    pub annotations: &'a [EventAnnotation],
    pub articles: &'a [NewsArticle],
    pub inferences: &'a InferenceSet,
    pub sentiments: &'a HashMap<String, SentimentScore>,
    pub tokenizer: &'a TokenizerConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Selection {
    pub barrier: BarrierKind,
    pub category: Category,
    pub mode: FeatureMode,
    /// Skip articles without inference triples.
    pub require_inferences: bool,
}

/// Selects the category's articles whose event carries the barrier label,
/// builds plain or augmented text, and tokenizes it. Rows are ordered by
/// article id; class ids are dense over the labels present.
pub fn build_documents(inputs: &DatasetInputs<'_>, sel: Selection) -> Result<LabeledDocuments> {
    let mut labels_by_article = HashMap::new();
    for ann in inputs.annotations {
        if let Some(assignment) = ann.labels.get(&sel.barrier) {
            for id in &assignment.articles {
                labels_by_article.insert(id.as_str(), assignment.label);
            }
        }
    }
    let mut selected: Vec<&NewsArticle> = inputs
        .articles
        .iter()
        .filter(|a| a.category == sel.category && labels_by_article.contains_key(a.article_id.as_str()))
        .filter(|a| !sel.require_inferences || inputs.inferences.has(&a.article_id))
        .collect();
    if selected.is_empty() {
        return Err(Error::Validation(format!(
            "no labeled articles for barrier {} in category {}",
            sel.barrier, sel.category
        )));
    }
    selected.sort_by(|a, b| a.article_id.cmp(&b.article_id));

    let present: BTreeSet<usize> = selected
        .iter()
        .map(|a| labels_by_article[a.article_id.as_str()].class_id())
        .collect();
    let all_names = sel.barrier.class_names();
    let dense: HashMap<usize, usize> = present.iter().enumerate().map(|(d, &c)| (c, d)).collect();
    let classes = present.iter().map(|&c| all_names[c].clone()).collect();

    let mut docs = LabeledDocuments {
        keys: Vec::with_capacity(selected.len()),
        texts: Vec::with_capacity(selected.len()),
        tokens: Vec::with_capacity(selected.len()),
        labels: Vec::with_capacity(selected.len()),
        classes,
    };
    for a in selected {
        let text = match sel.mode {
            FeatureMode::Plain => a.title.clone(),
            FeatureMode::Augmented => augment_text(
                &a.title,
                inputs.inferences.get(&a.article_id),
                inputs.sentiments.get(&a.article_id).map(|s| s.class),
            ),
        };
        docs.tokens.push(preprocess(&text, inputs.tokenizer));
        docs.texts.push(text);
        docs.keys.push(a.article_id.clone());
        docs.labels.push(dense[&labels_by_article[a.article_id.as_str()].class_id()]);
    }
    Ok(docs)
}

/// Documents vectorized with a vectorizer fit on all selected rows.
pub fn build_dataset(inputs: &DatasetInputs<'_>, sel: Selection) -> Result<(Vectorizer, FeatureMatrix)> {
    let docs = build_documents(inputs, sel)?;
    let all: Vec<usize> = (0..docs.len()).collect();
    docs.vectorize(&all, &all, Execution::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{InferenceTriple, RelationKind};
    use crate::labeler::{BarrierAssignment, BarrierLabel, BinaryLabel};
    use crate::sentiment::Polarity;
    use proptest::prelude::*;

    fn toks(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn preprocess_examples() {
        let cfg = TokenizerConfig::default();
        assert_eq!(preprocess("Trump aims to SHOW", &cfg), toks(&["trump", "aims", "show"]));
        assert!(preprocess("", &cfg).is_empty());
        assert_eq!(preprocess("SENTTOKEN_negative", &cfg), toks(&["SENTTOKEN_negative"]));
        assert_eq!(
            preprocess("Uproar.... reacted angry. SENTTOKEN_positive", &cfg),
            toks(&["uproar", "reacted", "angry", "SENTTOKEN_positive"])
        );
    }

    #[test]
    fn fit_counts_documents() {
        let v = Vectorizer::fitted(&[toks(&["a", "b"]), toks(&["b", "c"])]).unwrap();
        assert_eq!(v.vocabulary, [("a".to_string(), 0), ("b".to_string(), 1), ("c".to_string(), 2)].into_iter().collect());
        assert_eq!(v.document_frequency, [1, 2, 1]);
        assert_eq!(v.corpus_size, 2);

        let single = Vectorizer::fitted(&[toks(&["a", "a"])]).unwrap();
        assert_eq!(single.document_frequency, [1]);

        let mut refit = v.clone();
        refit.fit(&[toks(&["z"])]).unwrap();
        assert_eq!(refit, single_z());
        assert!(Vectorizer::fitted(&[]).is_err());
    }

    fn single_z() -> Vectorizer {
        Vectorizer::fitted(&[toks(&["z"])]).unwrap()
    }

    #[test]
    fn transform_worked_example() {
        let v = Vectorizer::fitted(&[toks(&["a", "b"]), toks(&["b", "c"])]).unwrap();
        let raw = v.raw_weights(&toks(&["a", "b"])).unwrap();
        // ln(3/2) + 1 and ln(3/3) + 1
        let a = (1.5f64).ln() + 1.0;
        assert!((raw.values[0] - a).abs() < 1e-15);
        assert!((raw.values[0] - 1.4055).abs() < 1e-4);
        assert_eq!(raw.values[1], 1.0);
        let t = v.transform(&toks(&["a", "b"])).unwrap();
        assert!((t.values[0] - 0.8148).abs() < 1e-4);
        assert!((t.values[1] - 0.5797).abs() < 1e-4);

        assert!(v.transform(&toks(&["q", "r"])).unwrap().is_empty());
        assert!(v.transform(&[]).unwrap().is_empty());
        assert!(matches!(Vectorizer::default().transform(&toks(&["a"])), Err(Error::Contract(_))));
    }

    fn fixture() -> (Vec<EventAnnotation>, Vec<NewsArticle>, InferenceSet, HashMap<String, SentimentScore>) {
        let article = |id: &str, title: &str| NewsArticle {
            article_id: id.into(),
            event_id: id.replace('a', "e"),
            title: title.into(),
            body: None,
            publisher_domain: "p".into(),
            published_at: "2016-01-01T00:00:00Z".parse().unwrap(),
            category: Category::Health,
        };
        let ann = |event: &str, article: &str, label| EventAnnotation {
            event_id: event.into(),
            labels: [(
                BarrierKind::Geographical,
                BarrierAssignment {
                    label: BarrierLabel::Binary(label),
                    provenance: String::new(),
                    articles: vec![article.into()],
                },
            )]
            .into_iter()
            .collect(),
        };
        let annotations = vec![ann("e1", "a1", BinaryLabel::Crossed), ann("e2", "a2", BinaryLabel::NotCrossed)];
        let articles = vec![article("a1", "Hospital wins award"), article("a2", "Clinic closes doors")];
        let inferences = InferenceSet::from_triples([InferenceTriple {
            article_id: "a1".into(),
            relation: RelationKind::React,
            tail: "proud".into(),
        }]);
        let sentiments = [
            ("a1".to_string(), SentimentScore { compound: 0.6, class: Polarity::Positive }),
            ("a2".to_string(), SentimentScore { compound: 0.0, class: Polarity::Neutral }),
        ]
        .into_iter()
        .collect();
        (annotations, articles, inferences, sentiments)
    }

    #[test]
    fn builds_plain_and_augmented_datasets() {
        let (annotations, articles, inferences, sentiments) = fixture();
        let tokenizer = TokenizerConfig::default();
        let inputs = DatasetInputs {
            annotations: &annotations,
            articles: &articles,
            inferences: &inferences,
            sentiments: &sentiments,
            tokenizer: &tokenizer,
        };
        let mut sel = Selection {
            barrier: BarrierKind::Geographical,
            category: Category::Health,
            mode: FeatureMode::Plain,
            require_inferences: false,
        };
        let (_, plain) = build_dataset(&inputs, sel).unwrap();
        assert_eq!(plain.len(), 2);
        assert_eq!(plain.classes, ["Not-crossed-GB", "Crossed-GB"]);
        assert_eq!(plain.labels, [1, 0]);

        sel.mode = FeatureMode::Augmented;
        let (vec_aug, aug) = build_dataset(&inputs, sel).unwrap();
        assert!(vec_aug.vocabulary.contains_key("SENTTOKEN_positive"));
        assert!(vec_aug.vocabulary.contains_key("reacted"));
        let (_, again) = build_dataset(&inputs, sel).unwrap();
        assert_eq!(aug, again);

        sel.require_inferences = true;
        assert_eq!(build_dataset(&inputs, sel).unwrap().1.len(), 1);

        sel.category = Category::Games;
        assert!(matches!(build_dataset(&inputs, sel), Err(Error::Validation(_))));
    }

    #[test]
    fn export_round_trips() {
        let v = Vectorizer::fitted(&[toks(&["a", "b"]), toks(&["b", "c"])]).unwrap();
        let m = FeatureMatrix {
            rows: vec![v.transform(&toks(&["a", "b"])).unwrap(), v.transform(&toks(&["c"])).unwrap()],
            n_features: 3,
            labels: vec![0, 1],
            keys: vec!["x1".into(), "x2".into()],
            classes: vec!["Not-crossed-GB".into(), "Crossed-GB".into()],
        };
        let dir = tempfile::tempdir().unwrap();
        m.export(dir.path(), Some(&v), Some("config_hash=abc seed=1")).unwrap();
        assert_eq!(FeatureMatrix::import(dir.path()).unwrap(), m);
        let vocab = fs::read_to_string(dir.path().join("vocab.tsv")).unwrap();
        assert!(vocab.starts_with("# config_hash=abc seed=1\n"), "{vocab}");
        assert!(vocab.lines().nth(1).unwrap().starts_with("0\ta\t1"), "{vocab}");
    }

    proptest! {
        #[test]
        fn rows_have_unit_norm(docs in proptest::collection::vec(proptest::collection::vec(0u8..20, 0..15), 1..20)) {
            let docs: Vec<Vec<String>> = docs.iter().map(|d| d.iter().map(|t| format!("t{t}")).collect()).collect();
            let v = Vectorizer::fitted(&docs).unwrap();
            for col in 0..v.len() {
                prop_assert!(v.idf(col) > 0.0);
                prop_assert!(v.document_frequency[col] >= 1);
            }
            for d in &docs {
                let row = v.transform(d).unwrap();
                if d.is_empty() {
                    prop_assert!(row.is_empty());
                } else {
                    prop_assert!((row.norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
