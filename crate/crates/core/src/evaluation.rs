//! Stratified splitting, F1 scoring and per-barrier aggregation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            seed: 42,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.train_fraction > 0.0 && self.train_fraction < 1.0 {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "train_fraction must lie strictly between 0 and 1, got {}",
                self.train_fraction
            )))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    /// Ascending row indices.
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Per-class training counts: floors of `fraction * n_c`, with the units
/// still needed to reach `round(fraction * total)` handed out by largest
/// remainder, ties to the lower class id.
pub fn largest_remainder_counts(sizes: &[usize], fraction: f64) -> Vec<usize> {
    let quotas: Vec<f64> = sizes.iter().map(|&n| fraction * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| (q + 1e-9).floor() as usize).collect();
    let total: usize = sizes.iter().sum();
    let target = (fraction * total as f64 + 1e-9).round() as usize;
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..sizes.len()).filter(|&c| counts[c] < sizes[c]).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - counts[a] as f64;
        let rb = quotas[b] - counts[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &c in order.iter().take(target.saturating_sub(assigned)) {
        counts[c] += 1;
    }
    counts
}

pub fn stratified_split(labels: &[usize], spec: &SplitSpec) -> Result<Split> {
    spec.validate()?;
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &y) in labels.iter().enumerate() {
        members.entry(y).or_default().push(i);
    }
    if let Some((&class, rows)) = members.iter().find(|(_, rows)| rows.len() < 2) {
        return Err(Error::Unsplittable {
            class,
            count: rows.len(),
        });
    }
    let sizes: Vec<usize> = members.values().map(Vec::len).collect();
    let counts = largest_remainder_counts(&sizes, spec.train_fraction);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut split = Split::default();
    for (mut rows, k) in members.into_values().zip(counts) {
        rows.shuffle(&mut rng);
        split.train.extend_from_slice(&rows[..k]);
        split.test.extend_from_slice(&rows[k..]);
    }
    split.train.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReportKey {
    pub barrier: String,
    pub category: String,
    pub model: String,
    pub mode: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub key: ReportKey,
    pub classes: Vec<String>,
    /// `confusion[gold][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub per_class: Vec<ClassMetrics>,
    /// Unweighted mean F1 over classes with gold support.
    pub macro_f1: f64,
    pub averaging: String,
}

impl EvalReport {
    pub fn with_key(mut self, key: ReportKey) -> Self {
        self.key = key;
        self
    }

    pub fn test_size(&self) -> usize {
        self.per_class.iter().map(|c| c.support).sum()
    }
}

pub fn harmonic_f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn f1_report(predicted: &[usize], gold: &[usize], classes: &[String]) -> Result<EvalReport> {
    if predicted.len() != gold.len() {
        return Err(Error::Validation(format!(
            "prediction count {} differs from gold count {}",
            predicted.len(),
            gold.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::Validation("cannot score an empty test set".into()));
    }
    let k = classes.len();
    if let Some(&bad) = predicted.iter().chain(gold).find(|&&y| y >= k) {
        return Err(Error::Contract(format!("label id {bad} outside class table of {k}")));
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &g) in predicted.iter().zip(gold) {
        confusion[g][p] += 1;
    }
    let per_class: Vec<ClassMetrics> = (0..k)
        .map(|c| {
            let tp = confusion[c][c] as f64;
            let support: usize = confusion[c].iter().sum();
            let predicted_c: usize = confusion.iter().map(|row| row[c]).sum();
            let precision = if predicted_c == 0 { 0.0 } else { tp / predicted_c as f64 };
            let recall = if support == 0 { 0.0 } else { tp / support as f64 };
            ClassMetrics {
                class: classes[c].clone(),
                precision,
                recall,
                f1: harmonic_f1(precision, recall),
                support,
            }
        })
        .collect();
    let scored: Vec<f64> = per_class.iter().filter(|c| c.support > 0).map(|c| c.f1).collect();
    let macro_f1 = scored.iter().sum::<f64>() / scored.len() as f64;
    Ok(EvalReport {
        key: ReportKey::default(),
        classes: classes.to_vec(),
        confusion,
        per_class,
        macro_f1,
        averaging: "macro".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierSummary {
    pub barrier: String,
    pub model: String,
    pub mode: String,
    pub mean_macro_f1: f64,
    pub categories: usize,
    /// (category, macro-F1), sorted by category.
    pub per_category: Vec<(String, f64)>,
}

pub fn aggregate(reports: &[EvalReport]) -> Vec<BarrierSummary> {
    let mut groups: BTreeMap<(String, String, String), Vec<(String, f64)>> = BTreeMap::new();
    for r in reports {
        let k = &r.key;
        groups
            .entry((k.barrier.clone(), k.model.clone(), k.mode.clone()))
            .or_default()
            .push((k.category.clone(), r.macro_f1));
    }
    groups
        .into_iter()
        .filter_map(|((barrier, model, mode), mut per_category)| {
            if per_category.is_empty() {
                log::warn!("no reports for {barrier}/{model}/{mode}");
                return None;
            }
            per_category.sort_by(|a, b| a.0.cmp(&b.0));
            let mean = per_category.iter().map(|(_, f)| f).sum::<f64>() / per_category.len() as f64;
            Some(BarrierSummary {
                barrier,
                model,
                mode,
                mean_macro_f1: mean,
                categories: per_category.len(),
                per_category,
            })
        })
        .collect()
}

/// Reads `article_id<TAB>label` lines (blank and `#` lines skipped).
pub fn read_predictions(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, label) = line
            .split_once('\t')
            .ok_or_else(|| Error::Parse(format!("line {}: expected article_id<TAB>label", n + 1)))?;
        out.push((id.trim().to_string(), label.trim().to_string()));
    }
    Ok(out)
}

pub fn score_predictions(predictions: &[(String, String)], gold: &FeatureMatrix) -> Result<EvalReport> {
    let class_ids: HashMap<&str, usize> = gold.classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut by_id: HashMap<&str, usize> = HashMap::new();
    for (id, label) in predictions {
        let class = *class_ids
            .get(label.as_str())
            .ok_or_else(|| Error::Validation(format!("unknown label `{label}` for article {id}")))?;
        if by_id.insert(id.as_str(), class).is_some() {
            return Err(Error::Duplicate {
                what: "prediction for article",
                key: id.clone(),
            });
        }
    }
    let expected: BTreeSet<&str> = gold.keys.iter().map(String::as_str).collect();
    let found: BTreeSet<&str> = by_id.keys().copied().collect();
    let missing: Vec<&str> = expected.difference(&found).copied().collect();
    let extra: Vec<&str> = found.difference(&expected).copied().collect();
    if !missing.is_empty() || !extra.is_empty() {
        let mut msg = String::new();
        if !missing.is_empty() {
            let _ = write!(msg, "missing predictions for: {}", missing.join(", "));
        }
        if !extra.is_empty() {
            if !msg.is_empty() {
                msg.push_str("; ");
            }
            let _ = write!(msg, "unexpected ids: {}", extra.join(", "));
        }
        return Err(Error::Validation(msg));
    }
    let predicted: Vec<usize> = gold.keys.iter().map(|k| by_id[k.as_str()]).collect();
    f1_report(&predicted, &gold.labels, &gold.classes)
}

pub fn score_external(path: &Path, gold: &FeatureMatrix) -> Result<EvalReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    score_predictions(&read_predictions(&text)?, gold)
}

fn fmt_f(x: f64) -> String {
    format!("{x:.6}")
}

/// One line per report keyed by (barrier, category, model, mode).
pub fn reports_tsv(reports: &[EvalReport]) -> String {
    let mut out = String::from("barrier\tcategory\tmodel\tmode\tmacro_f1\ttest_size\tper_class_f1\n");
    let mut sorted: Vec<&EvalReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.key.cmp(&b.key));
    for r in sorted {
        let per: Vec<String> = r
            .per_class
            .iter()
            .map(|c| format!("{}={}:{}", c.class, fmt_f(c.f1), c.support))
            .collect();
        let k = &r.key;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            k.barrier,
            k.category,
            k.model,
            k.mode,
            fmt_f(r.macro_f1),
            r.test_size(),
            per.join(",")
        );
    }
    out
}

pub fn summary_tsv(summary: &BarrierSummary) -> String {
    let mut out = String::from("category\tmacro_f1\n");
    for (c, f) in &summary.per_category {
        let _ = writeln!(out, "{c}\t{}", fmt_f(*f));
    }
    let _ = writeln!(out, "mean({})\t{}", summary.categories, fmt_f(summary.mean_macro_f1));
    out
}
