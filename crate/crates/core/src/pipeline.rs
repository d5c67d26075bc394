//! Staged runs driven by one configuration file.
//!
//! Each stage reads the artifacts of earlier stages from the output
//! directory, never in-memory state, and writes its own under a
//! stage-named subdirectory. Every text artifact starts with a
//! `# config_hash=<hex> seed=<n>` line; JSON artifacts carry the same two
//! fields. A stage refuses inputs stamped by a different configuration.
//! `manifest.tsv` lists stage status and the sha256 of every artifact.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{drop_uninferred, group_by_event, load_articles, Category, InferenceFilter, NewsArticle};
use crate::error::{Error, Result};
use crate::evaluation::{
    aggregate, f1_report, reports_tsv, score_external, stratified_split, summary_tsv, EvalReport, ReportKey,
    SplitSpec,
};
use crate::exec::Execution;
use crate::features::{build_documents, DatasetInputs, FeatureMatrix, FeatureMode, Selection, TokenizerConfig};
use crate::inference::{
    class_intersections, inference_key, load_inferences, relation_stats, verbalize, InferenceSet, RelationTable,
};
use crate::labeler::{annotate_corpus_with, read_annotations, write_annotations, BarrierKind, EventAnnotation};
use crate::models::{train, Hyperparams, ModelKind, TrainedModel};
use crate::profiles::{load_registry, read_alignment_classes};
use crate::sentiment::{
    detect_trend, distribution, histogram, histogram_edges, score_batch, GroupKey, SentimentConfig, SentimentScore,
    ValenceLexicon,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Paths {
    pub articles: PathBuf,
    pub publishers: PathBuf,
    pub countries: PathBuf,
    pub inferences: PathBuf,
    pub alignment_classes: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub negators: Option<PathBuf>,
    pub boosters: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub output: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            articles: "articles.jsonl".into(),
            publishers: "publishers.csv".into(),
            countries: "countries.csv".into(),
            inferences: "inferences.tsv".into(),
            alignment_classes: None,
            lexicon: None,
            negators: None,
            boosters: None,
            stopwords: None,
            output: "out".into(),
        }
    }
}

impl Paths {
    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [&mut self.articles, &mut self.publishers, &mut self.countries, &mut self.inferences] {
            fix(p);
        }
        for p in [
            &mut self.alignment_classes,
            &mut self.lexicon,
            &mut self.negators,
            &mut self.boosters,
            &mut self.stopwords,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        fix(&mut self.output);
    }

    /// Named input files, optional ones only when set.
    pub fn inputs(&self) -> Vec<(&'static str, &Path)> {
        let mut v: Vec<(&'static str, &Path)> = vec![
            ("articles", &self.articles),
            ("publishers", &self.publishers),
            ("countries", &self.countries),
            ("inferences", &self.inferences),
        ];
        let optional = [
            ("alignment_classes", &self.alignment_classes),
            ("lexicon", &self.lexicon),
            ("negators", &self.negators),
            ("boosters", &self.boosters),
            ("stopwords", &self.stopwords),
        ];
        v.extend(optional.into_iter().filter_map(|(n, p)| p.as_deref().map(|p| (n, p))));
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub barriers: Vec<BarrierKind>,
    pub categories: Vec<Category>,
    pub modes: Vec<FeatureMode>,
    pub models: Vec<ModelKind>,
    pub inference_filter: InferenceFilter,
    /// Also write the raw train/test texts for scoring external models.
    pub export_texts: bool,
    pub relation_aliases: BTreeMap<String, String>,
    pub paths: Paths,
    pub hyperparams: Hyperparams,
    pub split: SplitSpec,
    pub sentiment: SentimentConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            barriers: BarrierKind::ALL.to_vec(),
            categories: Category::ALL.to_vec(),
            modes: vec![FeatureMode::Plain, FeatureMode::Augmented],
            models: ModelKind::ALL.to_vec(),
            inference_filter: InferenceFilter::default(),
            export_texts: false,
            relation_aliases: BTreeMap::new(),
            paths: Paths::default(),
            hyperparams: Hyperparams::default(),
            split: SplitSpec::default(),
            sentiment: SentimentConfig::default(),
        }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub barriers: Option<Vec<BarrierKind>>,
    pub categories: Option<Vec<Category>>,
    pub mode: Option<FeatureMode>,
    pub models: Option<Vec<ModelKind>>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Parses TOML; relative paths resolve against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Parse(format!("invalid run configuration: {e}")))?;
        cfg.paths.resolve(base);
        cfg.sync_seeds();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    fn sync_seeds(&mut self) {
        self.hyperparams.seed = self.seed;
        self.split.seed = self.seed;
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(b) = &o.barriers {
            self.barriers = b.clone();
        }
        if let Some(c) = &o.categories {
            self.categories = c.clone();
        }
        if let Some(m) = o.mode {
            self.modes = vec![m];
        }
        if let Some(m) = &o.models {
            self.models = m.clone();
        }
        if let Some(out) = &o.output {
            self.paths.output = out.clone();
        }
        self.sync_seeds();
    }

    pub fn validate(&self) -> Result<()> {
        for (_, path) in self.paths.inputs() {
            fs::metadata(path).map_err(|e| Error::io(path, e))?;
        }
        let out = &self.paths.output;
        fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        let probe = out.join(".write-check");
        fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
        let _ = fs::remove_file(&probe);
        if self.barriers.is_empty() || self.categories.is_empty() || self.modes.is_empty() || self.models.is_empty() {
            return Err(Error::Validation(
                "barriers, categories, modes and models must each list at least one entry".into(),
            ));
        }
        if self.sentiment.negative_cutoff > self.sentiment.positive_cutoff {
            return Err(Error::Validation("negative_cutoff exceeds positive_cutoff".into()));
        }
        self.hyperparams.validate()?;
        self.split.validate()
    }

    /// sha256 over the settings and the contents of every input file. The
    /// location of inputs and outputs does not enter the hash.
    pub fn config_hash(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Canonical<'a> {
            seed: u64,
            barriers: &'a [BarrierKind],
            categories: &'a [Category],
            modes: &'a [FeatureMode],
            models: &'a [ModelKind],
            inference_filter: InferenceFilter,
            export_texts: bool,
            relation_aliases: &'a BTreeMap<String, String>,
            hyperparams: &'a Hyperparams,
            split: &'a SplitSpec,
            sentiment: &'a SentimentConfig,
            inputs: BTreeMap<&'static str, String>,
        }
        let mut inputs = BTreeMap::new();
        for (name, path) in self.paths.inputs() {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            inputs.insert(name, sha256_hex(&bytes));
        }
        let canonical = Canonical {
            seed: self.seed,
            barriers: &self.barriers,
            categories: &self.categories,
            modes: &self.modes,
            models: &self.models,
            inference_filter: self.inference_filter,
            export_texts: self.export_texts,
            relation_aliases: &self.relation_aliases,
            hyperparams: &self.hyperparams,
            split: &self.split,
            sentiment: &self.sentiment,
            inputs,
        };
        Ok(sha256_hex(&serde_json::to_vec(&canonical)?))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Annotate,
    Sentiment,
    Inferences,
    Featurize,
    Train,
    Evaluate,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Ingest,
        Stage::Annotate,
        Stage::Sentiment,
        Stage::Inferences,
        Stage::Featurize,
        Stage::Train,
        Stage::Evaluate,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Annotate => "annotate",
            Stage::Sentiment => "sentiment",
            Stage::Inferences => "inferences",
            Stage::Featurize => "featurize",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
            Stage::Report => "report",
        }
    }

    fn dir(self) -> &'static str {
        match self {
            Stage::Featurize => "features",
            Stage::Train => "models",
            Stage::Evaluate => "reports",
            other => other.name(),
        }
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown stage `{s}`")))
    }
}

/// Selects one dataset's test split for scoring an external prediction file.
#[derive(Clone, Debug, PartialEq)]
pub struct ExternalRequest {
    pub predictions: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct Stamped<T> {
    config_hash: String,
    seed: u64,
    value: T,
}

pub struct Run {
    pub config: RunConfig,
    pub hash: String,
    pub exec: Execution,
}

fn clean(text: &str) -> String {
    text.chars()
        .map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c })
        .collect()
}

fn dataset_dir(barrier: BarrierKind, category: Category, mode: FeatureMode) -> String {
    format!("{}/{}/{}/{}", Stage::Featurize.dir(), barrier, category, mode.name())
}

fn model_file(barrier: BarrierKind, category: Category, mode: FeatureMode, model: ModelKind) -> String {
    format!("{}/{}/{}/{}/{}.json", Stage::Train.dir(), barrier, category, mode.name(), model)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct DatasetId {
    barrier: BarrierKind,
    category: Category,
    mode: FeatureMode,
}

impl Run {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let hash = config.config_hash()?;
        Ok(Run {
            config,
            hash,
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn stamp(&self) -> String {
        format!("config_hash={} seed={}", self.hash, self.config.seed)
    }

    pub fn out(&self) -> &Path {
        &self.config.paths.output
    }

    fn write(&self, rel: &str, body: &str) -> Result<()> {
        let path = self.out().join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let text = format!("# {}\n{body}", self.stamp());
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    fn check_stamp(&self, path: &Path, first_line: &str) -> Result<()> {
        let found = first_line.trim_start_matches('#').trim();
        if found == self.stamp() {
            Ok(())
        } else {
            Err(Error::ConfigMismatch {
                path: path.to_path_buf(),
                found: found.to_string(),
                expected: self.stamp(),
            })
        }
    }

    /// Artifact body after its verified stamp line.
    fn read(&self, rel: &str) -> Result<String> {
        let path = self.out().join(rel);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
        self.check_stamp(&path, first)?;
        Ok(rest.to_string())
    }

    /// Rows of a stamped TSV artifact without its header line.
    fn read_rows(&self, rel: &str) -> Result<Vec<Vec<String>>> {
        Ok(self
            .read(rel)?
            .lines()
            .skip(1)
            .filter(|l| !l.is_empty())
            .map(|l| l.split('\t').map(str::to_string).collect())
            .collect())
    }

    fn write_json<T: Serialize>(&self, rel: &str, value: &T) -> Result<()> {
        let path = self.out().join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let stamped = Stamped {
            config_hash: self.hash.clone(),
            seed: self.config.seed,
            value,
        };
        fs::write(&path, serde_json::to_string(&stamped)?).map_err(|e| Error::io(&path, e))
    }

    fn read_json<T: for<'de> Deserialize<'de>>(&self, rel: &str) -> Result<T> {
        let path = self.out().join(rel);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let stamped: Stamped<T> = serde_json::from_str(&text)?;
        self.check_stamp(&path, &format!("config_hash={} seed={}", stamped.config_hash, stamped.seed))?;
        Ok(stamped.value)
    }

    fn import_matrix(&self, rel: &str) -> Result<FeatureMatrix> {
        let dir = self.out().join(rel);
        let labels = dir.join("labels.tsv");
        let text = fs::read_to_string(&labels).map_err(|e| Error::io(&labels, e))?;
        self.check_stamp(&labels, text.lines().next().unwrap_or(""))?;
        FeatureMatrix::import(&dir)
    }

    /// Runs one stage and records its status in the manifest, also on failure.
    pub fn run_stage(&self, stage: Stage, external: Option<&ExternalRequest>) -> Result<()> {
        log::info!("stage {} starting", stage.name());
        let dir = self.out().join(stage.dir());
        let result = (|| {
            if dir.exists() {
                fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            }
            match stage {
                Stage::Ingest => self.ingest(),
                Stage::Annotate => self.annotate(),
                Stage::Sentiment => self.sentiment(),
                Stage::Inferences => self.inferences(),
                Stage::Featurize => self.featurize(),
                Stage::Train => self.train(),
                Stage::Evaluate => self.evaluate(external),
                Stage::Report => self.report(),
            }
        })();
        let status = if result.is_ok() { "complete" } else { "failed" };
        self.update_manifest(stage, status)?;
        result
    }

    pub fn pipeline(&self) -> Result<()> {
        for stage in Stage::ALL {
            self.run_stage(stage, None)?;
        }
        Ok(())
    }

    fn update_manifest(&self, stage: Stage, status: &str) -> Result<()> {
        let path = self.out().join("manifest.tsv");
        let mut statuses: BTreeMap<Stage, String> = Stage::ALL.iter().map(|&s| (s, "not-run".to_string())).collect();
        if let Ok(text) = fs::read_to_string(&path) {
            let mut lines = text.lines();
            if self.check_stamp(&path, lines.next().unwrap_or("")).is_ok() {
                for l in lines {
                    let cols: Vec<&str> = l.split('\t').collect();
                    if let ["stage", name, st] = cols.as_slice() {
                        if let Ok(s) = name.parse::<Stage>() {
                            statuses.insert(s, st.to_string());
                        }
                    }
                }
            }
        }
        statuses.insert(stage, status.to_string());

        let mut files = Vec::new();
        collect_files(self.out(), self.out(), &mut files)?;
        files.sort();
        let mut body = String::from("kind\tname\tvalue\n");
        for (s, st) in &statuses {
            let _ = writeln!(body, "stage\t{}\t{st}", s.name());
        }
        for rel in files.iter().filter(|f| f.as_str() != "manifest.tsv") {
            let full = self.out().join(rel);
            let bytes = fs::read(&full).map_err(|e| Error::io(&full, e))?;
            let _ = writeln!(body, "artifact\t{rel}\t{}", sha256_hex(&bytes));
        }
        self.write("manifest.tsv", &body)
    }

    fn load_inference_set(&self) -> Result<(InferenceSet, Vec<(usize, String)>)> {
        let table = RelationTable::default().with_aliases(&self.config.relation_aliases)?;
        let load = load_inferences(&self.config.paths.inferences, &table)?;
        let rejections = load.rejections.into_iter().map(|r| (r.line, r.cause)).collect();
        Ok((load.set, rejections))
    }

    fn ingest(&self) -> Result<()> {
        let load = load_articles(&self.config.paths.articles)?;
        let mut articles = load.articles;
        articles.sort_by(|a, b| a.article_id.cmp(&b.article_id));
        let mut body = String::from("article_id\tevent_id\tcategory\tpublisher_domain\tpublished_at\ttitle\n");
        for a in &articles {
            let _ = writeln!(
                body,
                "{}\t{}\t{}\t{}\t{}\t{}",
                a.article_id,
                a.event_id,
                a.category,
                a.publisher_domain,
                a.published_at.to_rfc3339_opts(SecondsFormat::AutoSi, true),
                clean(&a.title)
            );
        }
        self.write("ingest/articles.tsv", &body)?;

        let mut rej = String::from("line\tcause\n");
        for r in &load.rejections {
            let _ = writeln!(rej, "{}\t{}", r.line, clean(&r.cause));
        }
        self.write("ingest/rejections.tsv", &rej)?;

        let mut events = String::from("event_id\tarticles\n");
        for g in group_by_event(&articles) {
            let _ = writeln!(events, "{}\t{}", g.event_id, g.articles.len());
        }
        self.write("ingest/events.tsv", &events)?;
        log::info!("ingested {} articles, rejected {}", articles.len(), load.rejections.len());
        Ok(())
    }

    fn articles(&self) -> Result<Vec<NewsArticle>> {
        self.read_rows("ingest/articles.tsv")?
            .into_iter()
            .map(|cols| {
                if cols.len() != 6 {
                    return Err(Error::Parse(format!("ingest/articles.tsv: expected 6 columns, found {}", cols.len())));
                }
                let published_at = DateTime::parse_from_rfc3339(&cols[4])
                    .map_err(|e| Error::Parse(format!("ingest/articles.tsv: {e}")))?
                    .with_timezone(&Utc);
                Ok(NewsArticle {
                    article_id: cols[0].clone(),
                    event_id: cols[1].clone(),
                    category: cols[2].parse()?,
                    publisher_domain: cols[3].clone(),
                    published_at,
                    title: cols[5].clone(),
                    body: None,
                })
            })
            .collect()
    }

    fn annotations(&self) -> Result<Vec<EventAnnotation>> {
        read_annotations(self.read("annotate/annotations.tsv")?.as_bytes())
    }

    fn annotate(&self) -> Result<()> {
        let paths = &self.config.paths;
        let mut articles = self.articles()?;
        let load = load_registry(&paths.publishers, &paths.countries)?;
        let mut registry = load.registry;
        if let Some(p) = &paths.alignment_classes {
            let file = fs::File::open(p).map_err(|e| Error::io(p, e))?;
            registry = registry.with_alignment_classes(read_alignment_classes(file)?);
        }
        let mut uninferred = Vec::new();
        if self.config.inference_filter == InferenceFilter::Global {
            let (set, _) = self.load_inference_set()?;
            uninferred = articles
                .iter()
                .filter(|a| !set.has(&a.article_id))
                .map(|a| a.article_id.clone())
                .collect();
            articles = drop_uninferred(articles, |id| set.has(id)).0;
        }
        let groups = group_by_event(&articles);
        let report = annotate_corpus_with(&groups, &registry, &self.config.barriers, self.exec);

        let mut buf = Vec::new();
        write_annotations(&mut buf, &report.annotations).map_err(|e| Error::io("annotations", e))?;
        self.write("annotate/annotations.tsv", &String::from_utf8_lossy(&buf))?;

        let mut dropped = String::from("barrier\tevent_id\treason\n");
        for (barrier, events) in &report.dropped {
            for d in events {
                let _ = writeln!(dropped, "{barrier}\t{}\t{}", d.event_id, clean(&d.reason));
            }
        }
        self.write("annotate/dropped.tsv", &dropped)?;

        let mut failures = String::from("event_id\tbarrier\tcause\n");
        for f in &report.failures {
            let _ = writeln!(failures, "{}\t{}\t{}", f.event_id, f.barrier, clean(&f.cause));
        }
        self.write("annotate/failures.tsv", &failures)?;

        let mut rejections = String::from("file\tline\tcause\n");
        for r in &load.rejections {
            let _ = writeln!(rejections, "{}\t{}\t{}", r.file, r.line, clean(&r.cause));
        }
        self.write("annotate/registry_rejections.tsv", &rejections)?;

        let mut removed = String::from("article_id\n");
        for id in &uninferred {
            let _ = writeln!(removed, "{id}");
        }
        self.write("annotate/uninferred.tsv", &removed)?;

        let mut counts: BTreeMap<(BarrierKind, String), (usize, usize)> = BTreeMap::new();
        for ann in &report.annotations {
            for (barrier, a) in &ann.labels {
                let e = counts.entry((*barrier, a.label.render(*barrier))).or_default();
                e.0 += 1;
                e.1 += a.articles.len();
            }
        }
        let mut summary = String::from("barrier\tlabel\tevents\tarticles\n");
        for ((b, l), (events, arts)) in counts {
            let _ = writeln!(summary, "{b}\t{l}\t{events}\t{arts}");
        }
        self.write("annotate/label_counts.tsv", &summary)
    }

    /// Article id to (barrier, rendered label) for every labeled article.
    fn article_labels(annotations: &[EventAnnotation]) -> BTreeMap<BarrierKind, HashMap<String, String>> {
        let mut out: BTreeMap<BarrierKind, HashMap<String, String>> = BTreeMap::new();
        for ann in annotations {
            for (barrier, a) in &ann.labels {
                let m = out.entry(*barrier).or_default();
                for id in &a.articles {
                    m.insert(id.clone(), a.label.render(*barrier));
                }
            }
        }
        out
    }

    fn lexicon(&self) -> Result<ValenceLexicon> {
        let p = &self.config.paths;
        match &p.lexicon {
            Some(l) => ValenceLexicon::load(l, p.negators.as_deref(), p.boosters.as_deref()),
            None => Ok(ValenceLexicon::builtin()),
        }
    }

    fn sentiment(&self) -> Result<()> {
        let articles = self.articles()?;
        let annotations = self.annotations()?;
        let lexicon = self.lexicon()?;
        let cfg = &self.config.sentiment;
        let titles: Vec<String> = articles.iter().map(|a| a.title.clone()).collect();
        let scores = score_batch(&titles, &lexicon, cfg, self.exec);

        let mut body = String::from("article_id\tcompound\tclass\n");
        for (a, s) in articles.iter().zip(&scores) {
            let _ = writeln!(body, "{}\t{}\t{}", a.article_id, s.compound, s.class);
        }
        self.write("sentiment/scores.tsv", &body)?;

        let by_id: HashMap<&str, (&NewsArticle, &SentimentScore)> =
            articles.iter().zip(&scores).map(|(a, s)| (a.article_id.as_str(), (a, s))).collect();
        let mut groups: BTreeMap<GroupKey, Vec<SentimentScore>> = BTreeMap::new();
        let mut per_label: BTreeMap<(BarrierKind, String), Vec<SentimentScore>> = BTreeMap::new();
        for (barrier, labels) in Self::article_labels(&annotations) {
            for (id, label) in labels {
                if let Some((a, s)) = by_id.get(id.as_str()) {
                    groups
                        .entry(GroupKey {
                            barrier,
                            category: a.category,
                            label: label.clone(),
                        })
                        .or_default()
                        .push(**s);
                    per_label.entry((barrier, label)).or_default().push(**s);
                }
            }
        }
        let mut dist = String::from(
            "barrier\tcategory\tlabel\tpositive\tneutral\tnegative\tpos_pct\tneu_pct\tneg_pct\ttrend\n",
        );
        for (key, s) in groups {
            let d = distribution(&s, key)?;
            let trend = detect_trend(d.pos_pct, d.neu_pct, d.neg_pct, cfg.trend_tolerance);
            let _ = writeln!(
                dist,
                "{}\t{}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}",
                d.key.barrier,
                d.key.category,
                d.key.label,
                d.positive,
                d.neutral,
                d.negative,
                d.pos_pct,
                d.neu_pct,
                d.neg_pct,
                trend.name()
            );
        }
        self.write("sentiment/distributions.tsv", &dist)?;

        let edges = histogram_edges();
        let mut hist = String::from("barrier\tlabel\tbin_lower\tcount\n");
        for ((barrier, label), s) in per_label {
            for (edge, count) in edges.iter().zip(histogram(&s)) {
                let _ = writeln!(hist, "{barrier}\t{label}\t{edge:.2}\t{count}");
            }
        }
        self.write("sentiment/histograms.tsv", &hist)
    }

    fn inferences(&self) -> Result<()> {
        let articles = self.articles()?;
        let annotations = self.annotations()?;
        let (set, rejections) = self.load_inference_set()?;

        let mut rej = String::from("line\tcause\n");
        for (line, cause) in &rejections {
            let _ = writeln!(rej, "{line}\t{}", clean(cause));
        }
        self.write("inferences/rejections.tsv", &rej)?;

        let stats = relation_stats(&set, &articles);
        let mut body = String::from("category\trelation\tmean_per_headline\theadlines\n");
        for (category, row) in &stats.means {
            for (relation, mean) in row {
                let _ = writeln!(body, "{category}\t{relation}\t{mean:.6}\t{}", stats.headlines[category]);
            }
        }
        self.write("inferences/relation_stats.tsv", &body)?;

        let mut venn = String::from("barrier\tclasses\tregion\tcount\n");
        for (barrier, labels) in Self::article_labels(&annotations) {
            let mut by_class: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
            for (id, label) in &labels {
                let entry = by_class.entry(label.clone()).or_default();
                entry.extend(set.get(id).iter().map(|t| inference_key(&verbalize(t))));
            }
            let names = barrier.class_names();
            let mut sets: Vec<(String, BTreeSet<String>)> = by_class.into_iter().collect();
            sets.sort_by_key(|(name, _)| names.iter().position(|n| n == name));
            if !(2..=3).contains(&sets.len()) {
                continue;
            }
            let counts = class_intersections(&sets)?;
            let classes = counts.classes.join("|");
            for mask in 1u8..(1 << sets.len()) {
                let region: Vec<&str> = (0..sets.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| counts.classes[i].as_str())
                    .collect();
                let _ = writeln!(venn, "{barrier}\t{classes}\t{}\t{}", region.join("&"), counts.region(mask));
            }
        }
        self.write("inferences/intersections.tsv", &venn)
    }

    fn scores(&self) -> Result<HashMap<String, SentimentScore>> {
        self.read_rows("sentiment/scores.tsv")?
            .into_iter()
            .map(|c| {
                if c.len() != 3 {
                    return Err(Error::Parse("sentiment/scores.tsv: expected 3 columns".into()));
                }
                let compound: f64 = c[1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("sentiment/scores.tsv: bad compound `{}`", c[1])))?;
                Ok((c[0].clone(), SentimentScore { compound, class: c[2].parse()? }))
            })
            .collect()
    }

    fn featurize(&self) -> Result<()> {
        let articles = self.articles()?;
        let annotations = self.annotations()?;
        let sentiments = self.scores()?;
        let (set, _) = self.load_inference_set()?;
        let tokenizer = match &self.config.paths.stopwords {
            Some(p) => TokenizerConfig::load(p)?,
            None => TokenizerConfig::default(),
        };
        let inputs = DatasetInputs {
            annotations: &annotations,
            articles: &articles,
            inferences: &set,
            sentiments: &sentiments,
            tokenizer: &tokenizer,
        };
        let mut datasets = String::from("barrier\tcategory\tmode\trows\ttrain\ttest\tclasses\tfeatures\n");
        let mut skipped = String::from("barrier\tcategory\tmode\treason\n");
        for &barrier in &self.config.barriers {
            for &category in &self.config.categories {
                for &mode in &self.config.modes {
                    let sel = Selection {
                        barrier,
                        category,
                        mode,
                        require_inferences: self.config.inference_filter == InferenceFilter::PerBarrier,
                    };
                    let outcome = build_documents(&inputs, sel).and_then(|docs| {
                        if docs.classes.len() < 2 {
                            return Err(Error::Validation(format!(
                                "only one class present ({})",
                                docs.classes.join(",")
                            )));
                        }
                        let split = stratified_split(&docs.labels, &self.config.split)?;
                        let (vectorizer, train) = docs.vectorize(&split.train, &split.train, self.exec)?;
                        let test = docs.transform_with(&vectorizer, &split.test, self.exec)?;
                        Ok((docs, split, vectorizer, train, test))
                    });
                    let (docs, split, vectorizer, train, test) = match outcome {
                        Ok(v) => v,
                        Err(e) => {
                            let _ = writeln!(skipped, "{barrier}\t{category}\t{}\t{}", mode.name(), clean(&e.to_string()));
                            continue;
                        }
                    };
                    let dir = dataset_dir(barrier, category, mode);
                    let stamp = self.stamp();
                    train.export(&self.out().join(&dir).join("train"), Some(&vectorizer), Some(&stamp))?;
                    test.export(&self.out().join(&dir).join("test"), None, Some(&stamp))?;

                    let mut assignment = String::from("article_id\tset\tlabel\n");
                    let mut texts = String::from("article_id\tset\tlabel\ttext\n");
                    for (set_name, rows) in [("train", &split.train), ("test", &split.test)] {
                        for &i in rows {
                            let label = &docs.classes[docs.labels[i]];
                            let _ = writeln!(assignment, "{}\t{set_name}\t{label}", docs.keys[i]);
                            let _ = writeln!(texts, "{}\t{set_name}\t{label}\t{}", docs.keys[i], clean(&docs.texts[i]));
                        }
                    }
                    self.write(&format!("{dir}/split.tsv"), &assignment)?;
                    if self.config.export_texts {
                        self.write(&format!("{dir}/texts.tsv"), &texts)?;
                    }
                    let _ = writeln!(
                        datasets,
                        "{barrier}\t{category}\t{}\t{}\t{}\t{}\t{}\t{}",
                        mode.name(),
                        docs.len(),
                        split.train.len(),
                        split.test.len(),
                        docs.classes.join(","),
                        vectorizer.len()
                    );
                }
            }
        }
        self.write("features/datasets.tsv", &datasets)?;
        self.write("features/skipped.tsv", &skipped)
    }

    fn datasets(&self) -> Result<Vec<DatasetId>> {
        self.read_rows("features/datasets.tsv")?
            .into_iter()
            .map(|c| {
                if c.len() < 3 {
                    return Err(Error::Parse("features/datasets.tsv: expected at least 3 columns".into()));
                }
                Ok(DatasetId {
                    barrier: c[0].parse()?,
                    category: c[1].parse()?,
                    mode: c[2].parse()?,
                })
            })
            .collect()
    }

    fn train(&self) -> Result<()> {
        let mut jobs = Vec::new();
        for d in self.datasets()? {
            for &m in &self.config.models {
                jobs.push((d, m));
            }
        }
        let results = self.exec.map(&jobs, |&(d, m)| -> Result<TrainedModel> {
            let data = self.import_matrix(&format!("{}/train", dataset_dir(d.barrier, d.category, d.mode)))?;
            train(m, &data, &self.config.hyperparams)
        });
        let mut log = String::from("barrier\tcategory\tmode\tmodel\tepochs\tfinal_loss\n");
        for ((d, m), model) in jobs.iter().zip(results) {
            let model = model?;
            self.write_json(&model_file(d.barrier, d.category, d.mode, *m), &model)?;
            let loss = model.meta.final_loss.map(|l| format!("{l:.6}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                log,
                "{}\t{}\t{}\t{m}\t{}\t{loss}",
                d.barrier,
                d.category,
                d.mode.name(),
                model.meta.epochs_run
            );
        }
        self.write("models/training.tsv", &log)
    }

    fn evaluate(&self, external: Option<&ExternalRequest>) -> Result<()> {
        let datasets = self.datasets()?;
        let mut jobs = Vec::new();
        for &d in &datasets {
            for &m in &self.config.models {
                jobs.push((d, m));
            }
        }
        let results = self.exec.map(&jobs, |&(d, m)| -> Result<EvalReport> {
            let test = self.import_matrix(&format!("{}/test", dataset_dir(d.barrier, d.category, d.mode)))?;
            let model: TrainedModel = self.read_json(&model_file(d.barrier, d.category, d.mode, m))?;
            let predicted = model.predict_with(&test.rows, Execution::Sequential)?;
            Ok(f1_report(&predicted, &test.labels, &test.classes)?.with_key(ReportKey {
                barrier: d.barrier.to_string(),
                category: d.category.to_string(),
                model: m.to_string(),
                mode: d.mode.name().to_string(),
            }))
        });
        let reports: Vec<EvalReport> = results.into_iter().collect::<Result<_>>()?;
        self.write("reports/reports.tsv", &reports_tsv(&reports))?;

        let mut confusion = String::from("barrier\tcategory\tmodel\tmode\tgold\tpredicted\tcount\n");
        for r in &reports {
            let k = &r.key;
            for (g, row) in r.confusion.iter().enumerate() {
                for (p, n) in row.iter().enumerate() {
                    let _ = writeln!(
                        confusion,
                        "{}\t{}\t{}\t{}\t{}\t{}\t{n}",
                        k.barrier, k.category, k.model, k.mode, r.classes[g], r.classes[p]
                    );
                }
            }
        }
        self.write("reports/confusion.tsv", &confusion)?;

        let summaries = aggregate(&reports);
        let mut all = String::from("barrier\tmodel\tmode\tmean_macro_f1\tcategories\n");
        for s in &summaries {
            let _ = writeln!(all, "{}\t{}\t{}\t{:.6}\t{}", s.barrier, s.model, s.mode, s.mean_macro_f1, s.categories);
            self.write(&format!("reports/summary_{}_{}_{}.tsv", s.barrier, s.model, s.mode), &summary_tsv(s))?;
        }
        self.write("reports/summaries.tsv", &all)?;

        if let Some(req) = external {
            let [d] = datasets.as_slice() else {
                return Err(Error::Validation(format!(
                    "external scoring needs exactly one barrier, category and mode; {} datasets are configured",
                    datasets.len()
                )));
            };
            let gold = self.import_matrix(&format!("{}/test", dataset_dir(d.barrier, d.category, d.mode)))?;
            let report = score_external(&req.predictions, &gold)?.with_key(ReportKey {
                barrier: d.barrier.to_string(),
                category: d.category.to_string(),
                model: "external".into(),
                mode: d.mode.name().to_string(),
            });
            self.write("reports/external.tsv", &reports_tsv(&[report]))?;
        }
        Ok(())
    }

    fn copy_table(&self, from: &str, to: &str) -> Result<()> {
        let body = self.read(from)?;
        self.write(to, &body)
    }

    fn report(&self) -> Result<()> {
        let dist = self.read_rows("sentiment/distributions.tsv")?;
        let mut fig6 = String::from("barrier\tcategory\tlabel\tpositive_pct\tneutral_pct\tnegative_pct\tsize\n");
        let mut fig7 = String::from("barrier\tcategory\tlabel\ttrend\n");
        for c in &dist {
            let size: usize = c[3..6].iter().filter_map(|v| v.parse::<usize>().ok()).sum();
            let _ = writeln!(fig6, "{}\t{}\t{}\t{}\t{}\t{}\t{size}", c[0], c[1], c[2], c[6], c[7], c[8]);
            let _ = writeln!(fig7, "{}\t{}\t{}\t{}", c[0], c[1], c[2], c[9]);
        }
        self.write("report/fig6_sentiment_distributions.tsv", &fig6)?;
        self.write("report/fig7_sentiment_trends.tsv", &fig7)?;
        self.copy_table("reports/summaries.tsv", "report/fig8_barrier_averages.tsv")?;
        self.copy_table("inferences/relation_stats.tsv", "report/fig9_relation_stats.tsv")?;
        self.copy_table("inferences/intersections.tsv", "report/fig10_inference_intersections.tsv")?;

        let mut fig11 = String::from("barrier\tcategory\tlabel\ttrain\ttest\n");
        let mut seen = BTreeSet::new();
        for d in self.datasets()? {
            if !seen.insert((d.barrier, d.category)) {
                continue;
            }
            let rows = self.read_rows(&format!("{}/split.tsv", dataset_dir(d.barrier, d.category, d.mode)))?;
            let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
            for r in &rows {
                let e = counts.entry(r[2].as_str()).or_default();
                if r[1] == "train" {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
            for (label, (tr, te)) in counts {
                let _ = writeln!(fig11, "{}\t{}\t{label}\t{tr}\t{te}", d.barrier, d.category);
            }
        }
        self.write("report/fig11_split_distributions.tsv", &fig11)?;

        // Table 4 layout: one row per (barrier, category), one column per (model, mode).
        let reports = self.read_rows("reports/reports.tsv")?;
        let mut columns = BTreeSet::new();
        let mut cells: BTreeMap<(String, String), BTreeMap<(String, String), String>> = BTreeMap::new();
        for r in &reports {
            let col = (r[2].clone(), r[3].clone());
            columns.insert(col.clone());
            cells.entry((r[0].clone(), r[1].clone())).or_default().insert(col, r[4].clone());
        }
        let mut table = String::from("barrier\tcategory");
        for (m, mode) in &columns {
            let _ = write!(table, "\t{m}:{mode}");
        }
        table.push('\n');
        for ((b, c), row) in &cells {
            let _ = write!(table, "{b}\t{c}");
            for col in &columns {
                let _ = write!(table, "\t{}", row.get(col).map(String::as_str).unwrap_or("-"));
            }
            table.push('\n');
        }
        self.write("report/table4_f1.tsv", &table)
    }
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<()> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else if let Ok(rel) = path.strip_prefix(root) {
            out.push(rel.to_string_lossy().replace('\\', "/"));
        }
    }
    Ok(())
}

/// Parses `macro_f1` for one (barrier, category, model, mode) row of a
/// `reports.tsv` artifact.
pub fn lookup_macro_f1(reports_tsv: &str, barrier: &str, category: &str, model: &str, mode: &str) -> Option<f64> {
    reports_tsv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').collect::<Vec<_>>())
        .find(|c| c.len() > 4 && c[0] == barrier && c[1] == category && c[2] == model && c[3] == mode)
        .and_then(|c| c[4].parse().ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::labeling_fixture;

    fn fixture_config(dir: &Path) -> RunConfig {
        labeling_fixture(5).write(dir).unwrap();
        let text = r#"
            seed = 9
            barriers = ["geographical", "cultural"]
            models = ["logreg", "naive-bayes"]
            [paths]
            output = "out"
        "#;
        RunConfig::from_toml(text, dir).unwrap()
    }

    #[test]
    fn relative_paths_resolve_against_the_config_dir() {
        let cfg = RunConfig::from_toml("[paths]\narticles = \"a.jsonl\"\n", Path::new("/data/run")).unwrap();
        assert_eq!(cfg.paths.articles, Path::new("/data/run/a.jsonl"));
        assert_eq!(cfg.paths.output, Path::new("/data/run/out"));
        assert_eq!(cfg.hyperparams.seed, cfg.seed);
    }

    #[test]
    fn unknown_enum_values_are_rejected() {
        assert!(RunConfig::from_toml("barriers = [\"spiritual\"]", Path::new(".")).is_err());
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml().unwrap();
        let back = RunConfig::from_toml(&text, Path::new("")).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn hash_ignores_output_location_but_not_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = fixture_config(dir.path());
        let h = cfg.config_hash().unwrap();
        cfg.paths.output = dir.path().join("elsewhere");
        assert_eq!(cfg.config_hash().unwrap(), h);
        cfg.seed += 1;
        assert_ne!(cfg.config_hash().unwrap(), h);
        cfg.seed -= 1;
        fs::write(&cfg.paths.inferences, "article_id\trelation\ttail\n").unwrap();
        assert_ne!(cfg.config_hash().unwrap(), h);
    }

    #[test]
    fn missing_input_names_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = fixture_config(dir.path());
        cfg.paths.countries = dir.path().join("nowhere.csv");
        let err = Run::new(cfg).err().unwrap();
        assert!(err.to_string().contains("nowhere.csv"), "{err}");
    }

    #[test]
    fn stages_refuse_foreign_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = fixture_config(dir.path());
        Run::new(cfg.clone()).unwrap().run_stage(Stage::Ingest, None).unwrap();
        let mut other = cfg;
        other.seed = 10;
        let run = Run::new(other).unwrap();
        let err = run.run_stage(Stage::Annotate, None).unwrap_err();
        assert!(matches!(err, Error::ConfigMismatch { .. }), "{err}");
        let manifest = fs::read_to_string(run.out().join("manifest.tsv")).unwrap();
        assert!(manifest.contains("stage\tannotate\tfailed"));
    }

    #[test]
    fn pipeline_writes_every_stage() {
        let dir = tempfile::tempdir().unwrap();
        let run = Run::new(fixture_config(dir.path())).unwrap();
        run.pipeline().unwrap();
        let manifest = fs::read_to_string(run.out().join("manifest.tsv")).unwrap();
        for stage in Stage::ALL {
            assert!(manifest.contains(&format!("stage\t{}\tcomplete", stage.name())), "{manifest}");
        }
        for artifact in [
            "annotate/annotations.tsv",
            "sentiment/distributions.tsv",
            "inferences/intersections.tsv",
            "features/datasets.tsv",
            "reports/reports.tsv",
            "report/table4_f1.tsv",
        ] {
            assert!(manifest.contains(&format!("artifact\t{artifact}\t")), "{artifact}");
        }
        let annotations = fs::read_to_string(run.out().join("annotate/annotations.tsv")).unwrap();
        assert!(annotations.starts_with(&format!("# {}\n", run.stamp())));
    }
}
