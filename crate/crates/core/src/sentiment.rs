//! Rule-based headline sentiment.
//!
//! Each lexicon token contributes its valence. Boosters in the preceding
//! window push a valence further in its own direction; every negator in the
//! window multiplies it by the negation factor. The summed contributions `s`
//! are squashed into `(-1, 1)` as `s / sqrt(s^2 + alpha)`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Category;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::labeler::BarrierKind;

const BUILTIN_LEXICON: &str = include_str!("../data/lexicon.tsv");
const BUILTIN_NEGATORS: &str = include_str!("../data/negators.txt");
const BUILTIN_BOOSTERS: &str = include_str!("../data/boosters.tsv");

pub const MAX_VALENCE: f64 = 4.0;

#[derive(Clone, Debug, Default)]
pub struct ValenceLexicon {
    valences: HashMap<String, f64>,
    negators: HashSet<String>,
    boosters: HashMap<String, f64>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_weighted(text: &str, what: &str) -> Result<HashMap<String, f64>> {
    let mut map = HashMap::new();
    for (line, l) in content_lines(text) {
        let mut cols = l.split('\t');
        let token = cols.next().unwrap_or("").trim();
        let value = cols
            .next()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .ok_or_else(|| Error::Parse(format!("{what} line {line}: expected token<TAB>number")))?;
        map.insert(token.to_lowercase(), value);
    }
    Ok(map)
}

impl ValenceLexicon {
    pub fn new(
        valences: HashMap<String, f64>,
        negators: HashSet<String>,
        boosters: HashMap<String, f64>,
    ) -> Result<Self> {
        if valences.is_empty() {
            return Err(Error::Validation("valence lexicon is empty".into()));
        }
        if let Some((token, v)) = valences
            .iter()
            .find(|(_, v)| !(-MAX_VALENCE..=MAX_VALENCE).contains(*v))
        {
            return Err(Error::Validation(format!(
                "valence {v} of `{token}` outside [-4, 4]"
            )));
        }
        Ok(ValenceLexicon {
            valences,
            negators,
            boosters,
        })
    }

    pub fn parse(lexicon: &str, negators: &str, boosters: &str) -> Result<Self> {
        let negators = content_lines(negators)
            .map(|(_, l)| l.to_lowercase())
            .collect();
        Self::new(
            parse_weighted(lexicon, "lexicon")?,
            negators,
            parse_weighted(boosters, "booster")?,
        )
    }

    /// The lexicon shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_LEXICON, BUILTIN_NEGATORS, BUILTIN_BOOSTERS)
            .expect("builtin lexicon is valid")
    }

    /// Loads a lexicon file; negator and booster lists default to the builtin
    /// ones when not given.
    pub fn load(
        lexicon: impl AsRef<Path>,
        negators: Option<&Path>,
        boosters: Option<&Path>,
    ) -> Result<Self> {
        let read = |p: &Path| fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let lexicon = read(lexicon.as_ref())?;
        let negators = negators.map(read).transpose()?;
        let boosters = boosters.map(read).transpose()?;
        Self::parse(
            &lexicon,
            negators.as_deref().unwrap_or(BUILTIN_NEGATORS),
            boosters.as_deref().unwrap_or(BUILTIN_BOOSTERS),
        )
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valences.get(token).copied()
    }

    pub fn is_negator(&self, token: &str) -> bool {
        self.negators.contains(token)
    }

    pub fn booster(&self, token: &str) -> Option<f64> {
        self.boosters.get(token).copied()
    }

    /// Same lexicon with every valence negated.
    pub fn mirrored(&self) -> Self {
        ValenceLexicon {
            valences: self.valences.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            negators: self.negators.clone(),
            boosters: self.boosters.clone(),
        }
    }

    pub fn tokens(&self) -> impl Iterator<Item = (&str, f64)> {
        self.valences.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SentimentConfig {
    pub alpha: f64,
    pub negation_factor: f64,
    pub window: usize,
    pub positive_cutoff: f64,
    pub negative_cutoff: f64,
    /// Percentage points within which positive and negative count as equal.
    pub trend_tolerance: f64,
}

impl Default for SentimentConfig {
    fn default() -> Self {
        SentimentConfig {
            alpha: 15.0,
            negation_factor: -0.74,
            window: 3,
            positive_cutoff: 0.05,
            negative_cutoff: -0.05,
            trend_tolerance: 5.0,
        }
    }
}

/// Case-folded word tokens; apostrophes inside a word are kept.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .map(|t| t.trim_matches('\''))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn compound_score(text: &str, lexicon: &ValenceLexicon) -> f64 {
    compound_score_with(text, lexicon, &SentimentConfig::default())
}

pub fn compound_score_with(text: &str, lexicon: &ValenceLexicon, cfg: &SentimentConfig) -> f64 {
    let tokens = tokenize(text);
    let mut sum = 0.0;
    for (i, token) in tokens.iter().enumerate() {
        let Some(mut valence) = lexicon.valence(token) else {
            continue;
        };
        let window = &tokens[i.saturating_sub(cfg.window)..i];
        let direction = if valence > 0.0 {
            1.0
        } else if valence < 0.0 {
            -1.0
        } else {
            0.0
        };
        for prev in window {
            if let Some(inc) = lexicon.booster(prev) {
                valence += direction * inc;
            }
        }
        for prev in window {
            if lexicon.is_negator(prev) {
                valence *= cfg.negation_factor;
            }
        }
        sum += valence;
    }
    normalize(sum, cfg.alpha)
}

pub fn normalize(sum: f64, alpha: f64) -> f64 {
    if sum == 0.0 {
        return 0.0;
    }
    (sum / (sum * sum + alpha).sqrt()).clamp(-1.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Neutral,
    Negative,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Positive, Polarity::Neutral, Polarity::Negative];

    pub fn name(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Neutral => "neutral",
            Polarity::Negative => "negative",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Polarity::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown polarity `{s}`")))
    }
}

pub fn classify(compound: f64, cfg: &SentimentConfig) -> Result<Polarity> {
    if !(-1.0..=1.0).contains(&compound) {
        return Err(Error::Contract(format!("compound {compound} outside [-1, 1]")));
    }
    Ok(if compound >= cfg.positive_cutoff {
        Polarity::Positive
    } else if compound <= cfg.negative_cutoff {
        Polarity::Negative
    } else {
        Polarity::Neutral
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub compound: f64,
    pub class: Polarity,
}

pub fn score(text: &str, lexicon: &ValenceLexicon, cfg: &SentimentConfig) -> SentimentScore {
    let compound = compound_score_with(text, lexicon, cfg);
    let class = classify(compound, cfg).expect("compound scores lie in [-1, 1]");
    SentimentScore { compound, class }
}

pub fn score_batch(
    texts: &[String],
    lexicon: &ValenceLexicon,
    cfg: &SentimentConfig,
    exec: Execution,
) -> Vec<SentimentScore> {
    exec.map(texts, |t| score(t, lexicon, cfg))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey {
    pub barrier: BarrierKind,
    pub category: Category,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSentimentDistribution {
    pub key: GroupKey,
    pub positive: usize,
    pub neutral: usize,
    pub negative: usize,
    pub pos_pct: f64,
    pub neu_pct: f64,
    pub neg_pct: f64,
}

impl ClassSentimentDistribution {
    pub fn total(&self) -> usize {
        self.positive + self.neutral + self.negative
    }
}

pub fn distribution(scores: &[SentimentScore], key: GroupKey) -> Result<ClassSentimentDistribution> {
    if scores.is_empty() {
        return Err(Error::EmptyGroup(format!(
            "{} / {} / {}",
            key.barrier, key.category, key.label
        )));
    }
    let count = |p: Polarity| scores.iter().filter(|s| s.class == p).count();
    let (positive, neutral, negative) = (
        count(Polarity::Positive),
        count(Polarity::Neutral),
        count(Polarity::Negative),
    );
    let pct = |n: usize| 100.0 * n as f64 / scores.len() as f64;
    Ok(ClassSentimentDistribution {
        key,
        positive,
        neutral,
        negative,
        pos_pct: pct(positive),
        neu_pct: pct(neutral),
        neg_pct: pct(negative),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrendType {
    Trend1,
    Trend2,
    Trend3,
    Trend4,
    None,
}

impl TrendType {
    pub const ALL: [TrendType; 5] = [
        TrendType::Trend1,
        TrendType::Trend2,
        TrendType::Trend3,
        TrendType::Trend4,
        TrendType::None,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TrendType::Trend1 => "trend1",
            TrendType::Trend2 => "trend2",
            TrendType::Trend3 => "trend3",
            TrendType::Trend4 => "trend4",
            TrendType::None => "none",
        }
    }
}

/// The four raw trend predicates, in evaluation order.
pub mod trend_predicates {
    pub fn trend1(pos: f64, neu: f64, neg: f64) -> bool {
        pos > neu && neu > neg
    }

    pub fn trend4(pos: f64, neu: f64, neg: f64) -> bool {
        neg > neu && neu > pos
    }

    pub fn trend2(pos: f64, neu: f64, neg: f64, tolerance: f64) -> bool {
        neu > pos.max(neg) && (pos - neg).abs() <= tolerance
    }

    pub fn trend3(pos: f64, neu: f64, neg: f64) -> bool {
        neu < pos.min(neg)
    }
}

pub fn detect_trend(pos_pct: f64, neu_pct: f64, neg_pct: f64, tie_tolerance: f64) -> TrendType {
    use trend_predicates::*;
    if trend1(pos_pct, neu_pct, neg_pct) {
        TrendType::Trend1
    } else if trend4(pos_pct, neu_pct, neg_pct) {
        TrendType::Trend4
    } else if trend2(pos_pct, neu_pct, neg_pct, tie_tolerance) {
        TrendType::Trend2
    } else if trend3(pos_pct, neu_pct, neg_pct) {
        TrendType::Trend3
    } else {
        TrendType::None
    }
}

pub const HISTOGRAM_BINS: usize = 20;

/// Counts of compound scores in 20 equal-width bins over [-1, 1]; the last
/// bin is closed on the right.
pub fn histogram(scores: &[SentimentScore]) -> [usize; HISTOGRAM_BINS] {
    let mut bins = [0usize; HISTOGRAM_BINS];
    for s in scores {
        let pos = ((s.compound + 1.0) / 2.0 * HISTOGRAM_BINS as f64).floor() as usize;
        bins[pos.min(HISTOGRAM_BINS - 1)] += 1;
    }
    bins
}

/// Lower edge of each histogram bin.
pub fn histogram_edges() -> Vec<f64> {
    (0..HISTOGRAM_BINS)
        .map(|i| -1.0 + 2.0 * i as f64 / HISTOGRAM_BINS as f64)
        .collect()
}

/// Groups scores by key and builds one distribution per non-empty group.
pub fn distributions<'a>(
    items: impl IntoIterator<Item = (GroupKey, &'a SentimentScore)>,
) -> Vec<ClassSentimentDistribution> {
    let mut groups: BTreeMap<GroupKey, Vec<SentimentScore>> = BTreeMap::new();
    for (key, score) in items {
        groups.entry(key).or_default().push(*score);
    }
    groups
        .into_iter()
        .filter_map(|(key, scores)| distribution(&scores, key).ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lexicon() -> ValenceLexicon {
        ValenceLexicon::parse(
            "great\t2.9\nbad\t-2.5\nzero\t0.0\n",
            "not\nnever\n",
            "very\t0.293\nslightly\t-0.293\n",
        )
        .unwrap()
    }

    #[test]
    fn empty_and_lexicon_free_text_score_zero() {
        let lex = lexicon();
        assert_eq!(compound_score("", &lex), 0.0);
        assert_eq!(compound_score("the quick brown fox", &lex), 0.0);
        assert_eq!(compound_score("not very", &lex), 0.0);
    }

    #[test]
    fn single_token_matches_normalization() {
        let lex = lexicon();
        // independent evaluation: 2.9 / sqrt(2.9^2 + 15)
        let expected = 2.9 / (2.9f64 * 2.9 + 15.0).sqrt();
        assert!((expected - 0.5994).abs() < 1e-4);
        assert!((compound_score("GREAT", &lex) - expected).abs() < 1e-15);

        // a negator scales the valence by -0.74 before normalization
        let s: f64 = -0.74 * 2.9;
        let negated = s / (s * s + 15.0).sqrt();
        assert!((negated - (-0.484_671)).abs() < 1e-5);
        assert!((compound_score("not great", &lex) - negated).abs() < 1e-15);
    }

    #[test]
    fn boosters_and_window() {
        let lex = lexicon();
        let boosted: f64 = 2.9 + 0.293;
        assert!((compound_score("very great", &lex) - boosted / (boosted * boosted + 15.0).sqrt()).abs() < 1e-15);
        let damped: f64 = -2.5 + 0.293;
        assert!((compound_score("slightly bad", &lex) - damped / (damped * damped + 15.0).sqrt()).abs() < 1e-15);
        // negator four tokens back is outside the window
        assert_eq!(compound_score("not a b c great", &lex), compound_score("great", &lex));
        assert!(compound_score("not a b great", &lex) < 0.0);
    }

    #[test]
    fn classify_thresholds() {
        let cfg = SentimentConfig::default();
        assert_eq!(classify(0.3, &cfg).unwrap(), Polarity::Positive);
        assert_eq!(classify(-0.3, &cfg).unwrap(), Polarity::Negative);
        assert_eq!(classify(0.0, &cfg).unwrap(), Polarity::Neutral);
        assert_eq!(classify(0.05, &cfg).unwrap(), Polarity::Positive);
        assert_eq!(classify(-0.05, &cfg).unwrap(), Polarity::Negative);
        assert!(classify(1.5, &cfg).is_err());
    }

    fn scores(pos: usize, neu: usize, neg: usize) -> Vec<SentimentScore> {
        let mk = |class, compound| SentimentScore { compound, class };
        std::iter::repeat_n(mk(Polarity::Positive, 0.5), pos)
            .chain(std::iter::repeat_n(mk(Polarity::Neutral, 0.0), neu))
            .chain(std::iter::repeat_n(mk(Polarity::Negative, -0.5), neg))
            .collect()
    }

    fn key() -> GroupKey {
        GroupKey {
            barrier: BarrierKind::Political,
            category: Category::Games,
            label: "Crossed-PB".into(),
        }
    }

    #[test]
    fn distribution_examples() {
        let d = distribution(&scores(5, 3, 2), key()).unwrap();
        assert_eq!((d.pos_pct, d.neu_pct, d.neg_pct), (50.0, 30.0, 20.0));
        let d = distribution(&scores(0, 4, 0), key()).unwrap();
        assert_eq!((d.pos_pct, d.neu_pct, d.neg_pct), (0.0, 100.0, 0.0));
        let d = distribution(&scores(1, 1, 1), key()).unwrap();
        assert_eq!(format!("{:.2}", d.pos_pct), "33.33");
        assert_eq!(d.total(), 3);
        assert!(matches!(distribution(&[], key()), Err(Error::EmptyGroup(_))));
    }

    #[test]
    fn trend_examples() {
        assert_eq!(detect_trend(50.0, 30.0, 20.0, 5.0), TrendType::Trend1);
        assert_eq!(detect_trend(20.0, 30.0, 50.0, 5.0), TrendType::Trend4);
        assert_eq!(detect_trend(24.0, 55.0, 21.0, 5.0), TrendType::Trend2);
        assert_eq!(detect_trend(45.0, 10.0, 45.0, 5.0), TrendType::Trend3);
        assert_eq!(detect_trend(10.0, 60.0, 30.0, 5.0), TrendType::None);
    }

    #[test]
    fn histogram_bins() {
        let mk = |compound| SentimentScore { compound, class: Polarity::Neutral };
        let h = histogram(&[mk(-1.0), mk(-0.85), mk(0.0), mk(1.0), mk(0.99)]);
        assert_eq!(h[0], 1);
        assert_eq!(h[1], 1);
        assert_eq!(h[10], 1);
        assert_eq!(h[19], 2);
        assert_eq!(histogram_edges()[10], 0.0);
    }

    #[test]
    fn builtin_lexicon_loads() {
        let lex = ValenceLexicon::builtin();
        assert!(lex.valence("good").is_some());
        assert!(lex.is_negator("don't"));
        assert!(compound_score("Uproar as delegates revolt", &lex) < 0.0);
        assert!(compound_score("Team celebrates a great victory", &lex) > 0.0);
    }

    #[test]
    fn invalid_lexicons_are_rejected() {
        assert!(ValenceLexicon::parse("", "", "").is_err());
        assert!(ValenceLexicon::parse("x\t5.0\n", "", "").is_err());
        assert!(ValenceLexicon::parse("x\tfoo\n", "", "").is_err());
    }

    proptest! {
        #[test]
        fn sign_symmetry(words in proptest::collection::vec(0usize..7, 0..12)) {
            let vocab = ["great", "bad", "not", "very", "slightly", "zero", "filler"];
            let text: Vec<&str> = words.iter().map(|&i| vocab[i]).collect();
            let text = text.join(" ");
            let lex = lexicon();
            prop_assert_eq!(compound_score(&text, &lex), -compound_score(&text, &lex.mirrored()));
        }
    }
}
