//! Precomputed commonsense-inference triples: loading, verbalization, text
//! augmentation, per-category relation statistics, and class intersections.
//!
//! Inference file: one `article_id<TAB>relation<TAB>tail` record per line.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Category, NewsArticle};
use crate::error::{Error, Result};
use crate::sentiment::Polarity;

/// Prefix of the reserved sentiment tokens appended to augmented text.
pub const SENTIMENT_TOKEN_PREFIX: &str = "SENTTOKEN_";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationKind {
    Intent,
    Need,
    Want,
    React,
    Desire,
    CapableOf,
    IsFilledBy,
    HasSubEvent,
    Causes,
    Consists,
}

impl RelationKind {
    pub const ALL: [RelationKind; 10] = [
        RelationKind::Intent,
        RelationKind::Need,
        RelationKind::Want,
        RelationKind::React,
        RelationKind::Desire,
        RelationKind::CapableOf,
        RelationKind::IsFilledBy,
        RelationKind::HasSubEvent,
        RelationKind::Causes,
        RelationKind::Consists,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Intent => "intent",
            RelationKind::Need => "need",
            RelationKind::Want => "want",
            RelationKind::React => "react",
            RelationKind::Desire => "desire",
            RelationKind::CapableOf => "capableOf",
            RelationKind::IsFilledBy => "isFilledBy",
            RelationKind::HasSubEvent => "hasSubEvent",
            RelationKind::Causes => "causes",
            RelationKind::Consists => "consists",
        }
    }

    /// Past-form lead-in used when turning a triple into a sentence.
    pub fn past_form(self) -> &'static str {
        match self {
            RelationKind::Intent => "intended",
            RelationKind::Need => "needed",
            RelationKind::Want => "wanted",
            RelationKind::React => "reacted",
            RelationKind::Desire => "desired",
            RelationKind::CapableOf => "capableOf",
            RelationKind::IsFilledBy => "isFilledBy",
            RelationKind::HasSubEvent => "hasSubEvent",
            RelationKind::Causes => "caused",
            RelationKind::Consists => "consisted of",
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Maps relation names found in inference files onto [`RelationKind`].
/// Matching is case-insensitive; extra aliases can be added from config.
#[derive(Clone, Debug)]
pub struct RelationTable {
    aliases: HashMap<String, RelationKind>,
}

impl Default for RelationTable {
    fn default() -> Self {
        let mut table = RelationTable {
            aliases: HashMap::new(),
        };
        for kind in RelationKind::ALL {
            table.alias(kind.name(), kind);
        }
        for (alias, kind) in [
            ("intend", RelationKind::Intent),
            ("xIntent", RelationKind::Intent),
            ("xNeed", RelationKind::Need),
            ("xWant", RelationKind::Want),
            ("oWant", RelationKind::Want),
            ("xReact", RelationKind::React),
            ("oReact", RelationKind::React),
            ("desires", RelationKind::Desire),
            ("madeUpOf", RelationKind::Consists),
        ] {
            table.alias(alias, kind);
        }
        table
    }
}

impl RelationTable {
    pub fn alias(&mut self, name: &str, kind: RelationKind) {
        self.aliases.insert(name.trim().to_lowercase(), kind);
    }

    /// Adds aliases given as `alias → canonical relation name`.
    pub fn with_aliases(mut self, extra: &BTreeMap<String, String>) -> Result<Self> {
        for (alias, target) in extra {
            let kind = self
                .resolve(target)
                .ok_or_else(|| Error::Parse(format!("alias `{alias}` targets unknown relation `{target}`")))?;
            self.alias(alias, kind);
        }
        Ok(self)
    }

    pub fn resolve(&self, name: &str) -> Option<RelationKind> {
        self.aliases.get(&name.trim().to_lowercase()).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferenceTriple {
    pub article_id: String,
    pub relation: RelationKind,
    pub tail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct InferenceSet {
    by_article: BTreeMap<String, Vec<InferenceTriple>>,
}

impl InferenceSet {
    pub fn from_triples(triples: impl IntoIterator<Item = InferenceTriple>) -> Self {
        let mut set = InferenceSet::default();
        for t in triples {
            set.by_article.entry(t.article_id.clone()).or_default().push(t);
        }
        set
    }

    pub fn get(&self, article_id: &str) -> &[InferenceTriple] {
        self.by_article
            .get(article_id)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn has(&self, article_id: &str) -> bool {
        !self.get(article_id).is_empty()
    }

    pub fn articles(&self) -> impl Iterator<Item = &str> {
        self.by_article.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.by_article.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_article.is_empty()
    }

    pub fn triple_count(&self) -> usize {
        self.by_article.values().map(Vec::len).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InferenceRejection {
    pub line: usize,
    pub cause: String,
}

#[derive(Debug, Default)]
pub struct InferenceLoad {
    pub set: InferenceSet,
    pub rejections: Vec<InferenceRejection>,
}

pub fn read_inferences(reader: impl BufRead, table: &RelationTable) -> Result<InferenceLoad> {
    let mut triples = Vec::new();
    let mut rejections = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(format!("line {}: {e}", idx + 1)))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with("article_id\t") {
            continue;
        }
        let mut reject = |cause: String| {
            rejections.push(InferenceRejection {
                line: idx + 1,
                cause,
            })
        };
        let cols: Vec<&str> = line.splitn(3, '\t').collect();
        if cols.len() != 3 {
            reject(format!("expected 3 tab-separated columns, found {}", cols.len()));
            continue;
        }
        let Some(relation) = table.resolve(cols[1]) else {
            reject(format!("unknown relation `{}`", cols[1].trim()));
            continue;
        };
        let tail = cols[2].trim();
        if tail.is_empty() {
            reject("empty tail".into());
            continue;
        }
        if cols[0].trim().is_empty() {
            reject("empty article_id".into());
            continue;
        }
        triples.push(InferenceTriple {
            article_id: cols[0].trim().to_string(),
            relation,
            tail: tail.to_string(),
        });
    }
    Ok(InferenceLoad {
        set: InferenceSet::from_triples(triples),
        rejections,
    })
}

pub fn load_inferences(path: impl AsRef<Path>, table: &RelationTable) -> Result<InferenceLoad> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_inferences(BufReader::new(file), table)
}

pub fn verbalize(triple: &InferenceTriple) -> String {
    format!("{} {}", triple.relation.past_form(), triple.tail.trim())
}

pub fn sentiment_token(polarity: Polarity) -> String {
    format!("{SENTIMENT_TOKEN_PREFIX}{}", polarity.name())
}

/// Headline followed by the verbalized triples as sentences and, when a
/// polarity is given, the reserved sentiment token.
pub fn augment_text(headline: &str, triples: &[InferenceTriple], sentiment: Option<Polarity>) -> String {
    let mut text = headline.to_string();
    if !triples.is_empty() {
        let phrases: Vec<String> = triples.iter().map(verbalize).collect();
        text.push_str(". ");
        text.push_str(&phrases.join(". "));
    }
    if let Some(p) = sentiment {
        text.push(' ');
        text.push_str(&sentiment_token(p));
    }
    text
}

/// Identity of an inference for intersection counting.
pub fn inference_key(verbalized: &str) -> String {
    verbalized.trim().to_lowercase()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RelationStats {
    /// Mean triples per headline, keyed by category then relation.
    pub means: BTreeMap<Category, BTreeMap<RelationKind, f64>>,
    pub headlines: BTreeMap<Category, usize>,
    /// Article ids that carry triples but are not in the corpus.
    pub orphans: Vec<String>,
}

/// Mean number of triples of each relation per headline, per category.
/// Headlines without triples count in the denominator.
pub fn relation_stats(inferences: &InferenceSet, corpus: &[NewsArticle]) -> RelationStats {
    let mut stats = RelationStats::default();
    let mut totals: BTreeMap<Category, BTreeMap<RelationKind, usize>> = BTreeMap::new();
    let mut known = BTreeSet::new();
    for article in corpus {
        known.insert(article.article_id.as_str());
        *stats.headlines.entry(article.category).or_default() += 1;
        let counts = totals.entry(article.category).or_default();
        for t in inferences.get(&article.article_id) {
            *counts.entry(t.relation).or_default() += 1;
        }
    }
    stats.orphans = inferences
        .articles()
        .filter(|id| !known.contains(id))
        .map(str::to_string)
        .collect();
    for (category, counts) in totals {
        let n = stats.headlines[&category] as f64;
        let row = RelationKind::ALL
            .into_iter()
            .map(|r| (r, counts.get(&r).copied().unwrap_or(0) as f64 / n))
            .collect();
        stats.means.insert(category, row);
    }
    stats
}

/// Region cardinalities of a 2- or 3-set Venn diagram. Regions are keyed by
/// membership bitmask (bit `i` set when the element is in set `i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VennCounts {
    pub classes: Vec<String>,
    pub regions: BTreeMap<u8, usize>,
}

impl VennCounts {
    pub fn region(&self, mask: u8) -> usize {
        self.regions.get(&mask).copied().unwrap_or(0)
    }

    pub fn unique(&self, i: usize) -> usize {
        self.region(1 << i)
    }

    pub fn pairwise_only(&self, i: usize, j: usize) -> usize {
        self.region((1 << i) | (1 << j))
    }

    pub fn common_all(&self) -> usize {
        self.region(((1u16 << self.classes.len()) - 1) as u8)
    }

    pub fn union_size(&self) -> usize {
        self.regions.values().sum()
    }
}

pub fn class_intersections<T: Ord + Clone>(sets: &[(String, BTreeSet<T>)]) -> Result<VennCounts> {
    if !(2..=3).contains(&sets.len()) {
        return Err(Error::Contract(format!(
            "class intersections need 2 or 3 sets, got {}",
            sets.len()
        )));
    }
    let mut membership: BTreeMap<&T, u8> = BTreeMap::new();
    for (i, (_, set)) in sets.iter().enumerate() {
        for x in set {
            *membership.entry(x).or_default() |= 1 << i;
        }
    }
    let full = (1u8 << sets.len()) - 1;
    let mut regions: BTreeMap<u8, usize> = (1..=full).map(|m| (m, 0)).collect();
    for mask in membership.into_values() {
        *regions.entry(mask).or_default() += 1;
    }
    Ok(VennCounts {
        classes: sets.iter().map(|(name, _)| name.clone()).collect(),
        regions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::Utc;

    fn triple(rel: RelationKind, tail: &str) -> InferenceTriple {
        InferenceTriple {
            article_id: "a1".into(),
            relation: rel,
            tail: tail.into(),
        }
    }

    #[test]
    fn loads_and_rejects() {
        let text = "a1\treact\tangry\na1\txNeed\tto make a speech\na1\tisFilledBy\tuproar\na2\tfoo\tbar\n";
        let load = read_inferences(text.as_bytes(), &RelationTable::default()).unwrap();
        assert_eq!(load.set.len(), 1);
        assert_eq!(load.set.get("a1").len(), 3);
        assert_eq!(load.set.get("a1")[1].relation, RelationKind::Need);
        assert_eq!(load.rejections.len(), 1);
        assert_eq!(load.rejections[0].line, 4);
        assert!(load.rejections[0].cause.contains("unknown relation"));

        let empty = read_inferences("".as_bytes(), &RelationTable::default()).unwrap();
        assert!(empty.set.is_empty());
        assert!(matches!(
            load_inferences("/no/such/file.tsv", &RelationTable::default()),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn aliases_extend_the_table() {
        let mut extra = BTreeMap::new();
        extra.insert("ObjectUse".to_string(), "capableOf".to_string());
        let table = RelationTable::default().with_aliases(&extra).unwrap();
        assert_eq!(table.resolve("objectuse"), Some(RelationKind::CapableOf));
        extra.insert("x".to_string(), "nope".to_string());
        assert!(RelationTable::default().with_aliases(&extra).is_err());
    }

    #[test]
    fn verbalization_examples() {
        assert_eq!(verbalize(&triple(RelationKind::React, "angry")), "reacted angry");
        assert_eq!(verbalize(&triple(RelationKind::Need, "to make a speech")), "needed to make a speech");
        assert_eq!(
            verbalize(&triple(RelationKind::IsFilledBy, "uproar at the republican convention")),
            "isFilledBy uproar at the republican convention"
        );
        assert_eq!(verbalize(&triple(RelationKind::Intent, "to protest")), "intended to protest");
    }

    #[test]
    fn augmentation_examples() {
        assert_eq!(augment_text("X wins", &[], Some(Polarity::Positive)), "X wins SENTTOKEN_positive");
        let triples = [triple(RelationKind::React, "angry"), triple(RelationKind::Want, "to protest")];
        assert_eq!(
            augment_text("Uproar...", &triples, Some(Polarity::Negative)),
            "Uproar.... reacted angry. wanted to protest SENTTOKEN_negative"
        );
        assert_eq!(augment_text("Plain headline", &[], None), "Plain headline");
    }

    fn article(id: &str, category: Category) -> NewsArticle {
        NewsArticle {
            article_id: id.into(),
            event_id: "e".into(),
            title: "t".into(),
            body: None,
            publisher_domain: "p".into(),
            published_at: Utc::now(),
            category,
        }
    }

    #[test]
    fn relation_means() {
        let mut triples = Vec::new();
        for (id, n) in [("h1", 3), ("h2", 2)] {
            for k in 0..n {
                triples.push(InferenceTriple {
                    article_id: id.into(),
                    relation: RelationKind::Causes,
                    tail: format!("t{k}"),
                });
            }
        }
        triples.push(InferenceTriple {
            article_id: "ghost".into(),
            relation: RelationKind::Want,
            tail: "x".into(),
        });
        let set = InferenceSet::from_triples(triples);
        let corpus = [article("h1", Category::Business), article("h2", Category::Business)];
        let stats = relation_stats(&set, &corpus);
        assert_eq!(stats.means[&Category::Business][&RelationKind::Causes], 2.5);
        assert_eq!(stats.means[&Category::Business][&RelationKind::Want], 0.0);
        assert!(!stats.means.contains_key(&Category::Games));
        assert_eq!(stats.orphans, ["ghost"]);
    }

    fn set(xs: &[i32]) -> BTreeSet<i32> {
        xs.iter().copied().collect()
    }

    #[test]
    fn venn_hand_example() {
        let sets = [
            ("A".to_string(), set(&[1, 2, 3])),
            ("B".to_string(), set(&[2, 3, 4])),
            ("C".to_string(), set(&[3, 5])),
        ];
        let v = class_intersections(&sets).unwrap();
        assert_eq!(v.common_all(), 1);
        assert_eq!(v.pairwise_only(0, 1), 1);
        assert_eq!(v.pairwise_only(1, 2), 0);
        assert_eq!(v.pairwise_only(0, 2), 0);
        assert_eq!((v.unique(0), v.unique(1), v.unique(2)), (1, 1, 1));
        assert_eq!(v.union_size(), 5);
    }

    #[test]
    fn venn_identical_and_degenerate() {
        let sets = [("A".to_string(), set(&[1, 2])), ("B".to_string(), set(&[1, 2]))];
        let v = class_intersections(&sets).unwrap();
        assert_eq!(v.common_all(), 2);
        assert_eq!(v.unique(0) + v.unique(1), 0);
        assert!(class_intersections(&sets[..1]).is_err());
    }
}
