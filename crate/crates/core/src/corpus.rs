//! Article ingestion, event grouping, and per-barrier metadata filtering.
//!
//! Articles arrive as JSON Lines, one record per line:
//!
//! ```text
//! {"article_id":"a1","event_id":"e1","title":"...","body":null,
//!  "publisher_domain":"nytimes.com","published_at":"2016-07-18T19:48:00Z","category":"society"}
//! ```
//!
//! Unknown fields are ignored. A malformed line never aborts the load; it is
//! recorded in the rejection report with its 1-based line number.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, FixedOffset, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeler::BarrierKind;
use crate::profiles::{ProfileKind, ProfileRegistry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Business,
    Computers,
    Games,
    Health,
    Home,
    Recreation,
    Science,
    Shopping,
    Society,
    Sports,
}

impl Category {
    pub const ALL: [Category; 10] = [
        Category::Business,
        Category::Computers,
        Category::Games,
        Category::Health,
        Category::Home,
        Category::Recreation,
        Category::Science,
        Category::Shopping,
        Category::Society,
        Category::Sports,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Business => "business",
            Category::Computers => "computers",
            Category::Games => "games",
            Category::Health => "health",
            Category::Home => "home",
            Category::Recreation => "recreation",
            Category::Science => "science",
            Category::Shopping => "shopping",
            Category::Society => "society",
            Category::Sports => "sports",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_lowercase();
        Category::ALL
            .into_iter()
            .find(|c| c.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown category `{}`", s.trim())))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewsArticle {
    pub article_id: String,
    pub event_id: String,
    pub title: String,
    pub body: Option<String>,
    pub publisher_domain: String,
    pub published_at: DateTime<Utc>,
    pub category: Category,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventGroup {
    pub event_id: String,
    pub articles: Vec<NewsArticle>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub line: usize,
    pub cause: String,
}

#[derive(Clone, Debug, Default)]
pub struct ArticleLoad {
    pub articles: Vec<NewsArticle>,
    pub rejections: Vec<Rejection>,
}

/// Every field optional so that a missing field becomes a precise rejection
/// cause instead of a generic serde message.
#[derive(Deserialize)]
struct RawArticle {
    article_id: Option<String>,
    event_id: Option<String>,
    title: Option<String>,
    body: Option<String>,
    publisher_domain: Option<String>,
    published_at: Option<String>,
    category: Option<String>,
}

fn required(field: Option<String>, name: &str) -> Result<String, String> {
    match field {
        Some(v) if !v.trim().is_empty() => Ok(v),
        Some(_) => Err(format!("empty {name}")),
        None => Err(format!("missing field {name}")),
    }
}

fn parse_record(line: &str) -> Result<NewsArticle, String> {
    let raw: RawArticle =
        serde_json::from_str(line).map_err(|e| format!("malformed record: {e}"))?;
    let article_id = required(raw.article_id, "article_id")?.trim().to_string();
    let event_id = required(raw.event_id, "event_id")?.trim().to_string();
    let title = required(raw.title, "title")?.trim().to_string();
    let publisher_domain = normalize_domain(&required(raw.publisher_domain, "publisher_domain")?);
    let stamp = required(raw.published_at, "published_at")?;
    let category = required(raw.category, "category")?;

    let category = Category::from_str(&category).map_err(|e| e.to_string())?;
    let parsed: DateTime<FixedOffset> = DateTime::parse_from_rfc3339(stamp.trim())
        .map_err(|e| format!("invalid timestamp `{}`: {e}", stamp.trim()))?;
    if parsed.offset().local_minus_utc() != 0 {
        return Err(format!("timestamp `{}` is not UTC", stamp.trim()));
    }

    Ok(NewsArticle {
        article_id,
        event_id,
        title,
        body: raw.body.filter(|b| !b.trim().is_empty()),
        publisher_domain,
        published_at: parsed.with_timezone(&Utc),
        category,
    })
}

pub fn normalize_domain(domain: &str) -> String {
    domain.trim().to_lowercase()
}

/// Parses line-delimited article records from any reader.
pub fn read_articles(reader: impl BufRead) -> Result<ArticleLoad> {
    let mut load = ArticleLoad::default();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(format!("line {}: {e}", idx + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_record(&line) {
            Ok(article) => {
                if !seen.insert(article.article_id.clone()) {
                    return Err(Error::Duplicate {
                        what: "article_id",
                        key: article.article_id,
                    });
                }
                load.articles.push(article);
            }
            Err(cause) => load.rejections.push(Rejection {
                line: idx + 1,
                cause,
            }),
        }
    }
    Ok(load)
}

pub fn load_articles(path: impl AsRef<Path>) -> Result<ArticleLoad> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_articles(BufReader::new(file))
}

/// Partitions articles by event id. Groups are ordered by event id and
/// members by `(published_at, article_id)`.
pub fn group_by_event(articles: &[NewsArticle]) -> Vec<EventGroup> {
    let mut by_event: BTreeMap<&str, Vec<NewsArticle>> = BTreeMap::new();
    for article in articles {
        by_event
            .entry(article.event_id.as_str())
            .or_default()
            .push(article.clone());
    }
    by_event
        .into_iter()
        .map(|(event_id, mut articles)| {
            articles.sort_by(|a, b| {
                a.published_at
                    .cmp(&b.published_at)
                    .then_with(|| a.article_id.cmp(&b.article_id))
            });
            EventGroup {
                event_id: event_id.to_string(),
                articles,
            }
        })
        .collect()
}

/// Why an article cannot take part in labeling a given barrier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MissingMetadata {
    UnknownPublisher,
    Country,
    Language,
    Alignment,
    CulturalProfile,
    EconomicProfile,
}

impl fmt::Display for MissingMetadata {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MissingMetadata::UnknownPublisher => "publisher not in registry",
            MissingMetadata::Country => "missing country",
            MissingMetadata::Language => "missing language",
            MissingMetadata::Alignment => "missing alignment",
            MissingMetadata::CulturalProfile => "missing cultural profile",
            MissingMetadata::EconomicProfile => "missing economic profile",
        })
    }
}

/// Checks the metadata a barrier needs for one publisher.
pub fn missing_metadata(
    registry: &ProfileRegistry,
    domain: &str,
    barrier: BarrierKind,
) -> Option<MissingMetadata> {
    let Some(publisher) = registry.publisher(domain) else {
        return Some(MissingMetadata::UnknownPublisher);
    };
    let profile_kind = match barrier {
        BarrierKind::Political => {
            return match &publisher.political_alignment {
                Some(a) if !a.trim().is_empty() => None,
                _ => Some(MissingMetadata::Alignment),
            }
        }
        BarrierKind::Linguistic => {
            return publisher
                .publishing_language
                .trim()
                .is_empty()
                .then_some(MissingMetadata::Language)
        }
        BarrierKind::Geographical => {
            return publisher
                .country
                .trim()
                .is_empty()
                .then_some(MissingMetadata::Country)
        }
        BarrierKind::Cultural => ProfileKind::Cultural,
        BarrierKind::Economic => ProfileKind::Economic,
    };
    if publisher.country.trim().is_empty() {
        return Some(MissingMetadata::Country);
    }
    let has_vector = registry
        .country(&publisher.country)
        .is_some_and(|c| c.vector(profile_kind).is_some());
    if has_vector {
        None
    } else {
        Some(match profile_kind {
            ProfileKind::Cultural => MissingMetadata::CulturalProfile,
            ProfileKind::Economic => MissingMetadata::EconomicProfile,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DroppedEvent {
    pub event_id: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct FilterOutcome {
    pub kept: Vec<EventGroup>,
    pub dropped: Vec<DroppedEvent>,
    /// Articles removed from groups that were kept.
    pub removed_articles: usize,
}

/// Reduces one group to the articles whose publishers carry the barrier's
/// metadata. `Err` holds the drop reason when nothing remains.
pub fn retain_annotatable(
    group: &EventGroup,
    registry: &ProfileRegistry,
    barrier: BarrierKind,
) -> Result<EventGroup, String> {
    let mut reasons = Vec::new();
    let articles: Vec<NewsArticle> = group
        .articles
        .iter()
        .filter(|a| match missing_metadata(registry, &a.publisher_domain, barrier) {
            None => true,
            Some(reason) => {
                reasons.push(reason);
                false
            }
        })
        .cloned()
        .collect();
    if articles.is_empty() {
        reasons.sort();
        reasons.dedup();
        let reason = reasons
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        return Err(reason);
    }
    Ok(EventGroup {
        event_id: group.event_id.clone(),
        articles,
    })
}

pub fn filter_annotatable(
    groups: &[EventGroup],
    registry: &ProfileRegistry,
    barrier: BarrierKind,
) -> FilterOutcome {
    let mut outcome = FilterOutcome::default();
    for group in groups {
        match retain_annotatable(group, registry, barrier) {
            Ok(kept) => {
                outcome.removed_articles += group.articles.len() - kept.articles.len();
                outcome.kept.push(kept);
            }
            Err(reason) => outcome.dropped.push(DroppedEvent {
                event_id: group.event_id.clone(),
                reason,
            }),
        }
    }
    outcome
}

/// Where articles that yielded no commonsense inferences are removed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InferenceFilter {
    /// Before grouping, for every barrier.
    #[default]
    Global,
    /// Only when building a barrier's dataset; labels use the full groups.
    PerBarrier,
    Off,
}

/// Keeps articles for which `has_inferences` holds; returns the removed count.
pub fn drop_uninferred(
    articles: Vec<NewsArticle>,
    has_inferences: impl Fn(&str) -> bool,
) -> (Vec<NewsArticle>, usize) {
    let before = articles.len();
    let kept: Vec<_> = articles
        .into_iter()
        .filter(|a| has_inferences(&a.article_id))
        .collect();
    let removed = before - kept.len();
    (kept, removed)
}
