//! Barrier labels for event groups.
//!
//! Geographical, linguistic and political barriers get binary labels from
//! equality of the publishers' country, language, or alignment class.
//! Cultural and economic barriers get ternary labels: every unordered pair of
//! distinct publisher countries is thresholded on its normalized distance and
//! the event takes the most severe pair label.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{retain_annotatable, DroppedEvent, EventGroup};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::profiles::{normalize_key, pair_label, ProfileKind, ProfileRegistry, PublisherProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BarrierKind {
    Cultural,
    Economic,
    Political,
    Linguistic,
    Geographical,
}

impl BarrierKind {
    pub const ALL: [BarrierKind; 5] = [
        BarrierKind::Cultural,
        BarrierKind::Economic,
        BarrierKind::Political,
        BarrierKind::Linguistic,
        BarrierKind::Geographical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BarrierKind::Cultural => "cultural",
            BarrierKind::Economic => "economic",
            BarrierKind::Political => "political",
            BarrierKind::Linguistic => "linguistic",
            BarrierKind::Geographical => "geographical",
        }
    }

    pub fn is_ternary(self) -> bool {
        matches!(self, BarrierKind::Cultural | BarrierKind::Economic)
    }

    pub fn profile_kind(self) -> Option<ProfileKind> {
        match self {
            BarrierKind::Cultural => Some(ProfileKind::Cultural),
            BarrierKind::Economic => Some(ProfileKind::Economic),
            _ => None,
        }
    }

    fn binary_suffix(self) -> &'static str {
        match self {
            BarrierKind::Political => "PB",
            BarrierKind::Linguistic => "LB",
            BarrierKind::Geographical => "GB",
            // ternary barriers never render binary labels
            BarrierKind::Cultural => "CB",
            BarrierKind::Economic => "EB",
        }
    }

    /// Label names in class-id order.
    pub fn class_names(self) -> Vec<String> {
        if self.is_ternary() {
            TernaryLabel::ALL.iter().map(|l| l.name().to_string()).collect()
        } else {
            BinaryLabel::ALL
                .iter()
                .map(|l| l.render(self))
                .collect()
        }
    }
}

impl fmt::Display for BarrierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BarrierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_lowercase();
        let key = if key == "geographic" { "geographical".to_string() } else { key };
        BarrierKind::ALL
            .into_iter()
            .find(|b| b.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown barrier `{}`", s.trim())))
    }
}

/// Ordered by severity: not-crossing < unsure < crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TernaryLabel {
    NotCrossing,
    Unsure,
    Crossing,
}

impl TernaryLabel {
    pub const ALL: [TernaryLabel; 3] = [
        TernaryLabel::NotCrossing,
        TernaryLabel::Unsure,
        TernaryLabel::Crossing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TernaryLabel::NotCrossing => "information-not-crossing",
            TernaryLabel::Unsure => "unsure",
            TernaryLabel::Crossing => "information-crossing",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinaryLabel {
    NotCrossed,
    Crossed,
}

impl BinaryLabel {
    pub const ALL: [BinaryLabel; 2] = [BinaryLabel::NotCrossed, BinaryLabel::Crossed];

    /// Barrier-specific rendering, e.g. `Not-crossed-GB`.
    pub fn render(self, barrier: BarrierKind) -> String {
        let stem = match self {
            BinaryLabel::NotCrossed => "Not-crossed",
            BinaryLabel::Crossed => "Crossed",
        };
        format!("{stem}-{}", barrier.binary_suffix())
    }

    fn from_all_equal(all_equal: bool) -> Self {
        if all_equal {
            BinaryLabel::NotCrossed
        } else {
            BinaryLabel::Crossed
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BarrierLabel {
    Binary(BinaryLabel),
    Ternary(TernaryLabel),
}

impl BarrierLabel {
    pub fn class_id(self) -> usize {
        match self {
            BarrierLabel::Binary(l) => l as usize,
            BarrierLabel::Ternary(l) => l as usize,
        }
    }

    pub fn render(self, barrier: BarrierKind) -> String {
        match self {
            BarrierLabel::Binary(l) => l.render(barrier),
            BarrierLabel::Ternary(l) => l.name().to_string(),
        }
    }

    pub fn parse(barrier: BarrierKind, name: &str) -> Result<Self> {
        let name = name.trim();
        let found = if barrier.is_ternary() {
            TernaryLabel::ALL
                .into_iter()
                .find(|l| l.name().eq_ignore_ascii_case(name))
                .map(BarrierLabel::Ternary)
        } else {
            BinaryLabel::ALL
                .into_iter()
                .find(|l| l.render(barrier).eq_ignore_ascii_case(name))
                .map(BarrierLabel::Binary)
        };
        found.ok_or_else(|| Error::Parse(format!("`{name}` is not a {barrier} label")))
    }
}

/// One barrier's label on an event, with the attribute values behind it and
/// the articles that took part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierAssignment {
    pub label: BarrierLabel,
    pub provenance: String,
    pub articles: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventAnnotation {
    pub event_id: String,
    pub labels: BTreeMap<BarrierKind, BarrierAssignment>,
}

fn publishers<'a>(
    event: &EventGroup,
    registry: &'a ProfileRegistry,
) -> Result<Vec<&'a PublisherProfile>> {
    event
        .articles
        .iter()
        .map(|a| {
            registry
                .publisher(&a.publisher_domain)
                .ok_or_else(|| Error::MissingProfile(a.publisher_domain.clone()))
        })
        .collect()
}

fn distinct<'a>(values: impl Iterator<Item = &'a str>) -> BTreeSet<String> {
    values.map(normalize_key).collect()
}

fn joined(set: &BTreeSet<String>) -> String {
    set.iter().cloned().collect::<Vec<_>>().join("|")
}

fn geographical(event: &EventGroup, registry: &ProfileRegistry) -> Result<(BinaryLabel, String)> {
    let countries = distinct(publishers(event, registry)?.iter().map(|p| p.country.as_str()));
    Ok((
        BinaryLabel::from_all_equal(countries.len() <= 1),
        format!("countries={}", joined(&countries)),
    ))
}

fn linguistic(event: &EventGroup, registry: &ProfileRegistry) -> Result<(BinaryLabel, String)> {
    let languages = distinct(
        publishers(event, registry)?
            .iter()
            .map(|p| p.publishing_language.as_str()),
    );
    Ok((
        BinaryLabel::from_all_equal(languages.len() <= 1),
        format!("languages={}", joined(&languages)),
    ))
}

fn political(event: &EventGroup, registry: &ProfileRegistry) -> Result<(BinaryLabel, String)> {
    let pubs = publishers(event, registry)?;
    let mut alignments = BTreeSet::new();
    let mut classes = BTreeSet::new();
    for p in pubs {
        let alignment = p
            .political_alignment
            .as_deref()
            .ok_or_else(|| Error::MissingProfile(format!("{} (alignment)", p.domain)))?;
        alignments.insert(normalize_key(alignment));
        classes.insert(registry.alignment_class(alignment));
    }
    Ok((
        BinaryLabel::from_all_equal(classes.len() <= 1),
        format!("alignments={}", joined(&alignments)),
    ))
}

/// Most severe label among the pair labels; not-crossing when there are none.
pub fn aggregate_pair_labels(labels: impl IntoIterator<Item = TernaryLabel>) -> TernaryLabel {
    labels.into_iter().max().unwrap_or(TernaryLabel::NotCrossing)
}

fn ternary(
    event: &EventGroup,
    registry: &ProfileRegistry,
    kind: ProfileKind,
) -> Result<(TernaryLabel, String)> {
    let countries: Vec<String> =
        distinct(publishers(event, registry)?.iter().map(|p| p.country.as_str()))
            .into_iter()
            .collect();
    let mut pairs = Vec::new();
    let mut labels = Vec::new();
    for (i, a) in countries.iter().enumerate() {
        for b in &countries[i + 1..] {
            let d = registry.country_distance(a, b, kind)?;
            let label = pair_label(d)?;
            pairs.push(format!("{a}~{b}:{d:.4}"));
            labels.push(label);
        }
    }
    let provenance = if pairs.is_empty() {
        format!("countries={}", countries.join("|"))
    } else {
        format!("pairs={}", pairs.join("|"))
    };
    Ok((aggregate_pair_labels(labels), provenance))
}

pub fn label_geographical(event: &EventGroup, registry: &ProfileRegistry) -> Result<BinaryLabel> {
    geographical(event, registry).map(|(l, _)| l)
}

pub fn label_linguistic(event: &EventGroup, registry: &ProfileRegistry) -> Result<BinaryLabel> {
    linguistic(event, registry).map(|(l, _)| l)
}

pub fn label_political(event: &EventGroup, registry: &ProfileRegistry) -> Result<BinaryLabel> {
    political(event, registry).map(|(l, _)| l)
}

pub fn label_ternary(
    event: &EventGroup,
    registry: &ProfileRegistry,
    kind: ProfileKind,
) -> Result<TernaryLabel> {
    ternary(event, registry, kind).map(|(l, _)| l)
}

/// Labels one already-filtered event for one barrier.
pub fn label_event(
    event: &EventGroup,
    registry: &ProfileRegistry,
    barrier: BarrierKind,
) -> Result<BarrierAssignment> {
    let (label, provenance) = match barrier {
        BarrierKind::Geographical => {
            geographical(event, registry).map(|(l, p)| (BarrierLabel::Binary(l), p))?
        }
        BarrierKind::Linguistic => {
            linguistic(event, registry).map(|(l, p)| (BarrierLabel::Binary(l), p))?
        }
        BarrierKind::Political => {
            political(event, registry).map(|(l, p)| (BarrierLabel::Binary(l), p))?
        }
        BarrierKind::Cultural | BarrierKind::Economic => {
            let kind = barrier.profile_kind().expect("ternary barrier");
            ternary(event, registry, kind).map(|(l, p)| (BarrierLabel::Ternary(l), p))?
        }
    };
    Ok(BarrierAssignment {
        label,
        provenance,
        articles: event.articles.iter().map(|a| a.article_id.clone()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelFailure {
    pub event_id: String,
    pub barrier: BarrierKind,
    pub cause: String,
}

#[derive(Clone, Debug, Default)]
pub struct AnnotationReport {
    pub annotations: Vec<EventAnnotation>,
    pub dropped: BTreeMap<BarrierKind, Vec<DroppedEvent>>,
    pub failures: Vec<LabelFailure>,
}

struct EventOutcome {
    annotation: EventAnnotation,
    dropped: Vec<(BarrierKind, DroppedEvent)>,
    failures: Vec<LabelFailure>,
}

fn annotate_event(
    group: &EventGroup,
    registry: &ProfileRegistry,
    barriers: &[BarrierKind],
) -> EventOutcome {
    let mut outcome = EventOutcome {
        annotation: EventAnnotation {
            event_id: group.event_id.clone(),
            labels: BTreeMap::new(),
        },
        dropped: Vec::new(),
        failures: Vec::new(),
    };
    for &barrier in barriers {
        let filtered = match retain_annotatable(group, registry, barrier) {
            Ok(g) => g,
            Err(reason) => {
                outcome.dropped.push((
                    barrier,
                    DroppedEvent {
                        event_id: group.event_id.clone(),
                        reason,
                    },
                ));
                continue;
            }
        };
        match label_event(&filtered, registry, barrier) {
            Ok(assignment) => {
                outcome.annotation.labels.insert(barrier, assignment);
            }
            Err(e) => outcome.failures.push(LabelFailure {
                event_id: group.event_id.clone(),
                barrier,
                cause: e.to_string(),
            }),
        }
    }
    outcome
}

/// Annotates every group for every barrier, filtering each group per barrier
/// first. Events that end up with no label at all are still listed.
pub fn annotate_corpus(groups: &[EventGroup], registry: &ProfileRegistry) -> AnnotationReport {
    annotate_corpus_with(groups, registry, &BarrierKind::ALL, Execution::default())
}

pub fn annotate_corpus_with(
    groups: &[EventGroup],
    registry: &ProfileRegistry,
    barriers: &[BarrierKind],
    exec: Execution,
) -> AnnotationReport {
    let outcomes = exec.map(groups, |g| annotate_event(g, registry, barriers));
    let mut report = AnnotationReport::default();
    for outcome in outcomes {
        for (barrier, dropped) in outcome.dropped {
            report.dropped.entry(barrier).or_default().push(dropped);
        }
        report.failures.extend(outcome.failures);
        report.annotations.push(outcome.annotation);
    }
    report.annotations.sort_by(|a, b| a.event_id.cmp(&b.event_id));
    report
}

/// Writes one `event_id, barrier, label, provenance, articles` row per label.
pub fn write_annotations(mut w: impl Write, annotations: &[EventAnnotation]) -> std::io::Result<()> {
    writeln!(w, "event_id\tbarrier\tlabel\tprovenance\tarticles")?;
    for ann in annotations {
        for (barrier, a) in &ann.labels {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                ann.event_id,
                barrier,
                a.label.render(*barrier),
                a.provenance,
                a.articles.join(",")
            )?;
        }
    }
    Ok(())
}

/// Inverse of [`write_annotations`]. Lines starting with `#` are skipped.
pub fn read_annotations(r: impl BufRead) -> Result<Vec<EventAnnotation>> {
    let mut by_event: BTreeMap<String, EventAnnotation> = BTreeMap::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.starts_with('#') || line.starts_with("event_id\t") || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(Error::Parse(format!(
                "annotation line {}: expected 5 columns, found {}",
                idx + 1,
                cols.len()
            )));
        }
        let barrier: BarrierKind = cols[1].parse()?;
        let assignment = BarrierAssignment {
            label: BarrierLabel::parse(barrier, cols[2])?,
            provenance: cols[3].to_string(),
            articles: cols[4]
                .split(',')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
        };
        by_event
            .entry(cols[0].to_string())
            .or_insert_with(|| EventAnnotation {
                event_id: cols[0].to_string(),
                labels: BTreeMap::new(),
            })
            .labels
            .insert(barrier, assignment);
    }
    Ok(by_event.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Category, NewsArticle};
    use crate::profiles::CountryProfile;

    fn article(id: &str, domain: &str) -> NewsArticle {
        NewsArticle {
            article_id: id.into(),
            event_id: "e1".into(),
            title: "t".into(),
            body: None,
            publisher_domain: domain.into(),
            published_at: "2016-07-18T19:48:00Z".parse().unwrap(),
            category: Category::Society,
        }
    }

    fn event(domains: &[&str]) -> EventGroup {
        EventGroup {
            event_id: "e1".into(),
            articles: domains
                .iter()
                .enumerate()
                .map(|(i, d)| article(&format!("a{i}"), d))
                .collect(),
        }
    }

    fn registry() -> ProfileRegistry {
        let publishers = vec![
            PublisherProfile::new("us1.com", "United States", "English", Some("conservatism")),
            PublisherProfile::new("us2.com", "United States", "English", Some("conservatism")),
            PublisherProfile::new("us3.com", "United States", "English", Some("centre-right")),
            PublisherProfile::new("ie.com", "Ireland", "English", Some("neutral")),
            PublisherProfile::new("th.com", "Thailand", "English", Some("left-wing")),
            PublisherProfile::new("es.com", "Spain", "Spanish", Some("left-wing")),
            PublisherProfile::new("xx.com", "Nowhere", "English", Some("left-wing")),
        ];
        // Every cultural dimension spans 0..100 through Thailand, so
        // d(US, IE) = 0.2/sqrt(6), d(US, ES) = 0.6/sqrt(6), d(US, TH) = 1.
        let countries = vec![
            CountryProfile::new("United States", Some(vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0]), Some(vec![10.0; 12])),
            CountryProfile::new("Ireland", Some(vec![20.0, 0.0, 0.0, 0.0, 0.0, 0.0]), Some(vec![10.0; 12])),
            CountryProfile::new("Spain", Some(vec![60.0, 0.0, 0.0, 0.0, 0.0, 0.0]), Some(vec![10.0; 12])),
            CountryProfile::new("Thailand", Some(vec![100.0; 6]), Some(vec![90.0; 12])),
            CountryProfile::new("Nowhere", None, None),
        ];
        ProfileRegistry::from_parts(publishers, countries).unwrap()
    }

    #[test]
    fn geographical_examples() {
        let reg = registry();
        assert_eq!(label_geographical(&event(&["us1.com", "us2.com"]), &reg).unwrap(), BinaryLabel::NotCrossed);
        assert_eq!(label_geographical(&event(&["ie.com", "th.com"]), &reg).unwrap(), BinaryLabel::Crossed);
        assert_eq!(label_geographical(&event(&["th.com"]), &reg).unwrap(), BinaryLabel::NotCrossed);
        assert_eq!(BinaryLabel::Crossed.render(BarrierKind::Geographical), "Crossed-GB");
        assert!(matches!(
            label_geographical(&event(&["ghost.org"]), &reg),
            Err(Error::MissingProfile(_))
        ));
    }

    #[test]
    fn linguistic_examples() {
        let reg = registry();
        assert_eq!(label_linguistic(&event(&["us1.com", "ie.com", "th.com"]), &reg).unwrap(), BinaryLabel::NotCrossed);
        assert_eq!(label_linguistic(&event(&["es.com", "us1.com", "ie.com"]), &reg).unwrap(), BinaryLabel::Crossed);
        assert_eq!(label_linguistic(&event(&["es.com"]), &reg).unwrap(), BinaryLabel::NotCrossed);
    }

    #[test]
    fn political_examples() {
        let reg = registry();
        // exact equality: conservatism vs centre-right differ
        assert_eq!(label_political(&event(&["us1.com", "us2.com", "us3.com"]), &reg).unwrap(), BinaryLabel::Crossed);
        assert_eq!(label_political(&event(&["ie.com", "us1.com", "th.com"]), &reg).unwrap(), BinaryLabel::Crossed);
        assert_eq!(label_political(&event(&["th.com", "es.com"]), &reg).unwrap(), BinaryLabel::NotCrossed);

        let mut synonyms = BTreeMap::new();
        synonyms.insert("conservatism".into(), "right".into());
        synonyms.insert("centre-right".into(), "right".into());
        let loose = registry().with_alignment_classes(synonyms);
        assert_eq!(label_political(&event(&["us1.com", "us2.com", "us3.com"]), &loose).unwrap(), BinaryLabel::NotCrossed);
    }

    #[test]
    fn ternary_examples() {
        let reg = registry();
        let k = ProfileKind::Cultural;
        assert_eq!(label_ternary(&event(&["us1.com", "us2.com"]), &reg, k).unwrap(), TernaryLabel::NotCrossing);
        // US-IE ~0.082 not-crossing, US-ES ~0.245 unsure, IE-ES ~0.163 unsure
        assert_eq!(label_ternary(&event(&["us1.com", "ie.com", "es.com"]), &reg, k).unwrap(), TernaryLabel::Unsure);
        assert_eq!(label_ternary(&event(&["ie.com", "es.com", "th.com"]), &reg, k).unwrap(), TernaryLabel::Crossing);
        assert!(matches!(
            label_ternary(&event(&["us1.com", "xx.com"]), &reg, k),
            Err(Error::ProfileIncomplete { .. })
        ));
    }

    #[test]
    fn aggregation_is_max_over_all_small_multisets() {
        // Enumerate every multiset of size <= 3 and check the precedence rule
        // crossing > unsure > not-crossing directly.
        let all = TernaryLabel::ALL;
        let mut cases: Vec<Vec<TernaryLabel>> = vec![vec![]];
        for n in 1..=3 {
            let mut idx = vec![0usize; n];
            loop {
                cases.push(idx.iter().map(|&i| all[i]).collect());
                let mut k = 0;
                while k < n && idx[k] == 2 {
                    idx[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
                idx[k] += 1;
            }
        }
        for case in cases {
            let expected = if case.contains(&TernaryLabel::Crossing) {
                TernaryLabel::Crossing
            } else if case.contains(&TernaryLabel::Unsure) {
                TernaryLabel::Unsure
            } else {
                TernaryLabel::NotCrossing
            };
            assert_eq!(aggregate_pair_labels(case.clone()), expected, "{case:?}");
        }
    }

    #[test]
    fn annotate_all_equal_metadata() {
        let reg = registry();
        let report = annotate_corpus(&[event(&["us1.com", "us2.com"])], &reg);
        let ann = &report.annotations[0];
        assert_eq!(ann.labels.len(), 5);
        for (barrier, a) in &ann.labels {
            assert_eq!(a.label.class_id(), 0, "{barrier}");
        }
        assert_eq!(ann.labels[&BarrierKind::Geographical].label.render(BarrierKind::Geographical), "Not-crossed-GB");
    }

    #[test]
    fn missing_economic_vectors_omit_only_that_label() {
        let reg = registry();
        let report = annotate_corpus(&[event(&["xx.com"])], &reg);
        let labels = &report.annotations[0].labels;
        assert!(!labels.contains_key(&BarrierKind::Economic));
        assert!(!labels.contains_key(&BarrierKind::Cultural));
        assert!(labels.contains_key(&BarrierKind::Geographical));
        assert!(labels.contains_key(&BarrierKind::Political));
        assert_eq!(report.dropped[&BarrierKind::Economic][0].reason, "missing economic profile");
        assert!(report.failures.is_empty());
    }

    #[test]
    fn labels_ignore_article_order_and_duplicates() {
        let reg = registry();
        let a = annotate_corpus(&[event(&["us1.com", "ie.com", "es.com"])], &reg);
        let b = annotate_corpus(&[event(&["es.com", "us1.com", "ie.com", "ie.com"])], &reg);
        for barrier in BarrierKind::ALL {
            assert_eq!(
                a.annotations[0].labels[&barrier].label,
                b.annotations[0].labels[&barrier].label
            );
        }
    }

    #[test]
    fn annotation_file_round_trips() {
        let reg = registry();
        let report = annotate_corpus(&[event(&["us1.com", "th.com"]), event(&["es.com"])], &reg);
        let mut buf = Vec::new();
        write_annotations(&mut buf, &report.annotations).unwrap();
        let back = read_annotations(buf.as_slice()).unwrap();
        // both events share id e1, so they merge into one record on read
        assert_eq!(back.len(), 1);
        let mut buf2 = Vec::new();
        write_annotations(&mut buf2, &report.annotations[..1]).unwrap();
        assert_eq!(read_annotations(buf2.as_slice()).unwrap(), report.annotations[..1].to_vec());
    }

    #[test]
    fn label_names_parse_back() {
        for barrier in BarrierKind::ALL {
            for (id, name) in barrier.class_names().iter().enumerate() {
                assert_eq!(BarrierLabel::parse(barrier, name).unwrap().class_id(), id);
            }
        }
        assert!(BarrierLabel::parse(BarrierKind::Political, "Crossed-GB").is_err());
    }
}
