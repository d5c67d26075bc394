//! Deterministic synthetic corpora with profiles and inference triples.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Category, NewsArticle};
use crate::error::{Error, Result};
use crate::inference::{InferenceTriple, RelationKind};
use crate::profiles::{CountryProfile, ProfileKind, ProfileRegistry, PublisherProfile};
use crate::sentiment::ValenceLexicon;

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub articles: Vec<NewsArticle>,
    pub publishers: Vec<PublisherProfile>,
    pub countries: Vec<CountryProfile>,
    pub inferences: Vec<InferenceTriple>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixturePaths {
    pub articles: PathBuf,
    pub publishers: PathBuf,
    pub countries: PathBuf,
    pub inferences: PathBuf,
}

impl FixturePaths {
    pub fn in_dir(dir: &Path) -> Self {
        FixturePaths {
            articles: dir.join("articles.jsonl"),
            publishers: dir.join("publishers.csv"),
            countries: dir.join("countries.csv"),
            inferences: dir.join("inferences.tsv"),
        }
    }
}

const LANGUAGES: [&str; 4] = ["english", "german", "spanish", "french"];
const ALIGNMENTS: [&str; 5] = ["left", "center-left", "center", "center-right", "right"];

/// Topic words with no valence in the shipped lexicon.
const TOPIC_WORDS: [&str; 48] = [
    "council", "budget", "minister", "election", "river", "harbor", "senate", "vote", "market",
    "report", "plan", "city", "region", "summit", "talks", "policy", "court", "ruling", "campaign",
    "district", "museum", "stadium", "railway", "airport", "school", "hospital", "energy", "grid",
    "tariff", "treaty", "ballot", "mayor", "governor", "parliament", "coalition", "reform", "tax",
    "housing", "transit", "bridge", "festival", "league", "season", "merger", "factory", "port",
    "census", "study",
];

const RELATIONS: [RelationKind; 6] = [
    RelationKind::Intent,
    RelationKind::Need,
    RelationKind::Want,
    RelationKind::React,
    RelationKind::Causes,
    RelationKind::HasSubEvent,
];

const NEUTRAL_TAILS: [&str; 8] = [
    "to read the news",
    "informed",
    "to know more",
    "a discussion",
    "to follow the story",
    "curious",
    "a public debate",
    "to check the facts",
];

fn timestamp(minutes: i64) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2021, 3, 1, 0, 0, 0).unwrap() + Duration::minutes(minutes)
}

fn country_name(i: usize) -> String {
    format!("country{i:02}")
}

fn random_country(rng: &mut ChaCha8Rng, i: usize) -> CountryProfile {
    let cultural = (0..ProfileKind::Cultural.dimensions())
        .map(|_| rng.random_range(0..=100) as f64)
        .collect();
    let economic = (0..ProfileKind::Economic.dimensions())
        .map(|_| rng.random_range(0..=1000) as f64 / 10.0)
        .collect();
    let mut c = CountryProfile::new(&country_name(i), Some(cultural), Some(economic));
    c.latitude = Some(rng.random_range(-600..=700) as f64 / 10.0);
    c.longitude = Some(rng.random_range(-1800..=1800) as f64 / 10.0);
    c
}

fn lexicon_words() -> (Vec<String>, Vec<String>) {
    let lex = ValenceLexicon::builtin();
    let mut pos: Vec<String> = Vec::new();
    let mut neg: Vec<String> = Vec::new();
    for (w, v) in lex.tokens() {
        if w.contains('\'') || w.contains(' ') {
            continue;
        }
        if v > 0.0 {
            pos.push(w.to_string());
        } else if v < 0.0 {
            neg.push(w.to_string());
        }
    }
    pos.sort();
    neg.sort();
    (pos, neg)
}

fn headline(rng: &mut ChaCha8Rng, words: usize, extra: &[String]) -> String {
    let mut tokens: Vec<String> = (0..words)
        .map(|_| TOPIC_WORDS.choose(rng).expect("non-empty").to_string())
        .collect();
    for e in extra {
        let at = rng.random_range(0..=tokens.len());
        tokens.insert(at, e.clone());
    }
    let mut text = tokens.join(" ");
    if let Some(first) = text.get(..1) {
        text.replace_range(..1, &first.to_uppercase());
    }
    text
}

/// Ten countries with full profiles, 25 publishers across four languages
/// and five alignments (one publisher without alignment), and 50 events of
/// one to five articles over all categories.
pub fn labeling_fixture(seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let countries: Vec<CountryProfile> = (0..10).map(|i| random_country(&mut rng, i)).collect();
    let publishers: Vec<PublisherProfile> = (0..25)
        .map(|i| {
            let country = country_name(i % 10);
            let language = LANGUAGES[(i % 10) % LANGUAGES.len()];
            let alignment = (i != 7).then(|| ALIGNMENTS[rng.random_range(0..ALIGNMENTS.len())]);
            PublisherProfile::new(&format!("pub{i:02}.example"), &country, language, alignment)
        })
        .collect();
    let (pos, neg) = lexicon_words();
    let mut articles = Vec::new();
    let mut inferences = Vec::new();
    let mut n = 0;
    for e in 0..50 {
        let size = rng.random_range(1..=5);
        let category = Category::ALL[e % Category::ALL.len()];
        for _ in 0..size {
            let publisher = publishers.choose(&mut rng).expect("non-empty");
            let mut extra = Vec::new();
            match rng.random_range(0..3) {
                0 => extra.push(pos.choose(&mut rng).expect("non-empty").clone()),
                1 => extra.push(neg.choose(&mut rng).expect("non-empty").clone()),
                _ => {}
            }
            let id = format!("a{n:04}");
            articles.push(NewsArticle {
                article_id: id.clone(),
                event_id: format!("e{e:03}"),
                title: headline(&mut rng, 5, &extra),
                body: None,
                publisher_domain: publisher.domain.clone(),
                published_at: timestamp(n as i64 * 7),
                category,
            });
            for _ in 0..rng.random_range(0..3) {
                inferences.push(InferenceTriple {
                    article_id: id.clone(),
                    relation: *RELATIONS.choose(&mut rng).expect("non-empty"),
                    tail: NEUTRAL_TAILS.choose(&mut rng).expect("non-empty").to_string(),
                });
            }
            n += 1;
        }
    }
    Fixture {
        articles,
        publishers,
        countries,
        inferences,
    }
}

const CROSSED_TAILS: [&str; 6] = [
    "to reach readers abroad",
    "foreign reactions",
    "to translate the story",
    "international attention",
    "a diplomatic response",
    "to compare other nations",
];

const LOCAL_TAILS: [&str; 6] = [
    "to inform local readers",
    "hometown pride",
    "to attend the town meeting",
    "neighborhood gossip",
    "a local petition",
    "to visit the county office",
];

/// 250 two-article society events (500 headlines) labeled for the
/// geographical barrier. Crossed events pair publishers from different
/// countries. Headline topic words carry no label signal; a minority of
/// headlines carry a weak cue word, and most carry one rarely repeated
/// sentiment word whose polarity follows the label. Inference tails are
/// drawn mostly from label-specific pools.
pub fn directional_fixture(seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let countries: Vec<CountryProfile> = (0..12).map(|i| random_country(&mut rng, i)).collect();
    let publishers: Vec<PublisherProfile> = (0..24)
        .map(|i| {
            PublisherProfile::new(
                &format!("news{i:02}.example"),
                &country_name(i / 2),
                "english",
                Some(ALIGNMENTS[i % ALIGNMENTS.len()]),
            )
        })
        .collect();
    let (pos, neg) = lexicon_words();
    let cues = [["local", "county"], ["global", "foreign"]];
    let mut articles = Vec::new();
    let mut inferences = Vec::new();
    for e in 0..250 {
        let crossed = e % 2 == 1;
        let pair = if crossed {
            let a = rng.random_range(0..12);
            let b = (a + rng.random_range(1..12)) % 12;
            [a * 2 + rng.random_range(0..2), b * 2 + rng.random_range(0..2)]
        } else {
            let c = rng.random_range(0..12);
            [c * 2, c * 2 + 1]
        };
        for (k, &p) in pair.iter().enumerate() {
            let id = format!("d{:04}", e * 2 + k);
            let mut extra = Vec::new();
            if rng.random_bool(0.25) {
                extra.push(cues[usize::from(crossed)].choose(&mut rng).expect("non-empty").to_string());
            }
            if rng.random_bool(0.85) {
                let agree = rng.random_bool(0.8);
                let pool = if crossed == agree { &neg } else { &pos };
                extra.push(pool.choose(&mut rng).expect("non-empty").clone());
            }
            articles.push(NewsArticle {
                article_id: id.clone(),
                event_id: format!("ev{e:03}"),
                title: headline(&mut rng, 5, &extra),
                body: None,
                publisher_domain: publishers[p].domain.clone(),
                published_at: timestamp((e * 2 + k) as i64 * 11),
                category: Category::Society,
            });
            for _ in 0..3 {
                let signal = rng.random_bool(0.6);
                let tail = match (signal, crossed) {
                    (true, true) => CROSSED_TAILS.choose(&mut rng),
                    (true, false) => LOCAL_TAILS.choose(&mut rng),
                    (false, _) => NEUTRAL_TAILS.choose(&mut rng),
                };
                inferences.push(InferenceTriple {
                    article_id: id.clone(),
                    relation: *RELATIONS.choose(&mut rng).expect("non-empty"),
                    tail: tail.expect("non-empty").to_string(),
                });
            }
        }
    }
    Fixture {
        articles,
        publishers,
        countries,
        inferences,
    }
}

fn join_values(v: Option<&[f64]>) -> String {
    v.map(|v| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" "))
        .unwrap_or_default()
}

impl Fixture {
    pub fn registry(&self) -> Result<ProfileRegistry> {
        ProfileRegistry::from_parts(self.publishers.clone(), self.countries.clone())
    }

    pub fn articles_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for a in &self.articles {
            out.push_str(&serde_json::to_string(a)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn publishers_csv(&self) -> String {
        let mut out = String::from("domain,country,publishing_language,political_alignment\n");
        for p in &self.publishers {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                p.domain,
                p.country,
                p.publishing_language,
                p.political_alignment.as_deref().unwrap_or("")
            );
        }
        out
    }

    pub fn countries_csv(&self) -> String {
        let mut out = String::from("country,cultural,economic,latitude,longitude\n");
        for c in &self.countries {
            let coord = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                c.country,
                join_values(c.vector(ProfileKind::Cultural)),
                join_values(c.vector(ProfileKind::Economic)),
                coord(c.latitude),
                coord(c.longitude)
            );
        }
        out
    }

    pub fn inferences_tsv(&self) -> String {
        let mut out = String::from("article_id\trelation\ttail\n");
        for t in &self.inferences {
            let _ = writeln!(out, "{}\t{}\t{}", t.article_id, t.relation.name(), t.tail);
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<FixturePaths> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let paths = FixturePaths::in_dir(dir);
        let files = [
            (&paths.articles, self.articles_jsonl()?),
            (&paths.publishers, self.publishers_csv()),
            (&paths.countries, self.countries_csv()),
            (&paths.inferences, self.inferences_tsv()),
        ];
        for (path, body) in files {
            fs::write(path, body).map_err(|e| Error::io(path, e))?;
        }
        Ok(paths)
    }
}

/// Run configuration shipped next to the directional fixture.
pub const DIRECTIONAL_CONFIG: &str = "\
seed = 42
barriers = [\"geographical\"]
categories = [\"society\"]
modes = [\"plain\", \"augmented\"]
models = [\"logreg\"]

[paths]
output = \"out\"
";

/// Run configuration shipped next to the labeling fixture.
pub const SMALL_CONFIG: &str = "\
seed = 42
modes = [\"plain\", \"augmented\"]
models = [\"logreg\", \"naive-bayes\", \"knn\", \"decision-tree\"]

[paths]
output = \"out\"
";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureKind {
    Directional,
    Small,
}

impl FixtureKind {
    pub fn build(self, seed: u64) -> Fixture {
        match self {
            FixtureKind::Directional => directional_fixture(seed),
            FixtureKind::Small => labeling_fixture(seed),
        }
    }

    pub fn config(self) -> &'static str {
        match self {
            FixtureKind::Directional => DIRECTIONAL_CONFIG,
            FixtureKind::Small => SMALL_CONFIG,
        }
    }

    /// Writes the inputs plus `config.toml` and returns the config path.
    pub fn write(self, seed: u64, dir: &Path) -> Result<PathBuf> {
        self.build(seed).write(dir)?;
        let path = dir.join("config.toml");
        fs::write(&path, self.config()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

impl std::str::FromStr for FixtureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "directional" => Ok(FixtureKind::Directional),
            "small" => Ok(FixtureKind::Small),
            other => Err(Error::Parse(format!("unknown fixture `{other}` (expected directional or small)"))),
        }
    }
}
