//! Publisher and country metadata, and normalized country distances.
//!
//! Publisher file (CSV with header):
//!
//! ```text
//! domain,country,publishing_language,political_alignment
//! nytimes.com,United States,English,centre-left
//! ```
//!
//! Country file (CSV with header). The cultural and economic cells each hold
//! whitespace-separated raw values on a 0-100 scale, in the order of
//! [`CULTURAL_DIMENSIONS`] and [`ECONOMIC_DIMENSIONS`]; an empty cell means
//! the vector is absent:
//!
//! ```text
//! country,cultural,economic,latitude,longitude
//! Ireland,28 70 68 35 24 65,82 88 80 ... 77,53.0,-8.0
//! ```

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeler::TernaryLabel;

pub const CULTURAL_DIMENSIONS: [&str; 6] = [
    "power_distance",
    "individualism",
    "masculinity",
    "uncertainty_avoidance",
    "long_term_orientation",
    "indulgence",
];

pub const ECONOMIC_DIMENSIONS: [&str; 12] = [
    "safety_security",
    "personal_freedom",
    "governance",
    "social_capital",
    "investment_environment",
    "enterprise_conditions",
    "market_access_infrastructure",
    "economic_quality",
    "living_conditions",
    "health",
    "education",
    "natural_environment",
];

/// Upper bound (inclusive) of "information-not-crossing".
pub const NOT_CROSSING_MAX: f64 = 0.1;
/// Upper bound (inclusive) of "unsure".
pub const UNSURE_MAX: f64 = 0.4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Cultural,
    Economic,
}

impl ProfileKind {
    pub fn dimensions(self) -> usize {
        match self {
            ProfileKind::Cultural => CULTURAL_DIMENSIONS.len(),
            ProfileKind::Economic => ECONOMIC_DIMENSIONS.len(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Cultural => "cultural",
            ProfileKind::Economic => "economic",
        }
    }
}

/// Case-folded, trimmed lookup key for countries and alignments.
pub fn normalize_key(s: &str) -> String {
    s.trim().to_lowercase()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublisherProfile {
    pub domain: String,
    pub country: String,
    pub publishing_language: String,
    pub political_alignment: Option<String>,
}

impl PublisherProfile {
    pub fn new(domain: &str, country: &str, language: &str, alignment: Option<&str>) -> Self {
        PublisherProfile {
            domain: crate::corpus::normalize_domain(domain),
            country: country.trim().to_string(),
            publishing_language: language.trim().to_string(),
            political_alignment: alignment.map(|a| a.trim().to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountryProfile {
    pub country: String,
    pub cultural: Option<Vec<f64>>,
    pub economic: Option<Vec<f64>>,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
}

impl CountryProfile {
    pub fn new(country: &str, cultural: Option<Vec<f64>>, economic: Option<Vec<f64>>) -> Self {
        CountryProfile {
            country: country.trim().to_string(),
            cultural,
            economic,
            latitude: None,
            longitude: None,
        }
    }

    pub fn vector(&self, kind: ProfileKind) -> Option<&[f64]> {
        match kind {
            ProfileKind::Cultural => self.cultural.as_deref(),
            ProfileKind::Economic => self.economic.as_deref(),
        }
    }

    fn validate(&self) -> Result<(), String> {
        if self.country.is_empty() {
            return Err("empty country".into());
        }
        for kind in [ProfileKind::Cultural, ProfileKind::Economic] {
            if let Some(v) = self.vector(kind) {
                if v.len() != kind.dimensions() {
                    return Err(format!(
                        "expected {} dimensions for {}, found {}",
                        kind.dimensions(),
                        kind.name(),
                        v.len()
                    ));
                }
                if let Some(bad) = v.iter().find(|x| !(0.0..=100.0).contains(*x)) {
                    return Err(format!("{} value {bad} outside [0, 100]", kind.name()));
                }
            }
        }
        Ok(())
    }
}

/// Per-dimension `(min, max)` over every loaded country carrying the vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionBounds {
    pub cultural: Vec<(f64, f64)>,
    pub economic: Vec<(f64, f64)>,
}

impl Default for DimensionBounds {
    fn default() -> Self {
        DimensionBounds::from_countries(&[])
    }
}

impl DimensionBounds {
    pub fn from_countries<'a>(countries: impl IntoIterator<Item = &'a CountryProfile> + Clone) -> Self {
        let compute = |kind: ProfileKind| {
            let mut bounds: Vec<Option<(f64, f64)>> = vec![None; kind.dimensions()];
            for c in countries.clone() {
                if let Some(v) = c.vector(kind) {
                    for (b, &x) in bounds.iter_mut().zip(v) {
                        *b = Some(match *b {
                            None => (x, x),
                            Some((lo, hi)) => (lo.min(x), hi.max(x)),
                        });
                    }
                }
            }
            bounds.into_iter().map(|b| b.unwrap_or((0.0, 0.0))).collect()
        };
        DimensionBounds {
            cultural: compute(ProfileKind::Cultural),
            economic: compute(ProfileKind::Economic),
        }
    }

    pub fn get(&self, kind: ProfileKind) -> &[(f64, f64)] {
        match kind {
            ProfileKind::Cultural => &self.cultural,
            ProfileKind::Economic => &self.economic,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ProfileRegistry {
    publishers: BTreeMap<String, PublisherProfile>,
    countries: BTreeMap<String, CountryProfile>,
    bounds: DimensionBounds,
    /// Optional alignment → similarity class table; unmapped alignments are
    /// their own class.
    alignment_classes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowRejection {
    pub file: &'static str,
    pub line: usize,
    pub cause: String,
}

#[derive(Debug)]
pub struct RegistryLoad {
    pub registry: ProfileRegistry,
    pub rejections: Vec<RowRejection>,
}

impl ProfileRegistry {
    pub fn from_parts(
        publishers: Vec<PublisherProfile>,
        countries: Vec<CountryProfile>,
    ) -> Result<Self> {
        let mut reg = ProfileRegistry::default();
        for p in publishers {
            let key = crate::corpus::normalize_domain(&p.domain);
            if reg.publishers.insert(key.clone(), p).is_some() {
                return Err(Error::Duplicate {
                    what: "publisher domain",
                    key,
                });
            }
        }
        for c in countries {
            c.validate().map_err(Error::Validation)?;
            let key = normalize_key(&c.country);
            if reg.countries.insert(key.clone(), c).is_some() {
                return Err(Error::Duplicate {
                    what: "country",
                    key,
                });
            }
        }
        reg.bounds = DimensionBounds::from_countries(reg.countries.values());
        Ok(reg)
    }

    pub fn with_alignment_classes(mut self, classes: BTreeMap<String, String>) -> Self {
        self.alignment_classes = classes
            .into_iter()
            .map(|(k, v)| (normalize_key(&k), normalize_key(&v)))
            .collect();
        self
    }

    pub fn publisher(&self, domain: &str) -> Option<&PublisherProfile> {
        self.publishers.get(&crate::corpus::normalize_domain(domain))
    }

    pub fn country(&self, name: &str) -> Option<&CountryProfile> {
        self.countries.get(&normalize_key(name))
    }

    pub fn publishers(&self) -> impl Iterator<Item = &PublisherProfile> {
        self.publishers.values()
    }

    pub fn countries(&self) -> impl Iterator<Item = &CountryProfile> {
        self.countries.values()
    }

    pub fn bounds(&self) -> &DimensionBounds {
        &self.bounds
    }

    /// Similarity class of an alignment: the synonym table entry if one
    /// exists, else the case-folded alignment itself.
    pub fn alignment_class(&self, alignment: &str) -> String {
        let key = normalize_key(alignment);
        self.alignment_classes.get(&key).cloned().unwrap_or(key)
    }

    /// Normalized distance between two registered countries.
    pub fn country_distance(&self, a: &str, b: &str, kind: ProfileKind) -> Result<f64> {
        let lookup = |name: &str| {
            self.country(name).ok_or_else(|| Error::ProfileIncomplete {
                country: name.to_string(),
                kind: kind.name().into(),
            })
        };
        normalized_distance(lookup(a)?, lookup(b)?, kind, self.bounds())
    }
}

fn parse_vector(cell: &str, kind: ProfileKind) -> Result<Option<Vec<f64>>, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    let values = cell
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| format!("invalid {} value `{t}`", kind.name()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != kind.dimensions() {
        return Err(format!(
            "expected {} dimensions for {}, found {}",
            kind.dimensions(),
            kind.name(),
            values.len()
        ));
    }
    Ok(Some(values))
}

fn parse_coordinate(cell: Option<&str>) -> Result<Option<f64>, String> {
    match cell.map(str::trim) {
        None | Some("") => Ok(None),
        Some(s) => s
            .parse()
            .map(Some)
            .map_err(|_| format!("invalid coordinate `{s}`")),
    }
}

fn csv_reader(reader: impl Read) -> csv::Reader<impl Read> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader)
}

pub fn read_publishers(reader: impl Read) -> Result<(Vec<PublisherProfile>, Vec<RowRejection>)> {
    let mut rows = Vec::new();
    let mut rejections = Vec::new();
    for (idx, record) in csv_reader(reader).records().enumerate() {
        let line = idx + 2;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                rejections.push(RowRejection { file: "publishers", line, cause: e.to_string() });
                continue;
            }
        };
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        if record.len() < 3 || record.len() > 4 {
            rejections.push(RowRejection {
                file: "publishers",
                line,
                cause: format!("expected 3 or 4 columns, found {}", record.len()),
            });
            continue;
        }
        if field(0).is_empty() || field(1).is_empty() {
            rejections.push(RowRejection {
                file: "publishers",
                line,
                cause: "empty domain or country".into(),
            });
            continue;
        }
        let alignment = Some(field(3)).filter(|a| !a.is_empty());
        rows.push(PublisherProfile::new(field(0), field(1), field(2), alignment));
    }
    Ok((rows, rejections))
}

pub fn read_countries(reader: impl Read) -> Result<(Vec<CountryProfile>, Vec<RowRejection>)> {
    let mut rows = Vec::new();
    let mut rejections = Vec::new();
    for (idx, record) in csv_reader(reader).records().enumerate() {
        let line = idx + 2;
        let parsed = record.map_err(|e| e.to_string()).and_then(|r| {
            if r.len() < 3 || r.len() > 5 {
                return Err(format!("expected 3 to 5 columns, found {}", r.len()));
            }
            let mut profile = CountryProfile::new(
                r.get(0).unwrap_or(""),
                parse_vector(r.get(1).unwrap_or(""), ProfileKind::Cultural)?,
                parse_vector(r.get(2).unwrap_or(""), ProfileKind::Economic)?,
            );
            profile.latitude = parse_coordinate(r.get(3))?;
            profile.longitude = parse_coordinate(r.get(4))?;
            profile.validate()?;
            Ok(profile)
        });
        match parsed {
            Ok(p) => rows.push(p),
            Err(cause) => rejections.push(RowRejection { file: "countries", line, cause }),
        }
    }
    Ok((rows, rejections))
}

/// Reads an optional `alignment,class` synonym table.
pub fn read_alignment_classes(reader: impl Read) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for record in csv_reader(reader).records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if let (Some(a), Some(c)) = (record.get(0), record.get(1)) {
            map.insert(normalize_key(a), normalize_key(c));
        }
    }
    Ok(map)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

pub fn load_registry(
    publisher_path: impl AsRef<Path>,
    country_path: impl AsRef<Path>,
) -> Result<RegistryLoad> {
    let (publishers, mut rejections) = read_publishers(open(publisher_path.as_ref())?)?;
    let (countries, country_rejections) = read_countries(open(country_path.as_ref())?)?;
    rejections.extend(country_rejections);
    Ok(RegistryLoad {
        registry: ProfileRegistry::from_parts(publishers, countries)?,
        rejections,
    })
}

/// Min-max scales both vectors per dimension, then returns their Euclidean
/// distance divided by `sqrt(d)`. Degenerate dimensions scale to 0 and scaled
/// coordinates are clamped to [0, 1], so the result lies in [0, 1].
pub fn normalized_distance(
    a: &CountryProfile,
    b: &CountryProfile,
    kind: ProfileKind,
    bounds: &DimensionBounds,
) -> Result<f64> {
    fn vector(p: &CountryProfile, kind: ProfileKind) -> Result<&[f64]> {
        p.vector(kind).ok_or_else(|| Error::ProfileIncomplete {
            country: p.country.clone(),
            kind: kind.name().into(),
        })
    }
    let (va, vb) = (vector(a, kind)?, vector(b, kind)?);
    let bounds = bounds.get(kind);
    let d = kind.dimensions();
    if va.len() != d || vb.len() != d || bounds.len() != d {
        return Err(Error::Contract(format!(
            "{} vectors and bounds must have {d} dimensions",
            kind.name()
        )));
    }
    let scale = |x: f64, (lo, hi): (f64, f64)| {
        if hi > lo {
            ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
        } else {
            0.0
        }
    };
    let sum_sq: f64 = va
        .iter()
        .zip(vb)
        .zip(bounds)
        .map(|((&x, &y), &b)| {
            let diff = scale(x, b) - scale(y, b);
            diff * diff
        })
        .sum();
    Ok((sum_sq / d as f64).sqrt())
}

/// Three-way threshold mapping of a normalized distance.
pub fn pair_label(distance: f64) -> Result<TernaryLabel> {
    if !(0.0..=1.0).contains(&distance) {
        return Err(Error::Contract(format!("distance {distance} outside [0, 1]")));
    }
    Ok(if distance <= NOT_CROSSING_MAX {
        TernaryLabel::NotCrossing
    } else if distance <= UNSURE_MAX {
        TernaryLabel::Unsure
    } else {
        TernaryLabel::Crossing
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_bounds() -> DimensionBounds {
        DimensionBounds {
            cultural: vec![(0.0, 1.0); 6],
            economic: vec![(0.0, 1.0); 12],
        }
    }

    fn cultural(name: &str, v: Vec<f64>) -> CountryProfile {
        CountryProfile::new(name, Some(v), None)
    }

    #[test]
    fn loads_registry_and_bounds() {
        let pubs = "domain,country,publishing_language,political_alignment\n\
                    a.com,Ireland,English,neutral\n\
                    b.com,Thailand,Thai,\n";
        let countries = "country,cultural,economic,latitude,longitude\n\
                         Ireland,40 10 10 10 10 10,,53.0,-8.0\n\
                         Thailand,60 20 20 20 20 20,,,\n";
        let (p, pr) = read_publishers(pubs.as_bytes()).unwrap();
        let (c, cr) = read_countries(countries.as_bytes()).unwrap();
        assert!(pr.is_empty() && cr.is_empty());
        let reg = ProfileRegistry::from_parts(p, c).unwrap();
        assert_eq!(reg.bounds().cultural[0], (40.0, 60.0));
        assert_eq!(reg.bounds().cultural[1], (10.0, 20.0));
        assert_eq!(reg.publisher("B.com").unwrap().political_alignment, None);
        assert_eq!(reg.country(" ireland ").unwrap().latitude, Some(53.0));
    }

    #[test]
    fn wrong_arity_row_is_rejected() {
        let countries = "country,cultural,economic\n\
                         Ireland,40 10 10 10 10,\n\
                         Spain,40 10 10 10 10 10,\n";
        let (rows, rej) = read_countries(countries.as_bytes()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rej.len(), 1);
        assert_eq!(rej[0].line, 2);
        assert!(rej[0].cause.contains("expected 6 dimensions"));
    }

    #[test]
    fn out_of_range_raw_value_is_rejected() {
        let countries = "country,cultural,economic\nIreland,40 10 10 10 10 140,\n";
        let (rows, rej) = read_countries(countries.as_bytes()).unwrap();
        assert!(rows.is_empty());
        assert!(rej[0].cause.contains("outside [0, 100]"));
    }

    #[test]
    fn duplicate_keys_are_fatal() {
        let dup_pub = vec![
            PublisherProfile::new("a.com", "X", "en", None),
            PublisherProfile::new("A.COM", "Y", "en", None),
        ];
        assert!(matches!(
            ProfileRegistry::from_parts(dup_pub, vec![]),
            Err(Error::Duplicate { .. })
        ));
        let dup_country = vec![
            CountryProfile::new("Spain", None, None),
            CountryProfile::new("spain ", None, None),
        ];
        assert!(matches!(
            ProfileRegistry::from_parts(vec![], dup_country),
            Err(Error::Duplicate { .. })
        ));
    }

    #[test]
    fn distance_examples() {
        let b = unit_bounds();
        let a = cultural("a", vec![0.3; 6]);
        assert_eq!(normalized_distance(&a, &a, ProfileKind::Cultural, &b).unwrap(), 0.0);

        let zeros = cultural("z", vec![0.0; 6]);
        let ones = cultural("o", vec![1.0; 6]);
        let d = normalized_distance(&zeros, &ones, ProfileKind::Cultural, &b).unwrap();
        assert!((d - 1.0).abs() < 1e-15);

        let mut v = vec![0.5; 6];
        v[2] = 0.9;
        let c = cultural("c", v);
        let half = cultural("h", vec![0.5; 6]);
        let d = normalized_distance(&half, &c, ProfileKind::Cultural, &b).unwrap();
        // 0.4 / sqrt(6)
        assert!((d - 0.163_299_316_185_545_2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_dimension_contributes_nothing() {
        let bounds = DimensionBounds {
            cultural: vec![(50.0, 50.0); 6],
            economic: vec![(0.0, 0.0); 12],
        };
        let a = cultural("a", vec![50.0; 6]);
        let b = cultural("b", vec![50.0; 6]);
        assert_eq!(normalized_distance(&a, &b, ProfileKind::Cultural, &bounds).unwrap(), 0.0);
    }

    #[test]
    fn missing_vector_names_country_and_kind() {
        let a = cultural("Ireland", vec![0.0; 6]);
        match normalized_distance(&a, &a, ProfileKind::Economic, &unit_bounds()) {
            Err(Error::ProfileIncomplete { country, kind }) => {
                assert_eq!(country, "Ireland");
                assert_eq!(kind, "economic");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn threshold_mapping() {
        assert_eq!(pair_label(0.05).unwrap(), TernaryLabel::NotCrossing);
        assert_eq!(pair_label(0.1).unwrap(), TernaryLabel::NotCrossing);
        assert_eq!(pair_label(0.4).unwrap(), TernaryLabel::Unsure);
        assert_eq!(pair_label(0.401).unwrap(), TernaryLabel::Crossing);
        assert!(matches!(pair_label(1.2), Err(Error::Contract(_))));
        assert!(pair_label(-0.01).is_err());
        assert!(pair_label(f64::NAN).is_err());
    }

    #[test]
    fn alignment_classes_fold_synonyms() {
        let mut map = BTreeMap::new();
        map.insert("Centre-Right".to_string(), "right".to_string());
        map.insert("conservatism".to_string(), "right".to_string());
        let reg = ProfileRegistry::default().with_alignment_classes(map);
        assert_eq!(reg.alignment_class("centre-right"), reg.alignment_class("Conservatism"));
        assert_eq!(reg.alignment_class("Neutral"), "neutral");
    }

    proptest! {
        #[test]
        fn labels_are_monotone(d1 in 0.0f64..=1.0, d2 in 0.0f64..=1.0) {
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            prop_assert!(pair_label(lo).unwrap() <= pair_label(hi).unwrap());
        }
    }
}
