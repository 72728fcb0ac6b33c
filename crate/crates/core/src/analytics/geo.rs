//! Offline location-to-region lookup and per-community regional counts.

use std::collections::HashMap;
use std::path::Path;

use serde_json::{json, Value};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::csvio;
use crate::error::{Error, Result};
use crate::ingest::UserProfile;
use crate::partition::Partition;
use crate::scalar::Scalar;

/// The 13 regions of Metropolitan France, in output order.
pub const METROPOLITAN_REGIONS: [&str; 13] = [
    "Auvergne-Rhône-Alpes",
    "Bourgogne-Franche-Comté",
    "Bretagne",
    "Centre-Val de Loire",
    "Corse",
    "Grand Est",
    "Hauts-de-France",
    "Île-de-France",
    "Normandie",
    "Nouvelle-Aquitaine",
    "Occitanie",
    "Pays de la Loire",
    "Provence-Alpes-Côte d'Azur",
];

/// Case-folds, strips diacritics, trims and collapses inner whitespace.
pub fn normalize_location(s: &str) -> String {
    let stripped: String = s.nfd().filter(|c| !is_combining_mark(*c)).collect();
    stripped.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

fn region_index(name: &str) -> Option<usize> {
    let key = normalize_location(name);
    METROPOLITAN_REGIONS
        .iter()
        .position(|r| normalize_location(r) == key)
}

/// Normalized location string to region. Entries whose region is outside
/// Metropolitan France are kept so they resolve, then get excluded.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: HashMap<String, Option<usize>>,
}

impl Gazetteer {
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let entries = pairs
            .into_iter()
            .map(|(loc, region)| (normalize_location(loc), region_index(region)))
            .collect();
        Gazetteer { entries }
    }

    /// Loads `location_normalized,region` rows; any malformed row is a configuration error.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses gazetteer CSV text; `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = rdr
            .headers()
            .map_err(|e| Error::Config(format!("{origin}: {e}")))?
            .clone();
        if headers.len() != 2 || &headers[0] != "location_normalized" || &headers[1] != "region" {
            return Err(Error::Config(format!("{origin}: expected header location_normalized,region")));
        }
        let mut entries = HashMap::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Config(format!("{origin}: row {}: {e}", i + 2)))?;
            let (loc, region) = (rec[0].trim(), rec[1].trim());
            if loc.is_empty() || region.is_empty() {
                return Err(Error::Config(format!("{origin}: row {} has an empty field", i + 2)));
            }
            entries.insert(normalize_location(loc), region_index(region));
        }
        Ok(Gazetteer { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Metropolitan region index for a free-text location. Tries the whole
    /// string, then its first comma-separated part ("Lyon, France").
    pub fn lookup(&self, location: &str) -> Option<usize> {
        let key = normalize_location(location);
        if key.is_empty() {
            return None;
        }
        if let Some(r) = self.entries.get(&key) {
            return *r;
        }
        let head = key.split(',').next().unwrap_or("").trim();
        if head.len() < key.len() {
            if let Some(r) = self.entries.get(head) {
                return *r;
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCount {
    pub region: &'static str,
    pub user_count: usize,
    /// `log10(1 + user_count)`
    pub log_value: f64,
}

/// Per community, one entry per metropolitan region in [`METROPOLITAN_REGIONS`] order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegionHistogram {
    pub communities: Vec<Vec<RegionCount>>,
}

pub fn region_histogram<F: Scalar>(
    users: &[UserProfile],
    partition: &Partition<F>,
    gazetteer: &Gazetteer,
) -> RegionHistogram {
    let mut counts = vec![[0usize; 13]; partition.community_count()];
    for u in users {
        if let (Some(c), Some(r)) = (partition.community_of(u.user_id), gazetteer.lookup(&u.location)) {
            counts[c][r] += 1;
        }
    }
    let communities = counts
        .into_iter()
        .map(|row| {
            METROPOLITAN_REGIONS
                .iter()
                .zip(row)
                .map(|(&region, n)| RegionCount {
                    region,
                    user_count: n,
                    log_value: (1.0 + n as f64).log10(),
                })
                .collect()
        })
        .collect();
    RegionHistogram { communities }
}

/// `community,region,user_count,log_value`
pub fn write_geo_csv(h: &RegionHistogram, path: &Path, header_comment: Option<&str>) -> Result<()> {
    let mut w = csvio::create(path, header_comment, &["community", "region", "user_count", "log_value"])?;
    for (c, rows) in h.communities.iter().enumerate() {
        for r in rows {
            w.write_record([
                c.to_string(),
                r.region.to_string(),
                r.user_count.to_string(),
                format!("{:.6}", r.log_value),
            ])
            .map_err(|e| csvio::csv_err(path, e))?;
        }
    }
    csvio::finish(w, path)
}

/// Copies a region FeatureCollection, adding `user_count_<c>` and
/// `log_value_<c>` properties for every community `c`. Features are matched on
/// their `name` (or `nom`) property; unmatched features are left as they are.
pub fn attach_region_values(shapes: &Value, h: &RegionHistogram) -> Result<Value> {
    let mut out = shapes.clone();
    let features = out
        .get_mut("features")
        .and_then(Value::as_array_mut)
        .ok_or_else(|| Error::Data("region shapes: not a GeoJSON FeatureCollection".into()))?;
    let mut matched = [false; 13];
    for f in features.iter_mut() {
        let name = f
            .get("properties")
            .and_then(|p| p.get("name").or_else(|| p.get("nom")))
            .and_then(Value::as_str)
            .map(str::to_owned);
        let Some(idx) = name.as_deref().and_then(region_index) else {
            log::warn!("region shapes: feature {name:?} is not a metropolitan region");
            continue;
        };
        matched[idx] = true;
        let props = f
            .as_object_mut()
            .ok_or_else(|| Error::Data("region shapes: feature is not an object".into()))?
            .entry("properties")
            .or_insert_with(|| json!({}));
        let props = props
            .as_object_mut()
            .ok_or_else(|| Error::Data("region shapes: properties is not an object".into()))?;
        for (c, rows) in h.communities.iter().enumerate() {
            props.insert(format!("user_count_{c}"), json!(rows[idx].user_count));
            props.insert(format!("log_value_{c}"), json!(rows[idx].log_value));
        }
    }
    for (i, m) in matched.iter().enumerate() {
        if !m {
            log::warn!("region shapes: no feature for {}", METROPOLITAN_REGIONS[i]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn user(id: u64, location: &str) -> UserProfile {
        UserProfile {
            user_id: id,
            screen_name: format!("u{id}"),
            description: String::new(),
            location: location.into(),
            created_at: "2020-01-01T00:00:00Z".parse().unwrap(),
            statuses_count: 0,
            followers_count: 0,
            friends_count: 0,
            favourites_count: 0,
            listed_count: 0,
            default_profile: false,
            verified: false,
            geo_enabled: false,
            complete: true,
        }
    }

    fn gaz() -> Gazetteer {
        Gazetteer::from_pairs([
            ("paris", "Île-de-France"),
            ("lyon", "Auvergne-Rhône-Alpes"),
            ("pointe-a-pitre", "Guadeloupe"),
        ])
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_location("  Île-de-France "), "ile-de-france");
        assert_eq!(normalize_location("SAINT   Étienne"), "saint etienne");
    }

    #[test]
    fn lookup_rules() {
        let g = gaz();
        assert_eq!(g.lookup("Paris"), Some(7));
        assert_eq!(g.lookup("PARIS, France"), Some(7));
        assert_eq!(g.lookup("Bruxelles"), None);
        assert_eq!(g.lookup("Pointe-à-Pitre"), None);
        assert_eq!(g.lookup(""), None);
    }

    #[test]
    fn histogram_counts() {
        let users: Vec<_> = (0..99).map(|i| user(i, "Paris")).chain([user(200, "Lyon"), user(201, "Bruxelles")]).collect();
        let ids: Vec<u64> = users.iter().map(|u| u.user_id).collect();
        let p: Partition<f64> = Partition::from_labels(&ids, &vec![0; ids.len()], 0.0);
        let h = region_histogram(&users, &p, &gaz());
        let idf = h.communities[0].iter().find(|r| r.region == "Île-de-France").unwrap();
        assert_eq!(idf.user_count, 99);
        assert_eq!(idf.log_value, 2.0);
        let total: usize = h.communities[0].iter().map(|r| r.user_count).sum();
        assert_eq!(total, 100);
    }

    #[test]
    fn malformed_gazetteer_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        std::fs::write(&p, "location_normalized,region\nparis,Île-de-France\nlyon\n").unwrap();
        assert!(matches!(Gazetteer::load(&p), Err(Error::Config(_))));
        std::fs::write(&p, "location_normalized,region\nparis,\n").unwrap();
        assert!(matches!(Gazetteer::load(&p), Err(Error::Config(_))));
        std::fs::write(&p, "location_normalized,region\nparis,Île-de-France\n").unwrap();
        assert_eq!(Gazetteer::load(&p).unwrap().len(), 1);
    }

    #[test]
    fn geojson_join() {
        let shapes = json!({"type": "FeatureCollection", "features": [
            {"type": "Feature", "properties": {"nom": "Ile-de-France"}, "geometry": null}
        ]});
        let users = vec![user(1, "paris")];
        let p: Partition<f64> = Partition::from_labels(&[1], &[0], 0.0);
        let h = region_histogram(&users, &p, &gaz());
        let out = attach_region_values(&shapes, &h).unwrap();
        assert_eq!(out["features"][0]["properties"]["user_count_0"], json!(1));
    }
}
