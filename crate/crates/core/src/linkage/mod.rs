//! Joins metered addresses to building footprints: street names are
//! normalized, matched exactly or by edit-distance similarity within each
//! ZIP code, and house numbers must then agree.

mod normalize;

pub use normalize::{normalize_house_number, normalize_street, normalized_similarity};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::records::{BuildingRecord, ConsumptionRecord, Hour};

/// Default minimum similarity for a fuzzy street-name match.
pub const DEFAULT_THRESHOLD: u8 = 88;

/// One metered premise address.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmiAddress {
    pub ami_key: String,
    pub street_number: String,
    pub street_name: String,
    pub zip: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    Exact,
    Fuzzy,
}

/// Where an unmatched row dropped out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnmatchedStage {
    /// No building shares the ZIP code.
    NoZip,
    /// The best street-name score was below the threshold.
    FuzzyBelowThreshold,
    /// The street matched but no building carries the house number.
    HouseNumber,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkResult {
    pub ami_key: String,
    pub zip: String,
    pub building_id: Option<String>,
    pub match_kind: Option<MatchKind>,
    /// Street-name similarity of the chosen street (100 for exact).
    pub similarity: Option<u8>,
    pub matched_street: Option<String>,
    pub stage: Option<UnmatchedStage>,
}

impl LinkResult {
    pub fn is_matched(&self) -> bool {
        self.building_id.is_some()
    }
}

// street -> house number -> building ids (sorted)
type ZipIndex<'a> = BTreeMap<String, BTreeMap<String, BTreeSet<&'a str>>>;

/// Links every AMI row to at most one building. Output is grouped by ZIP
/// (ascending) and keeps input order within a ZIP.
pub fn link_addresses(ami: &[AmiAddress], buildings: &[BuildingRecord], threshold: u8) -> Vec<LinkResult> {
    let mut index: HashMap<&str, ZipIndex<'_>> = HashMap::new();
    for b in buildings {
        index
            .entry(b.zip.trim())
            .or_default()
            .entry(normalize_street(&b.street_name))
            .or_default()
            .entry(normalize_house_number(&b.street_number))
            .or_default()
            .insert(b.building_id.as_str());
    }

    let mut groups: BTreeMap<&str, Vec<&AmiAddress>> = BTreeMap::new();
    for a in ami {
        groups.entry(a.zip.trim()).or_default().push(a);
    }
    let groups: Vec<(&str, Vec<&AmiAddress>)> = groups.into_iter().collect();
    groups
        .par_iter()
        .map(|(zip, rows)| {
            let zip_index = index.get(zip);
            let mut street_cache: HashMap<String, Option<(String, u8)>> = HashMap::new();
            rows.iter()
                .map(|a| link_one(a, zip_index, threshold, &mut street_cache))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn link_one(
    a: &AmiAddress,
    zip_index: Option<&ZipIndex<'_>>,
    threshold: u8,
    street_cache: &mut HashMap<String, Option<(String, u8)>>,
) -> LinkResult {
    let mut out = LinkResult {
        ami_key: a.ami_key.clone(),
        zip: a.zip.trim().to_string(),
        building_id: None,
        match_kind: None,
        similarity: None,
        matched_street: None,
        stage: None,
    };
    let Some(zip_index) = zip_index else {
        out.stage = Some(UnmatchedStage::NoZip);
        return out;
    };
    let street = normalize_street(&a.street_name);
    let best = street_cache
        .entry(street.clone())
        .or_insert_with(|| best_street(&street, zip_index))
        .clone();
    let Some((matched, score)) = best else {
        out.stage = Some(UnmatchedStage::NoZip);
        return out;
    };
    out.similarity = Some(score);
    if score < threshold {
        out.stage = Some(UnmatchedStage::FuzzyBelowThreshold);
        return out;
    }
    let number = normalize_house_number(&a.street_number);
    let Some(id) = zip_index[&matched].get(&number).and_then(|ids| ids.first()) else {
        out.matched_street = Some(matched);
        out.stage = Some(UnmatchedStage::HouseNumber);
        return out;
    };
    out.building_id = Some(id.to_string());
    out.match_kind = Some(if score == 100 && matched == street { MatchKind::Exact } else { MatchKind::Fuzzy });
    out.matched_street = Some(matched);
    out
}

// Exact street if present, otherwise the highest-scoring one; equal scores
// go to the lexicographically smallest street name.
fn best_street(street: &str, zip_index: &ZipIndex<'_>) -> Option<(String, u8)> {
    if zip_index.contains_key(street) {
        return Some((street.to_string(), 100));
    }
    let mut best: Option<(&String, u8)> = None;
    let mut tied = false;
    // BTreeMap iteration is sorted, so keeping the first maximum breaks ties.
    for candidate in zip_index.keys() {
        let s = normalized_similarity(street, candidate);
        match best {
            Some((_, b)) if s < b => {}
            Some((_, b)) if s == b => tied = true,
            _ => {
                best = Some((candidate, s));
                tied = false;
            }
        }
    }
    if tied {
        if let Some((name, s)) = best {
            debug!("street `{street}` tied at score {s}; chose `{name}`");
        }
    }
    best.map(|(n, s)| (n.clone(), s))
}

/// Hourly consumption of one metered unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitConsumption {
    pub ami_key: String,
    pub timestamp: Hour,
    pub value: f64,
}

/// Sums unit consumption per linked building and hour. Rows of unlinked
/// units are dropped. Output is sorted by building id, then hour.
pub fn aggregate_units(consumption: &[UnitConsumption], links: &[LinkResult]) -> Result<Vec<ConsumptionRecord>> {
    let mut seen: BTreeSet<(&str, Hour)> = BTreeSet::new();
    let mut duplicates: BTreeSet<String> = BTreeSet::new();
    for c in consumption {
        if !seen.insert((c.ami_key.as_str(), c.timestamp)) {
            duplicates.insert(format!("{}@{}", c.ami_key, c.timestamp));
        }
    }
    if !duplicates.is_empty() {
        return Err(Error::DuplicateRows { keys: duplicates.into_iter().collect() });
    }
    if let Some(c) = consumption.iter().find(|c| !(c.value.is_finite() && c.value >= 0.0)) {
        return Err(Error::domain(format!("consumption for {} at {} is {}", c.ami_key, c.timestamp, c.value)));
    }

    let building_of: HashMap<&str, &str> = links
        .iter()
        .filter_map(|l| l.building_id.as_deref().map(|b| (l.ami_key.as_str(), b)))
        .collect();
    let mut sums: BTreeMap<(&str, Hour), f64> = BTreeMap::new();
    for c in consumption {
        if let Some(b) = building_of.get(c.ami_key.as_str()) {
            *sums.entry((b, c.timestamp)).or_insert(0.0) += c.value;
        }
    }
    Ok(sums
        .into_iter()
        .map(|((b, t), value)| ConsumptionRecord { building_id: b.to_string(), timestamp: t, value })
        .collect())
}

#[cfg(test)]
mod tests;
