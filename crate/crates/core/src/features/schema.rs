use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::temporal::TEMPORAL_FEATURE_NAMES;
use super::weather::WEATHER_VARIABLES;
use crate::error::{Error, Result};

pub const LAND_COVER_WINDOWS: [usize; 3] = [1, 11, 51];
pub const NIGHTLIGHT_WINDOWS: [usize; 2] = [11, 51];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandClass {
    Crops,
    Built,
    Rangeland,
}

impl LandClass {
    pub const ALL: [LandClass; 3] = [LandClass::Crops, LandClass::Built, LandClass::Rangeland];

    fn as_str(&self) -> &'static str {
        match self {
            LandClass::Crops => "crops",
            LandClass::Built => "built",
            LandClass::Rangeland => "rangeland",
        }
    }
}

pub const INTERNET_METRICS: [&str; 8] = [
    "fixed_download",
    "fixed_upload",
    "fixed_latency",
    "fixed_tests",
    "mobile_download",
    "mobile_upload",
    "mobile_latency",
    "mobile_tests",
];

/// A feature the pipeline knows how to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feature {
    FootprintArea,
    Height,
    HeightImputed,
    BuildingDensity,
    NeighborAreaMean,
    NeighborAreaStd,
    LandCover { class: LandClass, window: usize },
    Nightlight { window: usize },
    /// Index into [`INTERNET_METRICS`].
    Internet(usize),
    /// Indices into the weather variables and lag hours.
    Weather { var: usize, lag: usize },
    /// Index into the temporal block (7 weekdays, then hour).
    Temporal(usize),
}

impl Feature {
    pub fn name(&self) -> String {
        match *self {
            Feature::FootprintArea => "footprint_area".into(),
            Feature::Height => "height".into(),
            Feature::HeightImputed => "height_imputed".into(),
            Feature::BuildingDensity => "building_density".into(),
            Feature::NeighborAreaMean => "neighbor_area_mean".into(),
            Feature::NeighborAreaStd => "neighbor_area_std".into(),
            Feature::LandCover { class, window } => format!("landcover_{}_w{window}", class.as_str()),
            Feature::Nightlight { window } => format!("nightlight_w{window}"),
            Feature::Internet(i) => format!("internet_{}", INTERNET_METRICS[i]),
            Feature::Weather { var, lag } => format!("{}_lag{lag}", WEATHER_VARIABLES[var]),
            Feature::Temporal(i) => TEMPORAL_FEATURE_NAMES[i].into(),
        }
    }

    pub fn unit(&self) -> &'static str {
        match *self {
            Feature::FootprintArea | Feature::NeighborAreaMean | Feature::NeighborAreaStd => "m2",
            Feature::Height => "m",
            Feature::HeightImputed => "flag",
            Feature::BuildingDensity => "count",
            Feature::LandCover { .. } => "share",
            Feature::Nightlight { .. } => "nW/cm2/sr",
            Feature::Internet(i) => match INTERNET_METRICS[i].rsplit('_').next() {
                Some("latency") => "ms",
                Some("tests") => "count",
                _ => "kbps",
            },
            Feature::Weather { var, .. } => match WEATHER_VARIABLES[var] {
                "t2m" | "stl1" => "K",
                "tp" | "sd" => "m",
                "sp" => "Pa",
                "i10fg" | "u10" | "v10" => "m/s",
                "str" | "ssr" => "J/m2",
                _ => "fraction",
            },
            Feature::Temporal(7) => "hour",
            Feature::Temporal(_) => "flag",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        all_features().into_iter().find(|f| f.name() == name)
    }

    /// Whether the value depends on the hour (weather, calendar).
    pub fn is_hourly(&self) -> bool {
        matches!(self, Feature::Weather { .. } | Feature::Temporal(_))
    }
}

fn all_features() -> Vec<Feature> {
    standard_features(true, true)
}

fn standard_features(nightlights: bool, internet: bool) -> Vec<Feature> {
    let mut f = vec![
        Feature::FootprintArea,
        Feature::Height,
        Feature::HeightImputed,
        Feature::BuildingDensity,
        Feature::NeighborAreaMean,
        Feature::NeighborAreaStd,
    ];
    for class in LandClass::ALL {
        for window in LAND_COVER_WINDOWS {
            f.push(Feature::LandCover { class, window });
        }
    }
    if nightlights {
        f.extend(NIGHTLIGHT_WINDOWS.iter().map(|&window| Feature::Nightlight { window }));
    }
    if internet {
        f.extend((0..INTERNET_METRICS.len()).map(Feature::Internet));
    }
    for var in 0..WEATHER_VARIABLES.len() {
        for lag in 0..3 {
            f.push(Feature::Weather { var, lag });
        }
    }
    f.extend((0..8).map(Feature::Temporal));
    f
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub unit: String,
}

/// Ordered, duplicate-free list of features a model consumes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    features: Vec<FeatureSpec>,
    hash: String,
}

impl FeatureSchema {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut features = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            let f = Feature::parse(n).ok_or_else(|| Error::invalid(format!("unknown feature `{n}`")))?;
            if !seen.insert(n) {
                return Err(Error::invalid(format!("feature `{n}` listed twice")));
            }
            features.push(FeatureSpec { name: n.to_string(), unit: f.unit().to_string() });
        }
        let hash = schema_hash(features.iter().map(|f| f.name.as_str()));
        Ok(Self { features, hash })
    }

    /// The full inventory; optional layers drop their entries when absent.
    pub fn standard(nightlights: bool, internet: bool) -> Self {
        let names: Vec<String> = standard_features(nightlights, internet).iter().map(Feature::name).collect();
        Self::new(&names).expect("standard names are valid")
    }

    pub fn names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    pub fn specs(&self) -> &[FeatureSpec] {
        &self.features
    }

    pub fn features(&self) -> Vec<Feature> {
        self.features.iter().map(|f| Feature::parse(&f.name).expect("validated at construction")).collect()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Rebuilds from a stored document, checking that the stored hash agrees.
    pub fn from_json(text: &str) -> Result<Self> {
        let stored: FeatureSchema = serde_json::from_str(text)?;
        let names: Vec<&str> = stored.features.iter().map(|f| f.name.as_str()).collect();
        let rebuilt = Self::new(&names)?;
        if rebuilt.hash != stored.hash {
            return Err(Error::invalid("feature schema hash does not match its feature names"));
        }
        Ok(rebuilt)
    }
}

/// SHA-256 over the length-prefixed names, hex encoded.
pub fn schema_hash<'a>(names: impl IntoIterator<Item = &'a str>) -> String {
    let mut h = Sha256::new();
    for n in names {
        h.update((n.len() as u64).to_le_bytes());
        h.update(n.as_bytes());
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn standard_inventory() {
        let full = FeatureSchema::standard(true, true);
        assert_eq!(full.len(), 6 + 9 + 2 + 8 + 36 + 8);
        assert_eq!(full.names()[0], "footprint_area");
        assert_eq!(full.names().last().unwrap(), "hour_of_day");
        let bare = FeatureSchema::standard(false, false);
        assert_eq!(bare.len(), full.len() - 10);
        assert_ne!(bare.hash(), full.hash());
        for f in all_features() {
            assert_eq!(Feature::parse(&f.name()), Some(f));
        }
    }

    #[test]
    fn rejects_bad_names() {
        assert!(FeatureSchema::new(&["height", "height"]).is_err());
        assert!(FeatureSchema::new(&["shoe_size"]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = FeatureSchema::new(&["t2m_lag0", "height", "dow_sun"]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(FeatureSchema::from_json(&text).unwrap(), s);
        let tampered = text.replace("dow_sun", "dow_sat");
        assert!(FeatureSchema::from_json(&tampered).is_err());
    }

    proptest! {
        #[test]
        fn hash_tracks_ordered_names(picks in prop::collection::vec(0usize..86, 1..10), swap in any::<(usize, usize)>()) {
            let pool = all_features();
            let mut names: Vec<String> = Vec::new();
            for p in picks {
                let n = pool[p % pool.len()].name();
                if !names.contains(&n) {
                    names.push(n);
                }
            }
            let a = FeatureSchema::new(&names).unwrap();
            let again = FeatureSchema::new(&names).unwrap();
            prop_assert_eq!(a.hash(), again.hash());
            let (i, j) = (swap.0 % names.len(), swap.1 % names.len());
            let mut other = names.clone();
            other.swap(i, j);
            let b = FeatureSchema::new(&other).unwrap();
            prop_assert_eq!(a.hash() == b.hash(), names == other);
        }
    }
}
