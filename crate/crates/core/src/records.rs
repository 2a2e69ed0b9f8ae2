//! Record types shared by several pipeline stages.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDateTime, Timelike, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Textual form of every timestamp the pipeline reads or writes.
pub const HOUR_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

/// A UTC timestamp on an exact hour boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hour(DateTime<Utc>);

impl Hour {
    pub fn new(t: DateTime<Utc>) -> Result<Self> {
        if t.minute() != 0 || t.second() != 0 || t.nanosecond() != 0 {
            return Err(Error::invalid(format!("timestamp {t} is not on an hour boundary")));
        }
        Ok(Self(t))
    }

    pub fn from_unix_hours(h: i64) -> Self {
        Self(DateTime::from_timestamp(h * 3600, 0).expect("hour index in range"))
    }

    pub fn unix_hours(&self) -> i64 {
        self.0.timestamp().div_euclid(3600)
    }

    pub fn datetime(&self) -> DateTime<Utc> {
        self.0
    }

    /// The hour `n` hours later (earlier for negative `n`).
    pub fn offset(&self, n: i64) -> Self {
        Self::from_unix_hours(self.unix_hours() + n)
    }
}

impl fmt::Display for Hour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format(HOUR_FORMAT))
    }
}

impl FromStr for Hour {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let t = DateTime::parse_from_rfc3339(s)
            .map(|t| t.with_timezone(&Utc))
            .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S").map(|n| n.and_utc()))
            .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S").map(|n| n.and_utc()))
            .map_err(|_| Error::invalid(format!("cannot parse timestamp `{s}`")))?;
        Hour::new(t)
    }
}

impl Serialize for Hour {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Hour {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which metered quantity a run forecasts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    #[default]
    Heating,
    Electricity,
}

impl Target {
    pub fn as_str(&self) -> &'static str {
        match self {
            Target::Heating => "heating",
            Target::Electricity => "electricity",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heating" => Ok(Target::Heating),
            "electricity" => Ok(Target::Electricity),
            other => Err(Error::invalid(format!("unknown target `{other}`, expected heating or electricity"))),
        }
    }
}

/// A building footprint reduced to what the pipeline needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildingRecord {
    pub building_id: String,
    pub lat: f64,
    pub lon: f64,
    /// m²
    pub footprint_area: f64,
    /// m; absent heights are imputed during feature assembly.
    pub height: Option<f64>,
    pub street_number: String,
    pub street_name: String,
    pub zip: String,
}

impl BuildingRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.footprint_area.is_finite() && self.footprint_area > 0.0) {
            return Err(Error::domain(format!(
                "building {}: footprint_area must be positive, got {}",
                self.building_id, self.footprint_area
            )));
        }
        if !(-90.0..=90.0).contains(&self.lat) || !(-180.0..=180.0).contains(&self.lon) {
            return Err(Error::domain(format!(
                "building {}: coordinates ({}, {}) out of range",
                self.building_id, self.lat, self.lon
            )));
        }
        if let Some(h) = self.height {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::domain(format!("building {}: height must be positive, got {h}", self.building_id)));
            }
        }
        Ok(())
    }
}

/// One hour of metered consumption for one building.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsumptionRecord {
    pub building_id: String,
    pub timestamp: Hour,
    pub value: f64,
}
