//! Readers and writers for the pipeline's on-disk formats.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::baseline::{ArchetypeProfile, ArchetypeRecord, PumaRegion};
use crate::error::{Error, Result};
use crate::features::{InternetTile, RasterLayer, WeatherGrid, WeatherObservation};
use crate::linkage::{AmiAddress, UnitConsumption};
use crate::records::{BuildingRecord, ConsumptionRecord, Hour};

fn parse_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), message: message.into() }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| parse_error(path, e.to_string()))
}

/// Reads every row of a headed CSV file.
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| parse_error(path, e.to_string()))?;
    reader
        .deserialize()
        .map(|row| row.map_err(|e| parse_error(path, e.to_string())))
        .collect()
}

pub fn csv_to_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

/// Writes rows with a header. An empty slice yields an empty file.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    fs::write(path, csv_to_string(rows)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| parse_error(path, e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn read_buildings(path: &Path) -> Result<Vec<BuildingRecord>> {
    let rows: Vec<BuildingRecord> = read_csv(path)?;
    for b in &rows {
        b.validate().map_err(|e| parse_error(path, e.to_string()))?;
    }
    Ok(rows)
}

pub fn read_raster(path: &Path) -> Result<RasterLayer> {
    RasterLayer::parse(&read_text(path)?, path)
}

pub fn read_weather(path: &Path) -> Result<WeatherGrid> {
    let rows: Vec<WeatherObservation> = read_csv(path)?;
    WeatherGrid::from_observations(&rows)
}

pub fn read_internet(path: &Path) -> Result<Vec<InternetTile>> {
    read_csv(path)
}

pub fn read_ami_addresses(path: &Path) -> Result<Vec<AmiAddress>> {
    read_csv(path)
}

pub fn read_unit_consumption(path: &Path) -> Result<Vec<UnitConsumption>> {
    read_csv(path)
}

pub fn read_consumption(path: &Path) -> Result<Vec<ConsumptionRecord>> {
    read_csv(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumaFile {
    pub regions: Vec<PumaRegion>,
}

pub fn read_pumas(path: &Path) -> Result<Vec<PumaRegion>> {
    let file: PumaFile = read_json(path)?;
    for r in &file.regions {
        r.validate().map_err(|e| parse_error(path, e.to_string()))?;
    }
    Ok(file.regions)
}

/// One row of the archetype metadata file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeMeta {
    pub archetype_id: String,
    pub puma_id: String,
    pub floors: u32,
    pub floor_area: f64,
}

/// One row of the archetype profile file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub archetype_id: String,
    pub timestamp: Hour,
    pub heating_value: f64,
    pub electricity_value: f64,
}

/// Joins metadata with hourly profiles; each archetype's profile must be
/// contiguous.
pub fn read_archetypes(meta_path: &Path, profile_path: &Path) -> Result<Vec<ArchetypeRecord>> {
    let meta: Vec<ArchetypeMeta> = read_csv(meta_path)?;
    let rows: Vec<ProfileRow> = read_csv(profile_path)?;
    archetypes_from_rows(meta, rows).map_err(|e| parse_error(profile_path, e.to_string()))
}

pub fn archetypes_from_rows(meta: Vec<ArchetypeMeta>, rows: Vec<ProfileRow>) -> Result<Vec<ArchetypeRecord>> {
    let mut profiles: BTreeMap<String, BTreeMap<Hour, (f64, f64)>> = BTreeMap::new();
    for r in rows {
        if profiles
            .entry(r.archetype_id.clone())
            .or_default()
            .insert(r.timestamp, (r.heating_value, r.electricity_value))
            .is_some()
        {
            return Err(Error::invalid(format!("archetype {} has two rows at {}", r.archetype_id, r.timestamp)));
        }
    }
    meta.into_iter()
        .map(|m| {
            let series = profiles.remove(&m.archetype_id).unwrap_or_default();
            let start = series.keys().next().copied().unwrap_or(Hour::from_unix_hours(0));
            for (i, t) in series.keys().enumerate() {
                if t.unix_hours() != start.unix_hours() + i as i64 {
                    return Err(Error::invalid(format!(
                        "archetype {} profile is not contiguous at {}",
                        m.archetype_id,
                        start.offset(i as i64)
                    )));
                }
            }
            let rec = ArchetypeRecord {
                archetype_id: m.archetype_id,
                puma_id: m.puma_id,
                floors: m.floors,
                floor_area: m.floor_area,
                profile: ArchetypeProfile {
                    start,
                    heating: series.values().map(|v| v.0).collect(),
                    electricity: series.values().map(|v| v.1).collect(),
                },
            };
            rec.validate()?;
            Ok(rec)
        })
        .collect()
}

pub fn archetype_rows(archetypes: &[ArchetypeRecord]) -> (Vec<ArchetypeMeta>, Vec<ProfileRow>) {
    let meta = archetypes
        .iter()
        .map(|a| ArchetypeMeta {
            archetype_id: a.archetype_id.clone(),
            puma_id: a.puma_id.clone(),
            floors: a.floors,
            floor_area: a.floor_area,
        })
        .collect();
    let rows = archetypes
        .iter()
        .flat_map(|a| {
            (0..a.profile.len()).map(move |i| ProfileRow {
                archetype_id: a.archetype_id.clone(),
                timestamp: a.profile.start.offset(i as i64),
                heating_value: a.profile.heating[i],
                electricity_value: a.profile.electricity[i],
            })
        })
        .collect();
    (meta, rows)
}

/// Annual fuel and delivered-heat totals used to fit the efficiency factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaCalibrationRow {
    pub building_id: String,
    pub annual_fuel: f64,
    pub annual_delivered: f64,
}
