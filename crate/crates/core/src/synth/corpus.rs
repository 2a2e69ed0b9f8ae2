use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::baseline::{ArchetypeProfile, ArchetypeRecord, PumaRegion};
use crate::error::{Error, Result};
use crate::features::{
    assemble_matrix, FeatureContext, FeatureOptions, FeatureSchema, InternetTile, RasterKind, RasterLayer,
    WeatherGrid, WeatherSeries, WEATHER_VARIABLES,
};
use crate::geo::LatLon;
use crate::io::{archetype_rows, write_csv, write_json, EtaCalibrationRow, PumaFile};
use crate::linkage::{AmiAddress, UnitConsumption};
use crate::matrix::Matrix;
use crate::records::{BuildingRecord, Hour, Target};
use crate::zig::{link_transform, zig_mean, zig_sample, RawParamTriple};

/// One standardized feature's contribution to the planted raw parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedTerm {
    pub feature: String,
    pub center: f64,
    pub scale: f64,
    /// Coefficients on (raw_p, raw_k, raw_θ).
    pub coefficients: [f64; 3],
}

/// `raw = bias + Σ coefficients · (x − center) / scale` over named features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedTarget {
    pub bias: [f64; 3],
    pub terms: Vec<PlantedTerm>,
}

impl PlantedTarget {
    fn columns(&self, schema: &FeatureSchema) -> Result<Vec<usize>> {
        let names = schema.names();
        self.terms
            .iter()
            .map(|t| {
                if !(t.scale.is_finite() && t.scale > 0.0 && t.center.is_finite())
                    || t.coefficients.iter().any(|c| !c.is_finite())
                {
                    return Err(Error::invalid(format!("planted term `{}` must be finite with positive scale", t.feature)));
                }
                names
                    .iter()
                    .position(|n| *n == t.feature)
                    .ok_or_else(|| Error::invalid(format!("planted feature `{}` is not in the schema", t.feature)))
            })
            .collect()
    }

    fn raw(&self, columns: &[usize], row: &[f64]) -> RawParamTriple {
        let mut raw = self.bias;
        for (t, &c) in self.terms.iter().zip(columns) {
            let z = (row[c] - t.center) / t.scale;
            for (r, k) in raw.iter_mut().zip(t.coefficients) {
                *r += k * z;
            }
        }
        RawParamTriple::from(raw)
    }
}

fn term(feature: &str, center: f64, scale: f64, coefficients: [f64; 3]) -> PlantedTerm {
    PlantedTerm { feature: feature.into(), center, scale, coefficients }
}

/// Parameters of a synthetic study region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_buildings: usize,
    pub hours: usize,
    pub start: Hour,
    pub center_lat: f64,
    pub center_lon: f64,
    /// Side of the square study area, degrees.
    pub extent_deg: f64,
    pub utc_offset_hours: i32,
    pub missing_height_fraction: f64,
    /// Share of metered addresses whose street name is spelled differently
    /// from the footprint record (case, punctuation, suffix form).
    pub restyle_fraction: f64,
    /// Share of metered addresses with a one-letter street-name typo.
    pub typo_fraction: f64,
    pub heating: PlantedTarget,
    pub electricity: PlantedTarget,
    pub eta: f64,
    pub eta_noise: f64,
    pub eta_samples: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_buildings: 90,
            hours: 336,
            start: Hour::from_unix_hours(464_784), // 2023-01-09T00:00Z, a Monday
            center_lat: 39.95,
            center_lon: -75.17,
            extent_deg: 0.05,
            utc_offset_hours: -5,
            missing_height_fraction: 0.1,
            restyle_fraction: 0.3,
            typo_fraction: 0.05,
            heating: PlantedTarget {
                bias: [-1.0, 0.8, -1.0],
                terms: vec![
                    term("t2m_lag0", 275.0, 5.0, [1.0, -0.3, -0.4]),
                    term("t2m_lag2", 275.0, 5.0, [0.3, 0.0, -0.1]),
                    term("hour_of_day", 11.5, 7.0, [0.4, 0.0, -0.1]),
                    term("footprint_area", 150.0, 60.0, [-0.2, 0.1, 0.3]),
                    term("building_density", 60.0, 30.0, [0.1, 0.0, -0.1]),
                    term("dow_sat", 0.0, 1.0, [0.2, 0.0, 0.0]),
                ],
            },
            electricity: PlantedTarget {
                bias: [-3.0, 1.2, 0.0],
                terms: vec![
                    term("hour_of_day", 11.5, 7.0, [-0.3, 0.2, 0.2]),
                    term("footprint_area", 150.0, 60.0, [0.0, 0.1, 0.3]),
                    term("t2m_lag0", 275.0, 5.0, [0.0, 0.0, -0.1]),
                    term("landcover_built_w11", 0.5, 0.3, [-0.1, 0.0, 0.1]),
                ],
            },
            eta: 0.7512,
            eta_noise: 0.02,
            eta_samples: 5000,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_buildings == 0 {
            return Err(Error::invalid("n_buildings must be at least 1"));
        }
        if self.hours == 0 {
            return Err(Error::invalid("hours must be at least 1"));
        }
        for (name, f) in [
            ("missing_height_fraction", self.missing_height_fraction),
            ("restyle_fraction", self.restyle_fraction),
            ("typo_fraction", self.typo_fraction),
        ] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {f}")));
            }
        }
        if !(self.extent_deg > 0.0 && self.extent_deg < 2.0) {
            return Err(Error::invalid("extent_deg must lie in (0, 2)"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) || self.eta_noise < 0.0 || self.eta_samples < 2 {
            return Err(Error::invalid("eta must lie in (0, 1], eta_noise ≥ 0 and eta_samples ≥ 2"));
        }
        Ok(())
    }

    pub fn planted(&self, target: Target) -> &PlantedTarget {
        match target {
            Target::Heating => &self.heating,
            Target::Electricity => &self.electricity,
        }
    }
}

/// Generating parameters of one building-hour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub building_id: String,
    pub timestamp: Hour,
    pub raw_p: f64,
    pub raw_k: f64,
    pub raw_theta: f64,
    pub p: f64,
    pub k: f64,
    pub theta: f64,
    pub mean: f64,
    /// Sampled demand before any unit split or fuel conversion.
    pub value: f64,
}

/// Every file of a synthetic study region, in memory.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub spec: SyntheticSpec,
    pub buildings: Vec<BuildingRecord>,
    pub land_cover: RasterLayer,
    pub nightlights: RasterLayer,
    pub internet: Vec<InternetTile>,
    pub weather: WeatherGrid,
    pub ami_addresses: Vec<AmiAddress>,
    /// Metered gas use per unit; delivered heat is `eta` times this.
    pub consumption_heating: Vec<UnitConsumption>,
    pub consumption_electricity: Vec<UnitConsumption>,
    pub pumas: Vec<PumaRegion>,
    pub archetypes: Vec<ArchetypeRecord>,
    pub eta_calibration: Vec<EtaCalibrationRow>,
    pub truth_heating: Vec<TruthRow>,
    pub truth_electricity: Vec<TruthRow>,
}

const STREETS: [&str; 12] =
    ["Main", "Elm", "Oak Ridge", "Maple", "Walnut", "Chestnut", "Spruce", "Locust", "Pine", "Cedar", "Market", "Willow"];
const SUFFIXES: [(&str, &str); 5] =
    [("St", "Street"), ("Ave", "Avenue"), ("Rd", "Road"), ("Dr", "Drive"), ("Ln", "Lane")];

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let half = spec.extent_deg / 2.0;
    let (lat0, lon0) = (spec.center_lat, spec.center_lon);

    // buildings in a handful of clusters, addressed on a few streets per ZIP
    let clusters: Vec<(f64, f64)> = (0..4)
        .map(|_| (lat0 + rng.random_range(-0.6..0.6) * half, lon0 + rng.random_range(-0.6..0.6) * half))
        .collect();
    let mut buildings = Vec::with_capacity(spec.n_buildings);
    let mut next_number: BTreeMap<(String, String), u32> = BTreeMap::new();
    for i in 0..spec.n_buildings {
        let (clat, clon) = *clusters.choose(&mut rng).expect("clusters");
        let lat = (clat + 0.2 * half * normal(&mut rng)).clamp(lat0 - half, lat0 + half);
        let lon = (clon + 0.2 * half * normal(&mut rng)).clamp(lon0 - half, lon0 + half);
        let zip = format!("191{:02}", 2 * u8::from(lat > lat0) + u8::from(lon > lon0) + 1);
        let area = (140f64.ln() + 0.4 * normal(&mut rng)).exp().clamp(30.0, 1500.0);
        let floors = rng.random_range(1..=3) as f64;
        let height = (floors * 3.5 + 0.6 * normal(&mut rng)).max(2.5);
        let street_idx = rng.random_range(0..STREETS.len());
        let suffix = SUFFIXES[street_idx % SUFFIXES.len()].0;
        let street = format!("{} {suffix}", STREETS[street_idx]);
        let n = next_number.entry((zip.clone(), street.clone())).or_insert(rng.random_range(1..40));
        let number = *n;
        *n += rng.random_range(1..4) * 2;
        buildings.push(BuildingRecord {
            building_id: format!("B{:05}", i + 1),
            lat,
            lon,
            footprint_area: (area * 10.0).round() / 10.0,
            height: if rng.random_bool(spec.missing_height_fraction) { None } else { Some((height * 10.0).round() / 10.0) },
            street_number: number.to_string(),
            street_name: street,
            zip,
        });
    }

    let margin = spec.extent_deg;
    let land_cover = land_cover_raster(spec, margin, &mut rng);
    let nightlights = nightlight_raster(spec, margin, &mut rng);
    let internet = internet_tiles(spec, &mut rng);
    let weather = weather_grid(spec, &mut rng);

    let ctx = FeatureContext::new(
        buildings.clone(),
        Some(land_cover.clone()),
        Some(nightlights.clone()),
        Some(internet.clone()),
        weather.clone(),
        FeatureOptions { utc_offset_hours: spec.utc_offset_hours, ..Default::default() },
    )?;
    let schema = ctx.standard_schema();
    let rows: Vec<(usize, Hour)> = (0..buildings.len())
        .flat_map(|b| (0..spec.hours).map(move |h| (b, spec.start.offset(h as i64))))
        .collect();
    let x = assemble_matrix(&ctx, &rows, &schema)?;

    let truth_heating = planted_truth(&spec.heating, &schema, &x, &rows, &buildings, &mut rng)?;
    let truth_electricity = planted_truth(&spec.electricity, &schema, &x, &rows, &buildings, &mut rng)?;

    let (ami_addresses, shares) = ami_addresses(spec, &buildings, &mut rng);
    let split = |truth: &[TruthRow], scale: f64| -> Vec<UnitConsumption> {
        let mut out = Vec::new();
        for (key, b, share) in &shares {
            for r in truth.iter().filter(|r| r.building_id == buildings[*b].building_id) {
                out.push(UnitConsumption { ami_key: key.clone(), timestamp: r.timestamp, value: r.value * share * scale });
            }
        }
        out
    };
    let consumption_heating = split(&truth_heating, 1.0 / spec.eta);
    let consumption_electricity = split(&truth_electricity, 1.0);

    let pumas = puma_regions(spec);
    let archetypes = archetypes(spec, &pumas, &weather, &mut rng);
    let eta_calibration = eta_corpus(spec, &mut rng);

    Ok(SyntheticCorpus {
        spec: spec.clone(),
        buildings,
        land_cover,
        nightlights,
        internet,
        weather,
        ami_addresses,
        consumption_heating,
        consumption_electricity,
        pumas,
        archetypes,
        eta_calibration,
        truth_heating,
        truth_electricity,
    })
}

fn planted_truth(
    planted: &PlantedTarget,
    schema: &FeatureSchema,
    x: &Matrix,
    rows: &[(usize, Hour)],
    buildings: &[BuildingRecord],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<TruthRow>> {
    let columns = planted.columns(schema)?;
    rows.iter()
        .enumerate()
        .map(|(i, &(b, t))| {
            let raw = planted.raw(&columns, x.row(i));
            let params = link_transform(raw)?;
            Ok(TruthRow {
                building_id: buildings[b].building_id.clone(),
                timestamp: t,
                raw_p: raw.raw_p,
                raw_k: raw.raw_k,
                raw_theta: raw.raw_theta,
                p: params.p(),
                k: params.k(),
                theta: params.theta(),
                mean: zig_mean(&params),
                value: zig_sample(&params, rng),
            })
        })
        .collect()
}

fn land_cover_raster(spec: &SyntheticSpec, margin: f64, rng: &mut ChaCha8Rng) -> RasterLayer {
    let pixel = 0.0005;
    let span = spec.extent_deg + 2.0 * margin;
    let n = (span / pixel).ceil() as usize + 1;
    let phase: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
    let mut values = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let (u, v) = (r as f64 / n as f64, c as f64 / n as f64);
            let built = (TAU * 2.0 * u + phase[0]).sin() + (TAU * 3.0 * v + phase[1]).cos();
            let crop = (TAU * 1.5 * u + phase[2]).cos() * (TAU * 2.5 * v + phase[3]).sin();
            let code = if built + 0.5 * normal(rng) > 0.3 {
                7.0
            } else if crop > 0.2 {
                5.0
            } else if crop < -0.4 {
                11.0
            } else {
                2.0
            };
            values.push(code);
        }
    }
    RasterLayer {
        kind: RasterKind::LandCoverClass,
        origin_lat: spec.center_lat + span / 2.0,
        origin_lon: spec.center_lon - span / 2.0,
        pixel_size: pixel,
        nrows: n,
        ncols: n,
        nodata: Some(0.0),
        values,
    }
}

fn nightlight_raster(spec: &SyntheticSpec, margin: f64, rng: &mut ChaCha8Rng) -> RasterLayer {
    let pixel = 0.004;
    let span = spec.extent_deg + 2.0 * margin;
    let n = (span / pixel).ceil() as usize + 1;
    let mut values = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let d = ((r as f64 - n as f64 / 2.0).powi(2) + (c as f64 - n as f64 / 2.0).powi(2)).sqrt() / n as f64;
            let v = 40.0 * (-4.0 * d).exp() + 2.0 * normal(rng).abs();
            values.push((v * 100.0).round() / 100.0);
        }
    }
    RasterLayer {
        kind: RasterKind::NightlightRadiance,
        origin_lat: spec.center_lat + span / 2.0,
        origin_lon: spec.center_lon - span / 2.0,
        pixel_size: pixel,
        nrows: n,
        ncols: n,
        nodata: None,
        values,
    }
}

fn internet_tiles(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Vec<InternetTile> {
    let step = 0.01;
    let k = (spec.extent_deg / step).ceil() as i64 / 2 + 1;
    let mut tiles = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            let round = |v: f64| (v * 10.0).round() / 10.0;
            tiles.push(InternetTile {
                tile_lat: spec.center_lat + i as f64 * step,
                tile_lon: spec.center_lon + j as f64 * step,
                fixed_download: round(rng.random_range(50_000.0..300_000.0)),
                fixed_upload: round(rng.random_range(10_000.0..50_000.0)),
                fixed_latency: round(rng.random_range(8.0..40.0)),
                fixed_tests: rng.random_range(1..200) as f64,
                mobile_download: round(rng.random_range(20_000.0..150_000.0)),
                mobile_upload: round(rng.random_range(5_000.0..20_000.0)),
                mobile_latency: round(rng.random_range(20.0..80.0)),
                mobile_tests: rng.random_range(1..100) as f64,
            });
        }
    }
    tiles
}

// Cells on the 0.25° reanalysis grid around the study area.
fn weather_grid(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> WeatherGrid {
    let snap = |v: f64| (v / 0.25).round() * 0.25;
    let half = spec.extent_deg / 2.0;
    let mut cells: Vec<LatLon> = Vec::new();
    for lat in [spec.center_lat - half, spec.center_lat + half] {
        for lon in [spec.center_lon - half, spec.center_lon + half] {
            let c = LatLon::new(snap(lat), snap(lon));
            if !cells.contains(&c) {
                cells.push(c);
            }
        }
    }
    // two hours of history before the first labelled hour feed the lags
    let start = spec.start.offset(-2);
    let n = spec.hours + 2;
    let series = cells
        .into_iter()
        .enumerate()
        .map(|(ci, cell)| {
            let offset = 0.6 * ci as f64;
            let mut t_noise = 0.0;
            let mut values = vec![Vec::with_capacity(n); WEATHER_VARIABLES.len()];
            for i in 0..n {
                let local = (start.offset(i as i64).unix_hours() + spec.utc_offset_hours as i64).rem_euclid(24) as f64;
                let diurnal = (TAU * (local - 9.0) / 24.0).sin();
                let synoptic = (TAU * i as f64 / (24.0 * 5.0)).sin();
                t_noise = 0.8 * t_noise + 0.6 * normal(rng);
                let t2m = 274.0 + 4.0 * diurnal + 4.0 * synoptic + offset + t_noise;
                let round = |v: f64, d: f64| (v * d).round() / d;
                let row = [
                    round(t2m, 1000.0),
                    round((0.0005 * (normal(rng) - 1.5)).max(0.0), 1e6),
                    round((0.02 - 0.004 * synoptic).max(0.0), 1e4),
                    round(101_325.0 + 700.0 * synoptic + 60.0 * normal(rng), 10.0),
                    round(5.0 + 2.0 * normal(rng).abs(), 100.0),
                    round(2.0 + 2.0 * normal(rng), 100.0),
                    round(-1.0 + 2.0 * normal(rng), 100.0),
                    round(-250_000.0 + 30_000.0 * normal(rng), 1.0),
                    round(1.4e6 * diurnal.max(0.0), 1.0),
                    round((0.5 + 0.3 * synoptic + 0.1 * normal(rng)).clamp(0.0, 1.0), 1000.0),
                    round(276.0 + 1.5 * synoptic + 0.5 * diurnal + offset, 1000.0),
                    0.3,
                ];
                for (col, v) in values.iter_mut().zip(row) {
                    col.push(v);
                }
            }
            WeatherSeries { cell, start, values }
        })
        .collect();
    WeatherGrid { cells: series }
}

// Metered units per building; returns addresses and (key, building, share).
fn ami_addresses(
    spec: &SyntheticSpec,
    buildings: &[BuildingRecord],
    rng: &mut ChaCha8Rng,
) -> (Vec<AmiAddress>, Vec<(String, usize, f64)>) {
    let mut addresses = Vec::new();
    let mut shares = Vec::new();
    for (b, bld) in buildings.iter().enumerate() {
        let units = *[1usize, 1, 1, 2, 2, 4].choose(rng).expect("non-empty");
        for u in 0..units {
            let key = format!("M{:06}", addresses.len() + 1);
            let mut street = bld.street_name.clone();
            if rng.random_bool(spec.restyle_fraction) {
                street = restyle(&street, rng);
            } else if rng.random_bool(spec.typo_fraction) {
                street = typo(&street, rng);
            }
            let number = match (units, u) {
                (1, _) => bld.street_number.clone(),
                (_, u) => format!("{}{}", bld.street_number, (b'A' + u as u8) as char),
            };
            addresses.push(AmiAddress { ami_key: key.clone(), street_number: number, street_name: street, zip: bld.zip.clone() });
            shares.push((key, b, 1.0 / units as f64));
        }
    }
    (addresses, shares)
}

fn restyle(street: &str, rng: &mut ChaCha8Rng) -> String {
    let (base, suffix) = street.rsplit_once(' ').unwrap_or((street, ""));
    let long = SUFFIXES.iter().find(|(s, _)| *s == suffix).map_or(suffix, |(_, l)| *l);
    match rng.random_range(0..3) {
        0 => format!("{} {}", base.to_uppercase(), long.to_uppercase()),
        1 => format!("{base} {suffix}."),
        _ => format!("{}  {}", base.to_lowercase(), long.to_lowercase()),
    }
}

fn typo(street: &str, rng: &mut ChaCha8Rng) -> String {
    let chars: Vec<char> = street.chars().collect();
    let letters: Vec<usize> = chars.iter().enumerate().filter(|(_, c)| c.is_alphabetic()).map(|(i, _)| i).collect();
    let drop = *letters.choose(rng).expect("street has letters");
    chars.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, c)| c).collect()
}

fn puma_regions(spec: &SyntheticSpec) -> Vec<PumaRegion> {
    let r = spec.extent_deg;
    let (lat0, lon0) = (spec.center_lat, spec.center_lon);
    let mut out = Vec::new();
    for (i, (la, lo)) in [(-1.0, -1.0), (-1.0, 0.0), (0.0, -1.0), (0.0, 0.0)].iter().enumerate() {
        let (s, w) = (lat0 + la * r, lon0 + lo * r);
        out.push(PumaRegion {
            puma_id: format!("P{:02}", i + 1),
            boundary: vec![LatLon::new(s, w), LatLon::new(s, w + r), LatLon::new(s + r, w + r), LatLon::new(s + r, w)],
        });
    }
    out
}

// Simple degree-hour heating and diurnal electricity profiles for a grid of
// floor counts and floor areas in every PUMA.
fn archetypes(spec: &SyntheticSpec, pumas: &[PumaRegion], weather: &WeatherGrid, rng: &mut ChaCha8Rng) -> Vec<ArchetypeRecord> {
    let temps = &weather.cells[0].values[0][2..];
    let mut out = Vec::new();
    for p in pumas {
        for floors in 1..=4u32 {
            let mut area = 50.0 * floors as f64;
            let mut k = 0;
            while area < 2500.0 {
                let ua = area * rng.random_range(0.00015..0.00025);
                let heating: Vec<f64> =
                    temps.iter().map(|t| ((ua * (291.0 - t)).max(0.0) * 1000.0).round() / 1000.0).collect();
                let electricity: Vec<f64> = (0..spec.hours)
                    .map(|h| {
                        let local = (spec.start.offset(h as i64).unix_hours() + spec.utc_offset_hours as i64)
                            .rem_euclid(24) as f64;
                        let shape = 0.6 + 0.4 * (TAU * (local - 14.0) / 24.0).cos().max(-0.5);
                        (area * 0.004 * shape * 1000.0).round() / 1000.0
                    })
                    .collect();
                k += 1;
                out.push(ArchetypeRecord {
                    archetype_id: format!("{}-F{floors}-{k:02}", p.puma_id),
                    puma_id: p.puma_id.clone(),
                    floors,
                    floor_area: (area * 10.0).round() / 10.0,
                    profile: ArchetypeProfile { start: spec.start, heating, electricity },
                });
                area *= 1.25;
            }
        }
    }
    out
}

fn eta_corpus(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Vec<EtaCalibrationRow> {
    (0..spec.eta_samples)
        .map(|i| {
            let fuel: f64 = rng.random_range(300.0..3000.0);
            let delivered = (spec.eta * fuel + spec.eta_noise * fuel * normal(rng)).max(0.0);
            EtaCalibrationRow { building_id: format!("E{:05}", i + 1), annual_fuel: fuel, annual_delivered: delivered }
        })
        .collect()
}

/// File names written by [`write_corpus`].
pub mod files {
    pub const BUILDINGS: &str = "buildings.csv";
    pub const LAND_COVER: &str = "land_cover.raster";
    pub const NIGHTLIGHTS: &str = "nightlights.raster";
    pub const INTERNET: &str = "internet.csv";
    pub const WEATHER: &str = "weather.csv";
    pub const AMI_ADDRESSES: &str = "ami_addresses.csv";
    pub const CONSUMPTION_HEATING: &str = "consumption_heating_gas.csv";
    pub const CONSUMPTION_ELECTRICITY: &str = "consumption_electricity.csv";
    pub const PUMAS: &str = "pumas.json";
    pub const ARCHETYPES: &str = "archetypes.csv";
    pub const ARCHETYPE_PROFILES: &str = "archetype_profiles.csv";
    pub const ETA_CALIBRATION: &str = "eta_calibration.csv";
    pub const TRUTH_HEATING: &str = "truth_heating.sidecar.csv";
    pub const TRUTH_ELECTRICITY: &str = "truth_electricity.sidecar.csv";
    pub const SPEC: &str = "synthetic_spec.json";
}

/// Writes the corpus into `dir` (created if needed).
pub fn write_corpus(corpus: &SyntheticCorpus, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_csv(&dir.join(files::BUILDINGS), &corpus.buildings)?;
    std::fs::write(dir.join(files::LAND_COVER), corpus.land_cover.to_text())?;
    std::fs::write(dir.join(files::NIGHTLIGHTS), corpus.nightlights.to_text())?;
    write_csv(&dir.join(files::INTERNET), &corpus.internet)?;
    write_csv(&dir.join(files::WEATHER), &corpus.weather.to_observations())?;
    write_csv(&dir.join(files::AMI_ADDRESSES), &corpus.ami_addresses)?;
    write_csv(&dir.join(files::CONSUMPTION_HEATING), &corpus.consumption_heating)?;
    write_csv(&dir.join(files::CONSUMPTION_ELECTRICITY), &corpus.consumption_electricity)?;
    write_json(&dir.join(files::PUMAS), &PumaFile { regions: corpus.pumas.clone() })?;
    let (meta, profiles) = archetype_rows(&corpus.archetypes);
    write_csv(&dir.join(files::ARCHETYPES), &meta)?;
    write_csv(&dir.join(files::ARCHETYPE_PROFILES), &profiles)?;
    write_csv(&dir.join(files::ETA_CALIBRATION), &corpus.eta_calibration)?;
    write_csv(&dir.join(files::TRUTH_HEATING), &corpus.truth_heating)?;
    write_csv(&dir.join(files::TRUTH_ELECTRICITY), &corpus.truth_electricity)?;
    write_json(&dir.join(files::SPEC), &corpus.spec)?;
    Ok(())
}
