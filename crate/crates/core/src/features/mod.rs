//! Per-building-hour feature assembly from building geometry,
//! neighbourhood context, raster layers, weather and the calendar.

mod layers;
mod raster;
mod schema;
mod spatial;
mod temporal;
mod weather;

pub use layers::{nearest_tile, resolve_heights, InternetTile, ResolvedHeight};
pub use raster::{raster_window_stat, RasterKind, RasterLayer, WindowStat};
pub use schema::{
    schema_hash, Feature, FeatureSchema, FeatureSpec, LandClass, INTERNET_METRICS, LAND_COVER_WINDOWS,
    NIGHTLIGHT_WINDOWS,
};
pub use spatial::{building_density, neighbor_area_stats, SpatialIndex};
pub use temporal::{temporal_features, TEMPORAL_FEATURE_NAMES};
pub use weather::{weather_feature_names, weather_lag_features, WeatherGrid, WeatherObservation, WeatherSeries, WEATHER_VARIABLES};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::LatLon;
use crate::matrix::Matrix;
use crate::records::{BuildingRecord, Hour};

/// Land-cover class codes for the three tracked land uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandCoverClasses {
    pub crops: i64,
    pub built: i64,
    pub rangeland: i64,
}

impl Default for LandCoverClasses {
    fn default() -> Self {
        Self { crops: 5, built: 7, rangeland: 11 }
    }
}

impl LandCoverClasses {
    pub fn code(&self, class: LandClass) -> i64 {
        match class {
            LandClass::Crops => self.crops,
            LandClass::Built => self.built,
            LandClass::Rangeland => self.rangeland,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureOptions {
    /// Fixed local offset from UTC used for the calendar features.
    pub utc_offset_hours: i32,
    /// Neighbourhood radius for density and area statistics, metres.
    pub neighbor_radius_m: f64,
    pub land_cover_classes: LandCoverClasses,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        Self { utc_offset_hours: 0, neighbor_radius_m: 1000.0, land_cover_classes: LandCoverClasses::default() }
    }
}

/// Everything feature assembly reads, fixed for a run.
#[derive(Debug, Clone)]
pub struct FeatureContext {
    pub buildings: Vec<BuildingRecord>,
    pub heights: Vec<ResolvedHeight>,
    pub index: SpatialIndex,
    pub land_cover: Option<RasterLayer>,
    pub nightlights: Option<RasterLayer>,
    pub internet: Option<Vec<InternetTile>>,
    pub weather: WeatherGrid,
    pub options: FeatureOptions,
}

impl FeatureContext {
    pub fn new(
        buildings: Vec<BuildingRecord>,
        land_cover: Option<RasterLayer>,
        nightlights: Option<RasterLayer>,
        internet: Option<Vec<InternetTile>>,
        weather: WeatherGrid,
        options: FeatureOptions,
    ) -> Result<Self> {
        for b in &buildings {
            b.validate()?;
        }
        let heights = resolve_heights(&buildings)?;
        let index = SpatialIndex::build(&buildings, options.neighbor_radius_m);
        Ok(Self { buildings, heights, index, land_cover, nightlights, internet, weather, options })
    }

    /// The standard schema restricted to the optional layers that are loaded.
    pub fn standard_schema(&self) -> FeatureSchema {
        FeatureSchema::standard(self.nightlights.is_some(), self.internet.is_some())
    }

    pub fn building_index(&self, building_id: &str) -> Option<usize> {
        self.buildings.iter().position(|b| b.building_id == building_id)
    }

    fn center(&self, b: usize) -> LatLon {
        LatLon::new(self.buildings[b].lat, self.buildings[b].lon)
    }

    // Value of an hour-independent feature for building `b`.
    fn static_value(&self, f: Feature, b: usize) -> Result<f64> {
        let assembly = |reason: String| Error::Assembly { feature: f.name(), reason };
        let r = self.options.neighbor_radius_m;
        Ok(match f {
            Feature::FootprintArea => self.buildings[b].footprint_area,
            Feature::Height => self.heights[b].height,
            Feature::HeightImputed => f64::from(u8::from(self.heights[b].imputed)),
            Feature::BuildingDensity => building_density(&self.index, self.center(b), r) as f64,
            Feature::NeighborAreaMean => neighbor_area_stats(&self.index, self.center(b), r).0,
            Feature::NeighborAreaStd => neighbor_area_stats(&self.index, self.center(b), r).1,
            Feature::LandCover { class, window } => {
                let layer = self.land_cover.as_ref().ok_or_else(|| assembly("no land-cover layer loaded".into()))?;
                let code = self.options.land_cover_classes.code(class);
                raster_window_stat(layer, self.center(b), window, WindowStat::ClassShare(code))
                    .map_err(|e| assembly(e.to_string()))?
            }
            Feature::Nightlight { window } => {
                let layer = self.nightlights.as_ref().ok_or_else(|| assembly("no nightlight layer loaded".into()))?;
                raster_window_stat(layer, self.center(b), window, WindowStat::Mean).map_err(|e| assembly(e.to_string()))?
            }
            Feature::Internet(i) => {
                let tiles = self.internet.as_ref().ok_or_else(|| assembly("no internet layer loaded".into()))?;
                nearest_tile(tiles, self.center(b)).ok_or_else(|| assembly("internet layer has no tiles".into()))?.metrics()[i]
            }
            Feature::Weather { .. } | Feature::Temporal(_) => unreachable!("hourly feature"),
        })
    }

    fn statics(&self, features: &[Feature], b: usize) -> Result<Vec<f64>> {
        features
            .iter()
            .map(|&f| if f.is_hourly() { Ok(f64::NAN) } else { self.static_value(f, b) })
            .collect()
    }

    fn fill_hourly(&self, features: &[Feature], cell: usize, t: Hour, row: &mut [f64]) -> Result<()> {
        let needs_weather = features.iter().any(|f| matches!(f, Feature::Weather { .. }));
        let lags = if needs_weather {
            weather_lag_features(&self.weather.cells[cell], t).map_err(|e| match e {
                e @ Error::WeatherGap { .. } => e,
                e => Error::Assembly { feature: "weather".into(), reason: e.to_string() },
            })?
        } else {
            Vec::new()
        };
        let calendar = temporal_features(t, self.options.utc_offset_hours)?;
        for (slot, f) in row.iter_mut().zip(features) {
            match *f {
                Feature::Weather { var, lag } => *slot = lags[3 * var + lag],
                Feature::Temporal(i) => *slot = calendar[i],
                _ => {}
            }
        }
        Ok(())
    }

    fn weather_cell(&self, features: &[Feature], b: usize) -> Result<usize> {
        if features.iter().any(|f| matches!(f, Feature::Weather { .. })) {
            self.weather.nearest(self.center(b)).map_err(|e| Error::Assembly { feature: "weather".into(), reason: e.to_string() })
        } else {
            Ok(0)
        }
    }
}

/// Feature vector of building `b` at hour `t`, ordered by `schema`.
pub fn assemble_feature_vector(ctx: &FeatureContext, b: usize, t: Hour, schema: &FeatureSchema) -> Result<Vec<f64>> {
    if b >= ctx.buildings.len() {
        return Err(Error::invalid(format!("building index {b} out of range")));
    }
    let features = schema.features();
    let mut row = ctx.statics(&features, b)?;
    let cell = ctx.weather_cell(&features, b)?;
    ctx.fill_hourly(&features, cell, t, &mut row)?;
    Ok(row)
}

/// Feature matrix for many (building index, hour) pairs, in input order.
/// Hour-independent features are computed once per building.
pub fn assemble_matrix(ctx: &FeatureContext, rows: &[(usize, Hour)], schema: &FeatureSchema) -> Result<Matrix> {
    let features = schema.features();
    let mut wanted: Vec<usize> = rows.iter().map(|r| r.0).collect();
    wanted.sort_unstable();
    wanted.dedup();
    if let Some(&b) = wanted.last().filter(|&&b| b >= ctx.buildings.len()) {
        return Err(Error::invalid(format!("building index {b} out of range")));
    }
    let per_building: Vec<(usize, Vec<f64>, usize)> = wanted
        .par_iter()
        .map(|&b| Ok((b, ctx.statics(&features, b)?, ctx.weather_cell(&features, b)?)))
        .collect::<Result<_>>()?;
    let lookup: std::collections::HashMap<usize, (&Vec<f64>, usize)> =
        per_building.iter().map(|(b, s, c)| (*b, (s, *c))).collect();
    let filled: Vec<Vec<f64>> = rows
        .par_iter()
        .map(|&(b, t)| {
            let (statics, cell) = lookup[&b];
            let mut row = statics.clone();
            ctx.fill_hourly(&features, cell, t, &mut row)?;
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut m = Matrix::with_cols(features.len());
    for r in &filled {
        m.push_row(r)?;
    }
    Ok(m)
}
