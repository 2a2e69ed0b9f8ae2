use serde::{Deserialize, Serialize};

use super::schema::INTERNET_METRICS;
use crate::error::{Error, Result};
use crate::geo::{haversine, LatLon};
use crate::records::BuildingRecord;

/// One tile of aggregated connectivity tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InternetTile {
    pub tile_lat: f64,
    pub tile_lon: f64,
    pub fixed_download: f64,
    pub fixed_upload: f64,
    pub fixed_latency: f64,
    pub fixed_tests: f64,
    pub mobile_download: f64,
    pub mobile_upload: f64,
    pub mobile_latency: f64,
    pub mobile_tests: f64,
}

impl InternetTile {
    /// Metric values in [`INTERNET_METRICS`] order.
    pub fn metrics(&self) -> [f64; INTERNET_METRICS.len()] {
        [
            self.fixed_download,
            self.fixed_upload,
            self.fixed_latency,
            self.fixed_tests,
            self.mobile_download,
            self.mobile_upload,
            self.mobile_latency,
            self.mobile_tests,
        ]
    }
}

/// Tile nearest to `p` by centre distance; first one on ties.
pub fn nearest_tile(tiles: &[InternetTile], p: LatLon) -> Option<&InternetTile> {
    tiles
        .iter()
        .map(|t| (t, haversine(p, LatLon::new(t.tile_lat, t.tile_lon))))
        .fold(None, |best: Option<(&InternetTile, f64)>, (t, d)| match best {
            Some((_, b)) if b <= d => best,
            _ => Some((t, d)),
        })
        .map(|(t, _)| t)
}

/// Building height used downstream, and whether it was imputed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedHeight {
    pub height: f64,
    pub imputed: bool,
}

/// Lower weighted median: the smallest value whose cumulative weight
/// reaches half the total.
fn weighted_median(mut pairs: Vec<(f64, f64)>) -> Option<f64> {
    if pairs.is_empty() {
        return None;
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let mut acc = 0.0;
    for (v, w) in &pairs {
        acc += w;
        if acc >= 0.5 * total {
            return Some(*v);
        }
    }
    pairs.last().map(|p| p.0)
}

/// Fills missing heights with the footprint-area-weighted median height of
/// buildings in the same ZIP, or of all buildings when the ZIP has no
/// observed height.
pub fn resolve_heights(buildings: &[BuildingRecord]) -> Result<Vec<ResolvedHeight>> {
    let observed = |zip: Option<&str>| -> Vec<(f64, f64)> {
        buildings
            .iter()
            .filter(|b| zip.is_none_or(|z| b.zip == z))
            .filter_map(|b| b.height.map(|h| (h, b.footprint_area)))
            .collect()
    };
    let global = weighted_median(observed(None));
    let mut per_zip: std::collections::HashMap<&str, Option<f64>> = std::collections::HashMap::new();
    buildings
        .iter()
        .map(|b| match b.height {
            Some(h) => Ok(ResolvedHeight { height: h, imputed: false }),
            None => {
                let zip_median = *per_zip.entry(b.zip.as_str()).or_insert_with(|| weighted_median(observed(Some(&b.zip))));
                zip_median
                    .or(global)
                    .map(|height| ResolvedHeight { height, imputed: true })
                    .ok_or_else(|| Error::Assembly {
                        feature: "height".into(),
                        reason: format!("building {} has no height and none is observed anywhere", b.building_id),
                    })
            }
        })
        .collect()
}
