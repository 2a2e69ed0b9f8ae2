use std::collections::HashMap;

use crate::geo::{haversine, metres_to_lat_degrees, LatLon};
use crate::records::BuildingRecord;

/// Uniform lat/lon grid over building centroids. Cells are roughly
/// `cell_m` metres on a side at the latitude of the data.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    points: Vec<LatLon>,
    areas: Vec<f64>,
    cell_lat: f64,
    cell_lon: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl SpatialIndex {
    pub fn build(buildings: &[BuildingRecord], cell_m: f64) -> Self {
        let points: Vec<LatLon> = buildings.iter().map(|b| LatLon::new(b.lat, b.lon)).collect();
        let areas = buildings.iter().map(|b| b.footprint_area).collect();
        let max_abs_lat = points.iter().map(|p| p.lat.abs()).fold(0.0, f64::max).min(89.0);
        let cell_lat = metres_to_lat_degrees(cell_m);
        // widest cell in longitude needed at the most poleward point
        let cell_lon = (cell_lat / max_abs_lat.to_radians().cos()).min(360.0);
        let mut index = Self { points, areas, cell_lat, cell_lon, cells: HashMap::new() };
        for i in 0..index.points.len() {
            let key = index.cell_of(index.points[i]);
            index.cells.entry(key).or_default().push(i);
        }
        index
    }

    fn cell_of(&self, p: LatLon) -> (i64, i64) {
        ((p.lat / self.cell_lat).floor() as i64, (p.lon / self.cell_lon).floor() as i64)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Indices of points within `radius_m` of `center`, ascending.
    pub fn within(&self, center: LatLon, radius_m: f64) -> Vec<usize> {
        let span_lat = (metres_to_lat_degrees(radius_m) / self.cell_lat).ceil() as i64;
        let span_lon = (metres_to_lat_degrees(radius_m) / center.lat.abs().min(89.0).to_radians().cos()
            / self.cell_lon)
            .ceil() as i64;
        let (ci, cj) = self.cell_of(center);
        let mut out = Vec::new();
        for di in -span_lat..=span_lat {
            for dj in -span_lon..=span_lon {
                if let Some(members) = self.cells.get(&(ci + di, cj + dj)) {
                    out.extend(members.iter().copied().filter(|&i| haversine(center, self.points[i]) <= radius_m));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn area(&self, i: usize) -> f64 {
        self.areas[i]
    }
}

/// Buildings whose centroid is within `radius_m` of `center`, counting the
/// subject building itself.
pub fn building_density(index: &SpatialIndex, center: LatLon, radius_m: f64) -> usize {
    index.within(center, radius_m).len()
}

/// Population mean and standard deviation of footprint areas within
/// `radius_m`; `(0, 0)` when nothing is in range.
pub fn neighbor_area_stats(index: &SpatialIndex, center: LatLon, radius_m: f64) -> (f64, f64) {
    let members = index.within(center, radius_m);
    if members.is_empty() {
        return (0.0, 0.0);
    }
    let n = members.len() as f64;
    let mean = members.iter().map(|&i| index.area(i)).sum::<f64>() / n;
    let var = members.iter().map(|&i| (index.area(i) - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
