//! Spherical distance and planar polygon helpers on WGS84 lat/lon.

use serde::{Deserialize, Serialize};

/// Mean Earth radius in metres.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon }
    }
}

/// Great-circle distance in metres.
pub fn haversine(a: LatLon, b: LatLon) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// True when `p` is inside the ring or on its boundary. The ring may be
/// given open or closed.
pub fn point_in_polygon(p: LatLon, ring: &[LatLon]) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    let (x, y) = (p.lon, p.lat);
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (ring[i].lon, ring[i].lat);
        let (xj, yj) = (ring[j].lon, ring[j].lat);
        if on_segment(x, y, xi, yi, xj, yj) {
            return true;
        }
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn on_segment(x: f64, y: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> bool {
    let cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1);
    let scale = (x2 - x1).abs().max((y2 - y1).abs()).max(1.0);
    cross.abs() <= 1e-12 * scale
        && x >= x1.min(x2)
        && x <= x1.max(x2)
        && y >= y1.min(y2)
        && y <= y1.max(y2)
}

/// Area in m² of a small lat/lon polygon, via the shoelace formula on an
/// equirectangular projection centred on the ring's mean latitude.
pub fn polygon_area_m2(ring: &[LatLon]) -> f64 {
    if ring.len() < 3 {
        return 0.0;
    }
    let lat0 = (ring.iter().map(|p| p.lat).sum::<f64>() / ring.len() as f64).to_radians();
    let to_xy = |p: &LatLon| {
        (EARTH_RADIUS_M * p.lon.to_radians() * lat0.cos(), EARTH_RADIUS_M * p.lat.to_radians())
    };
    let mut twice = 0.0;
    for i in 0..ring.len() {
        let (x1, y1) = to_xy(&ring[i]);
        let (x2, y2) = to_xy(&ring[(i + 1) % ring.len()]);
        twice += x1 * y2 - x2 * y1;
    }
    twice.abs() / 2.0
}

/// Latitude offset in degrees that corresponds to `metres` along a meridian.
pub fn metres_to_lat_degrees(metres: f64) -> f64 {
    (metres / EARTH_RADIUS_M).to_degrees()
}
