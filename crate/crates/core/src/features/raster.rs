use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::LatLon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RasterKind {
    LandCoverClass,
    NightlightRadiance,
    Generic,
}

impl RasterKind {
    fn as_str(&self) -> &'static str {
        match self {
            RasterKind::LandCoverClass => "land_cover_class",
            RasterKind::NightlightRadiance => "nightlight_radiance",
            RasterKind::Generic => "generic",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "land_cover_class" => Some(RasterKind::LandCoverClass),
            "nightlight_radiance" => Some(RasterKind::NightlightRadiance),
            "generic" => Some(RasterKind::Generic),
            _ => None,
        }
    }
}

/// North-up grid in degrees. Pixel `(row, col)` is centred at
/// `(origin_lat − row · pixel_size, origin_lon + col · pixel_size)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterLayer {
    pub kind: RasterKind,
    pub origin_lat: f64,
    pub origin_lon: f64,
    pub pixel_size: f64,
    pub nrows: usize,
    pub ncols: usize,
    pub nodata: Option<f64>,
    /// Row-major, `nrows × ncols`.
    pub values: Vec<f64>,
}

/// Statistic taken over a raster window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowStat {
    /// Fraction of valid pixels equal to the class code.
    ClassShare(i64),
    Mean,
}

impl RasterLayer {
    pub fn validate(&self) -> Result<()> {
        if !(self.pixel_size.is_finite() && self.pixel_size > 0.0) {
            return Err(Error::invalid(format!("raster pixel_size must be positive, got {}", self.pixel_size)));
        }
        if self.nrows == 0 || self.ncols == 0 || self.values.len() != self.nrows * self.ncols {
            return Err(Error::invalid(format!(
                "raster declares {}x{} pixels but holds {} values",
                self.nrows,
                self.ncols,
                self.values.len()
            )));
        }
        Ok(())
    }

    fn is_valid(&self, v: f64) -> bool {
        !v.is_nan() && self.nodata != Some(v)
    }

    /// Nearest pixel to `p`.
    pub fn pixel_of(&self, p: LatLon) -> Result<(usize, usize)> {
        let r = ((self.origin_lat - p.lat) / self.pixel_size).round();
        let c = ((p.lon - self.origin_lon) / self.pixel_size).round();
        if r < 0.0 || c < 0.0 || r >= self.nrows as f64 || c >= self.ncols as f64 || r.is_nan() || c.is_nan() {
            return Err(Error::OutOfBounds { lat: p.lat, lon: p.lon });
        }
        Ok((r as usize, c as usize))
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.ncols + col]
    }

    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        let err = |m: String| Error::Parse { path: source.to_path_buf(), message: m };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let mut header = |key: &str| -> Result<String> {
            let (n, line) = lines.next().ok_or_else(|| err(format!("missing header `{key}`")))?;
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(k), Some(v), None) if k == key => Ok(v.to_string()),
                _ => Err(err(format!("line {}: expected `{key} <value>`", n + 1))),
            }
        };
        let kind_s = header("kind")?;
        let kind = RasterKind::parse(&kind_s).ok_or_else(|| err(format!("unknown raster kind `{kind_s}`")))?;
        let num = |key: &str, v: String| v.parse::<f64>().map_err(|_| err(format!("`{key}` is not a number: {v}")));
        let int = |key: &str, v: String| v.parse::<usize>().map_err(|_| err(format!("`{key}` is not a count: {v}")));
        let origin_lat = num("origin_lat", header("origin_lat")?)?;
        let origin_lon = num("origin_lon", header("origin_lon")?)?;
        let pixel_size = num("pixel_size", header("pixel_size")?)?;
        let nrows = int("nrows", header("nrows")?)?;
        let ncols = int("ncols", header("ncols")?)?;
        let nodata_s = header("nodata")?;
        let nodata = if nodata_s == "none" { None } else { Some(num("nodata", nodata_s)?) };
        let mut values = Vec::with_capacity(nrows * ncols);
        for (n, line) in lines {
            let before = values.len();
            for tok in line.split_whitespace() {
                values.push(tok.parse::<f64>().map_err(|_| err(format!("line {}: bad value `{tok}`", n + 1)))?);
            }
            if values.len() - before != ncols {
                return Err(err(format!("line {}: expected {ncols} values, found {}", n + 1, values.len() - before)));
            }
        }
        let layer = RasterLayer { kind, origin_lat, origin_lon, pixel_size, nrows, ncols, nodata, values };
        layer.validate().map_err(|e| err(e.to_string()))?;
        Ok(layer)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind {}", self.kind.as_str());
        let _ = writeln!(s, "origin_lat {}", self.origin_lat);
        let _ = writeln!(s, "origin_lon {}", self.origin_lon);
        let _ = writeln!(s, "pixel_size {}", self.pixel_size);
        let _ = writeln!(s, "nrows {}", self.nrows);
        let _ = writeln!(s, "ncols {}", self.ncols);
        match self.nodata {
            Some(v) => {
                let _ = writeln!(s, "nodata {v}");
            }
            None => s.push_str("nodata none\n"),
        }
        for row in self.values.chunks(self.ncols) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Statistic over the `window × window` pixels centred on the pixel nearest
/// to `center`. The window is clipped at the raster edges and nodata pixels
/// are skipped.
pub fn raster_window_stat(layer: &RasterLayer, center: LatLon, window: usize, stat: WindowStat) -> Result<f64> {
    if window % 2 == 0 {
        return Err(Error::invalid(format!("window must be odd, got {window}")));
    }
    match (layer.kind, stat) {
        (RasterKind::LandCoverClass, WindowStat::Mean) => {
            return Err(Error::invalid("a land-cover raster only supports class shares"))
        }
        (RasterKind::NightlightRadiance | RasterKind::Generic, WindowStat::ClassShare(_)) => {
            return Err(Error::invalid("class shares need a land-cover raster"))
        }
        _ => {}
    }
    let (r, c) = layer.pixel_of(center)?;
    let half = window / 2;
    let (r0, r1) = (r.saturating_sub(half), (r + half).min(layer.nrows - 1));
    let (c0, c1) = (c.saturating_sub(half), (c + half).min(layer.ncols - 1));
    let mut count = 0usize;
    let mut acc = 0.0;
    for row in r0..=r1 {
        for col in c0..=c1 {
            let v = layer.get(row, col);
            if !layer.is_valid(v) {
                continue;
            }
            count += 1;
            acc += match stat {
                WindowStat::ClassShare(code) => f64::from(u8::from(v == code as f64)),
                WindowStat::Mean => v,
            };
        }
    }
    if count == 0 {
        return Err(Error::invalid(format!("no valid pixels in the {window}x{window} window at {center:?}")));
    }
    Ok(acc / count as f64)
}
