use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{haversine, LatLon};
use crate::records::Hour;

/// Reanalysis variables, in feature order: 2 m temperature (K), total
/// precipitation (m), snow depth (m), surface pressure (Pa), 10 m gust
/// (m/s), 10 m zonal and meridional wind (m/s), surface net thermal and
/// solar radiation (J/m²), total cloud cover, level-1 soil temperature (K)
/// and high vegetation cover.
pub const WEATHER_VARIABLES: [&str; 12] =
    ["t2m", "tp", "sd", "sp", "i10fg", "u10", "v10", "str", "ssr", "tcc", "stl1", "cvh"];

/// Hourly series of every declared variable at one grid cell, on a shared
/// contiguous time axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherSeries {
    pub cell: LatLon,
    pub start: Hour,
    /// One series per entry of [`WEATHER_VARIABLES`], same order.
    pub values: Vec<Vec<f64>>,
}

/// One row of the long-format weather file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherObservation {
    pub timestamp: Hour,
    pub variable: String,
    pub value: f64,
    pub cell_lat: f64,
    pub cell_lon: f64,
}

impl WeatherSeries {
    pub fn len(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn value(&self, var: usize, t: Hour) -> Result<f64> {
        let gap = || Error::WeatherGap { variable: WEATHER_VARIABLES[var].to_string(), timestamp: t.to_string() };
        let i = usize::try_from(t.unix_hours() - self.start.unix_hours()).map_err(|_| gap())?;
        self.values[var].get(i).copied().ok_or_else(gap)
    }
}

/// Weather cells of a study region.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeatherGrid {
    pub cells: Vec<WeatherSeries>,
}

impl WeatherGrid {
    /// Groups long-format rows by cell. Every cell must carry every declared
    /// variable at every hour between the earliest and latest timestamp.
    pub fn from_observations(rows: &[WeatherObservation]) -> Result<Self> {
        type CellKey = (u64, u64);
        let mut by_cell: BTreeMap<CellKey, BTreeMap<usize, BTreeMap<Hour, f64>>> = BTreeMap::new();
        for r in rows {
            let var = WEATHER_VARIABLES
                .iter()
                .position(|v| *v == r.variable)
                .ok_or_else(|| Error::invalid(format!("unknown weather variable `{}`", r.variable)))?;
            let key = (r.cell_lat.to_bits(), r.cell_lon.to_bits());
            if by_cell.entry(key).or_default().entry(var).or_default().insert(r.timestamp, r.value).is_some() {
                return Err(Error::invalid(format!(
                    "duplicate weather row for {} at {} in cell ({}, {})",
                    r.variable, r.timestamp, r.cell_lat, r.cell_lon
                )));
            }
        }
        let (Some(first), Some(last)) =
            (rows.iter().map(|r| r.timestamp).min(), rows.iter().map(|r| r.timestamp).max())
        else {
            return Err(Error::invalid("weather file has no rows"));
        };
        let n = (last.unix_hours() - first.unix_hours() + 1) as usize;
        let mut cells = Vec::with_capacity(by_cell.len());
        for ((lat_bits, lon_bits), vars) in by_cell {
            let mut values = Vec::with_capacity(WEATHER_VARIABLES.len());
            for (vi, name) in WEATHER_VARIABLES.iter().enumerate() {
                let series = vars.get(&vi);
                let mut col = Vec::with_capacity(n);
                for i in 0..n {
                    let t = first.offset(i as i64);
                    match series.and_then(|s| s.get(&t)) {
                        Some(v) => col.push(*v),
                        None => {
                            return Err(Error::WeatherGap { variable: name.to_string(), timestamp: t.to_string() })
                        }
                    }
                }
                values.push(col);
            }
            cells.push(WeatherSeries {
                cell: LatLon::new(f64::from_bits(lat_bits), f64::from_bits(lon_bits)),
                start: first,
                values,
            });
        }
        Ok(Self { cells })
    }

    pub fn to_observations(&self) -> Vec<WeatherObservation> {
        let mut out = Vec::new();
        for cell in &self.cells {
            for i in 0..cell.len() {
                for (vi, name) in WEATHER_VARIABLES.iter().enumerate() {
                    out.push(WeatherObservation {
                        timestamp: cell.start.offset(i as i64),
                        variable: name.to_string(),
                        value: cell.values[vi][i],
                        cell_lat: cell.cell.lat,
                        cell_lon: cell.cell.lon,
                    });
                }
            }
        }
        out
    }

    /// Index of the cell nearest to `p` (first one on ties).
    pub fn nearest(&self, p: LatLon) -> Result<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in self.cells.iter().enumerate() {
            let d = haversine(p, c.cell);
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i).ok_or_else(|| Error::invalid("weather grid has no cells"))
    }
}

/// Value of every declared variable at `t`, `t − 1h` and `t − 2h` (current
/// first), flattened variable-major: 36 values.
pub fn weather_lag_features(series: &WeatherSeries, t: Hour) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(3 * WEATHER_VARIABLES.len());
    for var in 0..WEATHER_VARIABLES.len() {
        for lag in 0..3 {
            out.push(series.value(var, t.offset(-lag))?);
        }
    }
    Ok(out)
}

/// Names matching [`weather_lag_features`] output, e.g. `t2m_lag1`.
pub fn weather_feature_names() -> Vec<String> {
    WEATHER_VARIABLES.iter().flat_map(|v| (0..3).map(move |l| format!("{v}_lag{l}"))).collect()
}
