//! Fuel-to-delivered-heat efficiency η, fitted by least squares through the
//! origin and applied as a multiplicative factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Result of [`fit_eta`]. Both R² conventions are reported; `r_squared` is the
/// one measured against the mean of the delivered series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaFit {
    pub eta: f64,
    pub r_squared: f64,
    pub r_squared_uncentered: f64,
    pub n: usize,
}

/// Which R² a caller wants to quote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RSquaredConvention {
    #[default]
    Centered,
    Uncentered,
}

impl EtaFit {
    pub fn r_squared_as(&self, convention: RSquaredConvention) -> f64 {
        match convention {
            RSquaredConvention::Centered => self.r_squared,
            RSquaredConvention::Uncentered => self.r_squared_uncentered,
        }
    }
}

pub fn fit_eta(fuel: &[f64], delivered: &[f64]) -> Result<EtaFit> {
    if fuel.len() != delivered.len() {
        return Err(Error::invalid(format!(
            "fuel has {} values but delivered has {}",
            fuel.len(),
            delivered.len()
        )));
    }
    if fuel.len() < 2 {
        return Err(Error::invalid("fit_eta needs at least two samples"));
    }
    if fuel.iter().all(|&f| f == 0.0) {
        return Err(Error::Degenerate("all fuel values are zero".into()));
    }
    if let Some(f) = fuel.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
        return Err(Error::domain(format!("fuel values must be positive, got {f}")));
    }
    if let Some(d) = delivered.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        return Err(Error::domain(format!("delivered values must be nonnegative, got {d}")));
    }

    let sxy: f64 = fuel.iter().zip(delivered).map(|(f, d)| f * d).sum();
    let sxx: f64 = fuel.iter().map(|f| f * f).sum();
    let eta = sxy / sxx;

    let n = fuel.len();
    let mean = delivered.iter().sum::<f64>() / n as f64;
    let ss_res: f64 = fuel.iter().zip(delivered).map(|(f, d)| (d - eta * f).powi(2)).sum();
    let ss_tot: f64 = delivered.iter().map(|d| (d - mean).powi(2)).sum();
    let ss_raw: f64 = delivered.iter().map(|d| d * d).sum();
    Ok(EtaFit {
        eta,
        r_squared: r2(ss_res, ss_tot),
        r_squared_uncentered: r2(ss_res, ss_raw),
        n,
    })
}

// A constant target has no variance to explain; report 1 if it is fitted
// exactly and 0 otherwise.
fn r2(ss_res: f64, ss_tot: f64) -> f64 {
    if ss_tot == 0.0 {
        if ss_res == 0.0 { 1.0 } else { 0.0 }
    } else {
        1.0 - ss_res / ss_tot
    }
}

/// Converts a gas series into delivered heat. Zeros stay zero.
pub fn apply_eta(series: &[f64], eta: f64) -> Result<Vec<f64>> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::domain(format!("eta must be positive, got {eta}")));
    }
    Ok(series.iter().map(|v| v * eta).collect())
}
