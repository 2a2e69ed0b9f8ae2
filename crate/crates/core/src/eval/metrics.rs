use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn rmse(predictions: &[f64], observations: &[f64]) -> Result<f64> {
    check_pair(predictions, observations)?;
    let sse: f64 = predictions.iter().zip(observations).map(|(p, o)| (p - o).powi(2)).sum();
    Ok((sse / predictions.len() as f64).sqrt())
}

/// Percentage by which the model's RMSE undercuts the baseline's; positive
/// when the model is better.
pub fn pct_diff(rmse_baseline: f64, rmse_model: f64) -> Result<f64> {
    if !(rmse_baseline.is_finite() && rmse_baseline > 0.0) {
        return Err(Error::domain(format!("baseline RMSE must be positive, got {rmse_baseline}")));
    }
    Ok(100.0 * (rmse_baseline - rmse_model) / rmse_baseline)
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("{} predictions but {} observations", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::invalid("no predictions to score"));
    }
    Ok(())
}

/// Quantile of sorted data by linear interpolation between order
/// statistics (position `q · (n − 1)`).
pub fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// Boxplot summary. Whiskers end at the most extreme values inside
/// `[q1 − 1.5·IQR, q3 + 1.5·IQR]`; values beyond are counted as outliers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub lower_whisker: f64,
    pub upper_whisker: f64,
    pub outliers: usize,
}

/// `None` for an empty sample.
pub fn box_stats(values: &[f64]) -> Option<BoxStats> {
    if values.is_empty() {
        return None;
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let q1 = quantile_type7(&s, 0.25);
    let q3 = quantile_type7(&s, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = s.iter().filter(|v| **v >= lo_fence && **v <= hi_fence);
    let lower_whisker = inside.clone().next().copied().unwrap_or(q1);
    let upper_whisker = inside.last().copied().unwrap_or(q3);
    Some(BoxStats {
        n: s.len(),
        min: s[0],
        q1,
        median: quantile_type7(&s, 0.5),
        q3,
        max: s[s.len() - 1],
        lower_whisker,
        upper_whisker,
        outliers: s.iter().filter(|v| **v < lo_fence || **v > hi_fence).count(),
    })
}

/// Forecast errors (prediction − observation) split by whether the
/// observation was zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentStats {
    pub n_zero: usize,
    pub n_nonzero: usize,
    pub zero: Option<BoxStats>,
    pub nonzero: Option<BoxStats>,
}

pub fn segment_errors(predictions: &[f64], observations: &[f64]) -> Result<SegmentStats> {
    if predictions.len() != observations.len() {
        return Err(Error::invalid(format!(
            "{} predictions but {} observations",
            predictions.len(),
            observations.len()
        )));
    }
    let (mut zero, mut nonzero) = (Vec::new(), Vec::new());
    for (p, o) in predictions.iter().zip(observations) {
        if *o == 0.0 { &mut zero } else { &mut nonzero }.push(p - o);
    }
    Ok(SegmentStats {
        n_zero: zero.len(),
        n_nonzero: nonzero.len(),
        zero: box_stats(&zero),
        nonzero: box_stats(&nonzero),
    })
}
