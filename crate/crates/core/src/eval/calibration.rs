use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zig::{zig_cdf, ZigParams};

/// How a zero observation is mapped onto the CDF jump `[0, p]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PitMode {
    /// Uniform draw on `[0, p]`; uniform overall under calibration.
    #[default]
    Randomized,
    /// The jump's upper end, `p`.
    Deterministic,
}

/// Probability integral transform of each observation under its predictive
/// distribution. Randomized draws come from a generator seeded with `seed`
/// and are consumed only by zero observations, in input order.
pub fn pit_values(params: &[ZigParams], observations: &[f64], mode: PitMode, seed: u64) -> Result<Vec<f64>> {
    if params.len() != observations.len() {
        return Err(Error::invalid(format!(
            "{} predictive distributions but {} observations",
            params.len(),
            observations.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    params
        .iter()
        .zip(observations)
        .map(|(prm, &x)| {
            if x == 0.0 {
                Ok(match mode {
                    PitMode::Randomized => prm.p() * rng.random::<f64>(),
                    PitMode::Deterministic => prm.p(),
                })
            } else {
                zig_cdf(x, prm)
            }
        })
        .collect()
}

/// Two-sided Kolmogorov–Smirnov distance between the empirical CDF of
/// `values` and the uniform distribution on [0, 1].
pub fn ks_statistic(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("KS statistic of an empty sample"));
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::domain(format!("PIT value {v} outside [0, 1]")));
    }
    let mut u = values.to_vec();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    Ok(u.iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64 / n - v).max(v - i as f64 / n))
        .fold(0.0, f64::max))
}

/// Counts of PIT values in `bins` equal-width bins over [0, 1].
pub fn pit_histogram(values: &[f64], bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    if bins == 0 {
        return counts;
    }
    for v in values {
        let i = ((v * bins as f64) as usize).min(bins - 1);
        counts[i] += 1;
    }
    counts
}
