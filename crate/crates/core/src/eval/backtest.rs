use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::calibration::{ks_statistic, pit_values, PitMode};
use super::metrics::{pct_diff, rmse, segment_errors, SegmentStats};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::MlpModel;
use crate::records::{ConsumptionRecord, Hour};
use crate::zig::{link_transform, mean_nll, zig_mean, zig_quantile, RawParamTriple, ZigParams};

/// Levels of the per-hour predictive quantile columns.
pub const PREDICTIVE_QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// Test rows keyed by building and hour, with observations and optional
/// baseline values keyed the same way.
#[derive(Debug, Clone, Copy)]
pub struct BacktestInput<'a> {
    pub keys: &'a [(String, Hour)],
    /// Unscaled feature rows, one per key.
    pub features: &'a Matrix,
    pub observations: &'a [ConsumptionRecord],
    pub baseline: Option<&'a [ConsumptionRecord]>,
    pub pit_mode: PitMode,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestRow {
    pub building_id: String,
    pub timestamp: Hour,
    pub observed: f64,
    pub mean: f64,
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
    pub baseline: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub n: usize,
    pub mean_nll: f64,
    pub rmse_model: f64,
    pub rmse_baseline: Option<f64>,
    pub pct_diff: Option<f64>,
    pub segments: SegmentStats,
    pub pit_mode: PitMode,
    pub ks_statistic: f64,
}

fn index<'a>(records: &'a [ConsumptionRecord], what: &str) -> Result<HashMap<(&'a str, Hour), f64>> {
    let mut map = HashMap::with_capacity(records.len());
    let mut dup = BTreeSet::new();
    for r in records {
        if map.insert((r.building_id.as_str(), r.timestamp), r.value).is_some() {
            dup.insert(format!("{}@{}", r.building_id, r.timestamp));
        }
    }
    if !dup.is_empty() {
        return Err(Error::invalid(format!("duplicate {what} keys: {}", dup.into_iter().collect::<Vec<_>>().join(", "))));
    }
    Ok(map)
}

// Keys on either side with no partner on the other.
fn orphans(keys: &[(String, Hour)], table: &HashMap<(&str, Hour), f64>, what: &str) -> Vec<String> {
    let wanted: BTreeSet<(&str, Hour)> = keys.iter().map(|(b, h)| (b.as_str(), *h)).collect();
    let mut out: Vec<String> = wanted
        .iter()
        .filter(|k| !table.contains_key(k))
        .map(|(b, h)| format!("{what} missing {b}@{h}"))
        .collect();
    let mut extra: Vec<String> = table
        .keys()
        .filter(|k| !wanted.contains(k))
        .map(|(b, h)| format!("{what} without features {b}@{h}"))
        .collect();
    extra.sort();
    out.extend(extra);
    out
}

/// Scores the model (and, when given, the baseline) on a keyed test set.
/// Returns the summary and one plotting row per test key, in key order.
pub fn backtest_report(model: &MlpModel, input: &BacktestInput<'_>) -> Result<(BacktestReport, Vec<BacktestRow>)> {
    let BacktestInput { keys, features, observations, baseline, pit_mode, seed } = *input;
    if keys.len() != features.rows() {
        return Err(Error::invalid(format!("{} keys for {} feature rows", keys.len(), features.rows())));
    }
    if keys.is_empty() {
        return Err(Error::invalid("empty test set"));
    }
    let obs_map = index(observations, "observation")?;
    let mut orphan_keys = orphans(keys, &obs_map, "observation");
    let base_map = baseline.map(|b| index(b, "baseline")).transpose()?;
    if let Some(m) = &base_map {
        orphan_keys.extend(orphans(keys, m, "baseline"));
    }
    if !orphan_keys.is_empty() {
        return Err(Error::Join { keys: orphan_keys });
    }

    let raws: Vec<RawParamTriple> =
        (0..features.rows()).into_par_iter().map(|i| model.predict_raw(features.row(i))).collect::<Result<_>>()?;
    let params: Vec<ZigParams> = raws.iter().map(|r| link_transform(*r)).collect::<Result<_>>()?;
    let observed: Vec<f64> = keys.iter().map(|(b, h)| obs_map[&(b.as_str(), *h)]).collect();
    let means: Vec<f64> = params.iter().map(zig_mean).collect();
    let base: Option<Vec<f64>> =
        base_map.as_ref().map(|m| keys.iter().map(|(b, h)| m[&(b.as_str(), *h)]).collect());

    let rmse_model = rmse(&means, &observed)?;
    let rmse_baseline = base.as_ref().map(|b| rmse(b, &observed)).transpose()?;
    let pct = rmse_baseline.map(|rb| pct_diff(rb, rmse_model)).transpose()?;
    let pit = pit_values(&params, &observed, pit_mode, seed)?;

    let quantiles: Vec<[f64; 5]> = params
        .par_iter()
        .map(|p| {
            let mut q = [0.0; 5];
            for (slot, level) in q.iter_mut().zip(PREDICTIVE_QUANTILES) {
                *slot = zig_quantile(level, p)?;
            }
            Ok(q)
        })
        .collect::<Result<_>>()?;

    let report = BacktestReport {
        n: keys.len(),
        mean_nll: mean_nll(&observed, &raws)?,
        rmse_model,
        rmse_baseline,
        pct_diff: pct,
        segments: segment_errors(&means, &observed)?,
        pit_mode,
        ks_statistic: ks_statistic(&pit)?,
    };
    let rows = keys
        .iter()
        .enumerate()
        .map(|(i, (b, h))| {
            let q = quantiles[i];
            BacktestRow {
                building_id: b.clone(),
                timestamp: *h,
                observed: observed[i],
                mean: means[i],
                q05: q[0],
                q25: q[1],
                q50: q[2],
                q75: q[3],
                q95: q[4],
                baseline: base.as_ref().map(|v| v[i]),
            }
        })
        .collect();
    Ok((report, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::segment_errors;
    use crate::nn::{Activation, Dense, Scaler};

    // Constant-output model: raw = bias regardless of the input.
    fn constant_model(bias: [f64; 3]) -> MlpModel {
        let layers = vec![
            Dense { inputs: 2, outputs: 2, weights: vec![0.0; 4], bias: vec![0.0; 2] },
            Dense { inputs: 2, outputs: 3, weights: vec![0.0; 6], bias: bias.to_vec() },
        ];
        MlpModel::from_layers(layers, Activation::Relu, 0.0, Scaler::identity(2)).unwrap()
    }

    fn keyed(n: usize) -> Vec<(String, Hour)> {
        (0..n).map(|i| (format!("b{}", i % 2), Hour::from_unix_hours(470_000 + i as i64))).collect()
    }

    fn records(keys: &[(String, Hour)], values: &[f64]) -> Vec<ConsumptionRecord> {
        keys.iter()
            .zip(values)
            .map(|((b, h), v)| ConsumptionRecord { building_id: b.clone(), timestamp: *h, value: *v })
            .collect()
    }

    #[test]
    fn perfect_model_without_baseline() {
        // p → 0; observations set to the predictive mean
        let model = constant_model([-40.0, 50.0, 0.0]);
        let params = link_transform(model.predict_raw(&[0.0, 0.0]).unwrap()).unwrap();
        let m = zig_mean(&params);
        let keys = keyed(4);
        let obs = records(&keys, &[m; 4]);
        let x = Matrix::zeros(4, 2);
        let input = BacktestInput {
            keys: &keys,
            features: &x,
            observations: &obs,
            baseline: None,
            pit_mode: PitMode::Randomized,
            seed: 0,
        };
        let (report, rows) = backtest_report(&model, &input).unwrap();
        assert_eq!(report.rmse_model, 0.0);
        assert!(report.pct_diff.is_none() && report.rmse_baseline.is_none());
        assert_eq!(rows.len(), 4);
    }

    #[test]
    fn fields_match_individual_operations() {
        let model = constant_model([-0.5, 0.8, 0.3]);
        let keys = keyed(6);
        let values = [0.0, 1.2, 0.4, 0.0, 2.5, 0.9];
        let obs = records(&keys, &values);
        let base = records(&keys, &[0.5; 6]);
        let x = Matrix::zeros(6, 2);
        let input = BacktestInput {
            keys: &keys,
            features: &x,
            observations: &obs,
            baseline: Some(&base),
            pit_mode: PitMode::Randomized,
            seed: 5,
        };
        let (report, rows) = backtest_report(&model, &input).unwrap();
        let params = link_transform(RawParamTriple::new(-0.5, 0.8, 0.3)).unwrap();
        let mean = zig_mean(&params);
        let preds = vec![mean; 6];
        assert_eq!(report.rmse_model, rmse(&preds, &values).unwrap());
        assert_eq!(report.rmse_baseline, Some(rmse(&[0.5; 6], &values).unwrap()));
        assert_eq!(report.pct_diff, Some(pct_diff(report.rmse_baseline.unwrap(), report.rmse_model).unwrap()));
        assert_eq!(report.segments, segment_errors(&preds, &values).unwrap());
        let pit = pit_values(&[params; 6], &values, PitMode::Randomized, 5).unwrap();
        assert_eq!(report.ks_statistic, ks_statistic(&pit).unwrap());
        for r in &rows {
            assert!(r.q05 <= r.q25 && r.q25 <= r.q50 && r.q50 <= r.q75 && r.q75 <= r.q95);
            assert_eq!(r.baseline, Some(0.5));
        }
    }

    #[test]
    fn orphans_are_listed() {
        let model = constant_model([0.0; 3]);
        let keys = keyed(3);
        let mut obs = records(&keys[..2], &[1.0, 2.0]);
        obs.push(ConsumptionRecord { building_id: "ghost".into(), timestamp: keys[0].1, value: 1.0 });
        let x = Matrix::zeros(3, 2);
        let input = BacktestInput {
            keys: &keys,
            features: &x,
            observations: &obs,
            baseline: None,
            pit_mode: PitMode::Randomized,
            seed: 0,
        };
        match backtest_report(&model, &input).unwrap_err() {
            Error::Join { keys: k } => {
                assert_eq!(k.len(), 2);
                assert!(k[0].contains(&keys[2].0) && k[1].contains("ghost"));
            }
            e => panic!("{e}"),
        }
    }
}
