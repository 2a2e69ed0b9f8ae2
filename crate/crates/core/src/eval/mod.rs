//! Backtesting and diagnostics: point-forecast error, error segmentation,
//! PIT calibration, gradient sensitivities and the combined report.

mod backtest;
mod calibration;
mod importance;
mod metrics;

pub use backtest::{backtest_report, BacktestInput, BacktestReport, BacktestRow, PREDICTIVE_QUANTILES};
pub use calibration::{ks_statistic, pit_histogram, pit_values, PitMode};
pub use importance::{feature_importance, mean_sensitivity, FeatureImportance, FeatureSensitivity};
pub use metrics::{box_stats, pct_diff, quantile_type7, rmse, segment_errors, BoxStats, SegmentStats};
