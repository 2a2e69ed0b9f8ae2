use log::{info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adam::AdamState;
use super::model::{loss_and_gradients, MlpModel, HIDDEN_WIDTHS, MAX_DROPOUT};
use super::scaler::standardize_fit;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::zig::{nll_with_gradient, RawParamTriple};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub initial_learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub max_epochs: usize,
    pub early_stop_patience: usize,
    pub lr_reduce_factor: f64,
    pub lr_reduce_patience: usize,
    pub dropout_grid: Vec<f64>,
    pub hidden_widths: Vec<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 256,
            initial_learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            max_epochs: 200,
            early_stop_patience: 10,
            lr_reduce_factor: 0.5,
            lr_reduce_patience: 5,
            dropout_grid: vec![0.0, 0.02, 0.04, 0.06, 0.08],
            hidden_widths: HIDDEN_WIDTHS.to_vec(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Checks every field; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: String| Err(Error::invalid(format!("{field}: {why}")));
        if self.batch_size == 0 {
            return bad("batch_size", "must be positive".into());
        }
        if !(self.initial_learning_rate > 0.0 && self.initial_learning_rate.is_finite()) {
            return bad("initial_learning_rate", format!("must be positive, got {}", self.initial_learning_rate));
        }
        for (name, b) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(0.0..1.0).contains(&b) {
                return bad(name, format!("must lie in [0, 1), got {b}"));
            }
        }
        if !(self.adam_epsilon > 0.0) {
            return bad("adam_epsilon", format!("must be positive, got {}", self.adam_epsilon));
        }
        if self.max_epochs == 0 {
            return bad("max_epochs", "must be positive".into());
        }
        if self.early_stop_patience == 0 {
            return bad("early_stop_patience", "must be positive".into());
        }
        if !(self.lr_reduce_factor > 0.0 && self.lr_reduce_factor < 1.0) {
            return bad("lr_reduce_factor", format!("must lie in (0, 1), got {}", self.lr_reduce_factor));
        }
        if self.lr_reduce_patience == 0 {
            return bad("lr_reduce_patience", "must be positive".into());
        }
        if self.dropout_grid.is_empty() {
            return bad("dropout_grid", "must not be empty".into());
        }
        for (i, &d) in self.dropout_grid.iter().enumerate() {
            if !(0.0..=MAX_DROPOUT).contains(&d) {
                return bad(&format!("dropout_grid[{i}]"), format!("{d} outside [0, {MAX_DROPOUT}]"));
            }
        }
        if self.hidden_widths.iter().any(|&w| w == 0) {
            return bad("hidden_widths", "widths must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_nll: f64,
    pub val_nll: f64,
    pub learning_rate: f64,
    pub selected: bool,
}

/// Per-epoch trace of the training run that produced the returned model.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainHistory {
    pub dropout_rate: f64,
    pub epochs: Vec<EpochRecord>,
}

impl TrainHistory {
    pub fn selected(&self) -> Option<&EpochRecord> {
        self.epochs.iter().find(|e| e.selected)
    }
}

/// Outcome of one dropout grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPointResult {
    pub dropout_rate: f64,
    pub epochs_run: usize,
    pub best_val_nll: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub model: MlpModel,
    pub history: TrainHistory,
    pub grid: Vec<GridPointResult>,
}

/// Mean NLL of the model over a standardized matrix in inference mode.
///
/// Rows are evaluated in parallel; the sum is taken in row order so the
/// result does not depend on thread scheduling.
pub fn evaluate_nll(model: &MlpModel, x: &Matrix, y: &[f64]) -> Result<f64> {
    if x.rows() != y.len() || y.is_empty() {
        return Err(Error::invalid("evaluation set must be non-empty with one target per row"));
    }
    let per_row: Vec<f64> = (0..x.rows())
        .into_par_iter()
        .map(|i| model.forward(x.row(i)).map(|raw| nll_with_gradient(y[i], &raw).0))
        .collect::<Result<_>>()?;
    Ok(per_row.iter().sum::<f64>() / y.len() as f64)
}

/// Raw outputs for every row of a standardized matrix, in row order.
pub fn predict_batch(model: &MlpModel, x: &Matrix) -> Result<Vec<RawParamTriple>> {
    (0..x.rows()).into_par_iter().map(|i| model.forward(x.row(i))).collect()
}

/// Trains one network per dropout value and keeps the one with the lowest
/// validation NLL. Features are raw; the scaler is fitted on `train_x`.
pub fn fit(
    train_x: &Matrix,
    train_y: &[f64],
    val_x: &Matrix,
    val_y: &[f64],
    config: &TrainConfig,
) -> Result<FitOutcome> {
    config.validate()?;
    if train_x.is_empty() || val_x.is_empty() {
        return Err(Error::invalid("training and validation sets must be non-empty"));
    }
    if train_x.rows() != train_y.len() || val_x.rows() != val_y.len() {
        return Err(Error::invalid("feature rows and targets differ in count"));
    }
    if train_x.cols() != val_x.cols() {
        return Err(Error::invalid(format!(
            "training width {} differs from validation width {}",
            train_x.cols(),
            val_x.cols()
        )));
    }
    let scaler = standardize_fit(train_x)?;
    let train_z = scaler.apply_matrix(train_x)?;
    let val_z = scaler.apply_matrix(val_x)?;

    let mut best: Option<(f64, MlpModel, TrainHistory)> = None;
    let mut grid = Vec::with_capacity(config.dropout_grid.len());
    for (gi, &dropout) in config.dropout_grid.iter().enumerate() {
        // every grid point starts from the same initial weights
        let mut init_rng = ChaCha8Rng::seed_from_u64(config.seed);
        let model =
            MlpModel::initialize(train_x.cols(), &config.hidden_widths, dropout, scaler.clone(), &mut init_rng)?;
        let mut run_rng = ChaCha8Rng::seed_from_u64(config.seed);
        run_rng.set_stream(gi as u64 + 1);
        match train_one(model, &train_z, train_y, &val_z, val_y, config, &mut run_rng) {
            Ok((model, history)) => {
                let best_val = history.selected().map(|e| e.val_nll).unwrap_or(f64::INFINITY);
                info!("dropout {dropout}: best validation NLL {best_val:.6} after {} epochs", history.epochs.len());
                grid.push(GridPointResult {
                    dropout_rate: dropout,
                    epochs_run: history.epochs.len(),
                    best_val_nll: Some(best_val),
                    failure: None,
                });
                if best.as_ref().is_none_or(|(b, _, _)| best_val < *b) {
                    best = Some((best_val, model, history));
                }
            }
            Err(TrainFailure { epoch, reason }) => {
                warn!("dropout {dropout}: aborted at epoch {epoch}: {reason}");
                grid.push(GridPointResult {
                    dropout_rate: dropout,
                    epochs_run: epoch,
                    best_val_nll: None,
                    failure: Some(reason),
                });
            }
        }
    }
    let (_, model, history) = best.ok_or(Error::TrainingFailed)?;
    Ok(FitOutcome { model, history, grid })
}

struct TrainFailure {
    epoch: usize,
    reason: String,
}

fn train_one(
    mut model: MlpModel,
    train_z: &Matrix,
    train_y: &[f64],
    val_z: &Matrix,
    val_y: &[f64],
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<(MlpModel, TrainHistory), TrainFailure> {
    let fail = |epoch, reason: String| TrainFailure { epoch, reason };
    let sizes: Vec<usize> = model.tensors_mut().iter().map(|t| t.len()).collect();
    let mut adam = AdamState::new(&sizes, config.adam_beta1, config.adam_beta2, config.adam_epsilon);
    let mut lr = config.initial_learning_rate;
    let mut history = TrainHistory { dropout_rate: model.dropout_rate(), epochs: Vec::new() };
    let mut best_val = f64::INFINITY;
    let mut best_model = model.clone();
    let mut best_epoch = None;
    let mut since_best = 0;
    let mut since_plateau_check = 0;
    let mut order: Vec<usize> = (0..train_z.rows()).collect();

    for epoch in 0..config.max_epochs {
        order.shuffle(rng);
        let mut train_total = 0.0;
        for batch in order.chunks(config.batch_size) {
            let bx = train_z.select_rows(batch);
            let by: Vec<f64> = batch.iter().map(|&i| train_y[i]).collect();
            let (loss, grads) = loss_and_gradients(&model, &bx, &by, Some(rng))
                .map_err(|e| fail(epoch, e.to_string()))?;
            if !loss.is_finite() || !grads.is_finite() {
                return Err(fail(epoch, format!("non-finite training loss {loss}")));
            }
            train_total += loss * batch.len() as f64;
            adam.step(&mut model.tensors_mut(), &grads.tensors(), lr);
        }
        let train_nll = train_total / train_z.rows() as f64;
        let val_nll = evaluate_nll(&model, val_z, val_y).map_err(|e| fail(epoch, e.to_string()))?;
        if !val_nll.is_finite() {
            return Err(fail(epoch, format!("non-finite validation loss {val_nll}")));
        }
        history.epochs.push(EpochRecord { epoch, train_nll, val_nll, learning_rate: lr, selected: false });

        if val_nll < best_val {
            best_val = val_nll;
            best_model = model.clone();
            best_epoch = Some(history.epochs.len() - 1);
            since_best = 0;
            since_plateau_check = 0;
        } else {
            since_best += 1;
            since_plateau_check += 1;
            if since_best >= config.early_stop_patience {
                break;
            }
            if since_plateau_check >= config.lr_reduce_patience {
                lr *= config.lr_reduce_factor;
                since_plateau_check = 0;
            }
        }
    }
    if let Some(i) = best_epoch {
        history.epochs[i].selected = true;
    }
    Ok((best_model, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        TrainConfig::default().validate().unwrap();
    }

    #[test]
    fn validation_names_the_field() {
        let cfg = TrainConfig { dropout_grid: vec![0.0, 0.1], ..Default::default() };
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("dropout_grid[1]"), "{msg}");
        let cfg = TrainConfig { lr_reduce_factor: 1.0, ..Default::default() };
        assert!(cfg.validate().unwrap_err().to_string().contains("lr_reduce_factor"));
    }
}
