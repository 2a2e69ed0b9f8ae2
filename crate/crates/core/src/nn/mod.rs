//! The forecasting network: a ReLU multilayer perceptron emitting raw ZIG
//! parameters, trained with Adam on the mean ZIG negative log-likelihood.

mod adam;
mod document;
mod model;
mod scaler;
mod train;

pub use adam::AdamState;
pub use document::{load_model, save_model, MODEL_SCHEMA_VERSION};
pub use model::{
    loss_and_gradients, Activation, Dense, Gradients, MlpModel, HIDDEN_WIDTHS, MAX_DROPOUT, OUTPUT_WIDTH,
};
pub use scaler::{standardize_fit, Scaler, CONSTANT_COLUMN_STD};
pub use train::{
    evaluate_nll, fit, predict_batch, EpochRecord, FitOutcome, GridPointResult, TrainConfig, TrainHistory,
};
