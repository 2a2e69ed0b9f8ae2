//! Probabilistic building-level energy demand forecasting with a
//! zero-inflated gamma output head on a small multilayer perceptron.

pub mod baseline;
pub mod error;
pub mod eval;
pub mod features;
pub mod geo;
pub mod heat;
pub mod io;
pub mod linkage;
pub mod matrix;
pub mod nn;
pub mod records;
pub mod synth;
pub mod zig;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use records::{BuildingRecord, ConsumptionRecord, Hour, Target};
