//! Synthetic data with planted ground truth.

mod corpus;
mod planted;

pub use corpus::{files, generate, write_corpus, PlantedTarget, PlantedTerm, SyntheticCorpus, SyntheticSpec, TruthRow};
pub use planted::{PlantedLinearZig, PlantedSample};
