use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("weather series has no value for {variable} at {timestamp}")]
    WeatherGap { variable: String, timestamp: String },

    #[error("point ({lat}, {lon}) lies outside the raster")]
    OutOfBounds { lat: f64, lon: f64 },

    #[error("cannot assemble feature `{feature}`: {reason}")]
    Assembly { feature: String, reason: String },

    #[error("duplicate consumption rows for (ami_key, hour): {}", .keys.join(", "))]
    DuplicateRows { keys: Vec<String> },

    #[error("hour {hour} is outside the archetype profile")]
    ProfileRange { hour: String },

    #[error("building {building_id} is not inside any region")]
    Unassigned { building_id: String },

    #[error("join failed, orphan keys: {}", .keys.join(", "))]
    Join { keys: Vec<String> },

    #[error("model document error at `{path}`: {message}")]
    ModelDocument { path: String, message: String },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("training failed at every dropout grid point")]
    TrainingFailed,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable tag for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Domain(_) => "domain",
            Error::Degenerate(_) => "degenerate_input",
            Error::WeatherGap { .. } => "weather_gap",
            Error::OutOfBounds { .. } => "out_of_bounds",
            Error::Assembly { .. } => "assembly",
            Error::DuplicateRows { .. } => "data_quality",
            Error::ProfileRange { .. } => "profile_range",
            Error::Unassigned { .. } => "unassigned",
            Error::Join { .. } => "join",
            Error::ModelDocument { .. } => "model_document",
            Error::Parse { .. } => "parse",
            Error::Convergence(_) => "convergence",
            Error::TrainingFailed => "training_failed",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
