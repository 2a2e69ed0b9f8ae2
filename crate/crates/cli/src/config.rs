use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use zigcast_core::eval::PitMode;
use zigcast_core::features::FeatureOptions;
use zigcast_core::linkage::DEFAULT_THRESHOLD;
use zigcast_core::nn::TrainConfig;
use zigcast_core::Target;

use crate::error::{CliError, CliResult};

/// Input files. Relative paths are resolved against the config file's
/// directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputPaths {
    pub buildings: Option<PathBuf>,
    pub weather: Option<PathBuf>,
    pub land_cover: Option<PathBuf>,
    pub nightlights: Option<PathBuf>,
    pub internet: Option<PathBuf>,
    pub ami_addresses: Option<PathBuf>,
    pub consumption_heating: Option<PathBuf>,
    pub consumption_electricity: Option<PathBuf>,
    pub pumas: Option<PathBuf>,
    pub archetypes: Option<PathBuf>,
    pub archetype_profiles: Option<PathBuf>,
    pub eta_calibration: Option<PathBuf>,
}

impl InputPaths {
    pub fn entries(&self) -> Vec<(&'static str, Option<&Path>)> {
        vec![
            ("buildings", self.buildings.as_deref()),
            ("weather", self.weather.as_deref()),
            ("land_cover", self.land_cover.as_deref()),
            ("nightlights", self.nightlights.as_deref()),
            ("internet", self.internet.as_deref()),
            ("ami_addresses", self.ami_addresses.as_deref()),
            ("consumption_heating", self.consumption_heating.as_deref()),
            ("consumption_electricity", self.consumption_electricity.as_deref()),
            ("pumas", self.pumas.as_deref()),
            ("archetypes", self.archetypes.as_deref()),
            ("archetype_profiles", self.archetype_profiles.as_deref()),
            ("eta_calibration", self.eta_calibration.as_deref()),
        ]
    }

    fn resolve(&mut self, base: &Path) {
        for p in [
            &mut self.buildings,
            &mut self.weather,
            &mut self.land_cover,
            &mut self.nightlights,
            &mut self.internet,
            &mut self.ami_addresses,
            &mut self.consumption_heating,
            &mut self.consumption_electricity,
            &mut self.pumas,
            &mut self.archetypes,
            &mut self.archetype_profiles,
            &mut self.eta_calibration,
        ]
        .into_iter()
        .flatten()
        {
            *p = base.join(&*p);
        }
    }
}

/// Building-level split fractions; the test split gets the remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub train: f64,
    pub validation: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { train: 0.7, validation: 0.15 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateConfig {
    pub pit_mode: PitMode,
    pub pit_bins: usize,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        Self { pit_mode: PitMode::Randomized, pit_bins: 20 }
    }
}

/// The config file as written.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub target: Option<Target>,
    pub eta: Option<f64>,
    pub similarity_threshold: Option<u8>,
    pub output_dir: Option<PathBuf>,
    pub inputs: InputPaths,
    pub features: FeatureOptions,
    pub split: SplitConfig,
    pub train: TrainConfig,
    pub evaluate: EvaluateConfig,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub target: Option<Target>,
    pub eta: Option<f64>,
    pub threshold: Option<u8>,
    pub out: Option<PathBuf>,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub config_path: Option<PathBuf>,
    pub seed: u64,
    pub target: Target,
    pub eta: Option<f64>,
    pub similarity_threshold: u8,
    pub output_dir: PathBuf,
    pub inputs: InputPaths,
    pub features: FeatureOptions,
    pub split: SplitConfig,
    /// `train.seed` always equals `seed`.
    pub train: TrainConfig,
    pub evaluate: EvaluateConfig,
}

pub const DEFAULT_OUTPUT_DIR: &str = "run";

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let file = parse_config(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut cfg = Self::from_file(file, &base, overrides)?;
        cfg.config_path = Some(path.to_path_buf());
        Ok(cfg)
    }

    /// Applies flags > config > defaults, resolves paths against `base` and
    /// validates every field.
    pub fn from_file(file: ConfigFile, base: &Path, overrides: &Overrides) -> CliResult<Self> {
        let mut inputs = file.inputs;
        inputs.resolve(base);
        let seed = overrides.seed.or(file.seed).unwrap_or(0);
        let output_dir = match (&overrides.out, file.output_dir) {
            (Some(o), _) => o.clone(),
            (None, Some(o)) => base.join(o),
            (None, None) => base.join(DEFAULT_OUTPUT_DIR),
        };
        let cfg = Self {
            config_path: None,
            seed,
            target: overrides.target.or(file.target).unwrap_or(Target::Heating),
            eta: overrides.eta.or(file.eta),
            similarity_threshold: overrides.threshold.or(file.similarity_threshold).unwrap_or(DEFAULT_THRESHOLD),
            output_dir,
            inputs,
            features: file.features,
            split: file.split,
            train: TrainConfig { seed, ..file.train },
            evaluate: file.evaluate,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if let Some(eta) = self.eta {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(CliError::config("eta", format!("must lie in (0, 1], got {eta}")));
            }
        }
        if self.similarity_threshold > 100 {
            return Err(CliError::config("similarity_threshold", "must lie in [0, 100]"));
        }
        for (field, path) in self.inputs.entries() {
            if let Some(p) = path {
                if !p.is_file() {
                    return Err(CliError::config(format!("inputs.{field}"), format!("file not found: {}", p.display())));
                }
            }
        }
        let f = &self.features;
        if !(-12..=14).contains(&f.utc_offset_hours) {
            return Err(CliError::config("features.utc_offset_hours", "must lie in [-12, 14]"));
        }
        if !(f.neighbor_radius_m > 0.0 && f.neighbor_radius_m.is_finite()) {
            return Err(CliError::config("features.neighbor_radius_m", "must be positive"));
        }
        let s = &self.split;
        if !(s.train > 0.0 && s.validation > 0.0 && s.train + s.validation < 1.0) {
            return Err(CliError::config(
                "split",
                format!("train and validation must be positive and sum below 1, got {} and {}", s.train, s.validation),
            ));
        }
        if self.evaluate.pit_bins == 0 {
            return Err(CliError::config("evaluate.pit_bins", "must be positive"));
        }
        self.train.validate().map_err(|e| {
            let msg = match e {
                zigcast_core::Error::InvalidInput(m) => m,
                other => other.to_string(),
            };
            match msg.split_once(": ") {
                Some((field, why)) => CliError::config(format!("train.{field}"), why),
                None => CliError::config("train", msg),
            }
        })
    }

    /// Path of a required input, or a config error naming the field.
    pub fn require(&self, field: &str, needed_by: &str) -> CliResult<&Path> {
        self.inputs
            .entries()
            .into_iter()
            .find(|(f, _)| *f == field)
            .and_then(|(_, p)| p)
            .ok_or_else(|| CliError::config(format!("inputs.{field}"), format!("required by {needed_by}")))
    }

    pub fn consumption_field(&self) -> &'static str {
        match self.target {
            Target::Heating => "consumption_heating",
            Target::Electricity => "consumption_electricity",
        }
    }
}

/// Parses config text; errors carry the dotted path of the offending key.
pub fn parse_config(text: &str) -> CliResult<ConfigFile> {
    let de = toml::Deserializer::parse(text).map_err(|e| CliError::config("<config>", e.to_string().trim()))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let message = e.inner().message().to_string();
        CliError::config(if field == "." { "<config>".into() } else { field }, message)
    })
}
