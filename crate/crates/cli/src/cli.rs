use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zigcast_core::eval::PitMode;
use zigcast_core::Target;

use crate::config::Overrides;

#[derive(Debug, Parser)]
#[command(name = "zigcast", version, about = "Probabilistic hourly building energy forecasts with a zero-inflated gamma network")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the network on the training split and save the model.
    Train(RunArgs),
    /// Forecast every building for every hour the weather covers.
    Predict(RunArgs),
    /// Backtest the model against the test split and the archetype baseline.
    Evaluate(CalibrationArgs),
    /// PIT calibration of the model on the test split.
    Calibrate(CalibrationArgs),
    /// Gradient sensitivities of the predictive mean on the test split.
    Importance(RunArgs),
    /// Link metered addresses to building footprints.
    MatchAddresses(RunArgs),
    /// Match buildings to simulated archetypes.
    MatchBaseline(RunArgs),
    /// Fit the fuel-to-heat efficiency factor.
    FitEta(FitEtaArgs),
    /// Write a synthetic study region with planted ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Heating,
    Electricity,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Heating => Target::Heating,
            TargetArg::Electricity => Target::Electricity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PitModeArg {
    Randomized,
    Deterministic,
}

impl From<PitModeArg> for PitMode {
    fn from(m: PitModeArg) -> Self {
        match m {
            PitModeArg::Randomized => PitMode::Randomized,
            PitModeArg::Deterministic => PitMode::Deterministic,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub target: Option<TargetArg>,
    /// Fuel-to-heat efficiency; skips fitting it.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Street-name similarity threshold, 0 to 100.
    #[arg(long)]
    pub threshold: Option<u8>,
    /// Run directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            target: self.target.map(Into::into),
            eta: self.eta,
            threshold: self.threshold,
            out: self.out.clone(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CalibrationArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum)]
    pub pit_mode: Option<PitModeArg>,
}

#[derive(Debug, Clone, Args)]
pub struct FitEtaArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Calibration CSV (building_id, annual_fuel, annual_delivered);
    /// defaults to `inputs.eta_calibration`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 90 buildings over two weeks.
    Desk,
    /// 9000 buildings over a year.
    Full,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "desk")]
    pub preset: Preset,
    /// JSON synthetic spec; replaces the preset.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub n_buildings: Option<usize>,
    #[arg(long)]
    pub hours: Option<usize>,
}
