use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use log::info;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use zigcast_core::features::{assemble_matrix, FeatureContext, FeatureSchema};
use zigcast_core::heat::{apply_eta, fit_eta};
use zigcast_core::io;
use zigcast_core::linkage::{aggregate_units, link_addresses, LinkResult};
use zigcast_core::nn::{load_model, MlpModel};
use zigcast_core::{ConsumptionRecord, Hour, Matrix, Target};

use crate::config::{RunConfig, SplitConfig};
use crate::error::{CliError, CliResult};

pub const MODEL_FILE: &str = "model.json";
pub const RUN_FILE: &str = "run.json";

pub fn load_context(cfg: &RunConfig, needed_by: &str) -> CliResult<FeatureContext> {
    let buildings = io::read_buildings(cfg.require("buildings", needed_by)?)?;
    let weather = io::read_weather(cfg.require("weather", needed_by)?)?;
    let land_cover = io::read_raster(cfg.require("land_cover", needed_by)?)?;
    let nightlights = cfg.inputs.nightlights.as_deref().map(io::read_raster).transpose()?;
    let internet = cfg.inputs.internet.as_deref().map(io::read_internet).transpose()?;
    Ok(FeatureContext::new(buildings, Some(land_cover), nightlights, internet, weather, cfg.features)?)
}

/// Efficiency used to turn metered gas into delivered heat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaChoice {
    pub eta: f64,
    /// `configured` or `fitted`.
    pub source: String,
    pub r_squared: Option<f64>,
}

pub fn resolve_eta(cfg: &RunConfig) -> CliResult<Option<EtaChoice>> {
    if cfg.target != Target::Heating {
        return Ok(None);
    }
    if let Some(eta) = cfg.eta {
        return Ok(Some(EtaChoice { eta, source: "configured".into(), r_squared: None }));
    }
    let Some(path) = cfg.inputs.eta_calibration.as_deref() else {
        return Err(CliError::config("eta", "heating runs need eta or inputs.eta_calibration"));
    };
    let fit = fit_eta_file(path)?;
    info!("fitted eta {:.6} (R² {:.4}, n = {})", fit.eta, fit.r_squared, fit.n);
    Ok(Some(EtaChoice { eta: fit.eta, source: "fitted".into(), r_squared: Some(fit.r_squared) }))
}

pub fn fit_eta_file(path: &Path) -> CliResult<zigcast_core::heat::EtaFit> {
    let rows: Vec<io::EtaCalibrationRow> = io::read_csv(path)?;
    let fuel: Vec<f64> = rows.iter().map(|r| r.annual_fuel).collect();
    let delivered: Vec<f64> = rows.iter().map(|r| r.annual_delivered).collect();
    Ok(fit_eta(&fuel, &delivered)?)
}

pub fn load_links(cfg: &RunConfig, ctx: &FeatureContext, needed_by: &str) -> CliResult<Vec<LinkResult>> {
    let ami = io::read_ami_addresses(cfg.require("ami_addresses", needed_by)?)?;
    Ok(link_addresses(&ami, &ctx.buildings, cfg.similarity_threshold))
}

/// Building-hour observations of the configured target, in delivered units.
pub fn load_observations(
    cfg: &RunConfig,
    ctx: &FeatureContext,
    eta: Option<&EtaChoice>,
    needed_by: &str,
) -> CliResult<Vec<ConsumptionRecord>> {
    let links = load_links(cfg, ctx, needed_by)?;
    let matched = links.iter().filter(|l| l.is_matched()).count();
    info!("linked {matched} of {} metered addresses", links.len());
    let units = io::read_unit_consumption(cfg.require(cfg.consumption_field(), needed_by)?)?;
    let mut records = aggregate_units(&units, &links)?;
    if let Some(e) = eta {
        let values: Vec<f64> = records.iter().map(|r| r.value).collect();
        for (r, v) in records.iter_mut().zip(apply_eta(&values, e.eta)?) {
            r.value = v;
        }
    }
    if records.is_empty() {
        return Err(zigcast_core::Error::invalid("no consumption could be attributed to a building").into());
    }
    Ok(records)
}

/// Building ids of each split, each list sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
}

pub fn split_buildings(ids: &BTreeSet<String>, fractions: &SplitConfig, seed: u64) -> CliResult<Split> {
    let n = ids.len();
    let n_train = ((n as f64 * fractions.train).round() as usize).max(1);
    let n_val = ((n as f64 * fractions.validation).round() as usize).max(1);
    if n_train + n_val >= n {
        return Err(zigcast_core::Error::invalid(format!("{n} buildings are too few for a three-way split")).into());
    }
    let mut order: Vec<&String> = ids.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    order.shuffle(&mut rng);
    let part = |s: &[&String]| {
        let mut v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
        v.sort();
        v
    };
    Ok(Split {
        train: part(&order[..n_train]),
        validation: part(&order[n_train..n_train + n_val]),
        test: part(&order[n_train + n_val..]),
    })
}

/// Feature rows and targets of one split, in record order.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub keys: Vec<(String, Hour)>,
    pub x: Matrix,
    pub y: Vec<f64>,
    pub records: Vec<ConsumptionRecord>,
}

pub fn assemble(
    ctx: &FeatureContext,
    schema: &FeatureSchema,
    records: &[ConsumptionRecord],
    buildings: &[String],
) -> CliResult<Dataset> {
    let wanted: BTreeSet<&str> = buildings.iter().map(String::as_str).collect();
    let index: HashMap<&str, usize> =
        ctx.buildings.iter().enumerate().map(|(i, b)| (b.building_id.as_str(), i)).collect();
    let records: Vec<ConsumptionRecord> =
        records.iter().filter(|r| wanted.contains(r.building_id.as_str())).cloned().collect();
    let rows: Vec<(usize, Hour)> = records
        .iter()
        .map(|r| {
            index
                .get(r.building_id.as_str())
                .map(|&i| (i, r.timestamp))
                .ok_or_else(|| zigcast_core::Error::Join { keys: vec![format!("unknown building {}", r.building_id)] })
        })
        .collect::<zigcast_core::Result<_>>()?;
    let x = assemble_matrix(ctx, &rows, schema)?;
    Ok(Dataset {
        keys: records.iter().map(|r| (r.building_id.clone(), r.timestamp)).collect(),
        y: records.iter().map(|r| r.value).collect(),
        x,
        records,
    })
}

/// What a training run fixed for later subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub target: Target,
    pub seed: u64,
    pub eta: Option<EtaChoice>,
    pub feature_schema_hash: String,
    pub feature_names: Vec<String>,
    pub rows: SplitRows,
    pub split: Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRows {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

/// Loads the trained model and run record and checks them against the
/// current configuration.
pub fn load_trained(cfg: &RunConfig, schema: &FeatureSchema) -> CliResult<(MlpModel, RunInfo)> {
    let dir = &cfg.output_dir;
    let model_path = dir.join(MODEL_FILE);
    let text = std::fs::read_to_string(&model_path).map_err(|e| CliError::io(&model_path, e))?;
    let model = load_model(&text)?;
    let run: RunInfo = io::read_json(&dir.join(RUN_FILE))?;
    let trained_hash = model.feature_schema_hash().unwrap_or("");
    if trained_hash != schema.hash() {
        return Err(CliError::Compatibility(format!(
            "model was trained on feature schema {trained_hash} but the configured inputs give {}",
            schema.hash()
        )));
    }
    if run.target != cfg.target {
        return Err(CliError::Compatibility(format!(
            "model forecasts {} but the run is configured for {}",
            run.target, cfg.target
        )));
    }
    Ok((model, run))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_a_seeded_partition() {
        let ids: BTreeSet<String> = (0..20).map(|i| format!("B{i:02}")).collect();
        let s = split_buildings(&ids, &SplitConfig::default(), 3).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (14, 3, 3));
        let mut all: Vec<String> = s.train.iter().chain(&s.validation).chain(&s.test).cloned().collect();
        all.sort();
        assert_eq!(all, ids.iter().cloned().collect::<Vec<_>>());
        assert_eq!(split_buildings(&ids, &SplitConfig::default(), 3).unwrap(), s);
        assert_ne!(split_buildings(&ids, &SplitConfig::default(), 4).unwrap(), s);
    }

    #[test]
    fn tiny_corpora_cannot_be_split() {
        let ids: BTreeSet<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        assert!(split_buildings(&ids, &SplitConfig::default(), 0).is_err());
    }
}
