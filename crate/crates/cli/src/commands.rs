use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};
use zigcast_core::baseline::{baseline_predict, index_archetypes, match_buildings, BaselineMatch};
use zigcast_core::eval::{
    backtest_report, feature_importance, ks_statistic, pit_histogram, pit_values, segment_errors, BacktestInput,
    BacktestReport, BacktestRow, PitMode, SegmentStats, PREDICTIVE_QUANTILES,
};
use zigcast_core::features::{assemble_matrix, resolve_heights, FeatureContext, FeatureSchema};
use zigcast_core::heat::EtaFit;
use zigcast_core::io::{self, csv_to_string, to_json_string};
use zigcast_core::linkage::{LinkResult, MatchKind};
use zigcast_core::nn::{fit, save_model, GridPointResult, MlpModel, TrainHistory};
use zigcast_core::synth::{files, generate, write_corpus, SyntheticSpec};
use zigcast_core::zig::{link_transform, zig_mean, zig_quantile, ZigParams};
use zigcast_core::{ConsumptionRecord, Hour, Target};

use crate::cli::{CalibrationArgs, Cli, Command, FitEtaArgs, Preset, RunArgs, SynthArgs};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::lock::RunLock;
use crate::manifest::{manifest_path, Manifest};
use crate::pipeline::{
    assemble, load_context, load_observations, load_trained, resolve_eta, split_buildings, Dataset,
    RunInfo, SplitRows, MODEL_FILE, RUN_FILE,
};

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Train(a) => train(&load_config(&a)?),
        Command::Predict(a) => predict(&load_config(&a)?),
        Command::Evaluate(a) => evaluate(&calibration_config(&a)?),
        Command::Calibrate(a) => calibrate(&calibration_config(&a)?),
        Command::Importance(a) => importance(&load_config(&a)?),
        Command::MatchAddresses(a) => match_addresses(&load_config(&a)?),
        Command::MatchBaseline(a) => match_baseline(&load_config(&a)?),
        Command::FitEta(a) => fit_eta_cmd(&a),
        Command::Synth(a) => synth(&a),
    }
}

pub fn load_config(args: &RunArgs) -> CliResult<RunConfig> {
    let path = args.config.as_deref().ok_or_else(|| CliError::config("--config", "a config file is required"))?;
    RunConfig::load(path, &args.overrides())
}

fn calibration_config(args: &CalibrationArgs) -> CliResult<RunConfig> {
    let mut cfg = load_config(&args.run)?;
    if let Some(m) = args.pit_mode {
        cfg.evaluate.pit_mode = m.into();
    }
    Ok(cfg)
}

fn write_text(dir: &Path, name: &str, text: &str) -> CliResult<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> CliResult<()> {
    write_text(dir, name, &to_json_string(value)?)
}

fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> CliResult<()> {
    write_text(dir, name, &csv_to_string(rows)?)
}

// Manifest for a subcommand that reuses a trained run; flags input drift.
fn manifest_against_training(sub: &str, cfg: &RunConfig) -> CliResult<Manifest> {
    let mut m = Manifest::new(sub, Some(cfg), cfg.seed)?;
    let train_manifest = manifest_path(&cfg.output_dir, "train");
    if train_manifest.is_file() {
        m.compare_with(&Manifest::read(&train_manifest)?);
    }
    Ok(m)
}

#[derive(Serialize)]
struct TrainingRecord<'a> {
    history: &'a TrainHistory,
    grid: &'a [GridPointResult],
}

pub const TRAIN_OUTPUTS: [&str; 4] = [MODEL_FILE, RUN_FILE, "train_history.json", "schema.json"];

pub fn train(cfg: &RunConfig) -> CliResult<()> {
    let ctx = load_context(cfg, "train")?;
    let schema = ctx.standard_schema();
    let eta = resolve_eta(cfg)?;
    let records = load_observations(cfg, &ctx, eta.as_ref(), "train")?;
    let ids: BTreeSet<String> = records.iter().map(|r| r.building_id.clone()).collect();
    let split = split_buildings(&ids, &cfg.split, cfg.seed)?;
    let train_set = assemble(&ctx, &schema, &records, &split.train)?;
    let val_set = assemble(&ctx, &schema, &records, &split.validation)?;
    let n_test = records.iter().filter(|r| split.test.binary_search(&r.building_id).is_ok()).count();
    info!("training on {} rows, validating on {}, {} held out", train_set.y.len(), val_set.y.len(), n_test);

    let _lock = RunLock::acquire(&cfg.output_dir)?;
    let outcome = fit(&train_set.x, &train_set.y, &val_set.x, &val_set.y, &cfg.train)?;
    let model = outcome.model.with_feature_schema(schema.names(), schema.hash().to_string());
    let dir = &cfg.output_dir;
    write_text(dir, MODEL_FILE, &save_model(&model)?)?;
    let run = RunInfo {
        target: cfg.target,
        seed: cfg.seed,
        eta,
        feature_schema_hash: schema.hash().to_string(),
        feature_names: schema.names(),
        rows: SplitRows { train: train_set.y.len(), validation: val_set.y.len(), test: n_test },
        split,
    };
    write_json(dir, RUN_FILE, &run)?;
    write_json(dir, "train_history.json", &TrainingRecord { history: &outcome.history, grid: &outcome.grid })?;
    write_json(dir, "schema.json", &schema)?;
    Manifest::new("train", Some(cfg), cfg.seed)?.finish(dir, &TRAIN_OUTPUTS)?;
    Ok(())
}

struct TestSet {
    ctx: FeatureContext,
    schema: FeatureSchema,
    model: MlpModel,
    run: RunInfo,
    data: Dataset,
}

fn load_test_set(cfg: &RunConfig, needed_by: &str) -> CliResult<TestSet> {
    let ctx = load_context(cfg, needed_by)?;
    let schema = ctx.standard_schema();
    let (model, run) = load_trained(cfg, &schema)?;
    let records = load_observations(cfg, &ctx, run.eta.as_ref(), needed_by)?;
    let data = assemble(&ctx, &schema, &records, &run.split.test)?;
    if data.y.is_empty() {
        return Err(zigcast_core::Error::invalid("the test split has no observations").into());
    }
    Ok(TestSet { ctx, schema, model, run, data })
}

fn predictive_params(model: &MlpModel, data: &Dataset) -> CliResult<Vec<ZigParams>> {
    (0..data.x.rows())
        .map(|i| Ok(link_transform(model.predict_raw(data.x.row(i))?)?))
        .collect()
}

/// Archetype baseline for the test buildings that matched one.
struct Baseline {
    matches: Vec<BaselineMatch>,
    records: Vec<ConsumptionRecord>,
}

fn load_baseline(cfg: &RunConfig, ctx: &FeatureContext, data: &Dataset) -> CliResult<Option<Baseline>> {
    let (Some(pumas), Some(meta), Some(profiles)) =
        (&cfg.inputs.pumas, &cfg.inputs.archetypes, &cfg.inputs.archetype_profiles)
    else {
        info!("no archetype inputs configured; skipping the baseline comparison");
        return Ok(None);
    };
    let regions = io::read_pumas(pumas)?;
    let archetypes = io::read_archetypes(meta, profiles)?;
    let heights: Vec<f64> = ctx.heights.iter().map(|h| h.height).collect();
    let matches = match_buildings(&ctx.buildings, &heights, &regions, &archetypes)?;
    let by_id = index_archetypes(&archetypes);
    let mut hours: BTreeMap<&str, Vec<Hour>> = BTreeMap::new();
    for (b, h) in &data.keys {
        hours.entry(b.as_str()).or_default().push(*h);
    }
    let mut records = Vec::new();
    for m in &matches {
        let (Some(aid), Some(hs)) = (&m.archetype_id, hours.get(m.building_id.as_str())) else { continue };
        let values = baseline_predict(by_id[aid.as_str()], hs, cfg.target)?;
        records.extend(hs.iter().zip(values).map(|(h, v)| ConsumptionRecord {
            building_id: m.building_id.clone(),
            timestamp: *h,
            value: v,
        }));
    }
    Ok(Some(Baseline { matches, records }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BaselineComparison {
    pub test_buildings: usize,
    pub matched_buildings: usize,
    /// Test buildings without a baseline, by reason.
    pub exclusions: BTreeMap<String, usize>,
    pub report: BacktestReport,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub target: Target,
    pub eta: Option<f64>,
    pub feature_schema_hash: String,
    pub model: BacktestReport,
    pub baseline: Option<BaselineComparison>,
}

#[derive(Debug, Serialize)]
struct Boxplots {
    model: SegmentStats,
    matched_model: Option<SegmentStats>,
    matched_baseline: Option<SegmentStats>,
}

#[derive(Debug, Serialize)]
struct HistogramBin {
    lower: f64,
    upper: f64,
    count: usize,
}

fn histogram_rows(values: &[f64], bins: usize) -> Vec<HistogramBin> {
    pit_histogram(values, bins)
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin { lower: i as f64 / bins as f64, upper: (i + 1) as f64 / bins as f64, count })
        .collect()
}

pub const EVALUATE_OUTPUTS: [&str; 4] = ["report.json", "backtest.csv", "boxplots.json", "pit_histogram.csv"];

pub fn evaluate(cfg: &RunConfig) -> CliResult<()> {
    let mut manifest = manifest_against_training("evaluate", cfg)?;
    let TestSet { ctx, schema, model, run, data } = load_test_set(cfg, "evaluate")?;
    let mode = cfg.evaluate.pit_mode;
    let input = BacktestInput {
        keys: &data.keys,
        features: &data.x,
        observations: &data.records,
        baseline: None,
        pit_mode: mode,
        seed: cfg.seed,
    };
    let (report, mut rows) = backtest_report(&model, &input)?;

    let mut comparison = None;
    let mut matched_baseline = None;
    let mut matched_model = None;
    if let Some(base) = load_baseline(cfg, &ctx, &data)? {
        let matched: BTreeSet<&str> = base.records.iter().map(|r| r.building_id.as_str()).collect();
        let idx: Vec<usize> = (0..data.keys.len()).filter(|&i| matched.contains(data.keys[i].0.as_str())).collect();
        let mut exclusions = BTreeMap::new();
        for m in base.matches.iter().filter(|m| run.split.test.binary_search(&m.building_id).is_ok()) {
            if let Some(reason) = &m.exclusion {
                *exclusions.entry(reason.clone()).or_insert(0) += 1;
            }
        }
        if idx.is_empty() {
            warn!("no test building matched an archetype; skipping the baseline comparison");
        } else {
            let keys: Vec<(String, Hour)> = idx.iter().map(|&i| data.keys[i].clone()).collect();
            let x = data.x.select_rows(&idx);
            let obs: Vec<ConsumptionRecord> = idx.iter().map(|&i| data.records[i].clone()).collect();
            let input = BacktestInput {
                keys: &keys,
                features: &x,
                observations: &obs,
                baseline: Some(&base.records),
                pit_mode: mode,
                seed: cfg.seed,
            };
            let (sub, sub_rows) = backtest_report(&model, &input)?;
            let base_values: BTreeMap<(&str, Hour), f64> =
                base.records.iter().map(|r| ((r.building_id.as_str(), r.timestamp), r.value)).collect();
            for row in rows.iter_mut() {
                row.baseline = base_values.get(&(row.building_id.as_str(), row.timestamp)).copied();
            }
            let (means, observed, baseline): (Vec<f64>, Vec<f64>, Vec<f64>) = sub_rows
                .iter()
                .map(|r: &BacktestRow| (r.mean, r.observed, r.baseline.unwrap_or(f64::NAN)))
                .fold((vec![], vec![], vec![]), |(mut a, mut b, mut c), (x, y, z)| {
                    a.push(x);
                    b.push(y);
                    c.push(z);
                    (a, b, c)
                });
            matched_model = Some(segment_errors(&means, &observed)?);
            matched_baseline = Some(segment_errors(&baseline, &observed)?);
            comparison = Some(BaselineComparison {
                test_buildings: run.split.test.len(),
                matched_buildings: matched.len(),
                exclusions,
                report: sub,
            });
        }
    }

    let params = predictive_params(&model, &data)?;
    let pit = pit_values(&params, &data.y, mode, cfg.seed)?;
    let dir = &cfg.output_dir;
    let _lock = RunLock::acquire(dir)?;
    let full = EvaluationReport {
        target: run.target,
        eta: run.eta.as_ref().map(|e| e.eta),
        feature_schema_hash: schema.hash().to_string(),
        model: report.clone(),
        baseline: comparison,
    };
    write_json(dir, "report.json", &full)?;
    write_csv(dir, "backtest.csv", &rows)?;
    write_json(dir, "boxplots.json", &Boxplots { model: report.segments, matched_model, matched_baseline })?;
    write_csv(dir, "pit_histogram.csv", &histogram_rows(&pit, cfg.evaluate.pit_bins))?;
    manifest.add_input("model", &dir.join(MODEL_FILE))?;
    manifest.finish(dir, &EVALUATE_OUTPUTS)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub pit_mode: PitMode,
    pub n: usize,
    pub n_zero: usize,
    pub ks_statistic: f64,
    pub histogram: Vec<usize>,
}

pub fn calibrate(cfg: &RunConfig) -> CliResult<()> {
    let mut manifest = manifest_against_training("calibrate", cfg)?;
    let TestSet { model, data, .. } = load_test_set(cfg, "calibrate")?;
    let params = predictive_params(&model, &data)?;
    let mode = cfg.evaluate.pit_mode;
    let pit = pit_values(&params, &data.y, mode, cfg.seed)?;
    let report = CalibrationReport {
        pit_mode: mode,
        n: pit.len(),
        n_zero: data.y.iter().filter(|y| **y == 0.0).count(),
        ks_statistic: ks_statistic(&pit)?,
        histogram: pit_histogram(&pit, cfg.evaluate.pit_bins),
    };
    let dir = &cfg.output_dir;
    let _lock = RunLock::acquire(dir)?;
    write_json(dir, "calibration.json", &report)?;
    write_csv(dir, "calibration_histogram.csv", &histogram_rows(&pit, cfg.evaluate.pit_bins))?;
    manifest.add_input("model", &dir.join(MODEL_FILE))?;
    manifest.finish(dir, &["calibration.json", "calibration_histogram.csv"])?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ImportanceRow<'a> {
    rank: usize,
    feature: &'a str,
    median_abs: f64,
    min: f64,
    q1: f64,
    median: f64,
    q3: f64,
    max: f64,
    lower_whisker: f64,
    upper_whisker: f64,
    outliers: usize,
}

pub fn importance(cfg: &RunConfig) -> CliResult<()> {
    let mut manifest = manifest_against_training("importance", cfg)?;
    let TestSet { schema, model, data, .. } = load_test_set(cfg, "importance")?;
    let imp = feature_importance(&model, &data.x, &schema.names())?;
    let rows: Vec<ImportanceRow<'_>> = imp
        .features
        .iter()
        .map(|f| ImportanceRow {
            rank: f.rank,
            feature: &f.feature,
            median_abs: f.median_abs,
            min: f.stats.min,
            q1: f.stats.q1,
            median: f.stats.median,
            q3: f.stats.q3,
            max: f.stats.max,
            lower_whisker: f.stats.lower_whisker,
            upper_whisker: f.stats.upper_whisker,
            outliers: f.stats.outliers,
        })
        .collect();
    let dir = &cfg.output_dir;
    let _lock = RunLock::acquire(dir)?;
    write_csv(dir, "importance.csv", &rows)?;
    write_json(dir, "importance.json", &imp)?;
    manifest.add_input("model", &dir.join(MODEL_FILE))?;
    manifest.finish(dir, &["importance.csv", "importance.json"])?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct PredictionRow<'a> {
    building_id: &'a str,
    timestamp: Hour,
    p: f64,
    k: f64,
    theta: f64,
    mean: f64,
    q05: f64,
    q25: f64,
    q50: f64,
    q75: f64,
    q95: f64,
}

/// Hours for which every weather cell has the current value and both lags.
fn forecast_hours(ctx: &FeatureContext) -> Vec<Hour> {
    let cells = &ctx.weather.cells;
    let first = cells.iter().map(|c| c.start.unix_hours() + 2).max();
    let last = cells.iter().map(|c| c.start.unix_hours() + c.len() as i64 - 1).min();
    match (first, last) {
        (Some(a), Some(b)) if a <= b => (a..=b).map(Hour::from_unix_hours).collect(),
        _ => Vec::new(),
    }
}

pub fn predict(cfg: &RunConfig) -> CliResult<()> {
    let mut manifest = manifest_against_training("predict", cfg)?;
    let ctx = load_context(cfg, "predict")?;
    let schema = ctx.standard_schema();
    let (model, _) = load_trained(cfg, &schema)?;
    let hours = forecast_hours(&ctx);
    if hours.is_empty() {
        return Err(zigcast_core::Error::invalid("weather covers no hour with both lags available").into());
    }
    let keys: Vec<(usize, Hour)> =
        (0..ctx.buildings.len()).flat_map(|b| hours.iter().map(move |h| (b, *h))).collect();
    let x = assemble_matrix(&ctx, &keys, &schema)?;
    let mut rows = Vec::with_capacity(keys.len());
    for (i, (b, h)) in keys.iter().enumerate() {
        let p = link_transform(model.predict_raw(x.row(i))?)?;
        let mut q = [0.0; 5];
        for (slot, level) in q.iter_mut().zip(PREDICTIVE_QUANTILES) {
            *slot = zig_quantile(level, &p)?;
        }
        rows.push(PredictionRow {
            building_id: &ctx.buildings[*b].building_id,
            timestamp: *h,
            p: p.p(),
            k: p.k(),
            theta: p.theta(),
            mean: zig_mean(&p),
            q05: q[0],
            q25: q[1],
            q50: q[2],
            q75: q[3],
            q95: q[4],
        });
    }
    let dir = &cfg.output_dir;
    let _lock = RunLock::acquire(dir)?;
    write_csv(dir, "predictions.csv", &rows)?;
    manifest.add_input("model", &dir.join(MODEL_FILE))?;
    manifest.finish(dir, &["predictions.csv"])?;
    Ok(())
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct LinkageSummary {
    pub addresses: usize,
    pub exact: usize,
    pub fuzzy: usize,
    pub unmatched: BTreeMap<String, usize>,
    pub threshold: u8,
}

pub fn summarize_links(links: &[LinkResult], threshold: u8) -> LinkageSummary {
    let mut s = LinkageSummary { addresses: links.len(), threshold, ..Default::default() };
    for l in links {
        match (l.match_kind, l.stage) {
            (Some(MatchKind::Exact), _) => s.exact += 1,
            (Some(MatchKind::Fuzzy), _) => s.fuzzy += 1,
            (None, stage) => {
                let key = stage.map(|st| serde_json::to_value(st).ok().and_then(|v| v.as_str().map(String::from)));
                *s.unmatched.entry(key.flatten().unwrap_or_else(|| "unknown".into())).or_insert(0) += 1;
            }
        }
    }
    s
}

pub fn match_addresses(cfg: &RunConfig) -> CliResult<()> {
    let buildings = io::read_buildings(cfg.require("buildings", "match-addresses")?)?;
    let ctx_links = {
        let ami = io::read_ami_addresses(cfg.require("ami_addresses", "match-addresses")?)?;
        zigcast_core::linkage::link_addresses(&ami, &buildings, cfg.similarity_threshold)
    };
    let dir = &cfg.output_dir;
    let _lock = RunLock::acquire(dir)?;
    write_csv(dir, "links.csv", &ctx_links)?;
    write_json(dir, "linkage_summary.json", &summarize_links(&ctx_links, cfg.similarity_threshold))?;
    Manifest::new("match-addresses", Some(cfg), cfg.seed)?.finish(dir, &["links.csv", "linkage_summary.json"])?;
    Ok(())
}

pub fn match_baseline(cfg: &RunConfig) -> CliResult<()> {
    let buildings = io::read_buildings(cfg.require("buildings", "match-baseline")?)?;
    let regions = io::read_pumas(cfg.require("pumas", "match-baseline")?)?;
    let archetypes = io::read_archetypes(
        cfg.require("archetypes", "match-baseline")?,
        cfg.require("archetype_profiles", "match-baseline")?,
    )?;
    let heights: Vec<f64> = resolve_heights(&buildings)?.iter().map(|h| h.height).collect();
    let matches = match_buildings(&buildings, &heights, &regions, &archetypes)?;
    let dir = &cfg.output_dir;
    let _lock = RunLock::acquire(dir)?;
    write_csv(dir, "matches.csv", &matches)?;
    Manifest::new("match-baseline", Some(cfg), cfg.seed)?.finish(dir, &["matches.csv"])?;
    Ok(())
}

pub fn fit_eta_cmd(args: &FitEtaArgs) -> CliResult<()> {
    let cfg = args.run.config.as_ref().map(|_| load_config(&args.run)).transpose()?;
    let input: PathBuf = match (&args.input, &cfg) {
        (Some(p), _) => p.clone(),
        (None, Some(c)) => c.require("eta_calibration", "fit-eta")?.to_path_buf(),
        (None, None) => return Err(CliError::config("--input", "give --input or a config with inputs.eta_calibration")),
    };
    let dir: PathBuf = match (&args.run.out, &cfg) {
        (Some(o), _) => o.clone(),
        (None, Some(c)) => c.output_dir.clone(),
        (None, None) => PathBuf::from("."),
    };
    let fit: EtaFit = crate::pipeline::fit_eta_file(&input)?;
    let _lock = RunLock::acquire(&dir)?;
    write_json(&dir, "eta.json", &fit)?;
    let mut m = Manifest::new("fit-eta", cfg.as_ref(), cfg.as_ref().map_or(0, |c| c.seed))?;
    if args.input.is_some() {
        m.add_input("--input", &input)?;
    }
    m.finish(&dir, &["eta.json"])?;
    Ok(())
}

fn synth_spec(args: &SynthArgs) -> CliResult<SyntheticSpec> {
    let mut spec = match &args.spec {
        Some(p) => io::read_json::<SyntheticSpec>(p)?,
        None => match args.preset {
            Preset::Desk => SyntheticSpec::default(),
            Preset::Full => SyntheticSpec { n_buildings: 9000, hours: 8760, ..Default::default() },
        },
    };
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    if let Some(n) = args.n_buildings {
        spec.n_buildings = n;
    }
    if let Some(h) = args.hours {
        spec.hours = h;
    }
    spec.validate().map_err(|e| CliError::config("spec", e.to_string()))?;
    Ok(spec)
}

/// Run config for a corpus written by `synth`, with paths relative to it.
pub fn synth_config(target: Target, seed: u64, utc_offset_hours: i32) -> String {
    format!(
        "seed = {seed}\n\
         target = \"{target}\"\n\
         output_dir = \"runs/{target}\"\n\
         similarity_threshold = {threshold}\n\
         \n\
         [inputs]\n\
         buildings = \"{b}\"\n\
         weather = \"{w}\"\n\
         land_cover = \"{lc}\"\n\
         nightlights = \"{nl}\"\n\
         internet = \"{inet}\"\n\
         ami_addresses = \"{ami}\"\n\
         consumption_heating = \"{ch}\"\n\
         consumption_electricity = \"{ce}\"\n\
         pumas = \"{pu}\"\n\
         archetypes = \"{ar}\"\n\
         archetype_profiles = \"{ap}\"\n\
         eta_calibration = \"{eta}\"\n\
         \n\
         [features]\n\
         utc_offset_hours = {utc_offset_hours}\n\
         \n\
         [split]\n\
         train = 0.7\n\
         validation = 0.15\n\
         \n\
         [train]\n\
         max_epochs = 200\n\
         dropout_grid = [0.0, 0.02, 0.04, 0.06, 0.08]\n",
        threshold = zigcast_core::linkage::DEFAULT_THRESHOLD,
        b = files::BUILDINGS,
        w = files::WEATHER,
        lc = files::LAND_COVER,
        nl = files::NIGHTLIGHTS,
        inet = files::INTERNET,
        ami = files::AMI_ADDRESSES,
        ch = files::CONSUMPTION_HEATING,
        ce = files::CONSUMPTION_ELECTRICITY,
        pu = files::PUMAS,
        ar = files::ARCHETYPES,
        ap = files::ARCHETYPE_PROFILES,
        eta = files::ETA_CALIBRATION,
    )
}

pub fn synth(args: &SynthArgs) -> CliResult<()> {
    let spec = synth_spec(args)?;
    let dir = &args.out;
    let _lock = RunLock::acquire(dir)?;
    let corpus = generate(&spec)?;
    write_corpus(&corpus, dir)?;
    write_text(dir, "config.toml", &synth_config(Target::Heating, spec.seed, spec.utc_offset_hours))?;
    write_text(dir, "config_electricity.toml", &synth_config(Target::Electricity, spec.seed, spec.utc_offset_hours))?;
    let outputs = [
        files::BUILDINGS,
        files::LAND_COVER,
        files::NIGHTLIGHTS,
        files::INTERNET,
        files::WEATHER,
        files::AMI_ADDRESSES,
        files::CONSUMPTION_HEATING,
        files::CONSUMPTION_ELECTRICITY,
        files::PUMAS,
        files::ARCHETYPES,
        files::ARCHETYPE_PROFILES,
        files::ETA_CALIBRATION,
        files::TRUTH_HEATING,
        files::TRUTH_ELECTRICITY,
        files::SPEC,
        "config.toml",
        "config_electricity.toml",
    ];
    Manifest::new("synth", None, spec.seed)?.finish(dir, &outputs)?;
    Ok(())
}
