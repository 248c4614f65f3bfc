//! Subcommand implementations over resolved configurations.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use uncervals_core::estimators::default_t_max;
use uncervals_core::evaluate::gof::gof_uniformity;
use uncervals_core::evaluate::vc::{vc_shatter_search, VcReport};
use uncervals_core::evaluate::{ConditionalCoverageCurve, GofReport, Method};
use uncervals_core::math::{mean, sample_sd, sort_f64};
use uncervals_core::rng::{derive_seed, STREAM_BOOT, STREAM_EVAL, STREAM_SPLIT};
use uncervals_core::{
    calibrate as calibrate_scores, make_split, prediction_set, simulate as simulate_data, CalibrationResult, Dataset,
    Error as CoreError, EstimatorSpec, FeatureMap, FittedModel, Mode, ModelKind, PredictionSet, Scenario, SimConfig,
    SplitPlan,
};

use crate::config::{manifest_path, Manifest, Sources};
use crate::error::{CliError, Result};
use crate::io::{
    fmt_f64, read_covariates, read_dataset, read_json, write_columns, write_dataset, write_json, write_predictions,
    write_true_times,
};
use crate::parallel;

/// Per-invocation settings that are not part of the recorded configuration.
#[derive(Debug, Clone, Default)]
pub struct Ctx {
    /// Explicit manifest path.
    pub manifest: Option<PathBuf>,
    /// Replays leave the original manifest untouched.
    pub replay: bool,
    pub threads: Option<usize>,
}

impl Ctx {
    fn record<T: Serialize>(&self, command: &str, seed: Option<u64>, cfg: &T, out: &Path, s: &Sources) -> Result<()> {
        if self.replay {
            return Ok(());
        }
        let config = serde_json::to_value(cfg).expect("configuration serialises");
        let path = manifest_path(self.manifest.as_deref(), out);
        Manifest::new(command, seed, config, s).write(&path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

fn summary(command: &str, outputs: &[&Path]) {
    let outputs: Vec<String> = outputs.iter().map(|p| p.display().to_string()).collect();
    println!("{}", json!({ "command": command, "outputs": outputs }));
}

fn scenario_of(s: &Sources) -> Result<Scenario> {
    Ok(s.get_as("scenario")?.unwrap_or(Scenario::AbsLink))
}

/// Preset, then file, then flags for the `sim` table.
fn resolve_sim(s: &Sources, default_n: usize) -> Result<(Scenario, SimConfig)> {
    let scenario = scenario_of(s)?;
    let preset = serde_json::to_value(scenario.config(default_n, 0)).expect("preset serialises");
    let sim: SimConfig = s.resolve_at("sim", preset)?;
    sim.validate()?;
    Ok((scenario, sim))
}

fn estimator_default(kind: ModelKind, truth: &SimConfig) -> EstimatorSpec {
    match kind {
        ModelKind::Turnbull => EstimatorSpec::turnbull(),
        ModelKind::Kturnbull => EstimatorSpec::kernel_turnbull(),
        ModelKind::Weibph => EstimatorSpec::weibull_ph(FeatureMap::Identity),
        ModelKind::Oracle => EstimatorSpec::oracle(truth.shape, truth.scale, truth.link.clone()),
    }
}

fn estimator_value(s: &Sources, fallback: ModelKind, truth: &SimConfig) -> Result<Value> {
    let kind = s.get_as("estimator.model")?.unwrap_or(fallback);
    Ok(serde_json::to_value(estimator_default(kind, truth)).expect("estimator serialises"))
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub scenario: Scenario,
    pub sim: SimConfig,
    pub out: PathBuf,
    #[serde(default)]
    pub truth: Option<PathBuf>,
}

fn truth_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "data".into());
    out.with_file_name(format!("{stem}.truth.csv"))
}

pub fn simulate(s: &Sources, ctx: &Ctx) -> Result<()> {
    let (scenario, sim) = resolve_sim(s, 500)?;
    let defaults = json!({ "scenario": scenario, "sim": sim });
    let (mut cfg, _): (SimulateConfig, _) = s.resolve(defaults)?;
    cfg.truth.get_or_insert_with(|| truth_path(&cfg.out));
    let out = simulate_data(&cfg.sim)?;
    write_dataset(&cfg.out, &out.dataset)?;
    let truth = cfg.truth.clone().unwrap();
    write_true_times(&truth, &out.true_times, &out.censoring)?;
    ctx.record("simulate", Some(cfg.sim.seed), &cfg, &cfg.out, s)?;
    summary("simulate", &[&cfg.out, &truth]);
    Ok(())
}

// ---------------------------------------------------------------- fit

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitConfig {
    pub data: PathBuf,
    pub estimator: EstimatorSpec,
    pub split_frac: f64,
    pub seed: u64,
    pub out: PathBuf,
}

/// Fitted model plus the split it was fitted on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub data: PathBuf,
    pub n_total: usize,
    pub covariate_dim: usize,
    pub split_frac: f64,
    pub seed: u64,
    pub split: SplitPlan,
    /// Survival-inversion horizon derived from the training rows.
    pub t_max: f64,
    pub estimator: EstimatorSpec,
    pub model: FittedModel,
}

pub fn load_artifact(path: &Path) -> Result<ModelArtifact> {
    let mut a: ModelArtifact = read_json(path)?;
    if let FittedModel::Turnbull(fit) = &mut a.model {
        fit.rebuild_cache();
    }
    Ok(a)
}

fn split_for(n: usize, split_frac: f64, seed: u64) -> Result<SplitPlan> {
    Ok(make_split(n, split_frac, derive_seed(seed, STREAM_SPLIT, 0))?)
}

pub fn fit(s: &Sources, ctx: &Ctx) -> Result<()> {
    let truth = Scenario::AbsLink.config(0, 0);
    let defaults = json!({
        "estimator": estimator_value(s, ModelKind::Turnbull, &truth)?,
        "split_frac": 0.5,
        "seed": 0,
    });
    let (cfg, _): (FitConfig, _) = s.resolve(defaults)?;
    let data = read_dataset(&cfg.data)?;
    let split = split_for(data.len(), cfg.split_frac, cfg.seed)?;
    let train = data.subset(&split.fit_indices)?;
    let model = cfg.estimator.fit(&train)?;
    let artifact = ModelArtifact {
        data: cfg.data.clone(),
        n_total: data.len(),
        covariate_dim: data.covariate_dim(),
        split_frac: cfg.split_frac,
        seed: cfg.seed,
        split,
        t_max: default_t_max(&train),
        estimator: cfg.estimator.clone(),
        model,
    };
    write_json(&cfg.out, &artifact)?;
    ctx.record("fit", Some(cfg.seed), &cfg, &cfg.out, s)?;
    summary("fit", &[&cfg.out]);
    Ok(())
}

// ---------------------------------------------------------------- calibrate

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrateConfig {
    pub model_file: PathBuf,
    #[serde(default)]
    pub data: Option<PathBuf>,
    pub alpha: f64,
    pub b: f64,
    pub mode: Mode,
    #[serde(default)]
    pub split_frac: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub t_max: Option<f64>,
    pub out: PathBuf,
}

pub fn calibrate(s: &Sources, ctx: &Ctx) -> Result<()> {
    let defaults = json!({ "alpha": 0.1, "b": 1.0, "mode": Mode::Estar });
    let (mut cfg, _): (CalibrateConfig, _) = s.resolve(defaults)?;
    let artifact = load_artifact(&cfg.model_file)?;
    let data_path = cfg.data.get_or_insert_with(|| artifact.data.clone()).clone();
    let split_frac = *cfg.split_frac.get_or_insert(artifact.split_frac);
    let seed = *cfg.seed.get_or_insert(artifact.seed);
    let t_max = *cfg.t_max.get_or_insert(artifact.t_max);

    let data = read_dataset(&data_path)?;
    if data.len() != artifact.n_total {
        return Err(CliError::Usage(format!(
            "{} has {} rows but the model was fitted on a dataset of {}",
            data_path.display(),
            data.len(),
            artifact.n_total
        )));
    }
    let split = split_for(data.len(), split_frac, seed)?;
    if split.fit_indices != artifact.split.fit_indices {
        return Err(CliError::Usage(
            "split differs from the one used for fitting; use the same --split-frac and --seed".into(),
        ));
    }
    let calib = data.subset(&split.calibration_indices)?;
    let result = calibrate_scores(
        &artifact.model,
        &calib,
        cfg.alpha,
        cfg.b,
        cfg.mode,
        derive_seed(seed, STREAM_BOOT, 0),
        t_max,
    )?;
    write_json(&cfg.out, &result)?;
    ctx.record("calibrate", Some(seed), &cfg, &cfg.out, s)?;
    summary("calibrate", &[&cfg.out]);
    Ok(())
}

// ---------------------------------------------------------------- predict

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictConfig {
    pub model_file: PathBuf,
    pub calibration: PathBuf,
    pub covariates: PathBuf,
    pub out: PathBuf,
    pub format: Format,
    #[serde(default)]
    pub two_sided: Option<bool>,
}

pub fn predict(s: &Sources, ctx: &Ctx) -> Result<()> {
    let (mut cfg, _): (PredictConfig, _) = s.resolve(json!({ "format": Format::Csv }))?;
    let artifact = load_artifact(&cfg.model_file)?;
    let cal: CalibrationResult = read_json(&cfg.calibration)?;
    let (header, xs) = read_covariates(&cfg.covariates)?;
    if let Some((row, x)) = xs.iter().enumerate().find(|(_, x)| x.len() != artifact.covariate_dim) {
        return Err(
            CoreError::DimensionMismatch { row: row + 1, expected: artifact.covariate_dim, found: x.len() }.into()
        );
    }
    let two_sided = *cfg.two_sided.get_or_insert(cal.b < 1.0);
    let sets: Vec<PredictionSet> =
        xs.iter().map(|x| prediction_set(&artifact.model, x, cal.q_hat, cal.b, cal.alpha, cal.t_max)).collect();
    match cfg.format {
        Format::Csv => write_predictions(&cfg.out, &header, &sets, two_sided)?,
        Format::Json => write_json(&cfg.out, &sets)?,
    }
    ctx.record("predict", Some(cal.seed), &cfg, &cfg.out, s)?;
    summary("predict", &[&cfg.out]);
    Ok(())
}

// ---------------------------------------------------------------- experiments

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Uncervals,
    Naive,
}

fn experiment_defaults(s: &Sources, fallback: ModelKind) -> Result<(SimConfig, Value)> {
    let (scenario, sim) = resolve_sim(s, 500)?;
    let v = json!({
        "scenario": scenario,
        "sim": sim,
        "estimator": estimator_value(s, fallback, &sim)?,
        "mode": Mode::Estar,
        "b": 1.0,
        "split_frac": 0.5,
        "alpha": 0.1,
        "seed": 0,
        "format": Format::Json,
    });
    Ok((sim, v))
}

fn write_report<T: Serialize>(out: &Path, format: Format, report: &T, table: &[(&str, Vec<String>)]) -> Result<()> {
    match format {
        Format::Json => write_json(out, report),
        Format::Csv => write_columns(out, table),
    }
}

fn col<T, F: Fn(&T) -> String>(items: &[T], f: F) -> Vec<String> {
    items.iter().map(f).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageConfig {
    pub scenario: Scenario,
    pub sim: SimConfig,
    pub method: MethodChoice,
    pub mode: Mode,
    pub b: f64,
    pub split_frac: f64,
    pub estimator: EstimatorSpec,
    pub alpha: f64,
    pub replications: usize,
    pub n_test: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    #[serde(default)]
    pub tidy: Option<PathBuf>,
}

fn method_of(choice: MethodChoice, mode: Mode, b: f64, split_frac: f64, estimator: &EstimatorSpec) -> Method {
    match choice {
        MethodChoice::Uncervals => {
            Method::Uncervals { mode, b, fit_fraction: split_frac, estimator: estimator.clone() }
        }
        MethodChoice::Naive => Method::NaiveQuantile { fit_fraction: split_frac, estimator: estimator.clone() },
    }
}

pub fn coverage(s: &Sources, ctx: &Ctx) -> Result<()> {
    let (_, mut defaults) = experiment_defaults(s, ModelKind::Weibph)?;
    defaults["method"] = json!(MethodChoice::Uncervals);
    defaults["replications"] = json!(100);
    defaults["n_test"] = json!(200);
    let (cfg, _): (CoverageConfig, _) = s.resolve(defaults)?;
    let method = method_of(cfg.method, cfg.mode, cfg.b, cfg.split_frac, &cfg.estimator);
    let report =
        parallel::marginal_coverage(&method, &cfg.sim, cfg.alpha, cfg.replications, cfg.n_test, cfg.seed, ctx.threads)?;
    let table = [
        ("rep", (0..report.coverages.len()).map(|i| i.to_string()).collect()),
        ("coverage", col(&report.coverages, |c| fmt_f64(*c))),
    ];
    write_report(&cfg.out, cfg.format, &report, &table)?;
    if let Some(t) = &cfg.tidy {
        write_columns(t, &table)?;
    }
    ctx.record("coverage", Some(cfg.seed), &cfg, &cfg.out, s)?;
    summary("coverage", &[&cfg.out]);
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CondcovConfig {
    pub scenario: Scenario,
    pub sim: SimConfig,
    pub mode: Mode,
    pub b: f64,
    pub split_frac: f64,
    pub estimator: EstimatorSpec,
    pub alpha: f64,
    pub replications: usize,
    pub n_eval: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    #[serde(default)]
    pub tidy: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodErr {
    pub method: String,
    pub errs: Vec<f64>,
    pub mean_err: f64,
    pub sd_err: f64,
    pub binned_errs: Vec<f64>,
    pub mean_binned_err: f64,
    pub marginals: Vec<f64>,
    /// Smoothed curve of the first replication.
    pub curve: ConditionalCoverageCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondcovReport {
    pub alpha: f64,
    pub n: usize,
    pub n_eval: usize,
    pub replications: usize,
    pub seed: u64,
    pub methods: Vec<MethodErr>,
}

impl CondcovReport {
    pub fn from_runs(
        methods: &[Method],
        alpha: f64,
        n: usize,
        n_eval: usize,
        seed: u64,
        runs: &[Vec<ConditionalCoverageCurve>],
    ) -> Self {
        let summaries = methods
            .iter()
            .enumerate()
            .map(|(m, method)| {
                let errs: Vec<f64> = runs.iter().map(|r| r[m].err).collect();
                let binned_errs: Vec<f64> = runs.iter().map(|r| r[m].binned_err).collect();
                MethodErr {
                    method: method.label(),
                    mean_err: mean(&errs),
                    sd_err: sample_sd(&errs),
                    mean_binned_err: mean(&binned_errs),
                    marginals: runs.iter().map(|r| r[m].marginal).collect(),
                    curve: runs[0][m].clone(),
                    errs,
                    binned_errs,
                }
            })
            .collect();
        Self { alpha, n, n_eval, replications: runs.len(), seed, methods: summaries }
    }
}

pub fn condcov(s: &Sources, ctx: &Ctx) -> Result<()> {
    let (_, mut defaults) = experiment_defaults(s, ModelKind::Weibph)?;
    defaults["replications"] = json!(1);
    defaults["n_eval"] = json!(5000);
    let (cfg, _): (CondcovConfig, _) = s.resolve(defaults)?;
    if cfg.replications == 0 {
        return Err(CliError::Usage("need at least one replication".into()));
    }
    let methods = [
        method_of(MethodChoice::Uncervals, cfg.mode, cfg.b, cfg.split_frac, &cfg.estimator),
        method_of(MethodChoice::Naive, cfg.mode, cfg.b, cfg.split_frac, &cfg.estimator),
    ];
    let runs = parallel::conditional_coverage(
        &methods,
        &cfg.sim,
        cfg.alpha,
        cfg.n_eval,
        cfg.replications,
        cfg.seed,
        ctx.threads,
    )?;
    let report = CondcovReport::from_runs(&methods, cfg.alpha, cfg.sim.n, cfg.n_eval, cfg.seed, &runs);

    let mut method_col = Vec::new();
    let mut rep_col = Vec::new();
    let mut err_col = Vec::new();
    let mut binned_col = Vec::new();
    for m in &report.methods {
        for (i, (e, b)) in m.errs.iter().zip(&m.binned_errs).enumerate() {
            method_col.push(m.method.clone());
            rep_col.push(i.to_string());
            err_col.push(fmt_f64(*e));
            binned_col.push(fmt_f64(*b));
        }
    }
    let table = [("method", method_col), ("rep", rep_col), ("err", err_col), ("binned_err", binned_col)];
    write_report(&cfg.out, cfg.format, &report, &table)?;
    if let Some(t) = &cfg.tidy {
        let mut method_col = Vec::new();
        let mut x_col = Vec::new();
        let mut pi_col = Vec::new();
        for m in &report.methods {
            for (x, p) in m.curve.grid.iter().zip(&m.curve.pi_hat) {
                method_col.push(m.method.clone());
                x_col.push(fmt_f64(*x));
                pi_col.push(fmt_f64(*p));
            }
        }
        write_columns(t, &[("method", method_col), ("x", x_col), ("pi_hat", pi_col)])?;
    }
    ctx.record("condcov", Some(cfg.seed), &cfg, &cfg.out, s)?;
    summary("condcov", &[&cfg.out]);
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GofConfig {
    #[serde(default)]
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub model_file: Option<PathBuf>,
    pub scenario: Scenario,
    pub sim: SimConfig,
    pub estimator: EstimatorSpec,
    pub split_frac: f64,
    pub replications: usize,
    pub level: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    #[serde(default)]
    pub tidy: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofSimReport {
    pub estimator: String,
    pub n: usize,
    pub replications: usize,
    pub level: f64,
    pub seed: u64,
    pub rejections: usize,
    pub rejection_rate: f64,
    pub median_p_value: f64,
    pub statistics: Vec<f64>,
    pub p_values: Vec<f64>,
}

impl GofSimReport {
    pub fn from_reports(estimator: &EstimatorSpec, n: usize, level: f64, seed: u64, reports: &[GofReport]) -> Self {
        let p_values: Vec<f64> = reports.iter().map(|r| r.p_value).collect();
        let rejections = p_values.iter().filter(|p| **p < level).count();
        let mut sorted = p_values.clone();
        sort_f64(&mut sorted);
        let median = if sorted.is_empty() {
            f64::NAN
        } else if sorted.len() % 2 == 1 {
            sorted[sorted.len() / 2]
        } else {
            0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
        };
        Self {
            estimator: estimator.kind().as_str().into(),
            n,
            replications: reports.len(),
            level,
            seed,
            rejections,
            rejection_rate: rejections as f64 / reports.len().max(1) as f64,
            median_p_value: median,
            statistics: reports.iter().map(|r| r.statistic).collect(),
            p_values,
        }
    }
}

fn ecdf_table(r: &GofReport) -> [(&'static str, Vec<String>); 2] {
    [("t", col(&r.grid, |v| fmt_f64(*v))), ("ecdf", col(&r.ecdf, |v| fmt_f64(*v)))]
}

pub fn gof(s: &Sources, ctx: &Ctx) -> Result<()> {
    let (_, mut defaults) = experiment_defaults(s, ModelKind::Oracle)?;
    defaults["replications"] = json!(100);
    defaults["level"] = json!(0.05);
    let (mut cfg, _): (GofConfig, _) = s.resolve(defaults)?;

    if let Some(model_file) = cfg.model_file.clone() {
        let artifact = load_artifact(&model_file)?;
        let data_path = cfg.data.get_or_insert_with(|| artifact.data.clone()).clone();
        let data = read_dataset(&data_path)?;
        if data.len() != artifact.n_total {
            return Err(CliError::Usage("dataset does not match the model artifact".into()));
        }
        let calib: Dataset = data.subset(&artifact.split.calibration_indices)?;
        let report = gof_uniformity(&artifact.model, &calib, derive_seed(cfg.seed, STREAM_EVAL, 0))?;
        let table = [
            ("n", vec![report.n.to_string()]),
            ("statistic", vec![fmt_f64(report.statistic)]),
            ("p_value", vec![fmt_f64(report.p_value)]),
        ];
        write_report(&cfg.out, cfg.format, &report, &table)?;
        if let Some(t) = &cfg.tidy {
            write_columns(t, &ecdf_table(&report))?;
        }
    } else {
        if cfg.replications == 0 {
            return Err(CliError::Usage("need at least one replication".into()));
        }
        let reports = parallel::gof(&cfg.estimator, &cfg.sim, cfg.split_frac, cfg.replications, cfg.seed, ctx.threads)?;
        let report = GofSimReport::from_reports(&cfg.estimator, cfg.sim.n, cfg.level, cfg.seed, &reports);
        let table = [
            ("rep", (0..reports.len()).map(|i| i.to_string()).collect()),
            ("statistic", col(&report.statistics, |v| fmt_f64(*v))),
            ("p_value", col(&report.p_values, |v| fmt_f64(*v))),
            ("reject", col(&report.p_values, |p| (*p < cfg.level).to_string())),
        ];
        write_report(&cfg.out, cfg.format, &report, &table)?;
        if let Some(t) = &cfg.tidy {
            write_columns(t, &ecdf_table(&reports[0]))?;
        }
    }
    ctx.record("gof", Some(cfg.seed), &cfg, &cfg.out, s)?;
    summary("gof", &[&cfg.out]);
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VccheckConfig {
    pub budget: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VccheckReport {
    pub budget: usize,
    pub seed: u64,
    pub two_points: VcReport,
    pub three_points: VcReport,
}

pub fn vccheck(s: &Sources, ctx: &Ctx) -> Result<()> {
    let (cfg, _): (VccheckConfig, _) = s.resolve(json!({ "budget": 100_000, "seed": 0, "format": Format::Json }))?;
    if cfg.budget == 0 {
        return Err(CliError::Usage("budget must be at least 1".into()));
    }
    let report = VccheckReport {
        budget: cfg.budget,
        seed: cfg.seed,
        two_points: vc_shatter_search(2, cfg.budget, cfg.seed),
        three_points: vc_shatter_search(3, cfg.budget, cfg.seed),
    };
    let rows = [&report.two_points, &report.three_points];
    let table = [
        ("points", col(&rows, |r| r.points.to_string())),
        ("max_dichotomies", col(&rows, |r| r.max_dichotomies.to_string())),
        ("shattered", col(&rows, |r| r.shattered.to_string())),
    ];
    write_report(&cfg.out, cfg.format, &report, &table)?;
    ctx.record("vccheck", Some(cfg.seed), &cfg, &cfg.out, s)?;
    summary("vccheck", &[&cfg.out]);
    Ok(())
}
