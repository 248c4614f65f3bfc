//! Command-line definitions and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{self, Ctx};
use crate::config::{Manifest, Overrides, Sources};
use crate::error::{CliError, Result};
use crate::io::read_json;

#[derive(Debug, Parser)]
#[command(name = "uncervals", version, about = "Conformal prediction sets for interval-censored times")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an interval-censored dataset and its latent times
    Simulate(SimulateArgs),
    /// Fit a conditional CDF model on the training part of a split
    Fit(FitArgs),
    /// Compute conformal scores and the calibrated quantile
    Calibrate(CalibrateArgs),
    /// Prediction sets for new covariates
    Predict(PredictArgs),
    /// Monte Carlo marginal coverage
    Coverage(CoverageArgs),
    /// Smoothed conditional coverage of uncervals against the naive quantile
    Condcov(CondcovArgs),
    /// Uniformity test of randomised interval scores
    Gof(GofArgs),
    /// Random search for shattered point sets
    Vccheck(VccheckArgs),
    /// Re-run a command from its manifest
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON or TOML configuration file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Where to write the run manifest [default: manifest.json next to --out]
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScenarioArg {
    AbsLink,
    LinearLink,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LinkArg {
    Zero,
    Linear,
    AbsLinear,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Turnbull,
    Weibph,
    Oracle,
    Kturnbull,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FeatureArg {
    Identity,
    Abs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    E0,
    Estar,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Uncervals,
    Naive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

fn name<T: ValueEnum>(v: Option<T>) -> Option<String> {
    v.and_then(|v| v.to_possible_value()).map(|p| p.get_name().to_string())
}

fn snake<T: ValueEnum>(v: Option<T>) -> Option<String> {
    name(v).map(|s| s.replace('-', "_"))
}

#[derive(Debug, Clone, Args)]
pub struct SimFlags {
    /// Preset the remaining simulation settings start from
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioArg>,
    /// Number of subjects
    #[arg(long)]
    pub n: Option<usize>,
    /// Weibull shape p
    #[arg(long)]
    pub shape: Option<f64>,
    /// Weibull scale s
    #[arg(long)]
    pub scale: Option<f64>,
    /// Inspections per subject
    #[arg(long)]
    pub inspections: Option<usize>,
    /// Upper bound of the uniform gap between inspections
    #[arg(long)]
    pub inspect_length: Option<f64>,
    #[arg(long)]
    pub x_low: Option<f64>,
    #[arg(long)]
    pub x_high: Option<f64>,
    /// Covariate dimension
    #[arg(long)]
    pub dim: Option<usize>,
    /// Equicorrelation of the covariates
    #[arg(long)]
    pub rho: Option<f64>,
    /// Regression surface r(x)
    #[arg(long, value_enum)]
    pub link: Option<LinkArg>,
    /// Link coefficients, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub coef: Option<Vec<f64>>,
}

impl SimFlags {
    fn apply(&self, o: &mut Overrides) {
        o.set("scenario", name(self.scenario))
            .set("sim.n", self.n)
            .set("sim.shape", self.shape)
            .set("sim.scale", self.scale)
            .set("sim.inspections", self.inspections)
            .set("sim.inspect_length", self.inspect_length)
            .set("sim.covariates.low", self.x_low)
            .set("sim.covariates.high", self.x_high)
            .set("sim.covariates.dim", self.dim)
            .set("sim.covariates.rho", self.rho)
            .set("sim.link.type", snake(self.link))
            .set("sim.link.coefs", self.coef.clone());
    }
}

#[derive(Debug, Clone, Args)]
pub struct EstimatorFlags {
    /// Estimator of the conditional CDF
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Convergence tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Covariate features of the Weibull linear predictor
    #[arg(long, value_enum)]
    pub features: Option<FeatureArg>,
    /// Kernel Turnbull bandwidths, comma separated
    #[arg(long, value_delimiter = ',')]
    pub bandwidth: Option<Vec<f64>>,
    /// Shape used by the oracle model
    #[arg(long)]
    pub oracle_shape: Option<f64>,
    /// Scale used by the oracle model
    #[arg(long)]
    pub oracle_scale: Option<f64>,
}

impl EstimatorFlags {
    fn apply(&self, o: &mut Overrides) {
        o.set("estimator.model", name(self.model))
            .set("estimator.tol", self.tol)
            .set("estimator.max_iter", self.max_iter)
            .set("estimator.features", name(self.features))
            .set("estimator.bandwidth", self.bandwidth.clone())
            .set("estimator.shape", self.oracle_shape)
            .set("estimator.scale", self.oracle_scale);
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReportFlags {
    /// Report path
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Optional tidy CSV of curve or ECDF points
    #[arg(long)]
    pub tidy: Option<PathBuf>,
    /// Master seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for replications [default: all cores]
    #[arg(long)]
    pub threads: Option<usize>,
}

impl ReportFlags {
    fn apply(&self, o: &mut Overrides) {
        o.set("out", self.out.clone())
            .set("format", name(self.format))
            .set("tidy", self.tidy.clone())
            .set("seed", self.seed);
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dataset CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Latent-time sidecar CSV [default: <out>.truth.csv]
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Training dataset CSV
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub estimator: EstimatorFlags,
    /// Fraction of rows used for fitting
    #[arg(long)]
    pub split_frac: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Model artifact JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    /// Dataset the model was fitted on
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Model artifact from `fit`
    #[arg(long = "model-file")]
    pub model_file: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Score centre; 1 gives a lower predictive bound
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Must match the split used by `fit` [default: from the model artifact]
    #[arg(long)]
    pub split_frac: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Survival inversion horizon [default: from the model artifact]
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Calibration JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long = "model-file")]
    pub model_file: Option<PathBuf>,
    /// Calibration JSON from `calibrate`
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    /// Covariate CSV, one column per coordinate
    #[arg(long)]
    pub covariates: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Write `lo,hi` instead of `lpb` [default: when b < 1]
    #[arg(long)]
    pub two_sided: Option<bool>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    #[command(flatten)]
    pub estimator: EstimatorFlags,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub split_frac: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of replications B
    #[arg(long)]
    pub replications: Option<usize>,
    /// Fresh test subjects per replication
    #[arg(long)]
    pub n_test: Option<usize>,
    #[command(flatten)]
    pub report: ReportFlags,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CondcovArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    #[command(flatten)]
    pub estimator: EstimatorFlags,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub split_frac: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub replications: Option<usize>,
    /// Fresh evaluation subjects per replication
    #[arg(long)]
    pub n_eval: Option<usize>,
    #[command(flatten)]
    pub report: ReportFlags,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct GofArgs {
    /// Test the calibration rows of this dataset (with --model-file)
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long = "model-file")]
    pub model_file: Option<PathBuf>,
    #[command(flatten)]
    pub sim: SimFlags,
    #[command(flatten)]
    pub estimator: EstimatorFlags,
    #[arg(long)]
    pub split_frac: Option<f64>,
    #[arg(long)]
    pub replications: Option<usize>,
    /// Rejection level of the test
    #[arg(long)]
    pub level: Option<f64>,
    #[command(flatten)]
    pub report: ReportFlags,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct VccheckArgs {
    /// Random configurations tried per point count
    #[arg(long)]
    pub budget: Option<usize>,
    #[command(flatten)]
    pub report: ReportFlags,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run
    pub manifest: PathBuf,
    #[arg(long)]
    pub threads: Option<usize>,
}

fn sources(common: &Common, fill: impl FnOnce(&mut Overrides)) -> Result<Sources> {
    let mut o = Overrides::new();
    fill(&mut o);
    Sources::new(common.config.as_deref(), o)
}

fn ctx(common: &Common, threads: Option<usize>) -> Ctx {
    Ctx { manifest: common.manifest.clone(), replay: false, threads }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => {
            let s = sources(&a.common, |o| {
                a.sim.apply(o);
                o.set("sim.seed", a.seed).set("out", a.out.clone()).set("truth", a.truth.clone());
            })?;
            commands::simulate(&s, &ctx(&a.common, None))
        }
        Command::Fit(a) => {
            let s = sources(&a.common, |o| {
                a.estimator.apply(o);
                o.set("data", a.data.clone())
                    .set("split_frac", a.split_frac)
                    .set("seed", a.seed)
                    .set("out", a.out.clone());
            })?;
            commands::fit(&s, &ctx(&a.common, None))
        }
        Command::Calibrate(a) => {
            let s = sources(&a.common, |o| {
                o.set("data", a.data.clone())
                    .set("model_file", a.model_file.clone())
                    .set("alpha", a.alpha)
                    .set("b", a.b)
                    .set("mode", name(a.mode))
                    .set("split_frac", a.split_frac)
                    .set("seed", a.seed)
                    .set("t_max", a.t_max)
                    .set("out", a.out.clone());
            })?;
            commands::calibrate(&s, &ctx(&a.common, None))
        }
        Command::Predict(a) => {
            let s = sources(&a.common, |o| {
                o.set("model_file", a.model_file.clone())
                    .set("calibration", a.calibration.clone())
                    .set("covariates", a.covariates.clone())
                    .set("out", a.out.clone())
                    .set("format", name(a.format))
                    .set("two_sided", a.two_sided);
            })?;
            commands::predict(&s, &ctx(&a.common, None))
        }
        Command::Coverage(a) => {
            let s = sources(&a.common, |o| {
                a.sim.apply(o);
                a.estimator.apply(o);
                a.report.apply(o);
                o.set("method", name(a.method))
                    .set("mode", name(a.mode))
                    .set("b", a.b)
                    .set("split_frac", a.split_frac)
                    .set("alpha", a.alpha)
                    .set("replications", a.replications)
                    .set("n_test", a.n_test);
            })?;
            commands::coverage(&s, &ctx(&a.common, a.report.threads))
        }
        Command::Condcov(a) => {
            let s = sources(&a.common, |o| {
                a.sim.apply(o);
                a.estimator.apply(o);
                a.report.apply(o);
                o.set("mode", name(a.mode))
                    .set("b", a.b)
                    .set("split_frac", a.split_frac)
                    .set("alpha", a.alpha)
                    .set("replications", a.replications)
                    .set("n_eval", a.n_eval);
            })?;
            commands::condcov(&s, &ctx(&a.common, a.report.threads))
        }
        Command::Gof(a) => {
            let s = sources(&a.common, |o| {
                a.sim.apply(o);
                a.estimator.apply(o);
                a.report.apply(o);
                o.set("data", a.data.clone())
                    .set("model_file", a.model_file.clone())
                    .set("split_frac", a.split_frac)
                    .set("replications", a.replications)
                    .set("level", a.level);
            })?;
            commands::gof(&s, &ctx(&a.common, a.report.threads))
        }
        Command::Vccheck(a) => {
            let s = sources(&a.common, |o| {
                a.report.apply(o);
                o.set("budget", a.budget);
            })?;
            commands::vccheck(&s, &ctx(&a.common, a.report.threads))
        }
        Command::Replay(a) => {
            let manifest: Manifest = read_json(&a.manifest)?;
            let s = Sources::fixed(manifest.config);
            let c = Ctx { manifest: None, replay: true, threads: a.threads };
            match manifest.command.as_str() {
                "simulate" => commands::simulate(&s, &c),
                "fit" => commands::fit(&s, &c),
                "calibrate" => commands::calibrate(&s, &c),
                "predict" => commands::predict(&s, &c),
                "coverage" => commands::coverage(&s, &c),
                "condcov" => commands::condcov(&s, &c),
                "gof" => commands::gof(&s, &c),
                "vccheck" => commands::vccheck(&s, &c),
                other => Err(CliError::Usage(format!("manifest names unknown command `{other}`"))),
            }
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
///
/// Failures are reported on stderr as one JSON object.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let err = CliError::Usage(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
