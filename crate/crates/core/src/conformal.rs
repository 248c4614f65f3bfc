//! Split-conformal calibration for interval-censored targets.
//!
//! After fitting `F` on the training split, every calibration row contributes
//! its border scores `Lambda = F(L | X)` and `Upsilon = F(U | X)`. The latent
//! probability-integral value `F(T | X)` lies between them; the calibration
//! sample of such values is replaced by bootstrap draws `Phi*`:
//!
//! - mode `e0`: `Phi* = Lambda_j` (left border, finite-sample conservative),
//! - mode `estar`: `Phi* ~ Uniform(Lambda_j, Upsilon_j)` (asymptotically exact),
//!
//! with `j` uniform on the calibration rows. Scores `V* = |Phi* - b|` give the
//! conformal quantile `Q*`, and the prediction set for a new `x` is
//! `{t >= 0 : |F(t | x) - b| <= Q*}`. With `b = 1` that set is the ray
//! `[L, inf)` with `L = inf { t : S(t | x) <= Q* }`.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::data::{endpoints_coincide, make_split, Dataset, SplitPlan};
use crate::estimators::{default_t_max, ConditionalCdf, EstimatorSpec, FittedModel};
use crate::math::sort_f64;
use crate::rng::{derive_seed, CounterRng, STREAM_BOOT, STREAM_SPLIT};
use crate::{Error, Result};

/// Scores closer than this are treated as a collapsed interval.
const COLLAPSE_TOLERANCE: f64 = 1e-12;
/// Slack on the order-statistic index so `0.9 * 100` still gives 90.
const QUANTILE_INDEX_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Left-border scores.
    E0,
    /// Uniformly randomised between the borders.
    Estar,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::E0 => "e0",
            Mode::Estar => "estar",
        }
    }
}

/// Conformity score `|phi - b|`.
#[inline]
pub fn psi(phi: f64, b: f64) -> f64 {
    libm::fabs(phi - b)
}

/// Model CDF at the calibration rows' interval endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorderScores {
    pub lambda: Vec<f64>,
    pub upsilon: Vec<f64>,
}

impl BorderScores {
    pub fn new(lambda: Vec<f64>, upsilon: Vec<f64>) -> Result<Self> {
        if lambda.len() != upsilon.len() {
            return Err(Error::Invariant("border score vectors differ in length".into()));
        }
        for (i, (l, u)) in lambda.iter().zip(&upsilon).enumerate() {
            if !(0.0..=1.0).contains(l) || !(0.0..=1.0).contains(u) || l > u {
                return Err(Error::Invariant(format!("row {i}: scores ({l}, {u}) are not ordered in [0, 1]")));
            }
        }
        Ok(Self { lambda, upsilon })
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }
}

fn check_probability(v: f64, what: &str, row: usize) -> Result<f64> {
    if !(-COLLAPSE_TOLERANCE..=1.0 + COLLAPSE_TOLERANCE).contains(&v) {
        return Err(Error::Invariant(format!("row {row}: model returned {what} = {v} outside [0, 1]")));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// `Lambda_i = F(L_i | X_i)` and `Upsilon_i = F(U_i | X_i)` over the
/// calibration rows; right-censored rows get `Upsilon_i = 1` and exact rows
/// `Lambda_i = Upsilon_i`.
pub fn border_scores<M: ConditionalCdf + ?Sized>(model: &M, calib: &Dataset) -> Result<BorderScores> {
    let mut lambda = Vec::with_capacity(calib.len());
    let mut upsilon = Vec::with_capacity(calib.len());
    for (row, o) in calib.observations().iter().enumerate() {
        let (lo, hi) = if endpoints_coincide(o.l, o.u) {
            let (_, f) = model.cdf_pair(o.u, o.u, &o.x);
            (f, f)
        } else {
            model.cdf_pair(o.l, o.u, &o.x)
        };
        let lo = check_probability(lo, "F(L)", row)?;
        let hi = check_probability(hi, "F(U)", row)?;
        if lo > hi + COLLAPSE_TOLERANCE {
            return Err(Error::Invariant(format!("row {row}: F(L) = {lo} exceeds F(U) = {hi}")));
        }
        lambda.push(lo);
        upsilon.push(hi.max(lo));
    }
    Ok(BorderScores { lambda, upsilon })
}

/// Bootstrap draws `Phi*_i`, `i = 1..n`, from the border scores.
///
/// Draw `i` uses counters `2i` (row index) and `2i + 1` (uniform offset) of a
/// counter-based generator keyed by `seed`, so any subset of draws can be
/// computed independently.
pub fn bootstrap_phi(scores: &BorderScores, mode: Mode, seed: u64) -> Vec<f64> {
    let n = scores.len();
    let g = CounterRng::new(seed);
    (0..n)
        .map(|i| {
            let c = 2 * i as u64;
            let j = g.index(c, n);
            let (l, u) = (scores.lambda[j], scores.upsilon[j]);
            let phi = match mode {
                Mode::E0 => l,
                Mode::Estar => {
                    if u - l <= COLLAPSE_TOLERANCE {
                        l
                    } else {
                        l + (u - l) * g.open01(c + 1)
                    }
                }
            };
            phi.clamp(0.0, 1.0)
        })
        .collect()
}

/// Order-statistic index `k = ceil((1 - alpha)(n + 1))`, 1-based.
pub fn quantile_index(n: usize, alpha: f64) -> usize {
    let raw = (1.0 - alpha) * (n as f64 + 1.0) - QUANTILE_INDEX_SLACK;
    (libm::ceil(raw) as usize).max(1)
}

/// The `k`-th smallest score, `+inf` when `k > n`.
pub fn conformal_quantile(v_star: &[f64], alpha: f64) -> f64 {
    let n = v_star.len();
    let k = quantile_index(n, alpha);
    if n == 0 || k > n {
        return f64::INFINITY;
    }
    let mut sorted = v_star.to_vec();
    sort_f64(&mut sorted);
    sorted[k - 1]
}

/// Fitted conformal state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub mode: Mode,
    pub b: f64,
    pub alpha: f64,
    pub n: usize,
    /// 1-based order statistic used for `q_hat`.
    pub k: usize,
    pub phi_star: Vec<f64>,
    pub v_star: Vec<f64>,
    #[serde(with = "crate::serde_f64")]
    pub q_hat: f64,
    pub seed: u64,
    /// Horizon for survival inversion.
    #[serde(with = "crate::serde_f64")]
    pub t_max: f64,
}

fn check_level(alpha: f64, b: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(0.0..=1.0).contains(&b) {
        return Err(Error::InvalidConfig(format!("b must lie in [0, 1], got {b}")));
    }
    Ok(())
}

/// Border scores, bootstrap, scores and quantile on a calibration set.
pub fn calibrate<M: ConditionalCdf + ?Sized>(
    model: &M,
    calib: &Dataset,
    alpha: f64,
    b: f64,
    mode: Mode,
    seed: u64,
    t_max: f64,
) -> Result<CalibrationResult> {
    check_level(alpha, b)?;
    if calib.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let scores = border_scores(model, calib)?;
    Ok(calibrate_scores(&scores, alpha, b, mode, seed, t_max))
}

pub fn calibrate_scores(
    scores: &BorderScores,
    alpha: f64,
    b: f64,
    mode: Mode,
    seed: u64,
    t_max: f64,
) -> CalibrationResult {
    let phi_star = bootstrap_phi(scores, mode, seed);
    let v_star: Vec<f64> = phi_star.iter().map(|p| psi(*p, b)).collect();
    let q_hat = conformal_quantile(&v_star, alpha);
    CalibrationResult {
        mode,
        b,
        alpha,
        n: scores.len(),
        k: quantile_index(scores.len(), alpha),
        phi_star,
        v_star,
        q_hat,
        seed,
        t_max,
    }
}

/// `{t >= 0 : |F(t | x) - b| <= q_hat}` as the closed range `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub x: Vec<f64>,
    pub alpha: f64,
    pub b: f64,
    #[serde(with = "crate::serde_f64")]
    pub lo: f64,
    #[serde(with = "crate::serde_f64")]
    pub hi: f64,
}

impl PredictionSet {
    /// Lower predictive bound (the left end of the set).
    pub fn lpb(&self) -> f64 {
        self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn is_ray(&self) -> bool {
        self.hi == f64::INFINITY
    }
}

/// Prediction set for one covariate vector.
///
/// The lower end solves `F(t | x) >= b - q_hat` and the upper end
/// `F(t | x) >= b + q_hat` through survival inversion on `[0, t_max]`; a
/// saturated quantile (`+inf`) gives `[0, inf)`.
pub fn prediction_set<M: ConditionalCdf + ?Sized>(
    model: &M,
    x: &[f64],
    q_hat: f64,
    b: f64,
    alpha: f64,
    t_max: f64,
) -> PredictionSet {
    let (lo, hi) = if q_hat == f64::INFINITY {
        (0.0, f64::INFINITY)
    } else {
        let lo = if b - q_hat <= 0.0 {
            0.0
        } else {
            // F >= b - q  <=>  S <= (1 - b) + q
            model.invert_survival((1.0 - b) + q_hat, x, t_max)
        };
        let hi = if b + q_hat >= 1.0 { f64::INFINITY } else { model.invert_survival((1.0 - b) - q_hat, x, t_max) };
        (lo, hi)
    };
    PredictionSet { x: x.to_vec(), alpha, b, lo, hi }
}

/// Run configuration of the end-to-end procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncervalsConfig {
    pub alpha: f64,
    pub b: f64,
    pub mode: Mode,
    pub fit_fraction: f64,
    pub seed: u64,
    pub estimator: EstimatorSpec,
    /// Survival-inversion horizon; ten times the largest finite training
    /// endpoint when absent.
    #[serde(default)]
    pub t_max: Option<f64>,
}

impl UncervalsConfig {
    pub fn new(alpha: f64, mode: Mode, estimator: EstimatorSpec, seed: u64) -> Self {
        Self { alpha, b: 1.0, mode, fit_fraction: 0.5, seed, estimator, t_max: None }
    }
}

/// Split, fitted model and calibration of one run; predicts any `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Uncervals {
    pub split: SplitPlan,
    pub model: FittedModel,
    pub calibration: CalibrationResult,
}

impl Uncervals {
    pub fn fit(data: &Dataset, config: &UncervalsConfig) -> Result<Self> {
        check_level(config.alpha, config.b)?;
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let split = make_split(data.len(), config.fit_fraction, derive_seed(config.seed, STREAM_SPLIT, 0))?;
        let train = data.subset(&split.fit_indices)?;
        let calib = data.subset(&split.calibration_indices)?;
        let model = config.estimator.fit(&train)?;
        let t_max = config.t_max.unwrap_or_else(|| default_t_max(&train));
        let calibration = calibrate(
            &model,
            &calib,
            config.alpha,
            config.b,
            config.mode,
            derive_seed(config.seed, STREAM_BOOT, 0),
            t_max,
        )?;
        Ok(Self { split, model, calibration })
    }

    pub fn predict(&self, x: &[f64]) -> PredictionSet {
        let c = &self.calibration;
        prediction_set(&self.model, x, c.q_hat, c.b, c.alpha, c.t_max)
    }
}

/// End-to-end: split, fit, calibrate and predict every `x_new`.
pub fn uncervals(data: &Dataset, config: &UncervalsConfig, x_new: &[Vec<f64>]) -> Result<Vec<PredictionSet>> {
    let fitted = Uncervals::fit(data, config)?;
    Ok(x_new.iter().map(|x| fitted.predict(x)).collect())
}

/// `g_t(l, u) = 1{u <= t} + 1{l <= t < u} (t - l) / (u - l)`, and
/// `1{w <= t}` when the interval has collapsed to `w`.
#[inline]
pub fn interval_kernel(t: f64, l: f64, u: f64) -> f64 {
    if u - l <= COLLAPSE_TOLERANCE {
        return if l <= t { 1.0 } else { 0.0 };
    }
    if u <= t {
        1.0
    } else if l <= t {
        (t - l) / (u - l)
    } else {
        0.0
    }
}

/// Interval distribution `I_n(t)`: the CDF of the uniform mixture over the
/// score intervals `(Lambda_i, Upsilon_i)`.
pub fn interval_distribution(scores: &BorderScores, t: f64) -> f64 {
    let n = scores.len();
    if n == 0 {
        return f64::NAN;
    }
    let total = crate::math::compensated_sum(
        scores.lambda.iter().zip(&scores.upsilon).map(|(l, u)| interval_kernel(t, *l, *u)),
    );
    total / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::IntervalObservation;
    use crate::estimators::OracleModel;
    use crate::link::Link;
    use alloc::vec;

    #[test]
    fn psi_examples() {
        assert!((psi(0.3, 1.0) - 0.7).abs() < 1e-15);
        assert_eq!(psi(0.5, 0.5), 0.0);
        assert_eq!(psi(1.0, 1.0), 0.0);
    }

    #[test]
    fn quantile_index_examples() {
        assert_eq!(quantile_index(99, 0.1), 90);
        assert_eq!(quantile_index(9, 0.05), 10);
        let v: Vec<f64> = (1..=99).map(|i| i as f64).collect();
        assert_eq!(conformal_quantile(&v, 0.1), 90.0);
        assert_eq!(conformal_quantile(&[0.1; 9], 0.05), f64::INFINITY);
        assert_eq!(conformal_quantile(&[0.25; 50], 0.2), 0.25);
    }

    #[test]
    fn e0_single_row_is_its_left_border() {
        let s = BorderScores::new(vec![0.3], vec![0.8]).unwrap();
        for seed in 0..20 {
            assert_eq!(bootstrap_phi(&s, Mode::E0, seed), vec![0.3]);
        }
    }

    #[test]
    fn estar_collapsed_row_is_exact() {
        let s = BorderScores::new(vec![0.4, 0.4], vec![0.4, 0.4]).unwrap();
        assert!(bootstrap_phi(&s, Mode::Estar, 9).iter().all(|p| *p == 0.4));
    }

    #[test]
    fn border_scores_conventions() {
        let m = OracleModel::new(2.0, 1.0, Link::Zero).unwrap();
        let d = Dataset::new(vec![
            IntervalObservation { l: 1.0, u: f64::INFINITY, x: vec![] },
            IntervalObservation { l: 0.0, u: 1.0, x: vec![] },
            IntervalObservation { l: 0.7, u: 0.7, x: vec![] },
        ])
        .unwrap();
        let s = border_scores(&m, &d).unwrap();
        assert_eq!(s.upsilon[0], 1.0);
        assert_eq!(s.lambda[1], 0.0);
        assert_eq!(s.lambda[2], s.upsilon[2]);
    }

    struct Broken;
    impl ConditionalCdf for Broken {
        fn cdf(&self, t: f64, _x: &[f64]) -> f64 {
            1.5 * t
        }
        fn name(&self) -> &'static str {
            "broken"
        }
    }

    #[test]
    fn out_of_range_model_is_an_invariant_error() {
        let d = Dataset::new(vec![IntervalObservation { l: 0.5, u: 1.0, x: vec![] }]).unwrap();
        assert!(matches!(border_scores(&Broken, &d), Err(Error::Invariant(_))));
    }

    #[test]
    fn prediction_set_examples() {
        let m = OracleModel::new(2.0, 1.0, Link::Zero).unwrap();
        let full = prediction_set(&m, &[], f64::INFINITY, 1.0, 0.1, 10.0);
        assert_eq!((full.lo, full.hi), (0.0, f64::INFINITY));
        let ray = prediction_set(&m, &[], libm::exp(-1.0), 1.0, 0.1, 10.0);
        assert!((ray.lpb() - 1.0).abs() < 1e-8);
        assert!(ray.is_ray());
        let half = prediction_set(&m, &[], 0.5, 0.5, 0.1, 10.0);
        assert_eq!((half.lo, half.hi), (0.0, f64::INFINITY));
        // two-sided: F in [0.3, 0.7]
        let two = prediction_set(&m, &[], 0.2, 0.5, 0.1, 10.0);
        let f_lo = 1.0 - libm::exp(-two.lo * two.lo);
        let f_hi = 1.0 - libm::exp(-two.hi * two.hi);
        assert!((f_lo - 0.3).abs() < 1e-8 && (f_hi - 0.7).abs() < 1e-8);
        assert!(two.contains(1.0) && !two.contains(0.1));
    }

    #[test]
    fn interval_distribution_hand_example() {
        let s = BorderScores::new(vec![0.2, 0.5, 0.0], vec![0.6, 0.5, 1.0]).unwrap();
        assert!((interval_distribution(&s, 0.5) - 0.75).abs() < 1e-15);
        assert_eq!(interval_distribution(&s, 1.0), 1.0);
        let pos = BorderScores::new(vec![0.2, 0.5], vec![0.6, 0.9]).unwrap();
        assert_eq!(interval_distribution(&pos, 0.0), 0.0);
    }

    #[test]
    fn invalid_levels_rejected() {
        let m = OracleModel::new(2.0, 1.0, Link::Zero).unwrap();
        let d = Dataset::new(vec![IntervalObservation { l: 0.5, u: 1.0, x: vec![] }]).unwrap();
        assert!(calibrate(&m, &d, 0.0, 1.0, Mode::E0, 1, 10.0).is_err());
        assert!(calibrate(&m, &d, 0.1, 1.5, Mode::E0, 1, 10.0).is_err());
    }
}
