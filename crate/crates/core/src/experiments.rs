//! Comparative studies: variance ratios between noise families, and the
//! private mean-vector experiment.
//!
//! # Variance ratios
//!
//! For families `a` and `b` at the same budget and unit sensitivity, the
//! scale ratio is `ρ = s_a / s_b` and the variance ratio is
//! `v = ρ² Var(X_a) / Var(X_b)`. When `v < 1`, family `a` has the smaller
//! mean squared error. [`variance_ratio_table`] tabulates both over a grid
//! and locates where `v` crosses 1 along each `δ` row.
//!
//! # Mean-vector experiment
//!
//! Records lie in `v + [−½, ½]^m`, where `v` has standard normal
//! coordinates. A database holds `n` uniform records and the query is their
//! coordinatewise mean, with `ℓ₂` sensitivity `√m / n`. Each database is
//! released five ways:
//!
//! * `Gauss`: Gaussian noise calibrated at the `ℓ₂` sensitivity;
//! * `Sub(r)`: Subbotin noise at the index picked by
//!   [`optimize_p`](crate::optimize::optimize_p);
//! * `Gauss-t` and `Sub(r)-t`: the above after soft thresholding, at
//!   `σ√(2 ln m)` and at a simulated expected noise maximum respectively;
//! * `Gauss-JS`: the Gaussian release after positive-part James-Stein
//!   shrinkage.
//!
//! The error of a release is `‖output − true mean‖₂`, not normalized by `m`.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibrate::{gaussian_scale, scale_for_budget, CalibrationConfig, PrivacyBudget};
use crate::error::{Error, Result};
use crate::format::sig15;
use crate::mech::linear_sensitivity_bound;
use crate::noise::{self, LogConcaveNoise, NoiseFamily};
use crate::optimize::{default_grid, optimize_p};
use crate::postprocess::{gaussian_threshold, james_stein, monte_carlo_threshold, soft_threshold};

/// Seed used when neither the caller nor the environment supplies one.
pub const DEFAULT_SEED: u64 = 42;

/// Environment variable that overrides [`DEFAULT_SEED`].
pub const SEED_ENV: &str = "LOGCALIB_SEED";

/// [`DEFAULT_SEED`] unless `LOGCALIB_SEED` holds an unsigned integer.
pub fn default_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::domain("LOGCALIB_SEED", format!("must be an unsigned 64-bit integer (got '{v}')"))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// SplitMix64 finalizer, used to derive independent child seeds.
pub fn mix_seed(parent: u64, index: u64) -> u64 {
    let mut z = parent.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One grid point of a variance-ratio table. `rho` and `v` are `None` when
/// either family cannot be calibrated there, with the reason in `note`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub epsilon: f64,
    pub delta: f64,
    pub rho: Option<f64>,
    pub v: Option<f64>,
    pub note: Option<String>,
}

/// Where `v` crosses 1 along a `δ` row, between adjacent grid values of `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitCrossing {
    pub delta: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceRatioTable {
    pub family_a: String,
    pub family_b: String,
    /// Row-major: all `ε` for the first `δ`, then the next `δ`.
    pub points: Vec<RatioPoint>,
    pub crossings: Vec<UnitCrossing>,
}

/// `(ρ, v)` for families `a` and `b` at `budget`, unit sensitivity.
pub fn variance_ratio(a: &NoiseFamily, b: &NoiseFamily, budget: PrivacyBudget) -> Result<(f64, f64)> {
    let sa = scale_for_budget(a, budget, 1.0)?.scale;
    let sb = scale_for_budget(b, budget, 1.0)?.scale;
    let rho = sa / sb;
    Ok((rho, rho * rho * a.variance() / b.variance()))
}

/// Tabulates [`variance_ratio`] over `epsilon_grid × delta_grid` and, for
/// each `δ`, bisects in `ε` for the first sign change of `v − 1` between
/// adjacent feasible grid points.
pub fn variance_ratio_table(
    a: &NoiseFamily,
    b: &NoiseFamily,
    epsilon_grid: &[f64],
    delta_grid: &[f64],
) -> Result<VarianceRatioTable> {
    if epsilon_grid.is_empty() || delta_grid.is_empty() {
        return Err(Error::domain("eps-grid", "epsilon and delta grids must be non-empty"));
    }
    let cells: Vec<(f64, f64)> =
        delta_grid.iter().flat_map(|&d| epsilon_grid.iter().map(move |&e| (e, d))).collect();
    let points: Vec<RatioPoint> = cells
        .par_iter()
        .map(|&(epsilon, delta)| {
            match PrivacyBudget::new(epsilon, delta).and_then(|bud| variance_ratio(a, b, bud)) {
                Ok((rho, v)) => RatioPoint { epsilon, delta, rho: Some(rho), v: Some(v), note: None },
                Err(e) => RatioPoint { epsilon, delta, rho: None, v: None, note: Some(e.to_string()) },
            }
        })
        .collect();

    let mut crossings = Vec::new();
    for (row, &delta) in points.chunks(epsilon_grid.len()).zip(delta_grid) {
        let feasible: Vec<(f64, f64)> = row.iter().filter_map(|p| p.v.map(|v| (p.epsilon, v))).collect();
        let bracket = feasible.windows(2).find(|w| (w[0].1 - 1.0).signum() != (w[1].1 - 1.0).signum());
        if let Some(w) = bracket {
            let epsilon = unit_crossing(a, b, delta, w[0].0, w[1].0)?;
            crossings.push(UnitCrossing { delta, epsilon });
        }
    }
    Ok(VarianceRatioTable { family_a: a.to_string(), family_b: b.to_string(), points, crossings })
}

/// Bisects `ε ∈ [eps_lo, eps_hi]` for `v(ε, δ) = 1`; the endpoints must
/// straddle 1.
pub fn unit_crossing(a: &NoiseFamily, b: &NoiseFamily, delta: f64, eps_lo: f64, eps_hi: f64) -> Result<f64> {
    let g = |e: f64| -> Result<f64> { Ok(variance_ratio(a, b, PrivacyBudget::new(e, delta)?)?.1 - 1.0) };
    let (mut lo, mut hi) = (eps_lo.min(eps_hi), eps_lo.max(eps_hi));
    let g_lo = g(lo)?;
    if g_lo.signum() == g(hi)?.signum() {
        return Err(Error::domain("eps-grid", format!("v - 1 has the same sign at epsilon = {lo} and {hi}")));
    }
    while hi - lo > 1e-10 * hi.max(1e-12) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)?.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn default_epsilons() -> Vec<f64> {
    vec![0.01, 0.1, 1.0]
}
fn default_delta() -> f64 {
    1e-4
}
fn default_dims() -> Vec<usize> {
    vec![10, 100, 500, 1000, 2000]
}
fn default_n() -> usize {
    500
}
fn default_databases() -> usize {
    100
}
fn default_trials() -> usize {
    300
}

/// Settings of [`mean_vector_experiment`]; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_epsilons")]
    pub epsilon_list: Vec<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_dims")]
    pub m_list: Vec<usize>,
    /// Records per database.
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_databases")]
    pub databases_per_cell: usize,
    #[serde(default = "default_seed_const")]
    pub seed: u64,
    /// Candidate Subbotin indices.
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    /// Draws behind each simulated Subbotin threshold.
    #[serde(default = "default_trials")]
    pub threshold_trials: usize,
    /// Forces every mechanism to this noise scale, bypassing calibration.
    #[serde(default)]
    pub scale_override: Option<f64>,
}

fn default_seed_const() -> u64 {
    DEFAULT_SEED
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            epsilon_list: default_epsilons(),
            delta: default_delta(),
            m_list: default_dims(),
            n: default_n(),
            databases_per_cell: default_databases(),
            seed: DEFAULT_SEED,
            grid: default_grid(),
            threshold_trials: default_trials(),
            scale_override: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon_list.is_empty() {
            return Err(Error::domain("epsilon_list", "must be non-empty"));
        }
        if let Some(e) = self.epsilon_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(Error::domain("epsilon_list", format!("entries must be finite and > 0 (got {e})")));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::domain("delta", format!("must lie in (0, 1) (got {})", self.delta)));
        }
        if self.m_list.is_empty() {
            return Err(Error::domain("m_list", "must be non-empty"));
        }
        if let Some(m) = self.m_list.iter().find(|m| **m < 3) {
            return Err(Error::domain(
                "m_list",
                format!("dimensions must be >= 3 for James-Stein shrinkage (got {m})"),
            ));
        }
        if self.n == 0 {
            return Err(Error::domain("n", "must be positive"));
        }
        if self.databases_per_cell < 2 {
            return Err(Error::domain("databases_per_cell", "must be at least 2 for a standard error"));
        }
        if self.threshold_trials == 0 {
            return Err(Error::domain("threshold_trials", "must be positive"));
        }
        if self.grid.is_empty() || self.grid.iter().any(|r| !(*r >= 1.0 && r.is_finite())) {
            return Err(Error::domain("grid", "must be non-empty with finite entries >= 1"));
        }
        if let Some(s) = self.scale_override {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::domain("scale_override", format!("must be finite and >= 0 (got {s})")));
            }
        }
        Ok(())
    }
}

/// The five releases compared per database.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mechanism {
    #[serde(rename = "Gauss")]
    Gauss,
    #[serde(rename = "Sub(r)")]
    Subbotin,
    #[serde(rename = "Gauss-t")]
    GaussThresholded,
    #[serde(rename = "Sub(r)-t")]
    SubbotinThresholded,
    #[serde(rename = "Gauss-JS")]
    GaussJamesStein,
}

impl Mechanism {
    pub const ALL: [Mechanism; 5] = [
        Mechanism::Gauss,
        Mechanism::Subbotin,
        Mechanism::GaussThresholded,
        Mechanism::SubbotinThresholded,
        Mechanism::GaussJamesStein,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Mechanism::Gauss => "Gauss",
            Mechanism::Subbotin => "Sub(r)",
            Mechanism::GaussThresholded => "Gauss-t",
            Mechanism::SubbotinThresholded => "Sub(r)-t",
            Mechanism::GaussJamesStein => "Gauss-JS",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Error of one release of one database.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub epsilon: f64,
    pub m: usize,
    pub mechanism: Mechanism,
    pub database: usize,
    pub l2_error: f64,
    /// Noise index: 2 for the Gaussian arms.
    pub r_used: f64,
    pub scale_used: f64,
    /// Seed of this database's generator.
    pub seed: u64,
}

/// Average error of one mechanism in one `(ε, m)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub epsilon: f64,
    pub m: usize,
    pub mechanism: Mechanism,
    pub mean_l2_error: f64,
    pub stderr: f64,
    pub r: f64,
    pub scale: f64,
    /// Seed of the cell generator (center and simulated threshold).
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    /// Cells in configuration order, mechanisms in [`Mechanism::ALL`] order.
    pub summaries: Vec<CellSummary>,
}

impl ExperimentReport {
    pub fn summary(&self, epsilon: f64, m: usize, mechanism: Mechanism) -> Option<&CellSummary> {
        self.summaries.iter().find(|s| s.epsilon == epsilon && s.m == m && s.mechanism == mechanism)
    }
}

struct CellPlan {
    epsilon: f64,
    m: usize,
    seed: u64,
    gauss_scale: f64,
    sub_r: f64,
    sub_scale: f64,
}

/// Runs every `(ε, m)` cell of the experiment.
///
/// Databases are processed in parallel; each has its own generator seeded
/// from the cell seed and its index, so results do not depend on thread
/// count or scheduling.
pub fn mean_vector_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    let mut cell_index = 0u64;
    for &epsilon in &config.epsilon_list {
        let budget = PrivacyBudget::new(epsilon, config.delta)?;
        for &m in &config.m_list {
            let plan = plan_cell(config, budget, m, mix_seed(config.seed, cell_index))?;
            cell_index += 1;
            let cell = run_cell(config, &plan)?;
            summaries.extend(summarize(&plan, &cell));
            records.extend(cell);
        }
    }
    Ok(ExperimentReport { config: config.clone(), records, summaries })
}

fn plan_cell(config: &ExperimentConfig, budget: PrivacyBudget, m: usize, seed: u64) -> Result<CellPlan> {
    let nu = 1.0 / config.n as f64;
    let (gauss_scale, sub_r, sub_scale) = match config.scale_override {
        Some(s) => (s, 2.0, s),
        None => {
            let gauss = gaussian_scale(budget, linear_sensitivity_bound(m, nu, 1.0, 2.0))?.scale;
            let best = optimize_p(budget, m, nu, 1.0, &config.grid)?;
            (gauss, best.r_star, best.scale_star)
        }
    };
    Ok(CellPlan { epsilon: budget.epsilon(), m, seed, gauss_scale, sub_r, sub_scale })
}

fn run_cell(config: &ExperimentConfig, plan: &CellPlan) -> Result<Vec<TrialRecord>> {
    let m = plan.m;
    let mut cell_rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let center: Vec<f64> = (0..m).map(|_| cell_rng.sample(StandardNormal)).collect();
    let sub_family = NoiseFamily::subbotin(plan.sub_r)?;
    let gauss_family = NoiseFamily::gaussian();
    let gauss_t = gaussian_threshold(plan.gauss_scale, m)?;
    let sub_t =
        monte_carlo_threshold(&sub_family, plan.sub_scale, m, config.threshold_trials, &mut cell_rng)?;

    let per_db: Vec<Result<Vec<TrialRecord>>> = (0..config.databases_per_cell)
        .into_par_iter()
        .map(|db| {
            let seed = mix_seed(plan.seed, db as u64 + 1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let truth = database_mean(&center, config.n, &mut rng);

            let gauss_noise = noise::sample(&gauss_family, m, &mut rng);
            let sub_noise = noise::sample(&sub_family, m, &mut rng);
            let release =
                |s: f64, z: &[f64]| -> Vec<f64> { truth.iter().zip(z).map(|(q, x)| q + s * x).collect() };
            let y_gauss = release(plan.gauss_scale, &gauss_noise);
            let y_sub = release(plan.sub_scale, &sub_noise);

            let outputs = [
                (Mechanism::Gauss, y_gauss.clone()),
                (Mechanism::Subbotin, y_sub.clone()),
                (Mechanism::GaussThresholded, soft_threshold(&y_gauss, gauss_t)),
                (Mechanism::SubbotinThresholded, soft_threshold(&y_sub, sub_t)),
                (Mechanism::GaussJamesStein, james_stein(&y_gauss, plan.gauss_scale)?),
            ];
            Ok(outputs
                .into_iter()
                .map(|(mechanism, y)| {
                    let gauss_arm =
                        !matches!(mechanism, Mechanism::Subbotin | Mechanism::SubbotinThresholded);
                    TrialRecord {
                        epsilon: plan.epsilon,
                        m,
                        mechanism,
                        database: db,
                        l2_error: l2_distance(&y, &truth),
                        r_used: if gauss_arm { 2.0 } else { plan.sub_r },
                        scale_used: if gauss_arm { plan.gauss_scale } else { plan.sub_scale },
                        seed,
                    }
                })
                .collect())
        })
        .collect();
    let mut out = Vec::with_capacity(config.databases_per_cell * Mechanism::ALL.len());
    for db in per_db {
        out.extend(db?);
    }
    Ok(out)
}

/// Mean of `n` records drawn uniformly from `center + [−½, ½]^m`.
fn database_mean<R: Rng + ?Sized>(center: &[f64], n: usize, rng: &mut R) -> Vec<f64> {
    let mut sum = vec![0.0; center.len()];
    for _ in 0..n {
        for (acc, c) in sum.iter_mut().zip(center) {
            *acc += c + rng.random::<f64>() - 0.5;
        }
    }
    sum.iter().map(|s| s / n as f64).collect()
}

fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn summarize(plan: &CellPlan, records: &[TrialRecord]) -> Vec<CellSummary> {
    Mechanism::ALL
        .iter()
        .map(|&mechanism| {
            let errors: Vec<f64> =
                records.iter().filter(|r| r.mechanism == mechanism).map(|r| r.l2_error).collect();
            let (mean, stderr) = mean_and_stderr(&errors);
            let gauss_arm = !matches!(mechanism, Mechanism::Subbotin | Mechanism::SubbotinThresholded);
            CellSummary {
                epsilon: plan.epsilon,
                m: plan.m,
                mechanism,
                mean_l2_error: mean,
                stderr,
                r: if gauss_arm { 2.0 } else { plan.sub_r },
                scale: if gauss_arm { plan.gauss_scale } else { plan.sub_scale },
                seed: plan.seed,
            }
        })
        .collect()
}

/// Sample mean and its standard error, summed in slice order.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Coefficient of determination of the least-squares line through `(x, y)`.
pub fn linear_fit_r2(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if syy == 0.0 {
        return 1.0;
    }
    sxy * sxy / (sxx * syy)
}

/// Header of the summary CSV.
pub const CSV_HEADER: &str = "epsilon,m,mechanism,mean_l2_error,stderr,r,scale,seed";

/// Writes one CSV row per cell and mechanism, numbers at 15 significant digits.
pub fn write_summary_csv<W: Write>(summaries: &[CellSummary], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for s in summaries {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            sig15(s.epsilon),
            s.m,
            s.mechanism,
            sig15(s.mean_l2_error),
            sig15(s.stderr),
            sig15(s.r),
            sig15(s.scale),
            s.seed
        )?;
    }
    Ok(())
}

/// Sidecar describing how a summary CSV was produced.
pub fn metadata(config: &ExperimentConfig) -> serde_json::Value {
    let tol = CalibrationConfig::default();
    serde_json::json!({
        "tool": "logcalib",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "tolerances": {
            "scale_rel_tol": tol.scale_rel_tol,
            "threshold_abs_tol": tol.threshold_abs_tol,
            "max_doublings": tol.max_doublings,
        },
        "error_metric": "l2 norm of (release - true mean), not normalized by m",
        "records": "uniform on center + [-1/2, 1/2]^m, center ~ N(0, I_m), one center per cell",
        "gaussian_sensitivity": "sqrt(m) / n",
        "subbotin_sensitivity": "m^(1/r) / n",
        "thresholds": {
            "Gauss-t": "sigma * sqrt(2 ln m)",
            "Sub(r)-t": "scale * mean over threshold_trials of max_i x_i, x iid standard Subbotin(r)",
        },
        "james_stein": "positive part: max(0, 1 - (m - 2) sigma^2 / ||y||^2) * y",
        "rng": "ChaCha8, child seeds by SplitMix64 from (seed, cell index) and (cell seed, database index + 1)",
    })
}
