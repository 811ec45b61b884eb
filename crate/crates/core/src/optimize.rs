//! Choice of the Subbotin index for a linear vector query.
//!
//! For each candidate index `r` the `r`-norm sensitivity of the query is
//! bounded, the scalar Subbotin(r) scale is calibrated at that sensitivity,
//! and the per-coordinate mean squared error `s_r² · Var(X_r)` is recorded.
//! The index with the smallest error wins.
//!
//! ```
//! use logcalib::optimize::{default_grid, optimize_p};
//! use logcalib::PrivacyBudget;
//!
//! let budget = PrivacyBudget::new(1.0, 1e-4).unwrap();
//! let best = optimize_p(budget, 1000, 1.0 / 500.0, 1.0, &default_grid()).unwrap();
//! assert_eq!(best.r_star, 7.0);
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibrate::{scale_for_budget, PrivacyBudget};
use crate::error::{Error, Result};
use crate::mech::linear_sensitivity_bound;
use crate::noise::{subbotin_variance, NoiseFamily};

/// One grid point of the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridEvaluation {
    pub r: f64,
    pub sensitivity: f64,
    pub scale: f64,
    pub mse: f64,
}

/// A grid point whose calibration failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFailure {
    pub r: f64,
    pub reason: String,
}

/// Result of [`optimize_p`]. `grid_evaluations` keeps the grid order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationOutcome {
    pub r_star: f64,
    pub scale_star: f64,
    pub mse_star: f64,
    pub grid_evaluations: Vec<GridEvaluation>,
    pub failures: Vec<GridFailure>,
}

/// `s² · Var(X_r)`.
pub fn mse_of(r: f64, scale: f64) -> f64 {
    scale * scale * subbotin_variance(r)
}

/// `1, 1.5, 2, …, 14`.
pub fn default_grid() -> Vec<f64> {
    (2..=28).map(|k| 0.5 * k as f64).collect()
}

/// Grid search for the mean-squared-error-optimal Subbotin index.
///
/// Ties go to the smaller `r`. Grid points are calibrated in parallel but
/// the outcome does not depend on scheduling.
pub fn optimize_p(
    budget: PrivacyBudget,
    m: usize,
    nu_abs: f64,
    range_inf_diameter: f64,
    grid: &[f64],
) -> Result<OptimizationOutcome> {
    if grid.is_empty() {
        return Err(Error::domain("grid", "must contain at least one index"));
    }
    if let Some(bad) = grid.iter().find(|r| !(**r >= 1.0 && r.is_finite())) {
        return Err(Error::domain("grid", format!("indices must be finite and >= 1 (got {bad})")));
    }
    if m == 0 {
        return Err(Error::domain("dim", "must be positive"));
    }
    if !(nu_abs >= 0.0 && nu_abs.is_finite()) {
        return Err(Error::domain("nu", format!("must be finite and >= 0 (got {nu_abs})")));
    }
    if !(range_inf_diameter >= 0.0 && range_inf_diameter.is_finite()) {
        return Err(Error::domain("diam", format!("must be finite and >= 0 (got {range_inf_diameter})")));
    }

    let results: Vec<(f64, Result<GridEvaluation>)> = grid
        .par_iter()
        .map(|&r| {
            let sensitivity = linear_sensitivity_bound(m, nu_abs, range_inf_diameter, r);
            let eval = NoiseFamily::subbotin(r)
                .and_then(|fam| scale_for_budget(&fam, budget, sensitivity))
                .map(|c| GridEvaluation { r, sensitivity, scale: c.scale, mse: mse_of(r, c.scale) });
            (r, eval)
        })
        .collect();

    let mut grid_evaluations = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (r, eval) in results {
        match eval {
            Ok(e) => grid_evaluations.push(e),
            Err(e) => failures.push(GridFailure { r, reason: e.to_string() }),
        }
    }
    let best = grid_evaluations
        .iter()
        .fold(None::<&GridEvaluation>, |best, e| match best {
            Some(b) if b.mse < e.mse || (b.mse == e.mse && b.r <= e.r) => Some(b),
            _ => Some(e),
        })
        .copied()
        .ok_or_else(|| {
            Error::NonConvergence(format!(
                "calibration failed at every grid index ({} points)",
                failures.len()
            ))
        })?;
    Ok(OptimizationOutcome {
        r_star: best.r,
        scale_star: best.scale,
        mse_star: best.mse,
        grid_evaluations,
        failures,
    })
}
