//! Tight `(ε, δ)` criterion for symmetric log-concave mechanisms and its
//! inversion to the minimal privacy-preserving scale.
//!
//! For noise `X` with density `f = e^{-ψ}` on `(-a, a)`, the mechanism
//! `q(d) + s·X` with sensitivity `Δ` is `(ε, δ)`-DP exactly when
//!
//! ```text
//! F((Δ − t)/s) − e^ε F(−t/s) ≤ δ,   t = sup{ z < a·s : ψ(z/s) − ψ((z − Δ)/s) ≤ ε }.
//! ```
//!
//! [`privacy_profile`] evaluates the left-hand side, [`threshold_t`] the
//! threshold, and [`scale_for_budget`] finds the smallest `s` that meets a
//! budget. [`oracle_delta`] recomputes the same quantity by direct numerical
//! integration of the hockey-stick divergence and is kept as an independent
//! check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{LogConcaveNoise, NoiseFamily};
use crate::quad;

/// An `(ε, δ)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    epsilon: f64,
    delta: f64,
}

impl PrivacyBudget {
    /// Requires `ε ≥ 0` finite, `0 ≤ δ < 1`, and not both zero.
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::domain("epsilon", format!("must be finite and >= 0 (got {epsilon})")));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::domain("delta", format!("must satisfy 0 <= delta < 1 (got {delta})")));
        }
        if epsilon == 0.0 && delta == 0.0 {
            return Err(Error::domain(
                "epsilon",
                "epsilon and delta cannot both be 0: no finite scale achieves (0, 0)-DP",
            ));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Global sensitivity `Δ` measured in the `p`-norm of an `m`-dimensional query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivitySpec {
    pub delta_q: f64,
    pub norm_order: f64,
    pub dimension: usize,
}

impl SensitivitySpec {
    pub fn new(delta_q: f64, norm_order: f64, dimension: usize) -> Result<Self> {
        if !(delta_q >= 0.0 && delta_q.is_finite()) {
            return Err(Error::domain("sensitivity", format!("must be finite and >= 0 (got {delta_q})")));
        }
        if !(norm_order >= 1.0 && norm_order.is_finite()) {
            return Err(Error::domain("norm_order", format!("must be >= 1 (got {norm_order})")));
        }
        if dimension == 0 {
            return Err(Error::domain("dimension", "must be positive"));
        }
        Ok(Self { delta_q, norm_order, dimension })
    }

    /// A one-dimensional sensitivity (absolute value norm).
    pub fn scalar(delta_q: f64) -> Result<Self> {
        Self::new(delta_q, 1.0, 1)
    }
}

/// Outcome of a scale search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    /// Smallest feasible scale `s` (within tolerance, always on the feasible side).
    pub scale: f64,
    /// Threshold `t` at the returned scale; `+∞` when the likelihood ratio never exceeds `e^ε`.
    #[serde(with = "extended_real")]
    pub threshold: f64,
    /// Tight `δ` recomputed at `scale`.
    pub achieved_delta: f64,
    pub converged: bool,
    pub iterations: u32,
}

/// Tolerances and search limits for [`scale_for_budget_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    /// Bisection on `s` stops once the bracket is narrower than `scale_rel_tol · s`.
    pub scale_rel_tol: f64,
    /// Threshold search stops at `threshold_abs_tol · max(1, Δ, s)`.
    pub threshold_abs_tol: f64,
    /// Bracket expansion gives up after this many doublings (or halvings).
    pub max_doublings: u32,
    /// Use the Laplace and logistic closed forms instead of bisection.
    pub closed_forms: bool,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self { scale_rel_tol: 1e-9, threshold_abs_tol: 1e-12, max_doublings: 200, closed_forms: true }
    }
}

/// Threshold `t = sup{ z < a·s : ψ(z/s) − ψ((z−Δ)/s) ≤ ε }` for `Δ > 0`, `s > 0`.
pub fn threshold_t(family: &NoiseFamily, epsilon: f64, delta_q: f64, scale: f64) -> f64 {
    threshold_with_tol(family, epsilon, delta_q, scale, CalibrationConfig::default().threshold_abs_tol)
}

fn threshold_with_tol(family: &NoiseFamily, epsilon: f64, delta_q: f64, scale: f64, tol: f64) -> f64 {
    match family {
        NoiseFamily::Subbotin(_) if family.is_laplace() => {
            if delta_q <= epsilon * scale {
                f64::INFINITY
            } else {
                0.5 * (epsilon * scale + delta_q)
            }
        }
        NoiseFamily::Subbotin(_) if family.is_gaussian() => {
            (2.0 * epsilon * scale * scale + delta_q * delta_q) / (2.0 * delta_q)
        }
        NoiseFamily::Logistic(_) => logistic_threshold(epsilon, delta_q, scale),
        _ => threshold_by_bisection(family, epsilon, delta_q, scale, tol),
    }
}

/// Solves `ψ(z/s) − ψ((z−Δ)/s) = ε` for the logistic `ψ` in closed form.
fn logistic_threshold(epsilon: f64, delta_q: f64, scale: f64) -> f64 {
    let ratio = delta_q / scale;
    if ratio <= epsilon {
        return f64::INFINITY;
    }
    // (1 + u) / (1 + u c) = k with u = e^{-z/s}, c = e^{Δ/s}, k = e^{(ε − Δ/s)/2}.
    let one_minus_k = -((epsilon - ratio) / 2.0).exp_m1();
    let kc_minus_one = ((epsilon + ratio) / 2.0).exp_m1();
    -scale * (one_minus_k / kc_minus_one).ln()
}

/// Generic threshold search. The log ratio is non-decreasing in `z`, equals
/// zero at `z = Δ/2`, and is bracketed from above either by the support
/// boundary or by doubling.
///
/// The search runs in standardized coordinates `u = z/s`, so the support
/// boundary probe sits exactly one ulp inside `a` whatever the scale.
pub fn threshold_by_bisection(
    family: &dyn LogConcaveNoise,
    epsilon: f64,
    delta_q: f64,
    scale: f64,
    abs_tol: f64,
) -> f64 {
    let c = delta_q / scale;
    let above = |u: f64| {
        let l = family.log_ratio(u, c, 1.0);
        l.is_nan() || l > epsilon
    };
    let a = family.support_radius();
    let mut lo = 0.5 * c;
    let mut hi;
    if a.is_finite() {
        if lo >= a {
            return a * scale;
        }
        hi = a;
        if !above(next_down(a)) {
            return a * scale;
        }
    } else {
        if family.mlr_limit(delta_q, scale) <= epsilon {
            return f64::INFINITY;
        }
        hi = c.max(1.0);
        let mut doublings = 0;
        while !above(hi) {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if !hi.is_finite() || doublings > 2000 {
                return f64::INFINITY;
            }
        }
    }
    let tol = abs_tol * 1f64.max(delta_q).max(scale) / scale;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi) * scale
}

fn next_down(x: f64) -> f64 {
    if x > 0.0 {
        f64::from_bits(x.to_bits() - 1)
    } else {
        x
    }
}

/// Tight `δ` of the mechanism `q(d) + s·X` at privacy level `ε`:
/// `F((Δ − t)/s) − e^ε F(−t/s)`, clamped to `[0, 1]`.
pub fn privacy_profile(family: &NoiseFamily, epsilon: f64, delta_q: f64, scale: f64) -> f64 {
    profile_with_tol(family, epsilon, delta_q, scale, CalibrationConfig::default().threshold_abs_tol).0
}

/// Returns `(δ, t)`.
fn profile_with_tol(family: &NoiseFamily, epsilon: f64, delta_q: f64, scale: f64, tol: f64) -> (f64, f64) {
    if delta_q == 0.0 {
        return (0.0, f64::INFINITY);
    }
    let a = family.support_radius();
    if a.is_finite() && delta_q >= 2.0 * a * scale {
        return (1.0, a * scale);
    }
    let t = threshold_with_tol(family, epsilon, delta_q, scale, tol);
    if t == f64::INFINITY {
        return (0.0, t);
    }
    if a.is_finite() && t >= a * scale {
        return (family.cdf(delta_q / scale - a).clamp(0.0, 1.0), t);
    }
    let shifted = family.cdf((delta_q - t) / scale);
    let unshifted = family.cdf(-t / scale);
    let delta = if unshifted == 0.0 { shifted } else { shifted - epsilon.exp() * unshifted };
    (delta.clamp(0.0, 1.0), t)
}

/// Independent check of [`privacy_profile`]: integrates
/// `∫ max(0, s⁻¹f((x−Δ)/s) − e^ε s⁻¹f(x/s)) dx` by adaptive quadrature
/// without using the threshold.
pub fn oracle_delta(family: &NoiseFamily, epsilon: f64, delta_q: f64, scale: f64) -> f64 {
    if delta_q == 0.0 {
        return 0.0;
    }
    let a = family.support_radius();
    let (lo, hi) = if a.is_finite() {
        (delta_q - a * scale, delta_q + a * scale)
    } else {
        // The integrand is dominated by the shifted density.
        let q = -family.quantile(1e-18);
        (delta_q - q * scale, delta_q + q * scale)
    };
    let e_eps = epsilon.exp();
    let gap = |x: f64| {
        let shifted = family.density((x - delta_q) / scale);
        if shifted == 0.0 {
            return 0.0;
        }
        (shifted - e_eps * family.density(x / scale)) / scale
    };

    let mut breaks = vec![lo, hi, 0.0, delta_q];
    if a.is_finite() {
        breaks.extend([-a * scale, a * scale]);
    }
    // The positive part has a kink wherever the densities cross; an adaptive
    // rule never sees a kink that falls between its nodes, so crossings are
    // located by a sign scan of the density difference and made break points.
    let scan = 4096;
    let grid: Vec<f64> = (0..=scan).map(|k| lo + (hi - lo) * k as f64 / scan as f64).collect();
    for w in grid.windows(2) {
        let (mut l, mut r) = (w[0], w[1]);
        let positive_l = gap(l) > 0.0;
        if positive_l == (gap(r) > 0.0) {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (l + r);
            if mid <= l || mid >= r {
                break;
            }
            if (gap(mid) > 0.0) == positive_l {
                l = mid;
            } else {
                r = mid;
            }
        }
        breaks.push(r);
    }
    breaks.retain(|b| *b >= lo && *b <= hi);
    breaks.extend(grid.iter().step_by(scan / 32).copied());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let q = quad::integrate_with_breaks(|x| gap(x).max(0.0), &breaks, 1e-12, 50_000);
    q.value.clamp(0.0, 1.0)
}

/// Laplace closed form `Δ / (ε − 2 ln(1 − δ))`.
pub fn laplace_scale(epsilon: f64, delta: f64, delta_q: f64) -> f64 {
    delta_q / (epsilon - 2.0 * (-delta).ln_1p())
}

/// Logistic closed form `Δ / (2 ln((e^{ε/2} + √(δ(e^ε + δ − 1))) / (1 − δ)))`.
pub fn logistic_scale(epsilon: f64, delta: f64, delta_q: f64) -> f64 {
    let root = (delta * (epsilon.exp_m1() + delta)).sqrt();
    let denom = 2.0 * ((0.5 * epsilon).exp() + root).ln() - 2.0 * (-delta).ln_1p();
    delta_q / denom
}

/// Minimal scale meeting `budget` for sensitivity `delta_q`, default tolerances.
pub fn scale_for_budget(
    family: &NoiseFamily,
    budget: PrivacyBudget,
    delta_q: f64,
) -> Result<CalibrationResult> {
    scale_for_budget_with(family, budget, delta_q, &CalibrationConfig::default())
}

/// Minimal scale meeting `budget` for sensitivity `delta_q`.
///
/// Laplace and logistic families use their closed forms unless
/// `config.closed_forms` is off. `δ = 0` is decided from the family's MLR
/// limit; everything else brackets the scale by doubling from
/// `Δ (1 + 1/max(ε, 1e-6))` and bisects.
pub fn scale_for_budget_with(
    family: &NoiseFamily,
    budget: PrivacyBudget,
    delta_q: f64,
    config: &CalibrationConfig,
) -> Result<CalibrationResult> {
    if !(delta_q >= 0.0 && delta_q.is_finite()) {
        return Err(Error::domain("sensitivity", format!("must be finite and >= 0 (got {delta_q})")));
    }
    let (epsilon, delta) = (budget.epsilon(), budget.delta());
    if delta_q == 0.0 {
        return Ok(CalibrationResult {
            scale: 0.0,
            threshold: f64::INFINITY,
            achieved_delta: 0.0,
            converged: true,
            iterations: 0,
        });
    }
    let tol = config.threshold_abs_tol;
    let finish = |scale: f64, iterations: u32, converged: bool| {
        let (achieved_delta, threshold) = profile_with_tol(family, epsilon, delta_q, scale, tol);
        CalibrationResult { scale, threshold, achieved_delta, converged, iterations }
    };

    if config.closed_forms {
        if family.is_laplace() {
            return Ok(finish(laplace_scale(epsilon, delta, delta_q), 0, true));
        }
        if matches!(family, NoiseFamily::Logistic(_)) {
            return Ok(finish(logistic_scale(epsilon, delta, delta_q), 0, true));
        }
    }

    if delta == 0.0 {
        return pure_dp_scale(family, epsilon, delta_q, config).map(|(s, it)| finish(s, it, true));
    }

    let feasible = |s: f64| profile_with_tol(family, epsilon, delta_q, s, tol).0 <= delta;
    let mut iterations = 0u32;
    let start = delta_q * (1.0 + 1.0 / epsilon.max(1e-6));
    let (mut lo, mut hi);
    if feasible(start) {
        hi = start;
        lo = 0.5 * start;
        while feasible(lo) {
            hi = lo;
            lo *= 0.5;
            iterations += 1;
            if iterations > config.max_doublings {
                return Err(Error::NonConvergence(format!(
                    "{family}: budget met at every scale down to {hi:e}; no lower bracket"
                )));
            }
        }
    } else {
        lo = start;
        hi = 2.0 * start;
        while !feasible(hi) {
            lo = hi;
            hi *= 2.0;
            iterations += 1;
            if iterations > config.max_doublings || !hi.is_finite() {
                return Err(Error::NonConvergence(format!(
                    "{family}: delta = {delta:e} not reached after {} doublings of the scale",
                    config.max_doublings
                )));
            }
        }
    }
    while hi - lo > config.scale_rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(finish(hi, iterations, true))
}

/// `δ = 0` needs `t = ∞`, i.e. `mlr_limit(Δ, s) ≤ ε`, which only an
/// MLR-bounded family with unbounded support can offer.
fn pure_dp_scale(
    family: &NoiseFamily,
    epsilon: f64,
    delta_q: f64,
    config: &CalibrationConfig,
) -> Result<(f64, u32)> {
    if family.support_radius().is_finite() {
        return Err(Error::Infeasible(format!("{family}: finite-support noise cannot achieve delta = 0")));
    }
    if family.mlr_limit(delta_q, delta_q) == f64::INFINITY {
        return Err(Error::Infeasible(format!(
            "{family}: the likelihood ratio is unbounded, so delta = 0 is unachievable; use delta > 0"
        )));
    }
    let ok = |s: f64| family.mlr_limit(delta_q, s) <= epsilon;
    let mut iterations = 0u32;
    let mut lo = 0.0;
    let mut hi = delta_q * (1.0 + 1.0 / epsilon);
    while !ok(hi) {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if iterations > config.max_doublings {
            return Err(Error::NonConvergence(format!(
                "{family}: no scale with bounded likelihood ratio <= e^epsilon found"
            )));
        }
    }
    while hi - lo > config.scale_rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok((hi, iterations))
}

/// Minimal Gaussian `σ` for the budget. `δ` must be positive.
pub fn gaussian_scale(budget: PrivacyBudget, delta_q: f64) -> Result<CalibrationResult> {
    if budget.delta() == 0.0 {
        return Err(Error::Infeasible(
            "gaussian noise cannot achieve delta = 0 at any finite scale; use delta > 0".into(),
        ));
    }
    scale_for_budget(&NoiseFamily::gaussian(), budget, delta_q)
}

/// Serializes `±∞` as the strings `"inf"`/`"-inf"` so JSON stays well formed.
pub(crate) mod extended_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else if *x < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("nan")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Ok(f64::NAN),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{Logistic, Subbotin};
    use crate::specfun::std_normal_cdf;
    use std::sync::Arc;

    fn budget(e: f64, d: f64) -> PrivacyBudget {
        PrivacyBudget::new(e, d).unwrap()
    }

    #[test]
    fn budget_validation() {
        assert!(PrivacyBudget::new(-1.0, 0.1).is_err());
        assert!(PrivacyBudget::new(1.0, 1.0).is_err());
        assert!(PrivacyBudget::new(0.0, 0.0).is_err());
        assert!(PrivacyBudget::new(f64::NAN, 0.1).is_err());
        assert!(PrivacyBudget::new(0.0, 0.1).is_ok());
    }

    #[test]
    fn laplace_threshold_cases() {
        let f = NoiseFamily::laplace();
        assert_eq!(threshold_t(&f, 0.5, 1.0, 1.0), 0.75);
        assert_eq!(threshold_t(&f, 1.0, 1.0, 1.0), f64::INFINITY);
        assert_eq!(threshold_t(&f, 2.0, 1.0, 1.0), f64::INFINITY);
    }

    #[test]
    fn gaussian_threshold_formula() {
        let f = NoiseFamily::gaussian();
        for &(e, d, s) in &[(1.0, 1.0, 1.0), (0.1, 2.0, 0.5), (3.0, 0.3, 4.0)] {
            let want = (2.0 * e * s * s + d * d) / (2.0 * d);
            assert!((threshold_t(&f, e, d, s) - want).abs() < 1e-12);
        }
    }

    /// The closed-form thresholds agree with the generic search run on the
    /// same densities.
    #[test]
    fn closed_form_thresholds_match_bisection() {
        let cases: [(f64, f64, f64); 4] =
            [(0.3, 1.0, 1.0), (1.0, 2.0, 0.7), (0.0, 1.0, 3.0), (2.0, 5.0, 1.2)];
        let lap = Subbotin::new(1.0).unwrap();
        let gau = Subbotin::new(2.0).unwrap();
        for &(e, d, s) in &cases {
            let tol = 1e-12 * d.max(s).max(1.0);
            let pairs: [(&NoiseFamily, &dyn LogConcaveNoise); 3] = [
                (&NoiseFamily::laplace(), &lap),
                (&NoiseFamily::gaussian(), &gau),
                (&NoiseFamily::logistic(), &Logistic),
            ];
            for (fam, raw) in pairs {
                let closed = threshold_t(fam, e, d, s);
                let numeric = threshold_by_bisection(raw, e, d, s, 1e-12);
                if closed.is_infinite() {
                    assert!(numeric.is_infinite(), "{fam}");
                } else {
                    assert!((closed - numeric).abs() < 4.0 * tol, "{fam} {e} {d} {s}: {closed} vs {numeric}");
                }
            }
        }
    }

    #[test]
    fn threshold_exceeds_half_sensitivity() {
        for fam in [NoiseFamily::gaussian(), NoiseFamily::subbotin(3.0).unwrap(), NoiseFamily::logistic()] {
            for &e in &[0.01, 0.5, 2.0] {
                let t = threshold_t(&fam, e, 1.0, 0.8);
                assert!(t > 0.5, "{fam}");
            }
            assert!((threshold_t(&fam, 0.0, 1.0, 0.8) - 0.5).abs() < 1e-11);
        }
    }

    #[test]
    fn profile_examples() {
        let lap = NoiseFamily::laplace();
        let want = 1.0 - (-0.5f64).exp();
        assert!((privacy_profile(&lap, 0.0, 1.0, 1.0) - want).abs() < 1e-15);
        assert!((oracle_delta(&lap, 0.0, 1.0, 1.0) - want).abs() < 1e-8);
        assert_eq!(privacy_profile(&NoiseFamily::gaussian(), 1.0, 0.0, 1.0), 0.0);
        assert_eq!(oracle_delta(&NoiseFamily::gaussian(), 1.0, 0.0, 1.0), 0.0);

        let sub4 = NoiseFamily::subbotin(4.0).unwrap();
        let v = privacy_profile(&sub4, 1.0, 1.0, 1.0);
        assert!((v - oracle_delta(&sub4, 1.0, 1.0, 1.0)).abs() < 1e-8);

        let e = 1f64.exp();
        let lhs = std_normal_cdf(0.5 - 1.0) - e * std_normal_cdf(-0.5 - 1.0);
        let gau = NoiseFamily::gaussian();
        assert!((oracle_delta(&gau, 1.0, 1.0, 1.0) - lhs).abs() < 1e-8);
        assert!((privacy_profile(&gau, 1.0, 1.0, 1.0) - lhs).abs() < 1e-14);
    }

    #[test]
    fn truncated_support_cases() {
        let f = NoiseFamily::truncated_laplace(1.0).unwrap();
        // Δ ≥ 2as: disjoint supports
        assert_eq!(privacy_profile(&f, 1.0, 2.0, 1.0), 1.0);
        assert_eq!(privacy_profile(&f, 1.0, 3.0, 1.0), 1.0);
        // Δ/s ≤ ε so the ratio never exceeds e^ε inside the support: t = as
        let (d, s) = (0.5, 1.0);
        assert_eq!(threshold_t(&f, 1.0, d, s), 1.0);
        let want = f.cdf(d / s - 1.0);
        assert_eq!(privacy_profile(&f, 1.0, d, s), want);
        assert!((oracle_delta(&f, 1.0, d, s) - want).abs() < 1e-8);
        // δ = 0 is out of reach
        assert!(matches!(scale_for_budget(&f, budget(1.0, 0.0), 1.0), Err(Error::Infeasible(_))));
        let r = scale_for_budget(&f, budget(1.0, 0.05), 1.0).unwrap();
        assert!(r.achieved_delta <= 0.05 + 1e-12);
    }

    #[test]
    fn scale_examples() {
        let lap = NoiseFamily::laplace();
        let r = scale_for_budget(&lap, budget(1.0, 0.0), 1.0).unwrap();
        assert_eq!(r.scale, 1.0);
        assert_eq!(r.achieved_delta, 0.0);

        let r = scale_for_budget(&NoiseFamily::logistic(), budget(0.0, 0.1), 1.0).unwrap();
        let want = 1.0 / (2.0 * (1.1f64 / 0.9).ln());
        assert!((r.scale - want).abs() < 1e-12);
        assert!((r.scale - 2.491_644_327_281_985).abs() < 1e-12);

        let r = scale_for_budget(&lap, budget(1.0, 0.1), 1.0).unwrap();
        let want = 1.0 / (1.0 - 2.0 * 0.9f64.ln());
        assert!((r.scale - want).abs() < 1e-12);
        assert!((r.scale - 0.825_954_100_188_82).abs() < 1e-12);
        let numeric = scale_for_budget_with(
            &lap,
            budget(1.0, 0.1),
            1.0,
            &CalibrationConfig { closed_forms: false, ..Default::default() },
        )
        .unwrap();
        assert!(((numeric.scale - want) / want).abs() < 1e-8);
        assert!((oracle_delta(&lap, 1.0, 1.0, want) - 0.1).abs() < 1e-9);
    }

    #[test]
    fn zero_sensitivity() {
        let r = scale_for_budget(&NoiseFamily::gaussian(), budget(1.0, 1e-5), 0.0).unwrap();
        assert_eq!(r.scale, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn pure_dp_via_mlr_limit() {
        let cfg = CalibrationConfig { closed_forms: false, ..Default::default() };
        for fam in [NoiseFamily::laplace(), NoiseFamily::logistic()] {
            let r = scale_for_budget_with(&fam, budget(0.5, 0.0), 3.0, &cfg).unwrap();
            assert!((r.scale - 6.0).abs() < 6.0 * 1e-9, "{fam}");
            assert_eq!(r.achieved_delta, 0.0);
        }
        let err = scale_for_budget(&NoiseFamily::subbotin(1.5).unwrap(), budget(1.0, 0.0), 1.0);
        assert!(matches!(err, Err(Error::Infeasible(_))));
        assert!(matches!(gaussian_scale(budget(1.0, 0.0), 1.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn gaussian_examples() {
        let r = gaussian_scale(budget(1.0, 1e-4), 10f64.sqrt() / 500.0).unwrap();
        assert_eq!((r.scale * 100.0).round() / 100.0, 0.02);

        let r = gaussian_scale(budget(1.0, 1e-5), 1.0).unwrap();
        assert!((oracle_delta(&NoiseFamily::gaussian(), 1.0, 1.0, r.scale) - 1e-5).abs() < 1e-9);

        let mut prev = f64::INFINITY;
        for &d in &[0.5, 0.9, 0.99, 0.999_999] {
            let s = gaussian_scale(budget(1.0, d), 1.0).unwrap().scale;
            assert!(s < prev);
            prev = s;
        }
        assert!(prev < 0.2);
    }

    #[test]
    fn custom_family_uses_generic_path() {
        let fam = NoiseFamily::custom(Arc::new(Logistic)).unwrap();
        let r = scale_for_budget(&fam, budget(0.5, 1e-3), 2.0).unwrap();
        let want = logistic_scale(0.5, 1e-3, 2.0);
        assert!(((r.scale - want) / want).abs() < 1e-8);
    }

    #[test]
    fn result_serializes_infinite_threshold() {
        let r = scale_for_budget(&NoiseFamily::laplace(), budget(1.0, 0.0), 1.0).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"threshold\":\"inf\""));
        let back: CalibrationResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back.threshold, f64::INFINITY);
    }
}
