//! Multidimensional mechanisms built from iid Subbotin coordinates.
//!
//! Adding `s·(X₁, …, X_m)` with `X_i` iid standard Subbotin(p) noise to an
//! `m`-dimensional query whose sensitivity is measured in the `p`-norm is
//! `(ε, δ)`-DP exactly when the scalar mechanism with the same `Δ` is. So the
//! vector scale is the one-dimensional scale, with no further dependence on
//! `m`. The joint density is `‖·‖_p`-spherical, and the worst shift direction
//! is a coordinate axis.
//!
//! ```
//! use logcalib::mech::{calibrate_vector, p_norm};
//! use logcalib::{PrivacyBudget, SensitivitySpec};
//! use rand::SeedableRng;
//!
//! let budget = PrivacyBudget::new(1.0, 1e-4).unwrap();
//! let sens = SensitivitySpec::new(1.0, 4.0, 3).unwrap();
//! let mech = calibrate_vector(4.0, budget, &sens).unwrap();
//!
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
//! let noisy = mech.apply(&[1.0, 2.0, 3.0], &mut rng).unwrap();
//! assert_eq!(noisy.len(), 3);
//! assert!(p_norm(&[3.0, 4.0], 2.0) == 5.0);
//! ```

use rand::Rng;

use crate::calibrate::{scale_for_budget, PrivacyBudget, SensitivitySpec};
use crate::error::{Error, Result};
use crate::noise::{self, LogConcaveNoise, NoiseFamily};
use crate::quad;

/// Subbotin(p) noise paired with a `p`-norm sensitivity.
#[derive(Debug, Clone)]
pub struct VectorMechanism {
    family: NoiseFamily,
    scale: f64,
    sensitivity: SensitivitySpec,
}

impl VectorMechanism {
    /// Fails unless `family` is Subbotin with index equal to the sensitivity's
    /// norm order, and `scale` is finite and non-negative.
    pub fn new(family: NoiseFamily, scale: f64, sensitivity: SensitivitySpec) -> Result<Self> {
        match family.subbotin_index() {
            Some(p) if p == sensitivity.norm_order => {}
            Some(p) => {
                return Err(Error::domain(
                    "norm_order",
                    format!(
                        "Subbotin index {p} must equal the sensitivity norm order {}",
                        sensitivity.norm_order
                    ),
                ))
            }
            None => {
                return Err(Error::domain(
                    "family",
                    format!("vector mechanisms need Subbotin noise (got {family})"),
                ))
            }
        }
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::domain("scale", format!("must be finite and >= 0 (got {scale})")));
        }
        Ok(Self { family, scale, sensitivity })
    }

    pub fn family(&self) -> &NoiseFamily {
        &self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn sensitivity(&self) -> &SensitivitySpec {
        &self.sensitivity
    }

    /// Returns `query + scale · X` with `X` iid standard Subbotin(p).
    ///
    /// The query length must equal the sensitivity's dimension.
    pub fn apply<R: Rng + ?Sized>(&self, query: &[f64], rng: &mut R) -> Result<Vec<f64>> {
        if query.len() != self.sensitivity.dimension {
            return Err(Error::domain(
                "query",
                format!(
                    "length {} does not match the sensitivity dimension {}",
                    query.len(),
                    self.sensitivity.dimension
                ),
            ));
        }
        if self.scale == 0.0 {
            return Ok(query.to_vec());
        }
        let noise = noise::sample(&self.family, query.len(), rng);
        Ok(query.iter().zip(noise).map(|(q, x)| q + self.scale * x).collect())
    }
}

/// Calibrates iid Subbotin(p) noise for a `p`-norm sensitivity.
///
/// The scale is the scalar Subbotin(p) scale at `Δ = sensitivity.delta_q`.
pub fn calibrate_vector(
    p: f64,
    budget: PrivacyBudget,
    sensitivity: &SensitivitySpec,
) -> Result<VectorMechanism> {
    let family = NoiseFamily::subbotin(p)?;
    if sensitivity.norm_order != p {
        return Err(Error::domain(
            "norm_order",
            format!(
                "sensitivity is measured in the {}-norm but the noise index is {p}",
                sensitivity.norm_order
            ),
        ));
    }
    let calibrated = scale_for_budget(&family, budget, sensitivity.delta_q)?;
    VectorMechanism::new(family, calibrated.scale, *sensitivity)
}

/// `(Σ |v_i|^p)^{1/p}` for `p ≥ 1`.
///
/// Entries are divided by the largest magnitude first so large and tiny
/// vectors do not overflow or underflow.
pub fn p_norm(v: &[f64], p: f64) -> f64 {
    let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if big == 0.0 || !big.is_finite() {
        return big;
    }
    if p == 1.0 {
        return v.iter().map(|x| x.abs()).sum();
    }
    let sum: f64 = v.iter().map(|x| (x.abs() / big).powf(p)).sum();
    big * sum.powf(1.0 / p)
}

/// Upper bound `m^{1/p} · |ν| · diam` on the `p`-norm sensitivity of a
/// linear query `ν Σ f(x_i)` whose per-record image has `ℓ∞` diameter `diam`.
///
/// Equality holds when the image is an `ℓ∞` ball.
pub fn linear_sensitivity_bound(m: usize, nu_abs: f64, range_inf_diameter: f64, p: f64) -> f64 {
    (m as f64).powf(1.0 / p) * nu_abs * range_inf_diameter
}

/// `∬ max(0, g(x − d) − e^ε g(x)) dx` over `[−20s, 20s]²` by nested
/// adaptive quadrature, where `g` is the density of `s·(X₁, X₂)` with iid
/// standard Subbotin(p) coordinates.
///
/// This evaluates the hockey-stick divergence of the two-dimensional
/// mechanism for an arbitrary shift without any threshold or reduction, and
/// serves as an independent check of the scalar calibration.
pub fn shifted_pair_delta(p: f64, epsilon: f64, shift: [f64; 2], scale: f64) -> Result<f64> {
    let family = NoiseFamily::subbotin(p)?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::domain("scale", format!("must be finite and > 0 (got {scale})")));
    }
    let [c1, c2] = [shift[0] / scale, shift[1] / scale];
    let e_eps = epsilon.exp();
    let reach = 20.0;
    let breaks = |c: f64| -> Vec<f64> {
        let mut b: Vec<f64> = (0..=16).map(|k| -reach + 2.5 * k as f64).collect();
        b.extend([0.0, c].into_iter().filter(|x| x.abs() < reach));
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    };
    let (outer_breaks, inner_breaks) = (breaks(c1), breaks(c2));
    // Standardized coordinates u = x / s; the Jacobian cancels the s⁻² factor.
    let outer = |u1: f64| {
        let shifted = family.density(u1 - c1);
        let base = e_eps * family.density(u1);
        if shifted == 0.0 {
            return 0.0;
        }
        let inner = |u2: f64| (shifted * family.density(u2 - c2) - base * family.density(u2)).max(0.0);
        quad::integrate_with_breaks(inner, &inner_breaks, 1e-11, 4_000).value
    };
    let q = quad::integrate_with_breaks(outer, &outer_breaks, 1e-9, 4_000);
    Ok(q.value.clamp(0.0, 1.0))
}
