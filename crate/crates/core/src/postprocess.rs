//! Denoising applied to a released vector. Post-processing never touches
//! the private data, so the privacy guarantee carries over unchanged.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{self, NoiseFamily};

/// Where a soft-threshold level came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdSource {
    /// `s √(2 ln m)`, the Gaussian bound on the expected maximum.
    AnalyticGaussian,
    /// Simulated expected maximum of the noise.
    MonteCarlo,
}

/// A non-negative soft-threshold level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    value: f64,
    source: ThresholdSource,
}

impl ThresholdSpec {
    pub fn new(value: f64, source: ThresholdSource) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::domain("threshold", format!("must be finite and >= 0 (got {value})")));
        }
        Ok(Self { value, source })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn source(&self) -> ThresholdSource {
        self.source
    }
}

/// Positive-part James-Stein shrinkage `max(0, 1 − (m−2)s²/‖y‖²) · y`.
pub fn james_stein(y: &[f64], scale: f64) -> Result<Vec<f64>> {
    let m = y.len();
    if m <= 2 {
        return Err(Error::domain("y", format!("needs dimension > 2 (got {m})")));
    }
    let norm2: f64 = y.iter().map(|v| v * v).sum();
    if norm2 == 0.0 {
        return Err(Error::domain("y", "shrinkage is undefined for the zero vector"));
    }
    let factor = (1.0 - (m - 2) as f64 * scale * scale / norm2).max(0.0);
    Ok(y.iter().map(|v| factor * v).collect())
}

/// Coordinatewise `sign(y) · max(0, |y| − t)`.
pub fn soft_threshold(y: &[f64], t: ThresholdSpec) -> Vec<f64> {
    y.iter()
        .map(|v| v.signum() * (v.abs() - t.value).max(0.0))
        .map(|v| if v == 0.0 { 0.0 } else { v })
        .collect()
}

/// `s √(2 ln m)` for `m ≥ 2`.
pub fn gaussian_threshold(scale: f64, m: usize) -> Result<ThresholdSpec> {
    if m < 2 {
        return Err(Error::domain("m", format!("needs m >= 2 (got {m})")));
    }
    ThresholdSpec::new(scale * (2.0 * (m as f64).ln()).sqrt(), ThresholdSource::AnalyticGaussian)
}

/// `s` times the average over `trials` draws of the largest coordinate of
/// an `m`-vector of standard variates from `family`.
///
/// The maximum is of the signed coordinates, not their magnitudes.
pub fn monte_carlo_threshold<R: Rng + ?Sized>(
    family: &NoiseFamily,
    scale: f64,
    m: usize,
    trials: usize,
    rng: &mut R,
) -> Result<ThresholdSpec> {
    if m == 0 || trials == 0 {
        return Err(Error::domain("m", "dimension and trial count must be positive"));
    }
    if scale == 0.0 {
        return ThresholdSpec::new(0.0, ThresholdSource::MonteCarlo);
    }
    let mut total = 0.0;
    for _ in 0..trials {
        let draws = noise::sample(family, m, rng);
        total += draws.into_iter().fold(f64::NEG_INFINITY, f64::max);
    }
    // A negative mean maximum (m = 1) has no use as a level.
    ThresholdSpec::new((scale * total / trials as f64).max(0.0), ThresholdSource::MonteCarlo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn level(t: f64) -> ThresholdSpec {
        ThresholdSpec::new(t, ThresholdSource::AnalyticGaussian).unwrap()
    }

    #[test]
    fn james_stein_examples() {
        assert_eq!(james_stein(&[2.0, 0.0, 0.0, 0.0], 1.0).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        // ‖y‖² = (m − 2) s² exactly
        let y = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(james_stein(&y, 2f64.sqrt()).unwrap(), vec![0.0; 4]);
        // large norm: nearly no shrinkage
        let y = [1e8, -1e8, 3e8];
        let out = james_stein(&y, 1.0).unwrap();
        for (a, b) in out.iter().zip(&y) {
            assert!((a / b - 1.0).abs() < 1e-15);
        }
        assert!(james_stein(&[1.0, 2.0], 1.0).is_err());
        assert!(james_stein(&[0.0; 5], 1.0).is_err());
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(&[1.5, -0.2], level(0.0)), vec![1.5, -0.2]);
        assert_eq!(soft_threshold(&[3.0, -0.5], level(1.0)), vec![2.0, 0.0]);
        assert_eq!(soft_threshold(&[-2.0, 2.0], level(2.0)), vec![0.0, 0.0]);
        assert!(ThresholdSpec::new(-1.0, ThresholdSource::MonteCarlo).is_err());
    }

    #[test]
    fn gaussian_threshold_examples() {
        assert!((gaussian_threshold(1.0, 8).unwrap().value() - 2.039_333_980_337_618).abs() < 1e-12);
        assert!((gaussian_threshold(1.0, 2).unwrap().value() - 1.177_410_022_515_474_6).abs() < 1e-12);
        assert_eq!(
            gaussian_threshold(2.0, 77).unwrap().value(),
            2.0 * gaussian_threshold(1.0, 77).unwrap().value()
        );
        assert!(gaussian_threshold(1.0, 1).is_err());
    }

    #[test]
    fn monte_carlo_threshold_examples() {
        let g = NoiseFamily::gaussian();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(monte_carlo_threshold(&g, 0.0, 10, 300, &mut rng).unwrap().value(), 0.0);

        let t = monte_carlo_threshold(&g, 1.5, 1000, 300, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let again = monte_carlo_threshold(&g, 1.5, 1000, 300, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(t, again);
        assert_eq!(t.source(), ThresholdSource::MonteCarlo);
        let analytic = gaussian_threshold(1.5, 1000).unwrap().value();
        assert!(t.value() < analytic && t.value() > 0.85 * analytic, "{} vs {analytic}", t.value());
    }

    /// Same seed per dimension; the gaps between these dimensions are many
    /// standard errors of a 300-trial mean wide.
    #[test]
    fn monte_carlo_threshold_grows_with_dimension() {
        let fam = NoiseFamily::subbotin(6.0).unwrap();
        let mut prev = 0.0;
        for m in [10, 100, 1000] {
            let t =
                monte_carlo_threshold(&fam, 1.0, m, 300, &mut ChaCha8Rng::seed_from_u64(21)).unwrap().value();
            assert!(t >= prev, "m = {m}");
            prev = t;
        }
    }

    proptest! {
        #[test]
        fn soft_threshold_contracts(y in prop::collection::vec(-1e3f64..1e3, 1..20), t in 0.0f64..50.0) {
            let out = soft_threshold(&y, level(t));
            let max_in = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let max_out = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(max_out <= max_in);
            for (o, v) in out.iter().zip(&y) {
                prop_assert!(o * v >= 0.0);
            }
        }

        #[test]
        fn james_stein_preserves_direction(y in prop::collection::vec(-1e3f64..1e3, 3..20), s in 0.0f64..100.0) {
            prop_assume!(y.iter().any(|v| *v != 0.0));
            let out = james_stein(&y, s).unwrap();
            let i = y.iter().position(|v| *v != 0.0).unwrap();
            let c = out[i] / y[i];
            prop_assert!((0.0..=1.0).contains(&c));
            for (o, v) in out.iter().zip(&y) {
                prop_assert!((o - c * v).abs() <= 1e-12 * v.abs().max(1.0));
            }
        }
    }
}
