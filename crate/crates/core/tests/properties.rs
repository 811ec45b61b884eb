//! Property tests for the calibration invariants.

use logcalib::{
    gaussian_scale, oracle_delta, privacy_profile, scale_for_budget, LogConcaveNoise, NoiseFamily,
    PrivacyBudget,
};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn family() -> impl Strategy<Value = NoiseFamily> {
    prop_oneof![
        Just(NoiseFamily::laplace()),
        Just(NoiseFamily::logistic()),
        Just(NoiseFamily::gaussian()),
        (1.0f64..8.0).prop_map(|r| NoiseFamily::subbotin(r).unwrap()),
        (0.5f64..6.0).prop_map(|a| NoiseFamily::truncated_laplace(a).unwrap()),
    ]
}

fn smooth_family() -> impl Strategy<Value = NoiseFamily> {
    prop_oneof![
        Just(NoiseFamily::logistic()),
        Just(NoiseFamily::gaussian()),
        (1.2f64..6.0).prop_map(|r| NoiseFamily::subbotin(r).unwrap()),
    ]
}

fn budget() -> impl Strategy<Value = PrivacyBudget> {
    (0.01f64..3.0, -8.0f64..-1.0).prop_map(|(e, d)| PrivacyBudget::new(e, 10f64.powf(d)).unwrap())
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        max_global_rejects: 1 << 16,
        rng_seed: RngSeed::Fixed(0x5eed),
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn scale_is_linear_in_sensitivity(fam in family(), b in budget(), q in prop::sample::select(vec![0.1, 1.0, 7.0])) {
        let unit = scale_for_budget(&fam, b, 1.0).unwrap().scale;
        let scaled = scale_for_budget(&fam, b, q).unwrap().scale;
        prop_assert!(((scaled - q * unit) / (q * unit)).abs() <= 1e-9, "{} vs {}", scaled, q * unit);
    }

    /// The returned scale meets the budget up to rounding, and a scale 1e-6
    /// smaller does not.
    #[test]
    fn calibration_is_tight(fam in family(), b in budget(), q in 0.1f64..5.0) {
        let r = scale_for_budget(&fam, b, q).unwrap();
        // the profile is a difference of O(1) terms: absolute precision only
        prop_assert!(r.achieved_delta <= b.delta() + 1e-14 * b.epsilon().exp());
        let below = privacy_profile(&fam, b.epsilon(), q, r.scale * (1.0 - 1e-6));
        prop_assert!(below > b.delta(), "profile {} just below the scale", below);
    }

    #[test]
    fn scale_non_increasing_in_budget(fam in family(), e in 0.01f64..3.0, d in -8.0f64..-3.0, de in 0.0f64..1.0, dd in 0.0f64..2.0) {
        let s = |e: f64, d: f64| scale_for_budget(&fam, PrivacyBudget::new(e, 10f64.powf(d)).unwrap(), 1.0).unwrap().scale;
        let base = s(e, d);
        prop_assert!(s(e + de, d) <= base * (1.0 + 1e-9));
        prop_assert!(s(e, d + dd) <= base * (1.0 + 1e-9));
    }

    /// Strictly decreasing in `s` and `ε`, strictly increasing in `Δ`, wherever
    /// the threshold is interior and the profile is not rounded to 0.
    #[test]
    fn profile_is_monotone(fam in smooth_family(), e in 0.0f64..3.0, q in 0.2f64..3.0, ratio in 0.3f64..3.0) {
        let s = q * ratio;
        let p = privacy_profile(&fam, e, q, s);
        prop_assume!(p > 1e-12 && p < 1.0 - 1e-6);
        let h = 1e-3;
        prop_assert!(privacy_profile(&fam, e, q, s * (1.0 + h)) < p);
        prop_assert!(privacy_profile(&fam, e + h, q, s) < p);
        prop_assert!(privacy_profile(&fam, e, q * (1.0 + h), s) > p);
    }

    #[test]
    fn profile_matches_integral_oracle(fam in family(), e in 0.0f64..3.0, q in 0.1f64..3.0, ratio in 0.2f64..5.0) {
        let s = q * ratio;
        let gap = (privacy_profile(&fam, e, q, s) - oracle_delta(&fam, e, q, s)).abs();
        prop_assert!(gap <= 1e-8, "gap {}", gap);
    }

    /// The likelihood ratio `f((z−Δ)/s) / f(z/s)` is non-decreasing on the support.
    #[test]
    fn likelihood_ratio_is_monotone(fam in family(), q in 0.1f64..3.0, s in 0.1f64..3.0) {
        let reach = fam.support_radius().min(30.0) * s;
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=400 {
            let z = -reach + 2.0 * reach * k as f64 / 400.0;
            let l = fam.log_ratio(z, q, s);
            if l.is_nan() || fam.psi(z / s).is_infinite() {
                continue;
            }
            prop_assert!(l >= prev - 1e-9 * (1.0 + l.abs()), "z = {}", z);
            prev = l;
        }
    }
}

#[test]
fn gaussian_scale_diverges_and_laplace_converges() {
    let b = |d: f64| PrivacyBudget::new(1.0, d).unwrap();
    let deltas: Vec<f64> = (1..=5).map(|k| 10f64.powi(-2 * k)).collect();
    let gauss: Vec<f64> = deltas.iter().map(|&d| gaussian_scale(b(d), 1.0).unwrap().scale).collect();
    assert!(gauss.windows(2).all(|w| w[1] > w[0]));
    let lap = scale_for_budget(&NoiseFamily::laplace(), b(1e-10), 1.0).unwrap().scale;
    assert!((lap - 1.0).abs() < 1e-6);
}

#[test]
fn finite_support_edge_cases() {
    let fam = NoiseFamily::truncated_laplace(2.0).unwrap();
    // Δ ≥ 2as: the supports of the two outputs do not overlap
    assert_eq!(privacy_profile(&fam, 1.0, 5.0, 1.0), 1.0);
    // Δ/s ≤ ε keeps the ratio below e^ε up to the boundary, so δ = F(Δ/s − a)
    let (q, s) = (0.5, 1.0);
    let p = privacy_profile(&fam, 1.0, q, s);
    assert!((p - fam.cdf(q / s - 2.0)).abs() < 1e-15);
    assert!((p - oracle_delta(&fam, 1.0, q, s)).abs() < 1e-10);
}
