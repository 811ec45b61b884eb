//! Symmetric log-concave noise families.
//!
//! A standard noise variable `X` has density `f = e^{-ψ}` with `ψ` convex and
//! even on a symmetric support `(-a, a)`, `a ∈ (0, ∞]`. A mechanism adds
//! `s·X` to the true query value; everything in [`crate::calibrate`] is
//! phrased in terms of the standard member and the scale `s`.
//!
//! Built-in families:
//!
//! * [`Subbotin`] (exponential power, `ψ(x) = |x|^r / r + ln C(r)`, `r ≥ 1`),
//!   which contains the Laplace (`r = 1`) and Gaussian (`r = 2`) densities;
//! * [`Logistic`];
//! * [`TruncatedLaplace`], the Laplace density restricted to `(-a, a)` and
//!   renormalized.
//!
//! Anything else can be plugged in through [`LogConcaveNoise`] and
//! [`NoiseFamily::custom`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01};

use crate::error::{Error, Result};
use crate::specfun::{gamma_q_unchecked, inv_gamma_q_unchecked, log_gamma_unchecked};

/// A standard symmetric log-concave noise distribution.
///
/// Implementations must describe an even, convex `ψ`. Only the lower tail of
/// the distribution function is required to be accurate in relative terms;
/// [`cdf`](Self::cdf) for positive arguments is derived by symmetry.
pub trait LogConcaveNoise: fmt::Debug + Send + Sync {
    /// Negative log-density, `+∞` outside the support.
    fn psi(&self, x: f64) -> f64;

    /// `F(x)` for `x ≤ 0`, i.e. the lower tail mass.
    fn lower_tail(&self, x: f64) -> f64;

    /// Quantile for `p ∈ (0, 1/2]`.
    fn lower_quantile(&self, p: f64) -> f64;

    /// Variance of the standard member.
    fn variance(&self) -> f64;

    /// Half-width `a` of the support `(-a, a)`; `f64::INFINITY` when unbounded.
    fn support_radius(&self) -> f64 {
        f64::INFINITY
    }

    /// `lim_{z→∞} ψ(z/s) − ψ((z−Δ)/s)`, `+∞` for MLR-unbounded families.
    fn mlr_limit(&self, delta_q: f64, scale: f64) -> f64;

    fn density(&self, x: f64) -> f64 {
        (-self.psi(x)).exp()
    }

    /// `ψ(z/s) − ψ((z−Δ)/s)`, the log-likelihood ratio of unshifted to shifted
    /// noise at `z`.
    fn log_ratio(&self, z: f64, delta_q: f64, scale: f64) -> f64 {
        let hi = self.psi(z / scale);
        let lo = self.psi((z - delta_q) / scale);
        if lo == f64::INFINITY {
            f64::NEG_INFINITY
        } else {
            hi - lo
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            self.lower_tail(x)
        } else {
            1.0 - self.lower_tail(-x)
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        if p <= 0.5 {
            self.lower_quantile(p)
        } else {
            -self.lower_quantile(1.0 - p)
        }
    }
}

/// Subbotin (exponential power / generalized normal) noise with index `r ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subbotin {
    r: f64,
    log_norm: f64,
    variance: f64,
}

impl Subbotin {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_nan() || r < 1.0 || r.is_infinite() {
            return Err(Error::domain("r", format!("Subbotin index must be finite and >= 1 (got {r})")));
        }
        Ok(Self { r, log_norm: subbotin_log_norm(r), variance: subbotin_variance(r) })
    }

    pub fn index(&self) -> f64 {
        self.r
    }

    /// Draws one standard variate as `±G^{1/r}` with `G ~ Gamma(1/r, scale r)`.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g: f64 = self.gamma_law().sample(rng);
        let magnitude = g.powf(1.0 / self.r);
        if rng.random::<bool>() {
            magnitude
        } else {
            -magnitude
        }
    }

    fn gamma_law(&self) -> Gamma<f64> {
        Gamma::new(1.0 / self.r, self.r).expect("shape and scale are positive")
    }
}

/// `ln C(r)` with `C(r) = 2 Γ(1/r) r^{1/r − 1}`.
pub fn subbotin_log_norm(r: f64) -> f64 {
    std::f64::consts::LN_2 + log_gamma_unchecked(1.0 / r) + (1.0 / r - 1.0) * r.ln()
}

/// Variance `r^{2/r} Γ(3/r) / Γ(1/r)` of the standard Subbotin variable.
pub fn subbotin_variance(r: f64) -> f64 {
    ((2.0 / r) * r.ln() + log_gamma_unchecked(3.0 / r) - log_gamma_unchecked(1.0 / r)).exp()
}

impl LogConcaveNoise for Subbotin {
    fn psi(&self, x: f64) -> f64 {
        x.abs().powf(self.r) / self.r + self.log_norm
    }

    fn lower_tail(&self, x: f64) -> f64 {
        let u = x.abs().powf(self.r) / self.r;
        0.5 * gamma_q_unchecked(1.0 / self.r, u)
    }

    fn lower_quantile(&self, p: f64) -> f64 {
        if p >= 0.5 {
            return 0.0;
        }
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let g = inv_gamma_q_unchecked(2.0 * p, 1.0 / self.r);
        -(self.r * g).powf(1.0 / self.r)
    }

    fn variance(&self) -> f64 {
        self.variance
    }

    fn mlr_limit(&self, delta_q: f64, scale: f64) -> f64 {
        if self.r == 1.0 {
            delta_q / scale
        } else {
            f64::INFINITY
        }
    }

    fn log_ratio(&self, z: f64, delta_q: f64, scale: f64) -> f64 {
        let u = (z / scale).abs().powf(self.r);
        let w = ((z - delta_q) / scale).abs().powf(self.r);
        (u - w) / self.r
    }
}

/// Standard logistic noise, density `e^{-x} / (1 + e^{-x})²`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Logistic;

impl LogConcaveNoise for Logistic {
    fn psi(&self, x: f64) -> f64 {
        let ax = x.abs();
        ax + 2.0 * (-ax).exp().ln_1p()
    }

    fn lower_tail(&self, x: f64) -> f64 {
        let e = x.exp();
        e / (1.0 + e)
    }

    fn lower_quantile(&self, p: f64) -> f64 {
        if p >= 0.5 {
            return 0.0;
        }
        p.ln() - (-p).ln_1p()
    }

    fn variance(&self) -> f64 {
        PI * PI / 3.0
    }

    fn mlr_limit(&self, delta_q: f64, scale: f64) -> f64 {
        delta_q / scale
    }
}

/// Laplace noise restricted to `(-a, a)` and renormalized to unit mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedLaplace {
    a: f64,
    /// `2 (1 − e^{−a})`
    norm: f64,
}

impl TruncatedLaplace {
    pub fn new(a: f64) -> Result<Self> {
        if a.is_nan() || a <= 0.0 || a.is_infinite() {
            return Err(Error::domain("a", format!("support radius must be finite and > 0 (got {a})")));
        }
        Ok(Self { a, norm: -2.0 * (-a).exp_m1() })
    }
}

impl LogConcaveNoise for TruncatedLaplace {
    fn psi(&self, x: f64) -> f64 {
        if x.abs() < self.a {
            x.abs() + self.norm.ln()
        } else {
            f64::INFINITY
        }
    }

    fn lower_tail(&self, x: f64) -> f64 {
        if x <= -self.a {
            0.0
        } else {
            (-self.a).exp() * (x + self.a).exp_m1() / self.norm
        }
    }

    fn lower_quantile(&self, p: f64) -> f64 {
        if p >= 0.5 {
            return 0.0;
        }
        -self.a + (p * self.norm * self.a.exp()).ln_1p()
    }

    fn variance(&self) -> f64 {
        let a = self.a;
        (2.0 - (-a).exp() * (a * a + 2.0 * a + 2.0)) / -(-a).exp_m1()
    }

    fn support_radius(&self) -> f64 {
        self.a
    }

    fn mlr_limit(&self, delta_q: f64, scale: f64) -> f64 {
        // Supremum of the log ratio over the joint support; the finite support
        // itself is handled by the threshold search.
        delta_q / scale
    }
}

/// A noise family: one of the built-in models or a user-supplied one.
#[derive(Debug, Clone)]
pub enum NoiseFamily {
    Subbotin(Subbotin),
    Logistic(Logistic),
    TruncatedLaplace(TruncatedLaplace),
    Custom(Arc<dyn LogConcaveNoise>),
}

impl NoiseFamily {
    pub fn subbotin(r: f64) -> Result<Self> {
        Subbotin::new(r).map(NoiseFamily::Subbotin)
    }

    pub fn laplace() -> Self {
        NoiseFamily::Subbotin(Subbotin::new(1.0).expect("r = 1 is valid"))
    }

    pub fn gaussian() -> Self {
        NoiseFamily::Subbotin(Subbotin::new(2.0).expect("r = 2 is valid"))
    }

    pub fn logistic() -> Self {
        NoiseFamily::Logistic(Logistic)
    }

    pub fn truncated_laplace(a: f64) -> Result<Self> {
        TruncatedLaplace::new(a).map(NoiseFamily::TruncatedLaplace)
    }

    /// Wraps a user model. In debug builds the evenness and midpoint
    /// convexity of `ψ` are checked on a grid and violations rejected.
    pub fn custom(model: Arc<dyn LogConcaveNoise>) -> Result<Self> {
        if cfg!(debug_assertions) {
            check_shape(model.as_ref())?;
        }
        Ok(NoiseFamily::Custom(model))
    }

    /// The Subbotin index when this is a Subbotin family.
    pub fn subbotin_index(&self) -> Option<f64> {
        match self {
            NoiseFamily::Subbotin(s) => Some(s.index()),
            _ => None,
        }
    }

    pub fn is_laplace(&self) -> bool {
        self.subbotin_index() == Some(1.0)
    }

    pub fn is_gaussian(&self) -> bool {
        self.subbotin_index() == Some(2.0)
    }

    fn model(&self) -> &dyn LogConcaveNoise {
        match self {
            NoiseFamily::Subbotin(m) => m,
            NoiseFamily::Logistic(m) => m,
            NoiseFamily::TruncatedLaplace(m) => m,
            NoiseFamily::Custom(m) => m.as_ref(),
        }
    }

    /// Draws one standard variate.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            NoiseFamily::Subbotin(s) => s.sample_one(rng),
            other => {
                let u: f64 = Open01.sample(rng);
                other.quantile(u)
            }
        }
    }
}

impl LogConcaveNoise for NoiseFamily {
    fn psi(&self, x: f64) -> f64 {
        self.model().psi(x)
    }
    fn lower_tail(&self, x: f64) -> f64 {
        self.model().lower_tail(x)
    }
    fn lower_quantile(&self, p: f64) -> f64 {
        self.model().lower_quantile(p)
    }
    fn variance(&self) -> f64 {
        self.model().variance()
    }
    fn support_radius(&self) -> f64 {
        self.model().support_radius()
    }
    fn mlr_limit(&self, delta_q: f64, scale: f64) -> f64 {
        self.model().mlr_limit(delta_q, scale)
    }
    fn density(&self, x: f64) -> f64 {
        self.model().density(x)
    }
    fn log_ratio(&self, z: f64, delta_q: f64, scale: f64) -> f64 {
        self.model().log_ratio(z, delta_q, scale)
    }
    fn cdf(&self, x: f64) -> f64 {
        self.model().cdf(x)
    }
    fn quantile(&self, p: f64) -> f64 {
        self.model().quantile(p)
    }
}

impl fmt::Display for NoiseFamily {
    /// Uses the same grammar that [`FromStr`] accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseFamily::Subbotin(s) if s.index() == 1.0 => f.write_str("laplace"),
            NoiseFamily::Subbotin(s) if s.index() == 2.0 => f.write_str("gaussian"),
            NoiseFamily::Subbotin(s) => write!(f, "subbotin:{}", s.index()),
            NoiseFamily::Logistic(_) => f.write_str("logistic"),
            NoiseFamily::TruncatedLaplace(t) => write!(f, "truncated-laplace:{}", t.a),
            NoiseFamily::Custom(_) => f.write_str("custom"),
        }
    }
}

impl FromStr for NoiseFamily {
    type Err = Error;

    /// Parses `laplace`, `logistic`, `gaussian`, `subbotin:R` or
    /// `truncated-laplace:A`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let parse_param = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::domain("family", format!("cannot parse parameter '{v}' in '{s}'")))
        };
        match lower.split_once(':') {
            None => match lower.as_str() {
                "laplace" => Ok(NoiseFamily::laplace()),
                "gaussian" | "normal" => Ok(NoiseFamily::gaussian()),
                "logistic" => Ok(NoiseFamily::logistic()),
                _ => Err(Error::domain(
                    "family",
                    format!(
                        "unknown family '{s}' (expected laplace, logistic, gaussian, subbotin:R or truncated-laplace:A)"
                    ),
                )),
            },
            Some(("subbotin", r)) => NoiseFamily::subbotin(parse_param(r)?)
                .map_err(|e| Error::domain("family", e.to_string())),
            Some(("truncated-laplace", a)) => NoiseFamily::truncated_laplace(parse_param(a)?)
                .map_err(|e| Error::domain("family", e.to_string())),
            Some(_) => Err(Error::domain("family", format!("unknown family '{s}'"))),
        }
    }
}

/// Grid check that `ψ` is even and midpoint convex on its support.
pub fn check_shape(model: &dyn LogConcaveNoise) -> Result<()> {
    let a = model.support_radius();
    let reach = if a.is_finite() { a } else { 20.0 };
    let grid: Vec<f64> = (0..=200).map(|k| reach * (k as f64 / 100.0 - 1.0) * 0.999).collect();
    for &x in &grid {
        let (p, q) = (model.psi(x), model.psi(-x));
        if (p - q).abs() > 1e-9 * (1.0 + p.abs()) {
            return Err(Error::domain("family", format!("psi is not even at x = {x}")));
        }
    }
    for (i, &x) in grid.iter().enumerate() {
        for &y in grid.iter().skip(i + 1).step_by(7) {
            let mid = model.psi(0.5 * (x + y));
            let chord = 0.5 * (model.psi(x) + model.psi(y));
            if mid > chord + 1e-9 * (1.0 + chord.abs()) {
                return Err(Error::domain("family", format!("psi is not convex between {x} and {y}")));
            }
        }
    }
    Ok(())
}

/// Draws `count` iid standard variates from `family`.
pub fn sample<R: Rng + ?Sized>(family: &NoiseFamily, count: usize, rng: &mut R) -> Vec<f64> {
    match family {
        NoiseFamily::Subbotin(s) => {
            let law = s.gamma_law();
            let inv_r = 1.0 / s.index();
            (0..count)
                .map(|_| {
                    let g: f64 = law.sample(rng);
                    let m = g.powf(inv_r);
                    if rng.random::<bool>() {
                        m
                    } else {
                        -m
                    }
                })
                .collect()
        }
        other => (0..count).map(|_| other.sample_one(rng)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_families() -> Vec<NoiseFamily> {
        vec![
            NoiseFamily::laplace(),
            NoiseFamily::gaussian(),
            NoiseFamily::subbotin(1.5).unwrap(),
            NoiseFamily::subbotin(4.0).unwrap(),
            NoiseFamily::subbotin(14.0).unwrap(),
            NoiseFamily::logistic(),
            NoiseFamily::truncated_laplace(1.0).unwrap(),
            NoiseFamily::truncated_laplace(3.0).unwrap(),
        ]
    }

    #[test]
    fn subbotin_variance_examples() {
        assert!((NoiseFamily::laplace().variance() - 2.0).abs() < 1e-13);
        assert!((NoiseFamily::gaussian().variance() - 1.0).abs() < 1e-13);
        // uniform(-1, 1) limit; the approach is slow (r^{2/r} ≈ 1 + 2 ln r / r),
        // 0.3495 at r = 200 and within 0.01 of 1/3 only from r ≈ 450 on.
        assert!((subbotin_variance(200.0) - 0.349_504_770_780_645).abs() < 1e-10);
        assert!((subbotin_variance(500.0) - 1.0 / 3.0).abs() < 0.01);
        let mut prev = subbotin_variance(2.0);
        for r in [4.0, 10.0, 50.0, 200.0, 1000.0, 5000.0] {
            let v = subbotin_variance(r);
            assert!(v < prev && v > 1.0 / 3.0);
            prev = v;
        }
    }

    #[test]
    fn laplace_cdf() {
        let f = NoiseFamily::laplace();
        assert_eq!(f.cdf(0.0), 0.5);
        assert!((f.cdf(1.0) - (1.0 - (-1f64).exp() / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn logistic_basics() {
        let f = NoiseFamily::logistic();
        assert_eq!(f.cdf(0.0), 0.5);
        assert!((f.variance() - 3.289_868_133_696_453).abs() < 1e-12);
        assert_eq!(f.psi(2.0) - f.psi(-2.0), 0.0);
        // ψ(x) = x + 2 log(1 + e^{-x}) for positive and negative x
        for &x in &[-3.0, -0.2, 0.7, 5.0] {
            let direct = x + 2.0 * (1.0 + f64::exp(-x)).ln();
            assert!((f.psi(x) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn truncated_laplace_basics() {
        let f = NoiseFamily::truncated_laplace(1.0).unwrap();
        assert_eq!(f.cdf(1.0), 1.0);
        assert_eq!(f.cdf(0.0), 0.5);
        assert_eq!(f.support_radius(), 1.0);
        assert_eq!(f.psi(1.0), f64::INFINITY);
        let mass = quad::integrate(|x| f.density(x), -1.0, 1.0, 1e-13).value;
        assert!((mass - 1.0).abs() < 1e-8);
        assert!(NoiseFamily::truncated_laplace(0.0).is_err());
    }

    #[test]
    fn rejects_invalid_subbotin_index() {
        assert!(NoiseFamily::subbotin(0.5).is_err());
        assert!(NoiseFamily::subbotin(f64::NAN).is_err());
    }

    #[test]
    fn psi_even_and_midpoint_convex() {
        for f in all_families() {
            check_shape(&f).unwrap_or_else(|e| panic!("{f}: {e}"));
        }
    }

    #[test]
    fn cdf_symmetry_and_quantile_round_trip() {
        for f in all_families() {
            let reach = f.support_radius().min(6.0) * 0.95;
            for k in -20..=20 {
                let x = reach * k as f64 / 20.0;
                if f.cdf(-x.abs()) < 1e-6 {
                    // upper-tail round trips lose digits to 1 − F
                    continue;
                }
                assert!((f.cdf(-x) - (1.0 - f.cdf(x))).abs() < 1e-14, "{f} at {x}");
                let back = f.quantile(f.cdf(x));
                assert!((back - x).abs() < 1e-8, "{f}: quantile(F({x})) = {back}");
            }
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        for f in all_families() {
            let a = f.support_radius();
            let reach = if a.is_finite() { a } else { 60.0 };
            let q = quad::integrate_with_breaks(|x| f.density(x), &[-reach, 0.0, reach], 1e-12, 5000);
            assert!((q.value - 1.0).abs() < 1e-8, "{f}: mass {}", q.value);
        }
    }

    #[test]
    fn variances_match_quadrature() {
        for f in all_families() {
            let a = f.support_radius();
            let reach = if a.is_finite() { a } else { 80.0 };
            let q = quad::integrate_with_breaks(|x| x * x * f.density(x), &[-reach, 0.0, reach], 1e-12, 5000);
            assert!((q.value - f.variance()).abs() < 1e-8, "{f}");
        }
    }

    #[test]
    fn cdf_matches_density_integral() {
        for f in all_families() {
            let lo = -f.support_radius().min(60.0);
            for &x in &[-2.5, -0.7, 0.0, 0.4] {
                if x <= lo {
                    continue;
                }
                let q = quad::integrate_with_breaks(|u| f.density(u), &[lo, x], 1e-13, 5000);
                assert!((q.value - f.cdf(x)).abs() < 1e-10, "{f} at {x}");
            }
        }
    }

    #[test]
    fn likelihood_ratio_is_monotone() {
        for f in all_families() {
            for &(d, s) in &[(1.0, 1.0), (0.5, 2.0), (3.0, 0.7)] {
                let a = f.support_radius() * s;
                let lo = if a.is_finite() { d - a } else { -10.0 };
                let hi = if a.is_finite() { a } else { 10.0 };
                let mut prev = f64::NEG_INFINITY;
                for k in 1..400 {
                    let z = lo + (hi - lo) * k as f64 / 400.0;
                    let l = f.log_ratio(z, d, s);
                    assert!(l >= prev - 1e-12, "{f}: ratio decreased at z = {z}");
                    prev = l;
                }
            }
        }
    }

    #[test]
    fn mlr_limits() {
        assert_eq!(NoiseFamily::laplace().mlr_limit(1.0, 2.0), 0.5);
        assert_eq!(NoiseFamily::logistic().mlr_limit(3.0, 1.0), 3.0);
        assert_eq!(NoiseFamily::gaussian().mlr_limit(1.0, 1.0), f64::INFINITY);
        assert_eq!(NoiseFamily::subbotin(1.5).unwrap().mlr_limit(1.0, 1.0), f64::INFINITY);
    }

    #[test]
    fn parse_and_display() {
        for s in ["laplace", "gaussian", "logistic", "subbotin:1.5", "truncated-laplace:3"] {
            let f: NoiseFamily = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!(NoiseFamily::from_str("subbotin:2").unwrap().is_gaussian());
        assert!("subbotin:0.5".parse::<NoiseFamily>().is_err());
        assert!("cauchy".parse::<NoiseFamily>().is_err());
    }

    #[derive(Debug)]
    struct Bimodal;
    impl LogConcaveNoise for Bimodal {
        fn psi(&self, x: f64) -> f64 {
            (x * x - 1.0).powi(2)
        }
        fn lower_tail(&self, _: f64) -> f64 {
            unimplemented!()
        }
        fn lower_quantile(&self, _: f64) -> f64 {
            unimplemented!()
        }
        fn variance(&self) -> f64 {
            1.0
        }
        fn mlr_limit(&self, _: f64, _: f64) -> f64 {
            f64::INFINITY
        }
    }

    #[test]
    fn custom_rejects_non_convex_psi() {
        assert!(check_shape(&Bimodal).is_err());
        if cfg!(debug_assertions) {
            assert!(NoiseFamily::custom(Arc::new(Bimodal)).is_err());
        }
        assert!(NoiseFamily::custom(Arc::new(Logistic)).is_ok());
    }

    #[test]
    fn sample_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gauss = sample(&NoiseFamily::gaussian(), 1_000_000, &mut rng);
        let var = gauss.iter().map(|x| x * x).sum::<f64>() / gauss.len() as f64;
        assert!((var - 1.0).abs() < 0.01);

        let lap = sample(&NoiseFamily::laplace(), 1_000_000, &mut rng);
        let mean = lap.iter().sum::<f64>() / lap.len() as f64;
        assert!(mean.abs() < 0.01);

        let logi = sample(&NoiseFamily::logistic(), 1_000_000, &mut rng);
        let var = logi.iter().map(|x| x * x).sum::<f64>() / logi.len() as f64;
        assert!((var - PI * PI / 3.0).abs() < 0.05);
    }

    #[test]
    fn sampling_is_reproducible() {
        let f = NoiseFamily::subbotin(3.0).unwrap();
        let a = sample(&f, 16, &mut ChaCha8Rng::seed_from_u64(5));
        let b = sample(&f, 16, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }
}
