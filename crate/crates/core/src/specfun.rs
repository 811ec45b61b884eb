//! Special functions behind the noise densities, distribution functions and
//! quantiles: log-gamma, the regularized incomplete gamma functions and their
//! inverse, and the standard normal distribution.
//!
//! The checked functions return [`Error::Domain`] for arguments outside their
//! domain (including NaN). The crate-internal `*_unchecked` variants skip the
//! checks for hot loops whose arguments are already validated.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const FPMIN: f64 = 1e-300;
const MAX_SERIES_TERMS: usize = 100_000;

fn check_finite(param: &'static str, x: f64) -> Result<()> {
    if x.is_nan() {
        return Err(Error::domain(param, "must not be NaN"));
    }
    Ok(())
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_finite("x", x)?;
    if x <= 0.0 {
        return Err(Error::domain("x", format!("log_gamma requires x > 0 (got {x})")));
    }
    Ok(log_gamma_unchecked(x))
}

/// Gamma function for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    log_gamma(x).map(f64::exp)
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x == f64::INFINITY {
        return f64::INFINITY;
    }
    if x < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        return (PI / (PI * x).sin()).ln() - log_gamma_unchecked(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    HALF_LN_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `ln(x^a e^{-x} / Γ(a))`, the common prefactor of both incomplete-gamma
/// expansions. Also the log of `x` times the Gamma(a, 1) density at `x`.
fn log_prefactor(a: f64, x: f64) -> f64 {
    a * x.ln() - x - log_gamma_unchecked(a)
}

fn lower_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_SERIES_TERMS {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * f64::EPSILON {
            break;
        }
    }
    sum * log_prefactor(a, x).exp()
}

fn upper_continued_fraction(a: f64, x: f64) -> f64 {
    // Modified Lentz evaluation.
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_SERIES_TERMS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    log_prefactor(a, x).exp() * h
}

/// Lower regularized incomplete gamma `P(a, x)`; arguments assumed valid.
pub(crate) fn gamma_p_unchecked(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x == f64::INFINITY {
        1.0
    } else if x < a + 1.0 {
        lower_series(a, x).min(1.0)
    } else {
        1.0 - upper_continued_fraction(a, x)
    }
}

/// Upper regularized incomplete gamma `Q(a, x)`; arguments assumed valid.
pub(crate) fn gamma_q_unchecked(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x == f64::INFINITY {
        0.0
    } else if x < a + 1.0 {
        (1.0 - lower_series(a, x)).max(0.0)
    } else {
        upper_continued_fraction(a, x)
    }
}

fn check_gamma_args(a: f64, x: f64) -> Result<()> {
    check_finite("a", a)?;
    check_finite("x", x)?;
    if a <= 0.0 || a.is_infinite() {
        return Err(Error::domain("a", format!("shape must be finite and > 0 (got {a})")));
    }
    if x < 0.0 {
        return Err(Error::domain("x", format!("must be >= 0 (got {x})")));
    }
    Ok(())
}

/// Upper regularized incomplete gamma `Q(a, x) = Γ(a, x) / Γ(a)`.
///
/// Uses the power series for `x < a + 1` and a continued fraction otherwise,
/// so the small tail is always computed directly rather than by subtraction.
pub fn reg_gamma_upper(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    Ok(gamma_q_unchecked(a, x))
}

/// Lower regularized incomplete gamma `P(a, x) = 1 - Q(a, x)`.
pub fn reg_gamma_lower(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    Ok(gamma_p_unchecked(a, x))
}

/// Inverse of `x ↦ P(a, x)`: the `p`-quantile of the Gamma(a, 1) distribution.
pub fn inv_reg_gamma_lower(p: f64, a: f64) -> Result<f64> {
    check_finite("p", p)?;
    check_finite("a", a)?;
    if !(0.0..1.0).contains(&p) {
        return Err(Error::domain("p", format!("must lie in [0, 1) (got {p})")));
    }
    if a <= 0.0 || a.is_infinite() {
        return Err(Error::domain("a", format!("shape must be finite and > 0 (got {a})")));
    }
    Ok(if p <= 0.5 { inv_gamma_p_unchecked(p, a) } else { inv_gamma_q_unchecked(1.0 - p, a) })
}

/// Inverse of `x ↦ Q(a, x)` for `q ∈ (0, 1]`.
pub fn inv_reg_gamma_upper(q: f64, a: f64) -> Result<f64> {
    check_finite("q", q)?;
    check_finite("a", a)?;
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::domain("q", format!("must lie in (0, 1] (got {q})")));
    }
    if a <= 0.0 || a.is_infinite() {
        return Err(Error::domain("a", format!("shape must be finite and > 0 (got {a})")));
    }
    Ok(inv_gamma_q_unchecked(q, a))
}

pub(crate) fn inv_gamma_p_unchecked(p: f64, a: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    solve_log_tail(a, p, Tail::Lower)
}

pub(crate) fn inv_gamma_q_unchecked(q: f64, a: f64) -> f64 {
    if q >= 1.0 {
        return 0.0;
    }
    if q <= 0.0 {
        return f64::INFINITY;
    }
    solve_log_tail(a, q, Tail::Upper)
}

#[derive(Clone, Copy, PartialEq)]
enum Tail {
    Lower,
    Upper,
}

/// Rough quantile of Gamma(a, 1) used only to seed the safeguarded solver.
fn initial_guess(a: f64, p_lower: f64) -> f64 {
    if a > 1.0 {
        let pp = if p_lower < 0.5 { p_lower } else { 1.0 - p_lower };
        let t = (-2.0 * pp.max(1e-300).ln()).sqrt();
        let mut z = (2.307_53 + t * 0.270_61) / (1.0 + t * (0.992_29 + t * 0.044_81)) - t;
        if p_lower >= 0.5 {
            z = -z;
        }
        // z approximates the lower-tail normal quantile.
        let w = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * a.sqrt());
        (a * w * w * w).max(1e-3)
    } else {
        let t = 1.0 - a * (0.253 + a * 0.12);
        if p_lower < t {
            (p_lower / t).powf(1.0 / a)
        } else {
            1.0 - (1.0 - (p_lower - t) / (1.0 - t)).ln()
        }
    }
}

/// Solves `ln T(a, e^y) = ln target` for `y` where `T` is `P` or `Q`.
///
/// Newton steps on the log scale are taken when they stay inside the current
/// bracket; otherwise the bracket is bisected.
fn solve_log_tail(a: f64, target: f64, tail: Tail) -> f64 {
    let ln_target = target.ln();
    let h = |y: f64| -> (f64, f64) {
        let x = y.exp();
        let (value, sign) = match tail {
            Tail::Lower => (gamma_p_unchecked(a, x), 1.0),
            Tail::Upper => (gamma_q_unchecked(a, x), -1.0),
        };
        let residual = value.ln() - ln_target;
        let slope = sign * (log_prefactor(a, x) - value.ln()).exp();
        // `increasing` orientation: residual grows with y for Lower.
        (sign * residual, slope * sign)
    };

    let p_lower = match tail {
        Tail::Lower => target,
        Tail::Upper => 1.0 - target,
    };
    let x0 = initial_guess(a, p_lower);
    let mut y = if x0 > 0.0 && x0.is_finite() { x0.ln() } else { 0.0 };

    // Bracket: g(lo) <= 0 <= g(hi) with g increasing in y.
    let g = |y: f64| h(y).0;
    let (mut lo, mut hi);
    let g0 = g(y);
    if g0 <= 0.0 {
        lo = y;
        let mut step = 1.0;
        hi = y + step;
        while g(hi) < 0.0 && hi < 800.0 {
            lo = hi;
            step *= 2.0;
            hi += step;
        }
    } else {
        hi = y;
        let mut step = 1.0;
        lo = y - step;
        while g(lo) > 0.0 && lo > -1e5 {
            hi = lo;
            step *= 2.0;
            lo -= step;
        }
    }
    y = y.clamp(lo, hi);

    for _ in 0..400 {
        let (gy, slope) = h(y);
        if gy == 0.0 {
            return y.exp();
        }
        if gy.is_nan() {
            // ln(0) at an extreme endpoint; treat as below target.
            lo = y;
        } else if gy < 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let newton = y - gy / slope;
        let next = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let converged = (next - y).abs() <= 4.0 * f64::EPSILON * y.abs().max(1.0)
            || (hi - lo) <= 4.0 * f64::EPSILON * hi.abs().max(1.0);
        y = next;
        if converged {
            break;
        }
    }
    y.exp()
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function Φ.
///
/// Both tails are evaluated through `Q(1/2, x²/2)`, so `Φ(x)` keeps full
/// relative accuracy for very negative `x`.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let tail = 0.5 * gamma_q_unchecked(0.5, 0.5 * x * x);
    if x < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Inverse of [`std_normal_cdf`] for `p ∈ (0, 1)`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    check_finite("p", p)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("p", format!("must lie in (0, 1) (got {p})")));
    }
    Ok(std_normal_quantile_unchecked(p))
}

pub(crate) fn std_normal_quantile_unchecked(p: f64) -> f64 {
    if p == 0.5 {
        0.0
    } else if p < 0.5 {
        -(2.0 * inv_gamma_q_unchecked(2.0 * p, 0.5)).sqrt()
    } else {
        (2.0 * inv_gamma_q_unchecked(2.0 * (1.0 - p), 0.5)).sqrt()
    }
}
