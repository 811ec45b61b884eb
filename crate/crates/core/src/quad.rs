//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Used by the verification oracles, which must not share code paths with
//! the closed-form privacy criterion they check.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Default cap on the number of subintervals.
pub const MAX_INTERVALS: usize = 20_000;

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut values = [(0.0, 0.0); 7];
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, v) in values.iter_mut().enumerate() {
        let dx = half * XGK[j];
        *v = (f(center - dx), f(center + dx));
        let s = v.0 + v.1;
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    // Error estimate as in QUADPACK's qk15: |K − G| alone can vanish by
    // accident on a panel containing a kink.
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    let mut abs = WGK[7] * fc.abs();
    for (j, (l, r)) in values.iter().enumerate() {
        asc += WGK[j] * ((l - mean).abs() + (r - mean).abs());
        abs += WGK[j] * (l.abs() + r.abs());
    }
    let (asc, abs) = (asc * half.abs(), abs * half.abs());
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs);
    }
    Piece { a, b, value: kronrod * half, error }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Quadrature {
    integrate_with_breaks(f, &[a, b], tol, MAX_INTERVALS)
}

/// Integrates `f` over `[points[0], points.last()]`, seeding the subdivision
/// with the given interior break points (kinks, discontinuities).
///
/// Break points must be sorted ascending; duplicates are ignored.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: f64,
    max_intervals: usize,
) -> Quadrature {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod(&mut f, w[0], w[1]));
            evaluations += 15;
        }
    }
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    let mut since_resum = 0;
    while error > tol && heap.len() < max_intervals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        error -= worst.error;
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; nothing left to refine.
            heap.push(Piece { error: 0.0, ..worst });
        } else {
            let left = kronrod(&mut f, worst.a, mid);
            let right = kronrod(&mut f, mid, worst.b);
            error += left.error + right.error;
            heap.push(left);
            heap.push(right);
            evaluations += 30;
        }
        since_resum += 1;
        if since_resum == 256 {
            // running total drifts under cancellation
            error = heap.iter().map(|p| p.error).sum();
            since_resum = 0;
        }
        if heap.peek().is_some_and(|p| p.error == 0.0) {
            break;
        }
    }
    // Summing in interval order keeps the result independent of heap layout.
    let mut pieces = heap.into_vec();
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    Quadrature {
        value: pieces.iter().map(|p| p.value).sum(),
        error: pieces.iter().map(|p| p.error).sum(),
        evaluations,
    }
}
