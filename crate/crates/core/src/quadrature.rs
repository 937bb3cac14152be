//! One-dimensional quadrature.
//!
//! Finite intervals use adaptive composite Simpson with interval bisection.
//! Callers pass the kinks of piecewise-smooth integrands as break points so
//! that every panel sees a smooth function. Semi-infinite intervals are
//! mapped onto `[0, 1)` and handled by a globally adaptive Gauss–Kronrod
//! (7, 15) rule, which never evaluates the mapped endpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Absolute and relative error targets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-10,
        }
    }
}

const INITIAL_PANELS: usize = 4;
const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> f64 {
    simpson_with_breaks(f, &[a, b], tol)
}

/// Adaptive Simpson over consecutive break points `points[0] < points[1] < ...`.
///
/// Break points are always panel boundaries. Degenerate or reversed pairs are
/// skipped, so callers may pass unsorted or duplicated kinks after clamping.
pub fn simpson_with_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> f64 {
    let mut pts: Vec<f64> = points.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    pts.dedup();
    if pts.len() < 2 {
        return 0.0;
    }
    let total_len = pts[pts.len() - 1] - pts[0];

    struct Panel {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
    }

    let mut panels = Vec::new();
    let mut coarse = 0.0;
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let step = (hi - lo) / INITIAL_PANELS as f64;
        let mut fa = f(lo);
        for i in 0..INITIAL_PANELS {
            let a = lo + step * i as f64;
            let b = if i + 1 == INITIAL_PANELS { hi } else { a + step };
            let m = 0.5 * (a + b);
            let fm = f(m);
            let fb = f(b);
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            coarse += whole;
            panels.push(Panel {
                a,
                b,
                fa,
                fm,
                fb,
                whole,
            });
            fa = fb;
        }
    }

    let eps_total = tol.abs.max(tol.rel * coarse.abs());
    panels
        .iter()
        .map(|p| {
            let eps = eps_total * (p.b - p.a) / total_len;
            refine(&f, p.a, p.b, p.fa, p.fm, p.fb, p.whole, eps, MAX_DEPTH)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps || !delta.is_finite() || lm <= a || rm >= b {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}

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
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

const MAX_SEGMENTS: usize = 4000;

/// Globally adaptive Gauss–Kronrod (7, 15) on a finite interval.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> f64 {
    if a == b {
        return 0.0;
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > tol.abs.max(tol.rel * total.abs()) && heap.len() < MAX_SEGMENTS {
        let Some(worst) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, m);
        let (v2, e2) = gk15(&f, m, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: m,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum in a fixed order so the result does not depend on heap layout.
    let mut segs = heap.into_vec();
    segs.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    segs.iter().map(|s| s.value).sum()
}

/// `∫_a^∞ f(r) dr` through the map `r = a + s / (1 - s)`.
pub fn half_line<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> f64 {
    gauss_kronrod(
        |s| {
            let one_minus = 1.0 - s;
            let r = a + s / one_minus;
            f(r) / (one_minus * one_minus)
        },
        0.0,
        1.0,
        tol,
    )
}
