//! Scalar comparison problems for the moment `G_φ`.
//!
//! The nonlinear problem is `z'' = 2B(A1 z^γ - A2 E)` with first integral
//! `z'² = f(z)`, `f(z) = 4B(A1 z^{γ+1}/(γ+1) - A2 E z) + c`. The linear
//! problem `z'' = κ² z + P(t)` with polynomial forcing has a closed form.

use crate::error::{invalid, Error, Result};
use crate::model::{Background, ConstantsBundle};
use crate::ode::{dopri_step, integrate, Control, OdeOptions, StepRecord};
use crate::quadrature::{simpson, Tolerance};

/// Tolerance of the blowup-time quadrature.
pub const BLOWUP_TIME_TOLERANCE: Tolerance = Tolerance::new(1e-14, 1e-10);

/// Relative size of `f(G⁺⁺)` below which the minimum counts as a double root.
pub const DOUBLE_ROOT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonlinearComparisonProblem {
    pub b: f64,
    pub a1: f64,
    pub a2: f64,
    pub energy: f64,
    pub gamma: f64,
    pub z0: f64,
    pub z0_prime: f64,
    /// First-integral constant, chosen so that `f(z0) = z0'²`.
    pub c: f64,
}

impl NonlinearComparisonProblem {
    pub fn new(b: f64, a1: f64, a2: f64, energy: f64, gamma: f64, z0: f64, z0_prime: f64) -> Result<Self> {
        let finite = [b, a1, a2, energy, gamma, z0, z0_prime].iter().all(|v| v.is_finite());
        if !finite {
            return Err(invalid("comparison", "all coefficients must be finite"));
        }
        if !(b > 0.0) {
            return Err(invalid("B", format!("must be positive, got {b}")));
        }
        if a1 < 0.0 || a2 < 0.0 || energy < 0.0 {
            return Err(invalid("comparison", "A1, A2 and the energy must be nonnegative"));
        }
        if !(gamma > 1.0) {
            return Err(invalid("gamma", format!("heat ratio must exceed 1, got {gamma}")));
        }
        if z0 < 0.0 {
            return Err(invalid("z0", format!("initial moment must be nonnegative, got {z0}")));
        }
        let mut p = Self {
            b,
            a1,
            a2,
            energy,
            gamma,
            z0,
            z0_prime,
            c: 0.0,
        };
        p.c = z0_prime * z0_prime - p.potential(z0);
        Ok(p)
    }

    pub fn from_constants(k: &ConstantsBundle, energy: f64, z0: f64, z0_prime: f64) -> Result<Self> {
        Self::new(k.b, k.a1, k.a2, energy, k.gamma, z0, z0_prime)
    }

    /// `f(z) - c`.
    fn potential(&self, z: f64) -> f64 {
        4.0 * self.b * (self.a1 * z.powf(self.gamma + 1.0) / (self.gamma + 1.0) - self.a2 * self.energy * z)
    }

    pub fn f(&self, z: f64) -> f64 {
        self.potential(z) + self.c
    }

    pub fn f_prime(&self, z: f64) -> f64 {
        4.0 * self.b * (self.a1 * z.powf(self.gamma) - self.a2 * self.energy)
    }

    pub fn f_second(&self, z: f64) -> f64 {
        4.0 * self.b * self.gamma * self.a1 * z.powf(self.gamma - 1.0)
    }

    /// `f(b - s) - f(b)` without cancellation for small `s`.
    fn drop_from(&self, b: f64, s: f64) -> f64 {
        let power = if self.a1 == 0.0 || b == 0.0 {
            0.0
        } else {
            self.a1 * b.powf(self.gamma + 1.0) * ((self.gamma + 1.0) * (-s / b).ln_1p()).exp_m1() / (self.gamma + 1.0)
        };
        4.0 * self.b * (power + self.a2 * self.energy * s)
    }

    /// Right-hand side of the first-order system `(z, z')`.
    pub fn rhs(&self, y: &[f64; 2]) -> [f64; 2] {
        [y[1], 0.5 * self.f_prime(y[0].max(0.0))]
    }

    /// Minimum point `(A2 E / A1)^{1/γ}` of `f`; infinite when `A1 = 0`.
    pub fn g_plusplus(&self) -> f64 {
        if self.a1 == 0.0 {
            f64::INFINITY
        } else {
            (self.a2 * self.energy / self.a1).powf(1.0 / self.gamma)
        }
    }

    fn scale(&self) -> f64 {
        let z = if self.a1 == 0.0 { self.z0 } else { self.g_plusplus() };
        let terms = 4.0 * self.b * (self.a1 * z.powf(self.gamma + 1.0) / (self.gamma + 1.0) + self.a2 * self.energy * z);
        terms.max(self.c.abs()).max(f64::MIN_POSITIVE)
    }
}

/// Whether `f` has a root above `z0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootCase {
    /// `f > 0` on `(z0, ∞)`.
    NoRoots,
    /// Two roots or a double root on `[z0, ∞)`.
    Roots,
}

impl RootCase {
    pub fn case_id(self) -> u8 {
        match self {
            RootCase::NoRoots => 1,
            RootCase::Roots => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootStructure {
    pub case: RootCase,
    /// Smallest root of `f` on `[z0, ∞)`.
    pub z_star: Option<f64>,
    /// `f` has a double root at `z_star`.
    pub degenerate: bool,
    pub g_plusplus: f64,
}

/// Classifies the roots of `f` above `z0` and locates the smaller one.
///
/// Since `f` decreases up to `G⁺⁺` and increases after it, the sign of
/// `f(G⁺⁺)` decides the case; the root is bracketed in `[z0, G⁺⁺]`.
pub fn root_structure(p: &NonlinearComparisonProblem) -> Result<RootStructure> {
    let gpp = p.g_plusplus();
    if p.z0 > gpp * (1.0 + 1e-12) {
        return Err(Error::MomentAboveMinimum {
            z0: p.z0,
            g_plusplus: gpp,
        });
    }
    if p.a1 == 0.0 {
        // f is affine and decreasing when A2 E > 0
        let slope = 4.0 * p.b * p.a2 * p.energy;
        if slope == 0.0 {
            return Ok(RootStructure {
                case: RootCase::NoRoots,
                z_star: None,
                degenerate: false,
                g_plusplus: gpp,
            });
        }
        return Ok(RootStructure {
            case: RootCase::Roots,
            z_star: Some(p.c / slope),
            degenerate: false,
            g_plusplus: gpp,
        });
    }
    let fmin = p.f(gpp);
    let tol = DOUBLE_ROOT_TOLERANCE * p.scale();
    if fmin > tol {
        return Ok(RootStructure {
            case: RootCase::NoRoots,
            z_star: None,
            degenerate: false,
            g_plusplus: gpp,
        });
    }
    if fmin >= -tol {
        return Ok(RootStructure {
            case: RootCase::Roots,
            z_star: Some(gpp),
            degenerate: true,
            g_plusplus: gpp,
        });
    }
    let z_star = if p.z0_prime == 0.0 {
        p.z0
    } else {
        smaller_root(p, p.z0, gpp)
    };
    Ok(RootStructure {
        case: RootCase::Roots,
        z_star: Some(z_star),
        degenerate: false,
        g_plusplus: gpp,
    })
}

/// Root of the decreasing branch of `f` in `[lo, hi]`, `f(lo) ≥ 0 > f(hi)`.
fn smaller_root(p: &NonlinearComparisonProblem, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p.f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-3 * hi {
            break;
        }
    }
    // Newton from the bracket midpoint, kept inside the bracket.
    let mut z = 0.5 * (lo + hi);
    for _ in 0..50 {
        let d = p.f_prime(z);
        if d == 0.0 {
            break;
        }
        let next = (z - p.f(z) / d).clamp(lo, hi);
        let done = (next - z).abs() <= 1e-15 * z.abs();
        z = next;
        if done {
            break;
        }
    }
    z
}

/// Upper bounds on the moment: `G⁺`, `G⁺⁺` and `z₊ = min(m, G⁺)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperBounds {
    pub g_plus: f64,
    pub g_plusplus: f64,
    pub z_plus: f64,
}

pub fn upper_bounds(k: &ConstantsBundle, mass: f64, energy: f64) -> UpperBounds {
    let g_plus = k.g_plus(energy);
    UpperBounds {
        g_plus,
        g_plusplus: k.g_plusplus(energy),
        z_plus: mass.min(g_plus),
    }
}

/// Time at which the comparison solution reaches zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowupTime {
    /// `+∞` when the trajectory never reaches zero.
    pub value: f64,
    /// The trajectory approaches a double root of `f`.
    pub degenerate: bool,
}

/// `∫_a^b dz / √f(z)` where `f(b) = f_b`, possibly zero at a simple root.
///
/// With `u = √(b - z)` the integrand becomes `2u / √(f_b + f(b - u²) - f(b))`,
/// which is bounded at a simple root.
fn inverse_sqrt_integral(p: &NonlinearComparisonProblem, a: f64, b: f64, f_b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let slope = -p.f_prime(b);
    let g = |u: f64| {
        if u == 0.0 {
            return if f_b > 0.0 { 0.0 } else { 2.0 / slope.sqrt() };
        }
        // u² can exceed b - a by an ulp at the far end
        let val = f_b + p.drop_from(b, (u * u).min(b - a));
        2.0 * u / val.max(f64::MIN_POSITIVE).sqrt()
    };
    simpson(g, 0.0, (b - a).sqrt(), BLOWUP_TIME_TOLERANCE)
}

/// Blowup time of the comparison solution by quadrature of the first integral.
///
/// With `z0' ≤ 0` the solution falls monotonically to zero. With `z0' > 0` it
/// rises to the root `z*`, turns and falls; without a root it never returns.
pub fn blowup_time_quadrature(p: &NonlinearComparisonProblem, rs: &RootStructure) -> BlowupTime {
    if p.z0 == 0.0 && p.z0_prime <= 0.0 {
        return BlowupTime {
            value: 0.0,
            degenerate: false,
        };
    }
    if p.z0_prime <= 0.0 {
        let at_root = p.z0_prime == 0.0;
        if at_root && rs.degenerate {
            // resting at the minimum of f: equilibrium
            return BlowupTime {
                value: f64::INFINITY,
                degenerate: true,
            };
        }
        let f_b = if at_root { 0.0 } else { p.z0_prime * p.z0_prime };
        return BlowupTime {
            value: inverse_sqrt_integral(p, 0.0, p.z0, f_b),
            degenerate: false,
        };
    }
    match (rs.case, rs.z_star) {
        (RootCase::Roots, Some(z_star)) if !rs.degenerate => BlowupTime {
            value: inverse_sqrt_integral(p, p.z0, z_star, 0.0) + inverse_sqrt_integral(p, 0.0, z_star, 0.0),
            degenerate: false,
        },
        (RootCase::Roots, _) => BlowupTime {
            value: f64::INFINITY,
            degenerate: true,
        },
        (RootCase::NoRoots, _) => BlowupTime {
            value: f64::INFINITY,
            degenerate: false,
        },
    }
}

/// Dense solution of the nonlinear comparison problem.
#[derive(Clone, Debug)]
pub struct ComparisonTrajectory {
    pub segments: Vec<StepRecord<2>>,
    /// First time `z` reaches zero, if before the horizon.
    pub zero_crossing: Option<f64>,
    pub t_end: f64,
}

impl ComparisonTrajectory {
    /// `(z, z')` at `t ∈ [0, t_end]`.
    pub fn eval(&self, t: f64) -> Option<[f64; 2]> {
        if t < 0.0 || t > self.t_end || self.segments.is_empty() {
            return None;
        }
        let i = self.segments.partition_point(|s| s.t1 < t).min(self.segments.len() - 1);
        Some(self.segments[i].interpolate(t))
    }
}

/// Integrates the comparison problem up to `horizon` or until `z ≤ 0`.
///
/// The crossing time is located by secant iteration on fresh Runge–Kutta
/// steps from the start of the crossing step, so it carries the integrator's
/// accuracy rather than the interpolant's.
pub fn integrate_comparison(p: &NonlinearComparisonProblem, horizon: f64) -> Result<ComparisonTrajectory> {
    if !(horizon > 0.0) {
        return Err(invalid("horizon", format!("must be positive, got {horizon}")));
    }
    let rhs = |_t: f64, y: &[f64; 2]| p.rhs(y);
    let opts = OdeOptions::default();
    let mut segments: Vec<StepRecord<2>> = Vec::new();
    let mut crossing_step: Option<StepRecord<2>> = None;
    integrate(rhs, 0.0, [p.z0, p.z0_prime], horizon, &opts, |rec| {
        if rec.y1[0] <= 0.0 {
            crossing_step = Some(*rec);
            Control::Stop
        } else {
            segments.push(*rec);
            Control::Continue
        }
    })?;
    let Some(step) = crossing_step else {
        let t_end = segments.last().map_or(0.0, |s| s.t1);
        return Ok(ComparisonTrajectory {
            segments,
            zero_crossing: None,
            t_end,
        });
    };
    let advance = |h: f64| {
        if h <= 0.0 {
            (step.y0, step.dy0)
        } else {
            let (y, _, dy) = dopri_step(&rhs, step.t0, &step.y0, &step.dy0, h);
            (y, dy)
        }
    };
    let (mut h0, mut z_lo) = (0.0, step.y0[0]);
    let (mut h1, mut z_hi) = (step.t1 - step.t0, step.y1[0]);
    let mut h = h1;
    for _ in 0..100 {
        // regula falsi with the Illinois modification
        h = h1 - z_hi * (h1 - h0) / (z_hi - z_lo);
        let z = advance(h).0[0];
        if z.abs() <= 1e-15 * p.z0.max(1e-300) || (h1 - h0).abs() <= 1e-15 * step.t1 {
            break;
        }
        if (z > 0.0) == (z_lo > 0.0) {
            h0 = h;
            z_lo = z;
            z_hi *= 0.5;
        } else {
            h1 = h;
            z_hi = z;
            z_lo *= 0.5;
        }
    }
    let (y1, dy1) = advance(h);
    let t_cross = step.t0 + h;
    segments.push(StepRecord {
        t0: step.t0,
        t1: t_cross,
        y0: step.y0,
        y1,
        dy0: step.dy0,
        dy1,
    });
    Ok(ComparisonTrajectory {
        segments,
        zero_crossing: Some(t_cross),
        t_end: t_cross,
    })
}

/// `z'' = κ² z + P(t)` with polynomial `P` (coefficients in ascending order).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearComparisonProblem {
    pub kappa_sq: f64,
    pub p_coeffs: Vec<f64>,
    pub z0: f64,
    pub z0_prime: f64,
}

impl LinearComparisonProblem {
    pub fn new(kappa_sq: f64, p_coeffs: Vec<f64>, z0: f64, z0_prime: f64) -> Result<Self> {
        if !(kappa_sq > 0.0) || !kappa_sq.is_finite() {
            return Err(invalid("kappa_sq", format!("must be positive, got {kappa_sq}")));
        }
        Ok(Self {
            kappa_sq,
            p_coeffs,
            z0,
            z0_prime,
        })
    }

    /// Problem for `Q_φ = G_φ - ρ̄K` of a Case II flow.
    ///
    /// `κ² = 2γ B A1 (ρ̄K)^{γ-1}` and
    /// `P(t) = 2B(A1 (ρ̄K)^γ - A2 (e(0) + p̄ ω_n (R0 + σt)^n))`.
    pub fn for_case2(k: &ConstantsBundle, bg: &Background, e0: f64, g0: f64, g0_prime: f64) -> Result<Self> {
        let rho_k = bg.rho_bar * k.k_integral;
        let kappa_sq = 2.0 * k.gamma * k.b * k.a1 * rho_k.powf(k.gamma - 1.0);
        let n = k.n;
        let mut coeffs = vec![0.0; n + 1];
        let mut binom = 1.0;
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c = -2.0 * k.b * k.a2 * bg.p_bar * k.omega_n * binom * bg.r0.powi((n - j) as i32) * bg.sigma.powi(j as i32);
            binom = binom * (n - j) as f64 / (j + 1) as f64;
        }
        coeffs[0] += 2.0 * k.b * (k.a1 * rho_k.powf(k.gamma) - k.a2 * e0);
        Self::new(kappa_sq, coeffs, g0 - rho_k, g0_prime)
    }

    pub fn forcing(&self, t: f64) -> f64 {
        horner(&self.p_coeffs, t)
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn derivative_coeffs(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(j, c)| j as f64 * c).collect()
}

/// `z(t) = C1 e^{κt} + C2 e^{-κt} + P̃(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution {
    pub kappa: f64,
    pub c1: f64,
    pub c2: f64,
    /// Particular polynomial solution, ascending coefficients.
    pub particular: Vec<f64>,
}

impl LinearSolution {
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.kappa;
        self.c1 * (k * t).exp() + self.c2 * (-k * t).exp() + horner(&self.particular, t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let k = self.kappa;
        k * (self.c1 * (k * t).exp() - self.c2 * (-k * t).exp()) + horner(&derivative_coeffs(&self.particular), t)
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        let k = self.kappa;
        k * k * (self.c1 * (k * t).exp() + self.c2 * (-k * t).exp())
            + horner(&derivative_coeffs(&derivative_coeffs(&self.particular)), t)
    }
}

/// Closed-form solution by undetermined coefficients, top degree first:
/// `p̃_j = (j+2)(j+1) p̃_{j+2} / κ² - p_j / κ²`.
pub fn linear_closed_form(p: &LinearComparisonProblem) -> LinearSolution {
    let ksq = p.kappa_sq;
    let deg = p.p_coeffs.len();
    let mut part = vec![0.0; deg];
    for j in (0..deg).rev() {
        let carried = if j + 2 < deg {
            (j + 2) as f64 * (j + 1) as f64 * part[j + 2]
        } else {
            0.0
        };
        part[j] = (carried - p.p_coeffs[j]) / ksq;
    }
    let kappa = ksq.sqrt();
    let d0 = p.z0 - part.first().copied().unwrap_or(0.0);
    let d1 = (p.z0_prime - part.get(1).copied().unwrap_or(0.0)) / kappa;
    LinearSolution {
        kappa,
        c1: 0.5 * (d0 + d1),
        c2: 0.5 * (d0 - d1),
        particular: part,
    }
}

/// Polylines of the phase plane `(z, q = z')`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhasePortrait {
    /// Branches of `q = ±√f(z)` where `f ≥ 0`.
    pub level_set: Vec<Vec<[f64; 2]>>,
    /// Branches of `q = ±√(8Cz(E - A1 z^γ/((γ-1)(k-n))))`.
    pub envelope: Vec<Vec<[f64; 2]>>,
    /// Vertical segment at `z₊`.
    pub z_plus_line: Vec<[f64; 2]>,
}

/// Samples the phase portrait on `samples + 1` uniform abscissae of `z_range`.
pub fn phase_portrait(
    p: &NonlinearComparisonProblem,
    k: &ConstantsBundle,
    z_plus: f64,
    z_range: (f64, f64),
    q_range: (f64, f64),
    samples: usize,
) -> PhasePortrait {
    let samples = samples.max(1);
    let zs: Vec<f64> = (0..=samples)
        .map(|i| z_range.0 + (z_range.1 - z_range.0) * i as f64 / samples as f64)
        .collect();
    let branches = |g: &dyn Fn(f64) -> f64| {
        let mut out = Vec::new();
        for sign in [1.0, -1.0] {
            let mut cur: Vec<[f64; 2]> = Vec::new();
            for &z in &zs {
                let v = g(z);
                if v >= 0.0 {
                    cur.push([z, sign * v.sqrt()]);
                } else if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            if !cur.is_empty() {
                out.push(cur);
            }
        }
        out
    };
    PhasePortrait {
        level_set: branches(&|z| p.f(z)),
        envelope: branches(&|z| k.envelope(p.energy, z)),
        z_plus_line: vec![[z_plus, q_range.0], [z_plus, q_range.1]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derived_constants, GasParameters, WeightFunction};
    use proptest::prelude::*;

    fn linear() -> NonlinearComparisonProblem {
        NonlinearComparisonProblem::new(2.0, 0.0, 4.0, 1.0, 3.0, 1.0, 0.0).unwrap()
    }

    /// Exact-solution data with R = 1, k = 2, a0 = -7 (values from mpmath).
    fn reference() -> NonlinearComparisonProblem {
        NonlinearComparisonProblem::new(
            2.0,
            1.356_931_219_473_377_9,
            4.0,
            40.055_306_333_269_86,
            3.0,
            0.823_354_608_585_762_7,
            3.973_117_528_916_59,
        )
        .unwrap()
    }

    #[test]
    fn first_integral_construction() {
        let p = reference();
        assert!((p.f(p.z0) - p.z0_prime * p.z0_prime).abs() < 1e-12 * p.scale());
        assert!((p.c - 1_069.889_538_760_095_4).abs() < 1e-9);
        let l = linear();
        for z in [0.0, 0.25, 1.0, 3.0] {
            assert!((l.f(z) - (32.0 - 32.0 * z)).abs() < 1e-12);
        }
    }

    #[test]
    fn minimum_of_f_at_g_plusplus() {
        let p = reference();
        let gpp = p.g_plusplus();
        assert!((gpp - 4.905_923_119_036_242).abs() < 1e-12);
        assert!(p.f_prime(gpp).abs() < 1e-10 * p.scale());
        assert!((p.f(gpp) + 3_646.308_542).abs() < 1e-5);
    }

    #[test]
    fn reference_root_structure_and_time() {
        let p = reference();
        let rs = root_structure(&p).unwrap();
        assert_eq!(rs.case.case_id(), 2);
        let z_star = rs.z_star.unwrap();
        assert!((z_star - 0.835_729_961_790_443_6).abs() < 1e-12);
        assert!(p.f(z_star).abs() < 1e-10 * p.scale());
        assert!(p.f_prime(z_star) < 0.0);
        let t = blowup_time_quadrature(&p, &rs);
        assert!((t.value - 0.057_382_930_733_876_75).abs() < 1e-10, "{t:?}");
        let traj = integrate_comparison(&p, 1.0).unwrap();
        let tc = traj.zero_crossing.unwrap();
        assert!((tc - t.value).abs() < 1e-4 * t.value);
    }

    #[test]
    fn linear_case() {
        let p = linear();
        let rs = root_structure(&p).unwrap();
        assert_eq!(rs.case, RootCase::Roots);
        assert_eq!(rs.z_star, Some(1.0));
        let t = blowup_time_quadrature(&p, &rs);
        let exact = 1.0 / (2.0 * 2f64.sqrt());
        assert!((t.value - exact).abs() < 1e-12);
        let traj = integrate_comparison(&p, 1.0).unwrap();
        assert!((traj.zero_crossing.unwrap() - exact).abs() < 1e-10);
        let z = traj.eval(0.2).unwrap();
        assert!((z[0] - (1.0 - 8.0 * 0.04)).abs() < 1e-10);
    }

    #[test]
    fn no_roots_rising_never_returns() {
        let p = NonlinearComparisonProblem::new(2.0, 1.0, 4.0, 1.0, 3.0, 0.5, 100.0).unwrap();
        let rs = root_structure(&p).unwrap();
        assert_eq!(rs.case.case_id(), 1);
        assert_eq!(blowup_time_quadrature(&p, &rs).value, f64::INFINITY);
        // falling initial data reaches zero whatever the roots above z0
        let q = NonlinearComparisonProblem::new(2.0, 1.0, 4.0, 1.0, 3.0, 0.5, -100.0).unwrap();
        let rs = root_structure(&q).unwrap();
        let t = blowup_time_quadrature(&q, &rs).value;
        let tc = integrate_comparison(&q, 10.0).unwrap().zero_crossing.unwrap();
        assert!((t - tc).abs() < 1e-8 * t);
    }

    #[test]
    fn equilibrium_is_a_degenerate_double_root() {
        // A1 z0^γ = A2 E with z0' = 0
        let (a1, a2, e, gamma) = (2.0f64, 4.0, 0.25, 3.0);
        let z0 = (a2 * e / a1).powf(1.0 / gamma);
        let p = NonlinearComparisonProblem::new(2.0, a1, a2, e, gamma, z0, 0.0).unwrap();
        let rs = root_structure(&p).unwrap();
        assert!(rs.degenerate);
        let t = blowup_time_quadrature(&p, &rs);
        assert!(t.value.is_infinite() && t.degenerate);
        // the equilibrium is a saddle, so keep the horizon short
        let traj = integrate_comparison(&p, 1.0).unwrap();
        assert!(traj.zero_crossing.is_none());
        assert!((traj.eval(1.0).unwrap()[0] - z0).abs() < 1e-9);
    }

    #[test]
    fn rejects_moment_above_minimum() {
        let p = NonlinearComparisonProblem::new(2.0, 1.0, 4.0, 1.0, 3.0, 5.0, 0.0).unwrap();
        assert!(matches!(root_structure(&p), Err(Error::MomentAboveMinimum { .. })));
    }

    #[test]
    fn first_integral_along_trajectory() {
        let p = reference();
        let traj = integrate_comparison(&p, 1.0).unwrap();
        let scale = p.f(p.z0).max(1.0);
        for s in &traj.segments {
            let [z, q] = s.y1;
            assert!((q * q - p.f(z)).abs() < 1e-8 * scale);
        }
    }

    fn random_case2() -> impl Strategy<Value = NonlinearComparisonProblem> {
        (0.5f64..4.0, 0.2f64..3.0, 2.0f64..6.0, 0.2f64..5.0, 1.2f64..3.0, 0.05f64..0.95, -3.0f64..3.0).prop_filter_map(
            "needs two roots",
            |(b, a1, a2, e, gamma, frac, slope)| {
                let gpp = (a2 * e / a1).powf(1.0 / gamma);
                let z0 = frac * gpp;
                let p0 = NonlinearComparisonProblem::new(b, a1, a2, e, gamma, z0, 0.0).ok()?;
                // keep f(G⁺⁺) clearly negative
                let depth = -p0.f(gpp);
                let z0_prime = slope.signum() * (slope.abs() / 3.0 * depth).sqrt() * 0.9;
                let p = NonlinearComparisonProblem::new(b, a1, a2, e, gamma, z0, z0_prime).ok()?;
                (root_structure(&p).ok()?.case == RootCase::Roots).then_some(p)
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn quadrature_matches_integration(p in random_case2()) {
            let rs = root_structure(&p).unwrap();
            let t = blowup_time_quadrature(&p, &rs).value;
            prop_assert!(t.is_finite());
            let tc = integrate_comparison(&p, 10.0 * t + 1.0).unwrap().zero_crossing.unwrap();
            prop_assert!((t - tc).abs() <= 1e-4 * t, "quadrature {} vs RK {}", t, tc);
        }

        #[test]
        fn larger_energy_never_delays_blowup(p in random_case2(), bump in 0.0f64..2.0) {
            let q = NonlinearComparisonProblem::new(p.b, p.a1, p.a2, p.energy * (1.0 + bump), p.gamma, p.z0, p.z0_prime).unwrap();
            // f(z0) is pinned to z0'², so the ordering only holds above z0
            for i in 1..20 {
                let z = p.z0 * (1.0 + i as f64 / 10.0);
                prop_assert!(q.f(z) <= p.f(z) + 1e-12 * p.scale());
            }
            let tp = blowup_time_quadrature(&p, &root_structure(&p).unwrap()).value;
            let tq = blowup_time_quadrature(&q, &root_structure(&q).unwrap()).value;
            prop_assert!(tq <= tp * (1.0 + 1e-9));
        }
    }

    #[test]
    fn forced_supersolution_stays_above() {
        // y'' = 2B(A1 y^γ - A2 E) + s(t) with s ≥ 0 and the same initial data
        let p = reference();
        let traj = integrate_comparison(&p, 1.0).unwrap();
        let forced = |t: f64, y: &[f64; 2]| {
            let base = p.rhs(y);
            [base[0], base[1] + 50.0 * (1.0 + (7.0 * t).sin())]
        };
        let t_end = traj.zero_crossing.unwrap();
        let mut ok = true;
        integrate(forced, 0.0, [p.z0, p.z0_prime], t_end, &OdeOptions::default(), |rec| {
            let z = traj.eval(rec.t1).unwrap()[0];
            ok &= rec.y1[0] >= z - 1e-9;
            Control::Continue
        })
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn linear_closed_form_examples() {
        let k = 1.7f64;
        let p = LinearComparisonProblem::new(k * k, vec![-k * k], 0.0, 0.0).unwrap();
        let s = linear_closed_form(&p);
        for t in [0.0, 0.3, 1.0, 2.5] {
            assert!((s.eval(t) - (1.0 - (k * t).cosh())).abs() < 1e-12 * (k * t).cosh());
        }
        let p = LinearComparisonProblem::new(k * k, vec![0.0], 1.0, k).unwrap();
        let s = linear_closed_form(&p);
        for t in [0.0, 0.3, 1.0, 2.5] {
            assert!((s.eval(t) - (k * t).exp()).abs() < 1e-12 * (k * t).exp());
        }
    }

    #[test]
    fn linear_closed_form_residual() {
        let p = LinearComparisonProblem::new(3.2, vec![1.0, -2.0, 0.5, 0.25], -0.4, 1.1).unwrap();
        let s = linear_closed_form(&p);
        assert!((s.eval(0.0) - p.z0).abs() < 1e-12);
        assert!((s.derivative(0.0) - p.z0_prime).abs() < 1e-12);
        for i in 0..=200 {
            let t = i as f64 / 100.0;
            let scale = s.second_derivative(t).abs().max(p.forcing(t).abs()).max(1.0);
            let res = s.second_derivative(t) - p.kappa_sq * s.eval(t) - p.forcing(t);
            assert!(res.abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn case2_polynomial_degree() {
        let gas = GasParameters::new(3, 1.4).unwrap();
        let w = WeightFunction::new(2.0, 4.0).unwrap();
        let k = derived_constants(&gas, &w, 0.0).unwrap();
        let bg = Background::new(1.0, 1.0, 0.5, &gas).unwrap();
        let p = LinearComparisonProblem::for_case2(&k, &bg, 0.1, 1.0, 0.0).unwrap();
        assert_eq!(p.p_coeffs.len(), 4);
        assert!(p.p_coeffs[3] < 0.0);
        let t = 0.7;
        let direct = 2.0 * k.b
            * (k.a1 * (bg.rho_bar * k.k_integral).powf(k.gamma)
                - k.a2 * (0.1 + bg.p_bar * k.omega_n * (bg.r0 + bg.sigma * t).powi(3)));
        assert!((p.forcing(t) - direct).abs() < 1e-12 * direct.abs());
        assert!(p.kappa_sq > 0.0);
    }

    #[test]
    fn envelope_landmarks() {
        let gas = GasParameters::new(1, 3.0).unwrap();
        let w = WeightFunction::new(1.0, 2.0).unwrap();
        let k = derived_constants(&gas, &w, 0.0).unwrap();
        let e = 40.055_306_333_269_86;
        assert_eq!(k.envelope(e, 0.0), 0.0);
        assert!(k.envelope(e, k.g_plus(e)).abs() < 1e-10 * e);
        assert!((k.g_plus(e) - 3.893_833_760_016_620_7).abs() < 1e-12);
        let p = reference();
        let pp = phase_portrait(&p, &k, 1.0, (0.0, 5.0), (-10.0, 10.0), 500);
        assert!(!pp.level_set.is_empty() && !pp.envelope.is_empty());
        assert_eq!(pp.z_plus_line.len(), 2);
    }
}
