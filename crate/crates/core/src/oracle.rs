//! Closed-form reference flows and initial-data generators.
//!
//! [`ExactSolution`] is the globally smooth one-dimensional solution for
//! `γ = 3` whose density is `ψ³ / (ψ² + x²)²`; it is the ground truth for the
//! moment and energy routines. [`CaseIIGenerator`] builds compact
//! perturbations of a constant state and [`CaseIProfile`] is a parametric
//! family of finite-mass, finite-energy data on the line.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::field::{FieldEvaluator, PointState, RadialField, RadialProfile, RadialState, Symmetry};
use crate::model::{radial_integral, Background, GasParameters};
use crate::quadrature::Tolerance;

/// Heat ratio for which [`ExactSolution`] solves the Euler equations.
pub const EXACT_GAMMA: f64 = 3.0;

/// Self-similar smooth solution with initial data `V0 = a0 x`,
/// `ρ0 = (1 + x²)^-2`, `p0 = (1 + x²)^-1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactSolution {
    pub a0: f64,
}

impl ExactSolution {
    pub fn new(a0: f64) -> Self {
        Self { a0 }
    }

    fn slope_sq(&self) -> f64 {
        2.0 + self.a0 * self.a0
    }

    /// `ψ(t) = sqrt((2 + a0²) t² + 2 a0 t + 1)`.
    pub fn psi(&self, t: f64) -> f64 {
        (self.slope_sq() * t * t + 2.0 * self.a0 * t + 1.0).sqrt()
    }

    pub fn psi_prime(&self, t: f64) -> f64 {
        (self.slope_sq() * t + self.a0) / self.psi(t)
    }

    /// `ψ'' = 2 / ψ³`.
    pub fn psi_second(&self, t: f64) -> f64 {
        2.0 / self.psi(t).powi(3)
    }

    /// `(ρ, V, p)` at `(x, t)`.
    pub fn fields(&self, x: f64, t: f64) -> (f64, f64, f64) {
        let psi = self.psi(t);
        let q = psi * psi + x * x;
        (psi.powi(3) / (q * q), self.psi_prime(t) / psi * x, 1.0 / (psi * q))
    }

    pub fn mass(&self) -> f64 {
        PI / 2.0
    }

    pub fn energy(&self) -> f64 {
        PI / 4.0 * self.slope_sq()
    }

    /// `½ ∫ ρ x² dx = (π/4) ψ²`.
    pub fn classical_moment(&self, t: f64) -> f64 {
        PI / 4.0 * self.psi(t).powi(2)
    }

    /// `E_p(t) = π / (2 ψ²)`.
    pub fn potential_energy(&self, t: f64) -> f64 {
        PI / (2.0 * self.psi(t).powi(2))
    }

    /// `E_k(t) = (π/4) ψ'²`, equal to `E - E_p(t)`.
    pub fn kinetic_energy(&self, t: f64) -> f64 {
        PI / 4.0 * self.psi_prime(t).powi(2)
    }

    /// Radial profile at time `t`.
    pub fn at(&self, t: f64) -> ExactProfile {
        ExactProfile { solution: *self, t }
    }
}

/// Closed-form value of `sup_x |t (V·x) / (1 + x²)|` for the exact solution.
pub fn exact_cho_supremum(sol: &ExactSolution, t: f64) -> f64 {
    (t * sol.psi_prime(t) / sol.psi(t)).abs()
}

impl FieldEvaluator for ExactSolution {
    fn dim(&self) -> usize {
        1
    }
    fn symmetry(&self) -> Symmetry {
        Symmetry::Radial
    }
    fn eval(&self, x: &[f64], t: f64) -> PointState {
        let (rho, v, p) = self.fields(x[0], t);
        PointState {
            rho,
            velocity: vec![v],
            p,
        }
    }
}

/// [`ExactSolution`] frozen at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactProfile {
    pub solution: ExactSolution,
    pub t: f64,
}

impl RadialProfile for ExactProfile {
    fn state(&self, r: f64) -> RadialState {
        let (rho, v_r, p) = self.solution.fields(r, self.t);
        RadialState { rho, v_r, p }
    }
}

/// Amplitudes of the density, velocity and pressure bumps.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BumpAmplitudes {
    pub rho: f64,
    /// Velocity is `velocity · x · bump`; negative values converge on the origin.
    pub velocity: f64,
    pub pressure: f64,
}

/// `(1 - s²)³` on `s ∈ [0, 1]`, zero beyond; C² at `s = 1`.
pub fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        let u = 1.0 - s * s;
        u * u * u
    }
}

/// Compactly supported perturbation of a constant state inside `B_{R0}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CaseIIGenerator {
    pub background: Background,
    pub amplitudes: BumpAmplitudes,
    pub gas: GasParameters,
}

impl CaseIIGenerator {
    pub fn new(background: Background, amplitudes: BumpAmplitudes, gas: GasParameters) -> Result<Self> {
        // the bump ranges over [0, 1], so the extremes sit at the centre or outside
        if background.rho_bar + amplitudes.rho.min(0.0) <= 0.0 {
            return Err(invalid("amplitudes.rho", "density bump makes the density nonpositive"));
        }
        if background.p_bar + amplitudes.pressure.min(0.0) <= 0.0 {
            return Err(invalid("amplitudes.pressure", "pressure bump makes the pressure nonpositive"));
        }
        if !(amplitudes.rho.is_finite() && amplitudes.velocity.is_finite() && amplitudes.pressure.is_finite()) {
            return Err(invalid("amplitudes", "amplitudes must be finite"));
        }
        Ok(Self {
            background,
            amplitudes,
            gas,
        })
    }

    /// Converging preset: velocity `-|speed| · x · bump`, plus optional
    /// density and pressure bumps.
    pub fn converging(background: Background, gas: GasParameters, speed: f64, rho: f64, pressure: f64) -> Result<Self> {
        Self::new(
            background,
            BumpAmplitudes {
                rho,
                velocity: -speed.abs(),
                pressure,
            },
            gas,
        )
    }

    fn quad<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        let r0 = self.background.r0;
        radial_integral(self.gas.n(), g, &[0.0, 0.5 * r0, r0], Tolerance::new(1e-14, 1e-12))
    }

    /// `m(0) = ∫ (ρ0 - ρ̄) dx`.
    pub fn mass_excess(&self) -> f64 {
        let r0 = self.background.r0;
        self.amplitudes.rho * self.quad(|r| bump(r / r0))
    }

    /// `e(0) = E_k(0) + (γ-1)^-1 ∫ (p0 - p̄) dx`.
    pub fn energy_excess(&self) -> f64 {
        let kinetic = self.quad(|r| {
            let st = self.state(r);
            0.5 * st.rho * st.v_r * st.v_r
        });
        let r0 = self.background.r0;
        kinetic + self.amplitudes.pressure / (self.gas.gamma() - 1.0) * self.quad(|r| bump(r / r0))
    }
}

impl RadialProfile for CaseIIGenerator {
    fn state(&self, r: f64) -> RadialState {
        let b = bump(r / self.background.r0);
        RadialState {
            rho: self.background.rho_bar + self.amplitudes.rho * b,
            v_r: self.amplitudes.velocity * r * b,
            p: self.background.p_bar + self.amplitudes.pressure * b,
        }
    }

    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let r0 = self.background.r0;
        if r0 > lo && r0 < hi {
            vec![r0]
        } else {
            Vec::new()
        }
    }
}

/// Sampled Case II initial data with its conserved excesses.
#[derive(Clone, Debug)]
pub struct CaseIIData {
    pub field: RadialField,
    /// `m(0)`.
    pub mass_excess: f64,
    /// `e(0)`.
    pub energy_excess: f64,
}

/// Tabulates the generator on `samples + 1` uniform radii in `[0, extent]`
/// and integrates the excess mass and energy from the analytic profile.
pub fn generate_case2(gen: &CaseIIGenerator, extent: f64, samples: usize) -> Result<CaseIIData> {
    if !(extent > 0.0) || samples == 0 {
        return Err(invalid("extent", "need a positive extent and at least one interval"));
    }
    let radii: Vec<f64> = (0..=samples)
        .map(|i| extent * i as f64 / samples as f64)
        .collect();
    let field = RadialField::from_profile(gen, &radii, gen.gas.gamma())?;
    Ok(CaseIIData {
        field,
        mass_excess: gen.mass_excess(),
        energy_excess: gen.energy_excess(),
    })
}

/// Finite-mass, finite-energy data on the line:
/// `ρ = a / (1 + (r/w)²)²`, `p = b / (1 + (r/u)²)`, `v = c r / (1 + (r/s)²)`.
///
/// `velocity_width = ∞` gives the linear velocity `c r` of the exact solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CaseIProfile {
    pub rho_amp: f64,
    pub rho_width: f64,
    pub p_amp: f64,
    pub p_width: f64,
    pub velocity_amp: f64,
    pub velocity_width: f64,
}

impl CaseIProfile {
    /// Initial data of [`ExactSolution`].
    pub fn exact_initial(a0: f64) -> Self {
        Self {
            rho_amp: 1.0,
            rho_width: 1.0,
            p_amp: 1.0,
            p_width: 1.0,
            velocity_amp: a0,
            velocity_width: f64::INFINITY,
        }
    }

    /// Log-uniform widths and amplitudes, velocity slope uniform in `[-10, 10]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut log_uniform = |lo: f64, hi: f64| (rng.gen_range(lo.ln()..hi.ln())).exp();
        let rho_amp = log_uniform(0.05, 20.0);
        let rho_width = log_uniform(0.1, 5.0);
        let p_amp = log_uniform(0.05, 20.0);
        let p_width = log_uniform(0.1, 5.0);
        let velocity_width = log_uniform(0.1, 10.0);
        let velocity_amp = rng.gen_range(-10.0..10.0);
        Self {
            rho_amp,
            rho_width,
            p_amp,
            p_width,
            velocity_amp,
            velocity_width,
        }
    }

    /// Total mass `2 ∫_0^∞ ρ dr = π a w / 2`.
    pub fn mass(&self) -> f64 {
        PI * self.rho_amp * self.rho_width / 2.0
    }
}

impl RadialProfile for CaseIProfile {
    fn state(&self, r: f64) -> RadialState {
        let x = r / self.rho_width;
        let rho = self.rho_amp / (1.0 + x * x).powi(2);
        let y = r / self.p_width;
        let p = self.p_amp / (1.0 + y * y);
        let v_r = if self.velocity_width.is_finite() {
            let z = r / self.velocity_width;
            self.velocity_amp * r / (1.0 + z * z)
        } else {
            self.velocity_amp * r
        };
        RadialState { rho, v_r, p }
    }
}
