//! Two-sided density bounds implied by the comparison problems.
//!
//! While a solution stays smooth in `B_R`, `sup ρ ≥ lower(t)` and
//! `inf ρ ≤ upper(t)`. An observed crossing certifies loss of smoothness
//! before the crossing time.

use serde::Serialize;

use super::DETECTOR_TOLERANCE;
use crate::comparison::{
    blowup_time_quadrature, integrate_comparison, linear_closed_form, root_structure, upper_bounds, BlowupTime,
    ComparisonTrajectory, LinearComparisonProblem, LinearSolution, NonlinearComparisonProblem, RootStructure,
    UpperBounds,
};
use crate::error::{Error, Result};
use crate::field::RadialProfile;
use crate::model::{derived_constants, Background, ConstantsBundle, GasParameters, WeightFunction};
use crate::moments::{holder_check, moment_g, moment_g_prime};

/// Measured density extremes over `B_R` at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityObservation {
    pub t: f64,
    pub sup: f64,
    pub inf: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `sup ρ` fell below the lower bound.
    Lower,
    /// `inf ρ` rose above the upper bound.
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundViolation {
    pub t: f64,
    pub kind: BoundKind,
    pub bound: f64,
    pub observed: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DensityBoundTrack {
    pub times: Vec<f64>,
    /// `None` where the lower bound is not in force.
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
    pub observed_sup: Vec<f64>,
    pub observed_inf: Vec<f64>,
    /// Per time: whether an observed extreme crossed its bound.
    pub violated: Vec<bool>,
    /// First crossing.
    pub violation: Option<BoundViolation>,
}

impl DensityBoundTrack {
    pub fn violation_time(&self) -> Option<f64> {
        self.violation.map(|v| v.t)
    }

    /// Compares observations with the bounds; a crossing counts only when it
    /// exceeds [`DETECTOR_TOLERANCE`] relative to the bound.
    pub fn build<L, U>(observations: &[DensityObservation], lower: L, upper: U) -> Self
    where
        L: Fn(f64) -> Option<f64>,
        U: Fn(f64) -> Option<f64>,
    {
        let mut track = Self::default();
        for obs in observations {
            let lo = lower(obs.t);
            let up = upper(obs.t);
            let margin = |b: f64| DETECTOR_TOLERANCE * b.abs().max(f64::MIN_POSITIVE);
            let low_hit = lo.filter(|&b| obs.sup < b - margin(b)).map(|b| (BoundKind::Lower, b, obs.sup));
            let up_hit = up.filter(|&b| obs.inf > b + margin(b)).map(|b| (BoundKind::Upper, b, obs.inf));
            let hit = low_hit.or(up_hit);
            if track.violation.is_none() {
                track.violation = hit.map(|(kind, bound, observed)| BoundViolation {
                    t: obs.t,
                    kind,
                    bound,
                    observed,
                });
            }
            track.times.push(obs.t);
            track.lower.push(lo);
            track.upper.push(up);
            track.observed_sup.push(obs.sup);
            track.observed_inf.push(obs.inf);
            track.violated.push(hit.is_some());
        }
        track
    }
}

/// Comparison data for Case I initial data.
#[derive(Clone, Debug)]
pub struct Theorem2Certificate {
    pub constants: ConstantsBundle,
    pub problem: NonlinearComparisonProblem,
    pub roots: RootStructure,
    pub blowup_time: BlowupTime,
    pub upper: UpperBounds,
    pub trajectory: ComparisonTrajectory,
    pub horizon: f64,
}

impl Theorem2Certificate {
    /// End of the interval on which `z₋ ≥ 0` is available.
    pub fn valid_until(&self) -> f64 {
        self.trajectory
            .zero_crossing
            .unwrap_or(self.trajectory.t_end)
            .min(self.blowup_time.value)
            .min(self.horizon)
    }

    /// `z₋(t)`.
    pub fn z_minus(&self, t: f64) -> Option<f64> {
        if t > self.valid_until() {
            return None;
        }
        self.trajectory.eval(t).map(|y| y[0].max(0.0))
    }

    pub fn lower_density(&self, t: f64) -> Option<f64> {
        self.z_minus(t).map(|z| z / self.constants.k_integral)
    }

    pub fn upper_density(&self) -> f64 {
        self.upper.z_plus / self.constants.k_integral
    }

    pub fn track(&self, observations: &[DensityObservation]) -> DensityBoundTrack {
        DensityBoundTrack::build(observations, |t| self.lower_density(t), |_| Some(self.upper_density()))
    }
}

/// Builds the Case I comparison problem from initial data with total `mass`
/// and `energy`, integrated up to `horizon`.
pub fn theorem2_certificate<P: RadialProfile + ?Sized>(
    field0: &P,
    w: &WeightFunction,
    gas: &GasParameters,
    mass: f64,
    energy: f64,
    horizon: f64,
) -> Result<Theorem2Certificate> {
    let holder = holder_check(field0, w, gas)?;
    if !holder.satisfied {
        return Err(Error::InvalidField(format!(
            "moment inequality fails on the initial data ({} > {})",
            holder.lhs, holder.rhs
        )));
    }
    let constants = derived_constants(gas, w, holder.entropy_inf)?;
    let g0 = moment_g(field0, w, gas.n())?;
    let g1 = moment_g_prime(field0, w, gas.n())?;
    let problem = NonlinearComparisonProblem::from_constants(&constants, energy, g0, g1)?;
    let roots = root_structure(&problem)?;
    let blowup_time = blowup_time_quadrature(&problem, &roots);
    let span = if blowup_time.value.is_finite() {
        // a little past T so the crossing is located by the integrator
        horizon.min(blowup_time.value * 1.01 + 1e-12)
    } else {
        horizon
    };
    let trajectory = integrate_comparison(&problem, span)?;
    Ok(Theorem2Certificate {
        upper: upper_bounds(&constants, mass, energy),
        constants,
        problem,
        roots,
        blowup_time,
        trajectory,
        horizon,
    })
}

/// Comparison data for Case II initial data.
#[derive(Clone, Debug)]
pub struct Theorem4Certificate {
    pub constants: ConstantsBundle,
    pub background: Background,
    pub weight: WeightFunction,
    pub problem: LinearComparisonProblem,
    pub solution: LinearSolution,
    /// `m(0)`, the conserved excess mass.
    pub mass_excess: f64,
    /// First time at which `Q₋ < -ρ̄K`, after which the lower bound says nothing.
    pub trivial_after: Option<f64>,
}

impl Theorem4Certificate {
    fn rho_k(&self) -> f64 {
        self.background.rho_bar * self.constants.k_integral
    }

    /// `Q₊(t) = m(0) - ρ̄K + ρ̄ ω_n (R0 + σt)ⁿ`.
    pub fn q_plus(&self, t: f64) -> f64 {
        let bg = &self.background;
        self.mass_excess - self.rho_k()
            + bg.rho_bar * self.constants.omega_n * bg.perturbation_radius(t).powi(self.constants.n as i32)
    }

    /// `m(0) + ρ̄ ∫_{B_{R0+σt}} (1 - φ) dx`, the upper bound that holds for
    /// every `t`; it coincides with [`Self::q_plus`] once `R0 + σt ≥ R`.
    pub fn q_plus_supported(&self, t: f64) -> f64 {
        let bg = &self.background;
        let n = self.constants.n;
        let r = bg.perturbation_radius(t);
        let ball = self.constants.omega_n * r.powi(n as i32);
        self.mass_excess + bg.rho_bar * (ball - self.weight.ball_integral(n, r))
    }

    pub fn q_minus(&self, t: f64) -> f64 {
        self.solution.eval(t)
    }

    pub fn lower_density(&self, t: f64) -> f64 {
        self.background.rho_bar + self.q_minus(t) / self.constants.k_integral
    }

    pub fn upper_density(&self, t: f64) -> f64 {
        self.background.rho_bar + self.q_plus(t) / self.constants.k_integral
    }

    pub fn upper_density_supported(&self, t: f64) -> f64 {
        self.background.rho_bar + self.q_plus_supported(t) / self.constants.k_integral
    }

    pub fn track(&self, observations: &[DensityObservation]) -> DensityBoundTrack {
        DensityBoundTrack::build(
            observations,
            |t| Some(self.lower_density(t)),
            |t| Some(self.upper_density(t)),
        )
    }

    /// As [`Self::track`] with the upper bound from [`Self::q_plus_supported`].
    pub fn track_supported(&self, observations: &[DensityObservation]) -> DensityBoundTrack {
        DensityBoundTrack::build(
            observations,
            |t| Some(self.lower_density(t)),
            |t| Some(self.upper_density_supported(t)),
        )
    }
}

/// Builds the Case II linear comparison problem.
pub fn theorem4_certificate<P: RadialProfile + ?Sized>(
    field0: &P,
    w: &WeightFunction,
    gas: &GasParameters,
    background: &Background,
    mass_excess: f64,
    energy_excess: f64,
    horizon: f64,
) -> Result<Theorem4Certificate> {
    let entropy_inf = field0
        .entropy_inf(gas.gamma(), w.radius())
        .ok_or_else(|| Error::InvalidField("no non-vacuum point inside the weight support".into()))?;
    let constants = derived_constants(gas, w, entropy_inf)?;
    let g0 = moment_g(field0, w, gas.n())?;
    let g1 = moment_g_prime(field0, w, gas.n())?;
    let problem = LinearComparisonProblem::for_case2(&constants, background, energy_excess, g0, g1)?;
    let solution = linear_closed_form(&problem);
    let rho_k = background.rho_bar * constants.k_integral;
    let below = |t: f64| solution.eval(t) < -rho_k;
    let mut trivial_after = None;
    const SCAN: usize = 4000;
    let mut prev = 0.0;
    for i in 0..=SCAN {
        let t = horizon * i as f64 / SCAN as f64;
        if below(t) {
            let (mut lo, mut hi) = (prev, t);
            if i > 0 {
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if below(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
            }
            trivial_after = Some(hi);
            break;
        }
        prev = t;
    }
    Ok(Theorem4Certificate {
        constants,
        background: *background,
        weight: *w,
        problem,
        solution,
        mass_excess,
        trivial_after,
    })
}
