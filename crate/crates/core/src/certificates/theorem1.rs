//! Far-field flux condition for Case I data.
//!
//! For each radius `R` of a ladder the checker evaluates
//! `F(R) = Rⁿ sup_{|x|=R} [(δ/R) ∫_0^{t_max} (½ρ|V|² + γp/(γ-1))|V| dτ + (ρ|V|² + np)]`
//! and compares its limit as `R → ∞` with `δ1 E`. Blowup is certified when
//! the limit stays below the threshold.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::field::FieldEvaluator;
use crate::model::{omega_n, GasParameters};
use crate::moments::{sphere_points, RadiusLadder};

/// `δ / (2 n ω_n)`, the midpoint of the admissible interval for `δ1`.
pub fn default_delta1(gas: &GasParameters) -> f64 {
    gas.delta() / (2.0 * gas.n() as f64 * omega_n(gas.n()))
}

/// `0` followed by `count` geometrically spaced times from `t_first` to `t_max`.
pub fn geometric_times(t_first: f64, t_max: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    let ratio = (t_max / t_first).ln() / (count - 1) as f64;
    let mut out = vec![0.0];
    out.extend((0..count).map(|i| t_first * (ratio * i as f64).exp()));
    *out.last_mut().unwrap() = t_max;
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiusEntry {
    pub radius: f64,
    /// `Rⁿ (δ/R) sup_x ∫ flux`.
    pub flux_term: f64,
    /// `Rⁿ sup_x max_t (ρ|V|² + np)`.
    pub instantaneous_term: f64,
    /// `F(R)`.
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem1Verdict {
    /// Limit below `δ1 E`: the solution cannot stay smooth for all time.
    Satisfied,
    Violated,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub delta: f64,
    pub delta1: f64,
    pub energy: f64,
    /// `δ1 E`.
    pub threshold: f64,
    pub t_max: f64,
    pub entries: Vec<RadiusEntry>,
    /// Richardson extrapolation of the last two ladder values assuming `O(1/R)` convergence.
    pub extrapolated: RadiusEntry,
    pub trend: Trend,
    pub verdict: Theorem1Verdict,
}

/// Evaluates the far-field condition along `ladder` with the time integral
/// taken by the trapezoidal rule on `times` (increasing, starting at 0).
pub fn check_theorem1<E: FieldEvaluator + ?Sized>(
    evaluator: &E,
    gas: &GasParameters,
    energy: f64,
    times: &[f64],
    delta1: f64,
    ladder: &RadiusLadder,
) -> Result<Theorem1Report> {
    let n = gas.n();
    let gamma = gas.gamma();
    let delta = gas.delta();
    let bound = delta / (n as f64 * omega_n(n));
    if !(0.0..bound).contains(&delta1) {
        return Err(invalid("delta1", format!("must lie in [0, {bound}), got {delta1}")));
    }
    if evaluator.dim() != n {
        return Err(invalid("evaluator", "dimension differs from the gas dimension"));
    }
    if times.len() < 2 || times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("times", "need at least two strictly increasing nonnegative times"));
    }
    if ladder.levels == 0 || !(ladder.base > 0.0) {
        return Err(invalid("ladder", "need a positive base and at least one doubling"));
    }
    let nf = n as f64;
    let mut entries = Vec::with_capacity(ladder.levels + 1);
    for radius in ladder.radii() {
        let mut best_flux: f64 = 0.0;
        let mut best_inst: f64 = 0.0;
        let mut best_bracket: f64 = 0.0;
        for x in sphere_points(evaluator, radius) {
            let mut flux = 0.0;
            let mut inst: f64 = 0.0;
            let mut prev: Option<(f64, f64)> = None;
            for &t in times {
                let st = evaluator.eval(&x, t);
                let speed_sq = st.speed_sq();
                let density = (0.5 * st.rho * speed_sq + gamma / (gamma - 1.0) * st.p) * speed_sq.sqrt();
                if let Some((t0, d0)) = prev {
                    flux += 0.5 * (t - t0) * (d0 + density);
                }
                prev = Some((t, density));
                inst = inst.max(st.rho * speed_sq + nf * st.p);
            }
            best_flux = best_flux.max(flux);
            best_inst = best_inst.max(inst);
            best_bracket = best_bracket.max(delta / radius * flux + inst);
        }
        let scale = radius.powi(n as i32);
        entries.push(RadiusEntry {
            radius,
            flux_term: scale * delta / radius * best_flux,
            instantaneous_term: scale * best_inst,
            value: scale * best_bracket,
        });
    }
    let last = entries[entries.len() - 1];
    let prev = entries[entries.len() - 2];
    let extrapolate = |a: f64, b: f64| 2.0 * b - a;
    let extrapolated = RadiusEntry {
        radius: f64::INFINITY,
        flux_term: extrapolate(prev.flux_term, last.flux_term),
        instantaneous_term: extrapolate(prev.instantaneous_term, last.instantaneous_term),
        value: extrapolate(prev.value, last.value),
    };
    let diffs: Vec<f64> = entries.windows(2).map(|w| w[1].value - w[0].value).collect();
    let trend = if diffs.iter().all(|&d| d >= 0.0) {
        Trend::Increasing
    } else if diffs.iter().all(|&d| d <= 0.0) {
        Trend::Decreasing
    } else {
        Trend::Mixed
    };
    let threshold = delta1 * energy;
    let verdict = match (extrapolated.value <= threshold, last.value <= threshold) {
        (true, true) => Theorem1Verdict::Satisfied,
        (false, false) => Theorem1Verdict::Violated,
        _ => Theorem1Verdict::Inconclusive,
    };
    Ok(Theorem1Report {
        delta,
        delta1,
        energy,
        threshold,
        t_max: times[times.len() - 1],
        entries,
        extrapolated,
        trend,
        verdict,
    })
}
