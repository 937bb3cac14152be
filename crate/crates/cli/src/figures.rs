//! The `figures` command: polylines of the phase portrait and of the moment
//! dynamics for closed-form Case I data.

use serde::Serialize;

use euler_blowup::certificates::theorem2_certificate;
use euler_blowup::comparison::{phase_portrait, NonlinearComparisonProblem};
use euler_blowup::moments::{moment_g, moment_g_prime};

use crate::config::{Resolved, ScenarioConfig};
use crate::data::InitialData;
use crate::error::CliError;
use crate::output::{num, Table};

const SAMPLES: usize = 400;

/// Phase-portrait curve ids.
pub const LEVEL_SET: u8 = 1;
pub const LEVEL_SET_WITHOUT_ROOTS: u8 = 2;
pub const Z_PLUS_LINE: u8 = 3;
pub const Z_PLUS_LINE_HYPOTHETICAL: u8 = 4;

/// Dynamics curve ids.
pub const TRAJECTORY: u8 = 1;
pub const COMPARISON: u8 = 2;
pub const ENVELOPE: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimedPoint {
    pub t: f64,
    pub g: f64,
    pub g_prime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FigureSummary {
    pub z0: f64,
    pub z0_prime: f64,
    pub z_star: Option<f64>,
    pub z_plus: f64,
    /// Abscissa of the hypothetical upper bound with `f(z₊) > 0`.
    pub z_plus_hypothetical: f64,
    /// `z0'` of the hypothetical data whose phase function has no roots.
    pub z0_prime_hypothetical: f64,
    #[serde(rename = "G_plus")]
    pub g_plus: f64,
    #[serde(rename = "G_plusplus")]
    pub g_plusplus: f64,
    pub blowup_time: Option<f64>,
    pub trajectory_until: f64,
}

pub struct Figures {
    pub summary: FigureSummary,
    /// Columns `curve_id, z, q`.
    pub phase: Table,
    /// Columns `curve_id, G, G_prime`.
    pub dynamics: Table,
    /// Curve 1 of the dynamics with times.
    pub trajectory: Vec<TimedPoint>,
    /// Curve 2 of the dynamics with times; shares its first times with the trajectory.
    pub comparison: Vec<TimedPoint>,
}

fn push_points(table: &mut Table, id: u8, points: &[[f64; 2]]) {
    for p in points {
        table.push(vec![id.to_string(), num(p[0]), num(p[1])]);
    }
}

/// Upper branch left to right, then lower branch back, as one polyline.
fn closed(branches: &[Vec<[f64; 2]>]) -> Vec<[f64; 2]> {
    let (upper, lower): (Vec<_>, Vec<_>) = branches.iter().partition(|b| b.iter().any(|p| p[1] > 0.0));
    let mut out = Vec::new();
    for b in upper {
        out.extend_from_slice(b);
    }
    for b in lower.iter().rev() {
        out.extend(b.iter().rev());
    }
    out
}

pub fn build(cfg: &ScenarioConfig, resolved: &Resolved, data: &InitialData) -> Result<Figures, CliError> {
    let InitialData::Exact(sol) = data else {
        return Err(CliError::Config("figures need closed-form Case I data (data.type = exact)".into()));
    };
    let (gas, w) = (resolved.gas, resolved.weight);
    let profile0 = sol.at(0.0);
    let cert = theorem2_certificate(&profile0, &w, &gas, sol.mass(), sol.energy(), cfg.horizon)?;
    let k = cert.constants;
    let p = cert.problem;
    let energy = sol.energy();
    let upper = cert.upper;

    // hypothetical data: raise c until the minimum of f is positive
    let f_min = p.f(upper.g_plusplus);
    let lift = if f_min < 0.0 { -1.25 * f_min } else { 0.25 * f_min.abs() + 1.0 };
    let z0_prime_hyp = (p.z0_prime * p.z0_prime + lift).sqrt();
    let hyp = NonlinearComparisonProblem::new(p.b, p.a1, p.a2, p.energy, p.gamma, p.z0, z0_prime_hyp)?;
    let z_plus_hyp = match cert.roots.z_star {
        Some(z) => 0.5 * (p.z0 + z),
        None => 0.5 * (p.z0 + upper.g_plusplus),
    };

    let z_max = 1.2 * upper.g_plusplus.max(upper.z_plus);
    let mut q_max: f64 = 0.0;
    for i in 0..=SAMPLES {
        let z = z_max * i as f64 / SAMPLES as f64;
        q_max = q_max.max(hyp.f(z).max(0.0).sqrt());
    }
    let real = phase_portrait(&p, &k, upper.z_plus, (0.0, z_max), (-q_max, q_max), SAMPLES);
    let hypothetical = phase_portrait(&hyp, &k, z_plus_hyp, (0.0, z_max), (-q_max, q_max), SAMPLES);
    let mut phase = Table::new(&["curve_id", "z", "q"]);
    for b in &real.level_set {
        push_points(&mut phase, LEVEL_SET, b);
    }
    for b in &hypothetical.level_set {
        push_points(&mut phase, LEVEL_SET_WITHOUT_ROOTS, b);
    }
    push_points(&mut phase, Z_PLUS_LINE, &real.z_plus_line);
    push_points(&mut phase, Z_PLUS_LINE_HYPOTHETICAL, &hypothetical.z_plus_line);

    let until = cfg.horizon;
    let trajectory = (0..=SAMPLES)
        .map(|i| {
            let t = until * i as f64 / SAMPLES as f64;
            let prof = sol.at(t);
            Ok(TimedPoint {
                t,
                g: moment_g(&prof, &w, gas.n())?,
                g_prime: moment_g_prime(&prof, &w, gas.n())?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let window = cert.valid_until();
    let comparison: Vec<TimedPoint> = (0..=SAMPLES)
        .filter_map(|i| {
            let t = window * i as f64 / SAMPLES as f64;
            cert.trajectory.eval(t).map(|y| TimedPoint {
                t,
                g: y[0].max(0.0),
                g_prime: y[1],
            })
        })
        .collect();
    let g_plus = upper.g_plus;
    let mut upper_env = Vec::with_capacity(SAMPLES + 1);
    for i in 0..=SAMPLES {
        let z = if i == SAMPLES { g_plus } else { g_plus * i as f64 / SAMPLES as f64 };
        let q = if i == 0 || i == SAMPLES { 0.0 } else { k.envelope(energy, z).max(0.0).sqrt() };
        upper_env.push([z, q]);
    }
    let lower_env: Vec<[f64; 2]> = upper_env.iter().rev().skip(1).map(|p| [p[0], -p[1]]).collect();
    let envelope = closed(&[upper_env, lower_env]);

    let mut dynamics = Table::new(&["curve_id", "G", "G_prime"]);
    let as_points = |v: &[TimedPoint]| v.iter().map(|p| [p.g, p.g_prime]).collect::<Vec<_>>();
    push_points(&mut dynamics, TRAJECTORY, &as_points(&trajectory));
    push_points(&mut dynamics, COMPARISON, &as_points(&comparison));
    push_points(&mut dynamics, ENVELOPE, &envelope);

    let bt = cert.blowup_time.value;
    Ok(Figures {
        summary: FigureSummary {
            z0: p.z0,
            z0_prime: p.z0_prime,
            z_star: cert.roots.z_star,
            z_plus: upper.z_plus,
            z_plus_hypothetical: z_plus_hyp,
            z0_prime_hypothetical: z0_prime_hyp,
            g_plus,
            g_plusplus: upper.g_plusplus,
            blowup_time: bt.is_finite().then_some(bt),
            trajectory_until: until,
        },
        phase,
        dynamics,
        trajectory,
        comparison,
    })
}
