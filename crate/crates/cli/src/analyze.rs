//! The `analyze` command: runs every checker that applies to the scenario.

use serde::Serialize;

use euler_blowup::certificates::{
    check_theorem1, default_delta1, geometric_times, phantom_check, theorem2_certificate, theorem3_verdict,
    theorem4_certificate, BoundViolation, DensityBoundTrack, DensityObservation, PhantomWitness, Theorem1Report,
    Theorem1Verdict, Theorem3Verdict, DETECTOR_TOLERANCE,
};
use euler_blowup::field::RadialProfile;
use euler_blowup::moments::{density_extremes, holder_check, sample_moments, RadiusLadder};

use crate::config::{Case, Resolved, ScenarioConfig};
use crate::constants::{self, ConstantsReport};
use crate::data::{evolve, probe_times, Evolution, InitialData};
use crate::error::CliError;
use crate::output::{num, opt, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    SmoothConsistent,
    BlowupCertified,
    BoundViolated,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::SmoothConsistent => 0,
            Outcome::BlowupCertified => 2,
            Outcome::BoundViolated => 3,
        }
    }

    /// A certificate takes precedence over an observed violation.
    fn decide(certified: bool, violated: bool) -> Self {
        if certified {
            Outcome::BlowupCertified
        } else if violated {
            Outcome::BoundViolated
        } else {
            Outcome::SmoothConsistent
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderSummary {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonSummary {
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    pub energy: f64,
    pub z0: f64,
    pub z0_prime: f64,
    pub c: f64,
    pub root_case: u8,
    pub z_star: Option<f64>,
    pub degenerate: bool,
    /// `None` when the lower bound never reaches zero.
    pub blowup_time: Option<f64>,
    pub valid_until: f64,
    #[serde(rename = "G_plus")]
    pub g_plus: f64,
    #[serde(rename = "G_plusplus")]
    pub g_plusplus: f64,
    pub z_plus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackSummary {
    pub samples: usize,
    pub violations: usize,
    pub first: Option<BoundViolation>,
}

impl TrackSummary {
    fn of(track: &DensityBoundTrack) -> Self {
        Self {
            samples: track.times.len(),
            violations: track.violated.iter().filter(|&&v| v).count(),
            first: track.violation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverSummary {
    pub cells: usize,
    pub steps: usize,
    pub final_time: f64,
    pub detected_time: Option<f64>,
    pub detector_baseline: f64,
    pub peak_gradient_ratio: f64,
    pub breakdown_time: Option<f64>,
    pub breakdown_reason: Option<String>,
}

impl SolverSummary {
    fn of(ev: &Evolution) -> Self {
        Self {
            cells: ev.cells,
            steps: ev.record.steps,
            final_time: ev.record.final_time,
            detected_time: ev.record.detected_time,
            detector_baseline: ev.detector.baseline,
            peak_gradient_ratio: ev.detector.peak_ratio,
            breakdown_time: ev.record.breakdown.as_ref().map(|b| b.0),
            breakdown_reason: ev.record.breakdown.as_ref().map(|b| b.1.clone()),
        }
    }

    /// End of the smooth part of the run.
    fn smooth_until(&self) -> f64 {
        self.detected_time
            .into_iter()
            .chain(self.breakdown_time)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Moments and bounds at one Case I sample time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CaseISample {
    pub t: f64,
    pub g: f64,
    pub g_prime: f64,
    pub z_minus: Option<f64>,
    pub z_minus_prime: Option<f64>,
    pub sup_rho: f64,
    pub inf_rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseIReport {
    pub mass: f64,
    pub energy: f64,
    pub g0: f64,
    pub g0_prime: f64,
    pub holder: HolderSummary,
    pub comparison: ComparisonSummary,
    /// Evaluated for closed-form data only, which are known for all time.
    pub far_field: Option<Theorem1Report>,
    pub phantom: PhantomWitness,
    /// `closed_form` or `solver`.
    pub observations: &'static str,
    pub solver: Option<SolverSummary>,
    pub density_bounds: TrackSummary,
    /// Samples with `G'² > envelope(G) + 1e-9`.
    pub envelope_violations: usize,
    #[serde(skip)]
    pub samples: Vec<CaseISample>,
    #[serde(skip)]
    pub track: DensityBoundTrack,
}

/// Moment excess and its bounds at one Case II probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CaseIISample {
    pub t: f64,
    pub g: f64,
    pub g_prime: f64,
    pub q: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    pub q_plus_supported: f64,
    pub sup_rho: f64,
    pub inf_rho: f64,
    /// Probe precedes detection and breakdown.
    pub smooth: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearSummary {
    pub kappa_sq: f64,
    pub forcing_coefficients: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
    pub particular: Vec<f64>,
    pub trivial_after: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MomentBoundChecks {
    pub probes_checked: usize,
    pub lower_violations: usize,
    /// Against `m(0) - ρ̄K + ρ̄ ω_n (R0 + σt)ⁿ`.
    pub upper_violations: usize,
    /// Against `m(0) + ρ̄ ∫_{B_{R0+σt}} (1 - φ)`.
    pub supported_upper_violations: usize,
    pub first_upper_violation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseIIReport {
    pub mass_excess: f64,
    pub energy_excess: f64,
    pub g0: f64,
    pub g0_prime: f64,
    pub q0: f64,
    pub singularity: Theorem3Verdict,
    pub linear: LinearSummary,
    pub solver: SolverSummary,
    /// Detector fired no later than `T1`; `None` without both times.
    pub detected_before_t1: Option<bool>,
    pub moment_bounds: MomentBoundChecks,
    pub density_bounds: TrackSummary,
    pub density_bounds_supported: TrackSummary,
    #[serde(skip)]
    pub samples: Vec<CaseIISample>,
    #[serde(skip)]
    pub track: DensityBoundTrack,
    #[serde(skip)]
    pub track_supported: DensityBoundTrack,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub constants: ConstantsReport,
    pub outcome: Outcome,
    pub exit_code: i32,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_i: Option<CaseIReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_ii: Option<CaseIIReport>,
}

/// Report plus the tables written next to it.
pub struct Analysis {
    pub report: AnalysisReport,
    pub bounds: Table,
    pub moments: Table,
    pub far_field: Option<Table>,
}

/// Number of times sampled along closed-form Case I data.
const CLOSED_FORM_SAMPLES: usize = 200;

pub fn run(cfg: &ScenarioConfig, resolved: &Resolved, data: &InitialData) -> Result<Analysis, CliError> {
    match cfg.case {
        Case::I => case_i(cfg, resolved, data),
        Case::II => case_ii(cfg, resolved, data),
    }
}

fn bounds_table() -> Table {
    Table::new(&["case", "t", "lower", "upper", "observed_sup", "observed_inf", "violation"])
}

fn push_track(table: &mut Table, label: &str, track: &DensityBoundTrack) {
    for i in 0..track.times.len() {
        table.push(vec![
            label.to_string(),
            num(track.times[i]),
            opt(track.lower[i]),
            opt(track.upper[i]),
            num(track.observed_sup[i]),
            num(track.observed_inf[i]),
            track.violated[i].to_string(),
        ]);
    }
}

fn case_i(cfg: &ScenarioConfig, resolved: &Resolved, data: &InitialData) -> Result<Analysis, CliError> {
    let (gas, w) = (resolved.gas, resolved.weight);
    let (mass, energy) = match data {
        InitialData::Exact(sol) => (sol.mass(), sol.energy()),
        InitialData::Table { mass, energy, .. } => (*mass, *energy),
        InitialData::Case2 { .. } => unreachable!("validated Case I data"),
    };
    let profile0 = data.initial_profile();
    let consts = constants::compute(cfg, resolved, data)?;
    let holder = holder_check(profile0.as_ref(), &w, &gas)?;
    let cert = theorem2_certificate(profile0.as_ref(), &w, &gas, mass, energy, cfg.horizon)?;
    let k = cert.constants;
    let phantom = phantom_check(&k, cert.problem.z0, cert.problem.z0_prime, mass, energy)?;
    let window = cert.valid_until().min(cfg.horizon);
    let mut warnings = Vec::new();

    let (samples, observations, solver, far_field) = match data {
        InitialData::Exact(sol) => {
            let times: Vec<f64> = (0..=CLOSED_FORM_SAMPLES)
                .map(|i| window * i as f64 / CLOSED_FORM_SAMPLES as f64)
                .collect();
            let samples = times
                .iter()
                .map(|&t| case_i_sample(&sol.at(t), t, &cert, &w, &gas))
                .collect::<Result<Vec<_>, CliError>>()?;
            let times = geometric_times(1e-6, 1e8, 6000);
            let report = check_theorem1(sol, &gas, energy, &times, default_delta1(&gas), &RadiusLadder::default())?;
            (samples, "closed_form", None, Some(report))
        }
        _ => {
            let probes = probe_times(window, cfg.solver.probes);
            let ev = evolve(data, &gas, &cfg.solver, w.radius(), window, probes, true)?;
            let summary = SolverSummary::of(&ev);
            let until = summary.smooth_until();
            let samples = ev
                .record
                .snapshots
                .iter()
                .filter(|s| s.t < until)
                .map(|s| case_i_sample(&s.field, s.t, &cert, &w, &gas))
                .collect::<Result<Vec<_>, CliError>>()?;
            if let Some(t) = summary.detected_time {
                warnings.push(format!("gradient detector fired at t = {t}; later probes are not compared"));
            }
            (samples, "solver", Some(summary), None)
        }
    };

    let obs: Vec<DensityObservation> = samples
        .iter()
        .map(|s| DensityObservation {
            t: s.t,
            sup: s.sup_rho,
            inf: s.inf_rho,
        })
        .collect();
    let track = cert.track(&obs);
    let envelope_violations = samples
        .iter()
        .filter(|s| s.g_prime * s.g_prime > k.envelope(energy, s.g) + 1e-9)
        .count();
    if !holder.satisfied {
        warnings.push("moment inequality fails on the initial data".into());
    }
    if let Some(v) = track.violation {
        warnings.push(format!("density bound crossed at t = {} ({:?})", v.t, v.kind));
    }
    if phantom.satisfied {
        warnings.push("PHANTOM CONDITION SATISFIED by the initial data".into());
    }
    let certified = phantom.satisfied || far_field.as_ref().is_some_and(|r| r.verdict == Theorem1Verdict::Satisfied);
    let outcome = Outcome::decide(certified, track.violation.is_some());

    let mut bounds = bounds_table();
    push_track(&mut bounds, "I", &track);
    let mut moments = Table::new(&["t", "G", "G_prime", "z_minus", "z_minus_prime", "sup_rho", "inf_rho"]);
    for s in &samples {
        moments.push(vec![
            num(s.t),
            num(s.g),
            num(s.g_prime),
            opt(s.z_minus),
            opt(s.z_minus_prime),
            num(s.sup_rho),
            num(s.inf_rho),
        ]);
    }
    let far_table = far_field.as_ref().map(|r| {
        let mut t = Table::new(&["radius", "flux_term", "instantaneous_term", "value"]);
        for e in r.entries.iter().chain(std::iter::once(&r.extrapolated)) {
            t.push(vec![num(e.radius), num(e.flux_term), num(e.instantaneous_term), num(e.value)]);
        }
        t
    });

    let bt = cert.blowup_time.value;
    let report = CaseIReport {
        mass,
        energy,
        g0: cert.problem.z0,
        g0_prime: cert.problem.z0_prime,
        holder: HolderSummary {
            lhs: holder.lhs,
            rhs: holder.rhs,
            satisfied: holder.satisfied,
        },
        comparison: ComparisonSummary {
            a1: k.a1,
            a2: k.a2,
            energy,
            z0: cert.problem.z0,
            z0_prime: cert.problem.z0_prime,
            c: cert.problem.c,
            root_case: cert.roots.case.case_id(),
            z_star: cert.roots.z_star,
            degenerate: cert.roots.degenerate || cert.blowup_time.degenerate,
            blowup_time: bt.is_finite().then_some(bt),
            valid_until: cert.valid_until(),
            g_plus: cert.upper.g_plus,
            g_plusplus: cert.upper.g_plusplus,
            z_plus: cert.upper.z_plus,
        },
        far_field,
        phantom,
        observations,
        solver,
        density_bounds: TrackSummary::of(&track),
        envelope_violations,
        samples,
        track,
    };
    Ok(Analysis {
        report: AnalysisReport {
            constants: consts,
            outcome,
            exit_code: outcome.exit_code(),
            warnings,
            case_i: Some(report),
            case_ii: None,
        },
        bounds,
        moments,
        far_field: far_table,
    })
}

fn case_i_sample<P: RadialProfile + ?Sized>(
    profile: &P,
    t: f64,
    cert: &euler_blowup::certificates::Theorem2Certificate,
    w: &euler_blowup::model::WeightFunction,
    gas: &euler_blowup::model::GasParameters,
) -> Result<CaseISample, CliError> {
    let m = sample_moments(profile, w, gas, t, None)?;
    let (sup, inf) = density_extremes(profile, w.radius());
    let z = cert.z_minus(t);
    Ok(CaseISample {
        t,
        g: m.g,
        g_prime: m.g_prime,
        z_minus: z,
        z_minus_prime: z.and_then(|_| cert.trajectory.eval(t)).map(|y| y[1]),
        sup_rho: sup,
        inf_rho: inf,
    })
}

fn case_ii(cfg: &ScenarioConfig, resolved: &Resolved, data: &InitialData) -> Result<Analysis, CliError> {
    let (gas, w) = (resolved.gas, resolved.weight);
    let InitialData::Case2 {
        field,
        background,
        mass_excess,
        energy_excess,
        ..
    } = data
    else {
        unreachable!("validated Case II data")
    };
    let bg = *background;
    let consts = constants::compute(cfg, resolved, data)?;
    let cert = theorem4_certificate(field, &w, &gas, &bg, *mass_excess, *energy_excess, cfg.horizon)?;
    let rho_k = bg.rho_bar * cert.constants.k_integral;
    let g0 = cert.problem.z0 + rho_k;
    let g0_prime = cert.problem.z0_prime;
    let verdict = theorem3_verdict(&gas, &w, &bg, g0, g0_prime, *energy_excess)?;

    let probes = probe_times(cfg.horizon, cfg.solver.probes);
    let ev = evolve(data, &gas, &cfg.solver, w.radius(), cfg.horizon, probes, true)?;
    let solver = SolverSummary::of(&ev);
    let until = solver.smooth_until();

    let mut samples = Vec::with_capacity(ev.record.snapshots.len());
    for snap in &ev.record.snapshots {
        let m = sample_moments(&snap.field, &w, &gas, snap.t, Some(&bg))?;
        let (sup, inf) = density_extremes(&snap.field, w.radius());
        samples.push(CaseIISample {
            t: snap.t,
            g: m.g,
            g_prime: m.g_prime,
            q: m.g - rho_k,
            q_minus: cert.q_minus(snap.t),
            q_plus: cert.q_plus(snap.t),
            q_plus_supported: cert.q_plus_supported(snap.t),
            sup_rho: sup,
            inf_rho: inf,
            smooth: snap.t < until,
        });
    }
    let margin = |bound: f64| DETECTOR_TOLERANCE * bound.abs().max(rho_k);
    let mut checks = MomentBoundChecks::default();
    for s in samples.iter().filter(|s| s.smooth) {
        checks.probes_checked += 1;
        if s.q < s.q_minus - margin(s.q_minus) {
            checks.lower_violations += 1;
        }
        if s.q > s.q_plus + margin(s.q_plus) {
            checks.upper_violations += 1;
            checks.first_upper_violation.get_or_insert(s.t);
        }
        if s.q > s.q_plus_supported + margin(s.q_plus_supported) {
            checks.supported_upper_violations += 1;
        }
    }
    let obs: Vec<DensityObservation> = samples
        .iter()
        .filter(|s| s.smooth)
        .map(|s| DensityObservation {
            t: s.t,
            sup: s.sup_rho,
            inf: s.inf_rho,
        })
        .collect();
    let track = cert.track(&obs);
    let track_supported = cert.track_supported(&obs);

    let mut warnings = Vec::new();
    let detected_before_t1 = match (solver.detected_time, verdict.t1) {
        (Some(td), Some(t1)) => Some(td <= t1),
        _ => None,
    };
    if verdict.applies && detected_before_t1 == Some(false) {
        warnings.push(format!(
            "gradient detector fired at t = {} after the certified time T1 = {}; the detector is a proxy",
            solver.detected_time.unwrap_or(f64::NAN),
            verdict.t1.unwrap_or(f64::NAN)
        ));
    }
    if verdict.applies && solver.detected_time.is_none() && solver.breakdown_time.is_none() {
        warnings.push("certified singularity not seen by the gradient detector within the horizon".into());
    }
    if let Some(t) = checks.first_upper_violation {
        warnings.push(format!(
            "moment excess exceeds m(0) - rho_bar K + rho_bar omega_n (R0 + sigma t)^n at t = {t}; \
             that bound needs R0 + sigma t >= R"
        ));
    }
    if let Some(reason) = &solver.breakdown_reason {
        warnings.push(format!("solver breakdown: {reason}"));
    }
    let violated = checks.lower_violations > 0 || checks.supported_upper_violations > 0 || track_supported.violation.is_some();
    let outcome = Outcome::decide(verdict.applies, violated);

    let mut bounds = bounds_table();
    push_track(&mut bounds, "II", &track);
    push_track(&mut bounds, "II-supported", &track_supported);
    let mut moments = Table::new(&[
        "t",
        "G",
        "G_prime",
        "Q",
        "Q_minus",
        "Q_plus",
        "Q_plus_supported",
        "sup_rho",
        "inf_rho",
        "smooth",
    ]);
    for s in &samples {
        moments.push(vec![
            num(s.t),
            num(s.g),
            num(s.g_prime),
            num(s.q),
            num(s.q_minus),
            num(s.q_plus),
            num(s.q_plus_supported),
            num(s.sup_rho),
            num(s.inf_rho),
            s.smooth.to_string(),
        ]);
    }

    let report = CaseIIReport {
        mass_excess: *mass_excess,
        energy_excess: *energy_excess,
        g0,
        g0_prime,
        q0: cert.problem.z0,
        singularity: verdict,
        linear: LinearSummary {
            kappa_sq: cert.problem.kappa_sq,
            forcing_coefficients: cert.problem.p_coeffs.clone(),
            c1: cert.solution.c1,
            c2: cert.solution.c2,
            particular: cert.solution.particular.clone(),
            trivial_after: cert.trivial_after,
        },
        solver,
        detected_before_t1,
        moment_bounds: checks,
        density_bounds: TrackSummary::of(&track),
        density_bounds_supported: TrackSummary::of(&track_supported),
        samples,
        track,
        track_supported,
    };
    Ok(Analysis {
        report: AnalysisReport {
            constants: consts,
            outcome,
            exit_code: outcome.exit_code(),
            warnings,
            case_i: None,
            case_ii: Some(report),
        },
        bounds,
        moments,
        far_field: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_wins_over_violation() {
        assert_eq!(Outcome::decide(true, true), Outcome::BlowupCertified);
        assert_eq!(Outcome::decide(false, true).exit_code(), 3);
        assert_eq!(Outcome::decide(false, false).exit_code(), 0);
    }
}
