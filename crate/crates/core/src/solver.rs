//! One-dimensional finite-volume solver for the γ-law Euler equations.
//!
//! First-order Rusanov fluxes with forward Euler time stepping. The solver
//! exists to produce smooth reference fields and a steepening signal, not to
//! resolve shocks sharply.

use crate::error::{invalid, Error, Result};
use crate::field::{RadialField, RadialSample};
use crate::oracle::ExactSolution;

/// Default Courant number.
pub const DEFAULT_CFL: f64 = 0.45;

/// Halvings of the time step tried before a positivity failure is final.
pub const MAX_RETRIES: usize = 30;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Conserved {
    pub rho: f64,
    pub mom: f64,
    /// Total energy `p/(γ-1) + ½ρv²`.
    pub energy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub v: f64,
    pub p: f64,
}

impl Primitive {
    pub fn to_conserved(self, gamma: f64) -> Conserved {
        Conserved {
            rho: self.rho,
            mom: self.rho * self.v,
            energy: self.p / (gamma - 1.0) + 0.5 * self.rho * self.v * self.v,
        }
    }

    pub fn sound_speed(&self, gamma: f64) -> f64 {
        (gamma * self.p / self.rho).sqrt()
    }
}

impl Conserved {
    pub fn to_primitive(self, gamma: f64) -> Primitive {
        let v = self.mom / self.rho;
        Primitive {
            rho: self.rho,
            v,
            p: (gamma - 1.0) * (self.energy - 0.5 * self.mom * v),
        }
    }

    fn admissible(&self) -> bool {
        self.rho > 0.0 && self.energy - 0.5 * self.mom * self.mom / self.rho > 0.0 && self.energy.is_finite()
    }

    fn flux(&self, gamma: f64) -> [f64; 3] {
        let w = self.to_primitive(gamma);
        [self.mom, self.mom * w.v + w.p, (self.energy + w.p) * w.v]
    }

    fn as_array(&self) -> [f64; 3] {
        [self.rho, self.mom, self.energy]
    }
}

/// Uniform cells on `[x_min, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub cells: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, cells: usize) -> Result<Self> {
        if !(x_max > x_min) || cells < 2 {
            return Err(invalid("grid", "need x_max > x_min and at least two cells"));
        }
        Ok(Self { x_min, x_max, cells })
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.h()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Supplies the ghost-cell state outside the domain.
pub trait BoundaryProvider {
    /// State at ghost-cell centre `x` and time `t`; `inside` is the adjacent interior cell.
    fn ghost(&self, side: Side, x: f64, t: f64, inside: Primitive) -> Primitive;
}

/// Fixed state on both sides, e.g. a Case II background.
pub struct ConstantBoundary(pub Primitive);

impl BoundaryProvider for ConstantBoundary {
    fn ghost(&self, _side: Side, _x: f64, _t: f64, _inside: Primitive) -> Primitive {
        self.0
    }
}

/// Zero-gradient extrapolation.
pub struct Transmissive;

impl BoundaryProvider for Transmissive {
    fn ghost(&self, _side: Side, _x: f64, _t: f64, inside: Primitive) -> Primitive {
        inside
    }
}

/// Dirichlet data from the exact solution.
pub struct ExactBoundary(pub ExactSolution);

impl BoundaryProvider for ExactBoundary {
    fn ghost(&self, _side: Side, x: f64, t: f64, _inside: Primitive) -> Primitive {
        let (rho, v, p) = self.0.fields(x, t);
        Primitive { rho, v, p }
    }
}

/// What one accepted step did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub retries: usize,
    /// Net inflow `dt (F_left - F_right)` of mass, momentum and energy.
    pub boundary_inflow: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    pub grid: Grid1D,
    pub gamma: f64,
    pub cfl: f64,
    pub t: f64,
    pub cells: Vec<Conserved>,
}

impl SolverState {
    /// Initializes cells with point values at the cell centres.
    pub fn new<F: Fn(f64) -> Primitive>(grid: Grid1D, gamma: f64, cfl: f64, init: F) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(invalid("gamma", format!("heat ratio must exceed 1, got {gamma}")));
        }
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(invalid("cfl", format!("must lie in (0, 1], got {cfl}")));
        }
        let cells: Vec<Conserved> = (0..grid.cells).map(|i| init(grid.center(i)).to_conserved(gamma)).collect();
        if let Some(i) = cells.iter().position(|c| !c.admissible()) {
            return Err(Error::InvalidField(format!(
                "initial state not positive at x = {}",
                grid.center(i)
            )));
        }
        Ok(Self {
            grid,
            gamma,
            cfl,
            t: 0.0,
            cells,
        })
    }

    pub fn primitives(&self) -> Vec<Primitive> {
        self.cells.iter().map(|c| c.to_primitive(self.gamma)).collect()
    }

    /// `(mass, momentum, energy)` summed over the domain.
    pub fn totals(&self) -> [f64; 3] {
        let h = self.grid.h();
        let mut out = [0.0; 3];
        for c in &self.cells {
            out[0] += c.rho * h;
            out[1] += c.mom * h;
            out[2] += c.energy * h;
        }
        out
    }

    pub fn max_wave_speed(&self) -> f64 {
        self.primitives()
            .iter()
            .map(|w| w.v.abs() + w.sound_speed(self.gamma))
            .fold(0.0, f64::max)
    }

    /// `max_i |ρ_{i+1} - ρ_i| / h`.
    pub fn max_density_gradient(&self) -> f64 {
        let h = self.grid.h();
        self.cells
            .windows(2)
            .map(|w| (w[1].rho - w[0].rho).abs() / h)
            .fold(0.0, f64::max)
    }

    fn interface_fluxes<B: BoundaryProvider + ?Sized>(&self, bc: &B) -> Vec<[f64; 3]> {
        let g = self.gamma;
        let n = self.grid.cells;
        let h = self.grid.h();
        let left = bc
            .ghost(Side::Left, self.grid.x_min - 0.5 * h, self.t, self.cells[0].to_primitive(g))
            .to_conserved(g);
        let right = bc
            .ghost(Side::Right, self.grid.x_max + 0.5 * h, self.t, self.cells[n - 1].to_primitive(g))
            .to_conserved(g);
        let cell = |i: isize| -> Conserved {
            if i < 0 {
                left
            } else if i as usize >= n {
                right
            } else {
                self.cells[i as usize]
            }
        };
        (0..=n as isize)
            .map(|j| rusanov(&cell(j - 1), &cell(j), g))
            .collect()
    }

    fn stable_dt<B: BoundaryProvider + ?Sized>(&self, bc: &B) -> f64 {
        let g = self.gamma;
        let h = self.grid.h();
        let n = self.grid.cells;
        let edge = [
            bc.ghost(Side::Left, self.grid.x_min - 0.5 * h, self.t, self.cells[0].to_primitive(g)),
            bc.ghost(Side::Right, self.grid.x_max + 0.5 * h, self.t, self.cells[n - 1].to_primitive(g)),
        ];
        let smax = edge
            .iter()
            .map(|w| w.v.abs() + w.sound_speed(g))
            .fold(self.max_wave_speed(), f64::max);
        self.cfl * h / smax
    }

    /// Advances by one step of at most `dt_max`.
    pub fn step<B: BoundaryProvider + ?Sized>(&mut self, bc: &B, dt_max: f64) -> Result<StepReport> {
        let fluxes = self.interface_fluxes(bc);
        let h = self.grid.h();
        let mut dt = self.stable_dt(bc).min(dt_max);
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::SolverBreakdown {
                t: self.t,
                reason: format!("non-positive or non-finite time step {dt}"),
            });
        }
        for retries in 0..=MAX_RETRIES {
            let lambda = dt / h;
            let next: Vec<Conserved> = self
                .cells
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let (fl, fr) = (fluxes[i], fluxes[i + 1]);
                    Conserved {
                        rho: c.rho - lambda * (fr[0] - fl[0]),
                        mom: c.mom - lambda * (fr[1] - fl[1]),
                        energy: c.energy - lambda * (fr[2] - fl[2]),
                    }
                })
                .collect();
            if next.iter().all(Conserved::admissible) {
                let (fl, fr) = (fluxes[0], fluxes[self.grid.cells]);
                self.cells = next;
                self.t += dt;
                return Ok(StepReport {
                    dt,
                    retries,
                    boundary_inflow: [dt * (fl[0] - fr[0]), dt * (fl[1] - fr[1]), dt * (fl[2] - fr[2])],
                });
            }
            dt *= 0.5;
        }
        Err(Error::SolverBreakdown {
            t: self.t,
            reason: format!("positivity lost after {MAX_RETRIES} step halvings"),
        })
    }

    /// Density, velocity and pressure at `x` by linear interpolation of cell
    /// centres (clamped at the ends).
    pub fn sample(&self, x: f64) -> Primitive {
        let h = self.grid.h();
        let s = ((x - self.grid.x_min) / h - 0.5).clamp(0.0, (self.grid.cells - 1) as f64);
        let i = (s.floor() as usize).min(self.grid.cells - 2);
        let f = s - i as f64;
        let a = self.cells[i].to_primitive(self.gamma);
        let b = self.cells[i + 1].to_primitive(self.gamma);
        Primitive {
            rho: a.rho + f * (b.rho - a.rho),
            v: a.v + f * (b.v - a.v),
            p: a.p + f * (b.p - a.p),
        }
    }

    /// Radial restriction on `[0, radius]`: even part of `ρ, p` and odd part
    /// of `v` about the origin, sampled every `h/2`.
    pub fn radial_field(&self, radius: f64) -> Result<RadialField> {
        let h = self.grid.h();
        let reach = (-self.grid.x_min).min(self.grid.x_max) - 0.5 * h;
        if reach < radius {
            return Err(Error::InsufficientCoverage {
                extent: reach.max(0.0),
                required: radius,
            });
        }
        let count = (radius / (0.5 * h)).ceil() as usize;
        let samples = (0..=count)
            .map(|j| {
                let r = (j as f64 * 0.5 * h).min(radius);
                let (a, b) = (self.sample(r), self.sample(-r));
                RadialSample {
                    r,
                    rho: 0.5 * (a.rho + b.rho),
                    v_r: 0.5 * (a.v - b.v),
                    p: 0.5 * (a.p + b.p),
                }
            })
            .collect::<Vec<_>>();
        let mut samples = samples;
        samples.dedup_by(|a, b| a.r == b.r);
        RadialField::new(samples, self.gamma)
    }
}

fn rusanov(l: &Conserved, r: &Conserved, gamma: f64) -> [f64; 3] {
    let (wl, wr) = (l.to_primitive(gamma), r.to_primitive(gamma));
    let s = (wl.v.abs() + wl.sound_speed(gamma)).max(wr.v.abs() + wr.sound_speed(gamma));
    let (fl, fr) = (l.flux(gamma), r.flux(gamma));
    let (ul, ur) = (l.as_array(), r.as_array());
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = 0.5 * (fl[k] + fr[k]) - 0.5 * s * (ur[k] - ul[k]);
    }
    out
}

/// Declares steepening once the largest density gradient exceeds a multiple
/// of its initial value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowupDetector {
    pub multiple: f64,
    /// Initial gradient, floored at `max ρ0 / L` so flat data still have a scale.
    pub baseline: f64,
    pub detected_time: Option<f64>,
    pub peak_ratio: f64,
}

impl BlowupDetector {
    pub const DEFAULT_MULTIPLE: f64 = 50.0;

    pub fn new(state: &SolverState, multiple: f64) -> Self {
        let length = state.grid.x_max - state.grid.x_min;
        let rho_max = state.cells.iter().map(|c| c.rho).fold(0.0, f64::max);
        Self {
            multiple,
            baseline: state.max_density_gradient().max(rho_max / length),
            detected_time: None,
            peak_ratio: 1.0,
        }
    }

    /// Records the state; returns whether steepening has been detected so far.
    pub fn observe(&mut self, state: &SolverState) -> bool {
        let ratio = state.max_density_gradient() / self.baseline;
        self.peak_ratio = self.peak_ratio.max(ratio);
        if self.detected_time.is_none() && ratio > self.multiple {
            self.detected_time = Some(state.t);
        }
        self.detected_time.is_some()
    }
}

/// Radial restriction of the numerical field at a probe time.
#[derive(Clone, Debug)]
pub struct FieldSnapshot {
    pub t: f64,
    pub field: RadialField,
    pub totals: [f64; 3],
    pub max_gradient: f64,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub t_end: f64,
    /// Increasing probe times in `[t, t_end]`.
    pub probes: Vec<f64>,
    /// Radius of the extracted radial field.
    pub extract_radius: f64,
    pub stop_on_detection: bool,
    pub max_steps: usize,
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub snapshots: Vec<FieldSnapshot>,
    pub detected_time: Option<f64>,
    /// Time and cause of a positivity failure; counts as blowup evidence.
    pub breakdown: Option<(f64, String)>,
    pub steps: usize,
    pub final_time: f64,
    /// Accumulated boundary inflow of mass, momentum and energy.
    pub boundary_inflow: [f64; 3],
}

/// Advances `state` to `opts.t_end`, landing exactly on every probe time.
pub fn run_until<B: BoundaryProvider + ?Sized>(
    state: &mut SolverState,
    bc: &B,
    detector: &mut BlowupDetector,
    opts: &RunOptions,
) -> Result<RunRecord> {
    if !(opts.t_end > state.t) {
        return Err(invalid("t_end", "must exceed the current time"));
    }
    if opts.probes.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("probes", "probe times must be sorted"));
    }
    let mut record = RunRecord {
        snapshots: Vec::new(),
        detected_time: None,
        breakdown: None,
        steps: 0,
        final_time: state.t,
        boundary_inflow: [0.0; 3],
    };
    let t_start = state.t;
    let mut probes = opts.probes.iter().copied().filter(|&t| t >= t_start && t <= opts.t_end).peekable();
    let snapshot = |state: &SolverState| -> Result<FieldSnapshot> {
        Ok(FieldSnapshot {
            t: state.t,
            field: state.radial_field(opts.extract_radius)?,
            totals: state.totals(),
            max_gradient: state.max_density_gradient(),
        })
    };
    detector.observe(state);
    loop {
        while let Some(&tp) = probes.peek() {
            if tp <= state.t + 1e-12 * state.t.abs().max(1.0) {
                record.snapshots.push(snapshot(state)?);
                probes.next();
            } else {
                break;
            }
        }
        if state.t >= opts.t_end * (1.0 - 1e-14) || (opts.stop_on_detection && detector.detected_time.is_some()) {
            break;
        }
        if record.steps >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        let target = probes.peek().copied().unwrap_or(opts.t_end).min(opts.t_end);
        match state.step(bc, target - state.t) {
            Ok(rep) => {
                record.steps += 1;
                for k in 0..3 {
                    record.boundary_inflow[k] += rep.boundary_inflow[k];
                }
                // absorb round-off so probes are hit exactly
                if (target - state.t).abs() <= 1e-12 * target.abs().max(1.0) {
                    state.t = target;
                }
            }
            Err(Error::SolverBreakdown { t, reason }) => {
                record.breakdown = Some((t, reason));
                break;
            }
            Err(e) => return Err(e),
        }
        detector.observe(state);
    }
    record.detected_time = detector.detected_time;
    record.final_time = state.t;
    Ok(record)
}
