//! Initial data named by a scenario, and the numerical evolution of it.

use std::path::Path;

use serde::Deserialize;

use euler_blowup::field::{RadialField, RadialProfile, RadialSample, RadialState};
use euler_blowup::model::{omega_n, Background, GasParameters};
use euler_blowup::moments::{perturbation_totals, total_mass};
use euler_blowup::oracle::{generate_case2, CaseIIGenerator, ExactSolution};
use euler_blowup::quadrature::{half_line, simpson_with_breaks, Tolerance};
use euler_blowup::solver::{
    run_until, BlowupDetector, BoundaryProvider, ConstantBoundary, Grid1D, Primitive, RunOptions, RunRecord,
    SolverState, Transmissive,
};

use crate::config::{DataSource, Resolved, ScenarioConfig, SolverConfig};
use crate::error::CliError;

const ENERGY_TOLERANCE: Tolerance = Tolerance::new(1e-14, 1e-11);

/// Samples in a generated Case II table.
const CASE2_SAMPLES: usize = 6000;

pub enum InitialData {
    Exact(ExactSolution),
    /// Case I table with totals integrated over its extent.
    Table {
        field: RadialField,
        mass: f64,
        energy: f64,
    },
    Case2 {
        generator: Option<CaseIIGenerator>,
        field: RadialField,
        background: Background,
        mass_excess: f64,
        energy_excess: f64,
    },
}

#[derive(Deserialize)]
struct Row {
    r: f64,
    rho: f64,
    v_r: f64,
    p: f64,
}

/// Reads a radial table with header `r,rho,v_r,p`.
pub fn read_table(path: &Path, gamma: f64) -> Result<RadialField, CliError> {
    let io = |e: csv::Error| CliError::Io(format!("cannot read {}: {e}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(io)?;
    let mut samples = Vec::new();
    for row in reader.deserialize::<Row>() {
        let row = row.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        samples.push(RadialSample {
            r: row.r,
            rho: row.rho,
            v_r: row.v_r,
            p: row.p,
        });
    }
    Ok(RadialField::new(samples, gamma)?)
}

/// `∫ (½ρ|v|² + p/(γ-1)) dx` over the extent of `profile`.
pub fn total_energy<P: RadialProfile + ?Sized>(profile: &P, n: usize, gamma: f64) -> f64 {
    let density = |r: f64| {
        let st = profile.state(r);
        (0.5 * st.rho * st.v_r * st.v_r + st.p / (gamma - 1.0)) * r.powi(n as i32 - 1)
    };
    let measure = n as f64 * omega_n(n);
    let extent = profile.extent();
    let integral = if extent.is_finite() {
        let mut breaks = vec![0.0];
        breaks.extend(profile.breakpoints(0.0, extent));
        breaks.push(extent);
        simpson_with_breaks(density, &breaks, ENERGY_TOLERANCE)
    } else {
        half_line(density, 0.0, ENERGY_TOLERANCE)
    };
    measure * integral
}

impl InitialData {
    pub fn load(cfg: &ScenarioConfig, resolved: &Resolved, base_dir: &Path) -> Result<Self, CliError> {
        let gas = resolved.gas;
        match &cfg.data {
            DataSource::Exact { a0 } => Ok(InitialData::Exact(ExactSolution::new(*a0))),
            DataSource::Case2 { bump, .. } => {
                let background = resolved.background.expect("validated Case II background");
                let generator = CaseIIGenerator::new(background, bump.amplitudes(), gas)?;
                let extent = cfg.solver.domain[0].abs().max(cfg.solver.domain[1].abs());
                let data = generate_case2(&generator, extent, CASE2_SAMPLES)?;
                Ok(InitialData::Case2 {
                    generator: Some(generator),
                    field: data.field,
                    background,
                    mass_excess: data.mass_excess,
                    energy_excess: data.energy_excess,
                })
            }
            DataSource::File { path, .. } => {
                let path = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
                let field = read_table(&path, gas.gamma())?;
                match resolved.background {
                    None => Ok(InitialData::Table {
                        mass: total_mass(&field, gas.n()),
                        energy: total_energy(&field, gas.n(), gas.gamma()),
                        field,
                    }),
                    Some(background) => {
                        let (mass_excess, energy_excess) = perturbation_totals(&field, &gas, &background, 0.0)?;
                        Ok(InitialData::Case2 {
                            generator: None,
                            field,
                            background,
                            mass_excess,
                            energy_excess,
                        })
                    }
                }
            }
        }
    }

    /// Initial radial state at radius `r`.
    pub fn initial_state(&self, r: f64) -> RadialState {
        match self {
            InitialData::Exact(sol) => sol.at(0.0).state(r),
            InitialData::Table { field, .. } => field.state(r.min(field.extent())),
            InitialData::Case2 {
                generator: Some(g), ..
            } => g.state(r),
            InitialData::Case2 { field, background, .. } => {
                if r > field.extent() {
                    RadialState {
                        rho: background.rho_bar,
                        v_r: 0.0,
                        p: background.p_bar,
                    }
                } else {
                    field.state(r)
                }
            }
        }
    }

    pub fn initial_profile(&self) -> Box<dyn RadialProfile + '_> {
        match self {
            InitialData::Exact(sol) => Box::new(sol.at(0.0)),
            InitialData::Table { field, .. } => Box::new(field),
            InitialData::Case2 {
                generator: Some(g), ..
            } => Box::new(*g),
            InitialData::Case2 { field, .. } => Box::new(field),
        }
    }
}

/// Numerical evolution of one-dimensional data with the gradient detector.
pub struct Evolution {
    pub record: RunRecord,
    pub detector: BlowupDetector,
    pub cells: usize,
}

/// Runs the finite-volume solver from `data` with probes at `probes`.
pub fn evolve(
    data: &InitialData,
    gas: &GasParameters,
    solver: &SolverConfig,
    extract_radius: f64,
    t_end: f64,
    probes: Vec<f64>,
    stop_on_detection: bool,
) -> Result<Evolution, CliError> {
    if gas.n() != 1 {
        return Err(CliError::Config("the reference solver is one-dimensional (n = 1)".into()));
    }
    let grid = Grid1D::new(solver.domain[0], solver.domain[1], solver.cells)?;
    let mut state = SolverState::new(grid, gas.gamma(), solver.cfl, |x| {
        let st = data.initial_state(x.abs());
        Primitive {
            rho: st.rho,
            v: st.v_r * x.signum(),
            p: st.p,
        }
    })?;
    let bc: Box<dyn BoundaryProvider> = match data {
        InitialData::Case2 { background, .. } => Box::new(ConstantBoundary(Primitive {
            rho: background.rho_bar,
            v: 0.0,
            p: background.p_bar,
        })),
        _ => Box::new(Transmissive),
    };
    let mut detector = BlowupDetector::new(&state, solver.detector_multiple);
    let opts = RunOptions {
        t_end,
        probes,
        extract_radius,
        stop_on_detection,
        max_steps: 20_000_000,
    };
    let record = run_until(&mut state, bc.as_ref(), &mut detector, &opts)?;
    Ok(Evolution {
        record,
        detector,
        cells: solver.cells,
    })
}

/// `0`, `count` geometric times from `t_end / 10⁴` to `t_end` and `count`
/// uniform times, merged and deduplicated.
pub fn probe_times(t_end: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    let mut out = vec![0.0];
    let first = t_end * 1e-4;
    let ratio = (t_end / first).ln() / (count - 1) as f64;
    out.extend((0..count).map(|i| first * (ratio * i as f64).exp()));
    out.extend((1..=count).map(|i| t_end * i as f64 / count as f64));
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * t_end);
    if let Some(last) = out.last_mut() {
        *last = t_end;
    }
    out
}
