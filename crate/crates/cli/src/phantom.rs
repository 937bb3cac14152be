//! The `phantom` command: searches Case I data for the phantom condition.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use euler_blowup::certificates::phantom_check;
use euler_blowup::field::RadialProfile;
use euler_blowup::model::{derived_constants, GasParameters, WeightFunction};
use euler_blowup::moments::{moment_g, moment_g_prime, total_mass};
use euler_blowup::oracle::{CaseIProfile, ExactSolution};

use crate::data::total_energy;
use crate::error::CliError;
use crate::output::{num, Table};

/// Range of the exact-solution sweep.
pub const SWEEP_RANGE: (f64, f64) = (-10.0, 10.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhantomEntry {
    pub source: &'static str,
    pub index: usize,
    pub profile: ProfileParams,
    pub mass: f64,
    pub energy: f64,
    pub g0: f64,
    pub g_prime0: f64,
    pub z_plus: f64,
    pub f_at_z_plus: f64,
    pub satisfied: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileParams {
    pub rho_amp: f64,
    pub rho_width: f64,
    pub p_amp: f64,
    pub p_width: f64,
    pub velocity_amp: f64,
    pub velocity_width: f64,
}

impl From<CaseIProfile> for ProfileParams {
    fn from(p: CaseIProfile) -> Self {
        Self {
            rho_amp: p.rho_amp,
            rho_width: p.rho_width,
            p_amp: p.p_amp,
            p_width: p.p_width,
            velocity_amp: p.velocity_amp,
            velocity_width: p.velocity_width,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhantomSummary {
    pub seed: Option<u64>,
    pub exact_sweep: usize,
    pub budget: usize,
    pub evaluated: usize,
    /// Draws skipped because a checker rejected them.
    pub skipped: usize,
    pub hits: usize,
    pub hit_entries: Vec<PhantomEntry>,
}

pub struct PhantomLog {
    pub summary: PhantomSummary,
    pub entries: Vec<PhantomEntry>,
}

impl PhantomLog {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&[
            "source",
            "index",
            "rho_amp",
            "rho_width",
            "p_amp",
            "p_width",
            "velocity_amp",
            "velocity_width",
            "mass",
            "energy",
            "G0",
            "G_prime0",
            "z_plus",
            "f_at_z_plus",
            "satisfied",
        ]);
        for e in &self.entries {
            let p = e.profile;
            t.push(vec![
                e.source.to_string(),
                e.index.to_string(),
                num(p.rho_amp),
                num(p.rho_width),
                num(p.p_amp),
                num(p.p_width),
                num(p.velocity_amp),
                num(p.velocity_width),
                num(e.mass),
                num(e.energy),
                num(e.g0),
                num(e.g_prime0),
                num(e.z_plus),
                num(e.f_at_z_plus),
                e.satisfied.to_string(),
            ]);
        }
        t
    }
}

fn evaluate(
    source: &'static str,
    index: usize,
    profile: CaseIProfile,
    mass: f64,
    energy: f64,
    gas: &GasParameters,
    w: &WeightFunction,
) -> euler_blowup::Result<PhantomEntry> {
    let n = gas.n();
    let entropy_inf = profile
        .entropy_inf(gas.gamma(), w.radius())
        .ok_or_else(|| euler_blowup::Error::InvalidField("vacuum data".into()))?;
    let k = derived_constants(gas, w, entropy_inf)?;
    let g0 = moment_g(&profile, w, n)?;
    let g1 = moment_g_prime(&profile, w, n)?;
    let wit = phantom_check(&k, g0, g1, mass, energy)?;
    Ok(PhantomEntry {
        source,
        index,
        profile: profile.into(),
        mass,
        energy,
        g0,
        g_prime0: g1,
        z_plus: wit.z_plus,
        f_at_z_plus: wit.f_at_z_plus,
        satisfied: wit.satisfied,
    })
}

/// Sweeps the exact family over `exact_sweep` values of `a0` and evaluates
/// `budget` random profiles drawn from `seed`.
pub fn search(
    gas: &GasParameters,
    w: &WeightFunction,
    exact_sweep: usize,
    budget: usize,
    seed: Option<u64>,
) -> Result<PhantomLog, CliError> {
    if budget > 0 && seed.is_none() {
        return Err(CliError::Config("a seed is mandatory for a random search".into()));
    }
    let n = gas.n();
    let mut entries = Vec::with_capacity(exact_sweep + budget);
    let mut skipped = 0;
    if exact_sweep > 0 && (n != 1 || gas.gamma() != 3.0) {
        return Err(CliError::Config("the exact family needs n = 1 and gamma = 3".into()));
    }
    for i in 0..exact_sweep {
        let (lo, hi) = SWEEP_RANGE;
        let a0 = if exact_sweep == 1 { lo } else { lo + (hi - lo) * i as f64 / (exact_sweep - 1) as f64 };
        let sol = ExactSolution::new(a0);
        match evaluate("exact", i, CaseIProfile::exact_initial(a0), sol.mass(), sol.energy(), gas, w) {
            Ok(e) => entries.push(e),
            Err(_) => skipped += 1,
        }
    }
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..budget {
            let profile = CaseIProfile::random(&mut rng);
            let mass = total_mass(&profile, n);
            let energy = total_energy(&profile, n, gas.gamma());
            match evaluate("random", i, profile, mass, energy, gas, w) {
                Ok(e) => entries.push(e),
                Err(_) => skipped += 1,
            }
        }
    }
    let hit_entries: Vec<PhantomEntry> = entries.iter().filter(|e| e.satisfied).copied().collect();
    Ok(PhantomLog {
        summary: PhantomSummary {
            seed,
            exact_sweep,
            budget,
            evaluated: entries.len(),
            skipped,
            hits: hit_entries.len(),
            hit_entries,
        },
        entries,
    })
}
