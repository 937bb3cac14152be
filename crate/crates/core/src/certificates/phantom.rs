//! The condition `G'(0) > 0, f(z₊) ≥ 0`, which would certify blowup for Case I
//! data. No data satisfying it are known; the probe only reports witnesses.

use serde::Serialize;

use crate::comparison::{upper_bounds, NonlinearComparisonProblem};
use crate::error::Result;
use crate::model::ConstantsBundle;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhantomWitness {
    pub g0: f64,
    pub g_prime0: f64,
    pub z_plus: f64,
    pub f_at_z_plus: f64,
    pub satisfied: bool,
}

pub fn phantom_check(k: &ConstantsBundle, g0: f64, g0_prime: f64, mass: f64, energy: f64) -> Result<PhantomWitness> {
    let problem = NonlinearComparisonProblem::from_constants(k, energy, g0, g0_prime)?;
    let z_plus = upper_bounds(k, mass, energy).z_plus;
    let f_at_z_plus = problem.f(z_plus);
    Ok(PhantomWitness {
        g0,
        g_prime0: g0_prime,
        z_plus,
        f_at_z_plus,
        satisfied: g0_prime > 0.0 && f_at_z_plus >= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derived_constants, GasParameters, WeightFunction};
    use crate::moments::{moment_g, moment_g_prime};
    use crate::oracle::ExactSolution;

    #[test]
    fn exact_family_never_satisfies() {
        let gas = GasParameters::new(1, 3.0).unwrap();
        let w = WeightFunction::new(1.0, 2.0).unwrap();
        let k = derived_constants(&gas, &w, 0.0).unwrap();
        for i in 0..=40 {
            let a0 = -10.0 + i as f64 * 0.5;
            let sol = ExactSolution::new(a0);
            let prof = sol.at(0.0);
            let g0 = moment_g(&prof, &w, 1).unwrap();
            let g1 = moment_g_prime(&prof, &w, 1).unwrap();
            let wit = phantom_check(&k, g0, g1, sol.mass(), sol.energy()).unwrap();
            assert!(!wit.satisfied, "{wit:?}");
        }
    }

    #[test]
    fn zero_velocity_never_satisfies() {
        let gas = GasParameters::new(1, 3.0).unwrap();
        let w = WeightFunction::new(1.0, 2.0).unwrap();
        let k = derived_constants(&gas, &w, 0.0).unwrap();
        let wit = phantom_check(&k, 0.5, 0.0, 1.0, 1.0).unwrap();
        assert!(!wit.satisfied);
        assert_eq!(wit.g_prime0, 0.0);
    }
}
