use euler_blowup::model::{GasParameters, WeightFunction};
use euler_blowup::moments::holder_check;
use euler_blowup::oracle::{CaseIProfile, ExactSolution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn holds_on_random_admissible_fields() {
    let gas = GasParameters::new(1, 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (radius, k) in [(1.0, 2.0), (2.5, 1.5), (0.7, 6.0)] {
        let w = WeightFunction::new(radius, k).unwrap();
        for _ in 0..100 {
            let prof = CaseIProfile::random(&mut rng);
            let h = holder_check(&prof, &w, &gas).unwrap();
            assert!(h.satisfied, "{prof:?}: {h:?}");
        }
    }
}

#[test]
fn holds_along_exact_solution() {
    let gas = GasParameters::new(1, 3.0).unwrap();
    let w = WeightFunction::new(1.0, 2.0).unwrap();
    let sol = ExactSolution::new(-7.0);
    for i in 0..10 {
        let h = holder_check(&sol.at(0.2 * i as f64), &w, &gas).unwrap();
        assert!(h.satisfied, "{h:?}");
    }
}
