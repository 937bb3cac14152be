use std::f64::consts::PI;

use euler_blowup::moments::{classical_moment, total_mass};
use euler_blowup::oracle::ExactSolution;
use euler_blowup::quadrature::{half_line, Tolerance};

/// Central difference refined once by Richardson extrapolation.
fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

#[test]
fn pde_residuals_vanish_on_space_time_grid() {
    let gamma = 3.0;
    for a0 in [0.0, -1.0, -7.0, 2.5] {
        let sol = ExactSolution::new(a0);
        let mut worst: f64 = 0.0;
        for i in 0..100 {
            let x = -5.0 + 10.0 * i as f64 / 99.0;
            for j in 0..50 {
                let t = 2.0 * j as f64 / 49.0;
                let (rho, v, p) = sol.fields(x, t);
                // the fields vary on the scale ψ(t) in both x and t
                let h = 2e-4 * sol.psi(t);
                let rho_t = derivative(|s| sol.fields(x, s).0, t, h);
                let mom_t = derivative(|s| {
                    let (r, u, _) = sol.fields(x, s);
                    r * u
                }, t, h);
                let p_t = derivative(|s| sol.fields(x, s).2, t, h);
                let mass_x = derivative(|y| {
                    let (r, u, _) = sol.fields(y, t);
                    r * u
                }, x, h);
                let mom_x = derivative(|y| {
                    let (r, u, q) = sol.fields(y, t);
                    r * u * u + q
                }, x, h);
                let v_x = derivative(|y| sol.fields(y, t).1, x, h);
                let p_x = derivative(|y| sol.fields(y, t).2, x, h);
                let continuity = rho_t + mass_x;
                let momentum = mom_t + mom_x;
                let pressure = p_t + v * p_x + gamma * p * v_x;
                let scale = 1.0 + rho.abs() + (rho * v).abs() + p.abs();
                worst = worst.max((continuity.abs() + momentum.abs() + pressure.abs()) / scale);
            }
        }
        assert!(worst < 1e-8, "a0 = {a0}: residual {worst:e}");
    }
}

#[test]
fn conserved_totals_match_closed_forms() {
    let tol = Tolerance::new(1e-15, 1e-12);
    for a0 in [0.0, -1.0, -7.0] {
        let sol = ExactSolution::new(a0);
        for t in [0.0, 0.3, 4.0] {
            let prof = sol.at(t);
            let mass = total_mass(&prof, 1);
            assert!((mass - PI / 2.0).abs() < 1e-8 * PI / 2.0);
            let energy = 2.0
                * half_line(
                    |x| {
                        let (rho, v, p) = sol.fields(x, t);
                        0.5 * rho * v * v + p / 2.0
                    },
                    0.0,
                    tol,
                );
            let expect = PI / 4.0 * (2.0 + a0 * a0);
            assert!((energy - expect).abs() < 1e-8 * expect, "a0 = {a0}, t = {t}");
        }
    }
}

#[test]
fn classical_moment_matches_psi_squared() {
    for a0 in [0.0, -1.0, -7.0] {
        let sol = ExactSolution::new(a0);
        for t in [0.0, 0.5, 2.0] {
            let expect = PI / 4.0 * sol.psi(t).powi(2);
            let got = classical_moment(&sol.at(t), 1);
            assert!((got - expect).abs() < 1e-8 * expect);
            assert!((sol.classical_moment(t) - expect).abs() < 1e-14 * expect);
        }
    }
}

#[test]
fn potential_energy_closed_form() {
    let sol = ExactSolution::new(-7.0);
    let tol = Tolerance::new(1e-15, 1e-12);
    for t in [0.0, 0.5, 2.0, 10.0] {
        let ep = 2.0 * half_line(|x| sol.fields(x, t).2 / 2.0, 0.0, tol);
        let expect = PI / (2.0 * sol.psi(t).powi(2));
        assert!((ep - expect).abs() < 1e-8 * expect);
        assert!((sol.kinetic_energy(t) - (sol.energy() - expect)).abs() < 1e-10 * sol.energy());
    }
}
