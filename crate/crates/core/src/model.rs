//! Gas and weight-function data plus the constants derived from them.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::quadrature::{simpson_with_breaks, Tolerance};

/// Tolerance used for every integral of the weight function.
pub const WEIGHT_TOLERANCE: Tolerance = Tolerance::new(1e-13, 1e-12);

/// Polytropic gas in `n` space dimensions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasParameters {
    n: usize,
    gamma: f64,
}

impl GasParameters {
    pub fn new(n: usize, gamma: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "spatial dimension must be at least 1"));
        }
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(invalid("gamma", format!("heat ratio must exceed 1, got {gamma}")));
        }
        Ok(Self { n, gamma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `min{2, n (gamma - 1)}`.
    pub fn delta(&self) -> f64 {
        (self.n as f64 * (self.gamma - 1.0)).min(2.0)
    }
}

/// Volume of the unit ball in `n` dimensions.
pub fn omega_n(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * omega_n(n - 2),
    }
}

/// `∫_{R^n} g(|x|) dx = n ω_n ∫ g(r) r^{n-1} dr` over the given radial break points.
pub fn radial_integral<F: Fn(f64) -> f64>(n: usize, g: F, breaks: &[f64], tol: Tolerance) -> f64 {
    let measure = n as f64 * omega_n(n);
    let power = n as i32 - 1;
    measure * simpson_with_breaks(|r| g(r) * r.powi(power), breaks, tol)
}

/// Compactly supported C¹ weight: `1 - B r²` inside, `C (r - R)²` in the
/// outer shell, zero beyond `R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightFunction {
    radius: f64,
    k: f64,
}

impl WeightFunction {
    pub fn new(radius: f64, k: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("R", format!("ball radius must be positive, got {radius}")));
        }
        if !(k > 1.0) || !k.is_finite() {
            return Err(invalid("k", format!("shape parameter must exceed 1, got {k}")));
        }
        Ok(Self { radius, k })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn b(&self) -> f64 {
        self.k / (self.radius * self.radius * (self.k - 1.0))
    }

    pub fn c(&self) -> f64 {
        self.b() * (self.k - 1.0)
    }

    /// Radius `R - R/k` where the two quadratic branches join.
    pub fn inner_radius(&self) -> f64 {
        self.radius - self.radius / self.k
    }

    /// Radial break points of the weight inside its support.
    pub fn breaks(&self) -> [f64; 3] {
        [0.0, self.inner_radius(), self.radius]
    }

    pub fn value(&self, r: f64) -> f64 {
        phi_eval(r, self).0
    }

    pub fn derivative(&self, r: f64) -> f64 {
        phi_eval(r, self).1
    }

    /// `K = ∫ φ dx` in `n` dimensions.
    pub fn integral(&self, n: usize) -> f64 {
        radial_integral(n, |r| self.value(r), &self.breaks(), WEIGHT_TOLERANCE)
    }

    /// `∫_{B_r} φ dx`; equals `K` once `r ≥ R`.
    pub fn ball_integral(&self, n: usize, r: f64) -> f64 {
        if r >= self.radius {
            return self.integral(n);
        }
        let mut breaks = vec![0.0];
        if r > self.inner_radius() {
            breaks.push(self.inner_radius());
        }
        if r > 0.0 {
            breaks.push(r);
        } else {
            return 0.0;
        }
        radial_integral(n, |s| self.value(s), &breaks, WEIGHT_TOLERANCE)
    }

    /// `∫_{B_R} φ^{γ/(γ-1)} dx`.
    pub fn power_integral(&self, n: usize, gamma: f64) -> f64 {
        let s = gamma / (gamma - 1.0);
        radial_integral(n, |r| self.value(r).powf(s), &self.breaks(), WEIGHT_TOLERANCE)
    }
}

/// Value and first derivative of the weight at radius `r ≥ 0`.
pub fn phi_eval(r: f64, w: &WeightFunction) -> (f64, f64) {
    let big_r = w.radius;
    if r < w.inner_radius() {
        let b = w.b();
        (1.0 - b * r * r, -2.0 * b * r)
    } else if r < big_r {
        let c = w.c();
        let d = r - big_r;
        (c * d * d, 2.0 * c * d)
    } else {
        (0.0, 0.0)
    }
}

/// Constant state of a Case II flow and the radius of its perturbation ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Background {
    pub rho_bar: f64,
    pub p_bar: f64,
    pub r0: f64,
    pub sigma: f64,
}

impl Background {
    pub fn new(rho_bar: f64, p_bar: f64, r0: f64, gas: &GasParameters) -> Result<Self> {
        let sigma = sound_speed(rho_bar, p_bar, gas.gamma())?;
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(invalid("R0", format!("perturbation radius must be positive, got {r0}")));
        }
        Ok(Self {
            rho_bar,
            p_bar,
            r0,
            sigma,
        })
    }

    /// Radius `R0 + σ t` of the ball containing the perturbation.
    pub fn perturbation_radius(&self, t: f64) -> f64 {
        self.r0 + self.sigma * t
    }
}

/// Sound speed `sqrt(γ p̄ / ρ̄)` of the background state.
pub fn sound_speed(rho_bar: f64, p_bar: f64, gamma: f64) -> Result<f64> {
    if !(rho_bar > 0.0) || !rho_bar.is_finite() {
        return Err(invalid("rho_bar", format!("background density must be positive, got {rho_bar}")));
    }
    if !(p_bar > 0.0) || !p_bar.is_finite() {
        return Err(invalid("p_bar", format!("background pressure must be positive, got {p_bar}")));
    }
    if !(gamma > 1.0) {
        return Err(invalid("gamma", format!("heat ratio must exceed 1, got {gamma}")));
    }
    Ok((gamma * p_bar / rho_bar).sqrt())
}

/// Every constant the moment estimates need, for one gas, one weight and one
/// lower entropy bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantsBundle {
    pub n: usize,
    pub gamma: f64,
    pub radius: f64,
    pub k: f64,
    pub b: f64,
    pub c: f64,
    /// `∫ φ dx`.
    pub k_integral: f64,
    /// `∫ φ^{γ/(γ-1)} dx`.
    pub phi_power_integral: f64,
    pub delta: f64,
    pub omega_n: f64,
    pub entropy_inf: f64,
    pub a1: f64,
    pub a2: f64,
}

impl ConstantsBundle {
    /// `(γ - 1)(k - n)`, the factor linking the potential energy to `G^γ`.
    pub fn energy_factor(&self) -> f64 {
        (self.gamma - 1.0) * (self.k - self.n as f64)
    }

    /// Upper bound `((γ-1)(k-n) E / A1)^{1/γ}` of the moment.
    pub fn g_plus(&self, energy: f64) -> f64 {
        (self.energy_factor() * energy / self.a1).powf(1.0 / self.gamma)
    }

    /// Minimum point `(A2 E / A1)^{1/γ}` of the phase function.
    pub fn g_plusplus(&self, energy: f64) -> f64 {
        (self.a2 * energy / self.a1).powf(1.0 / self.gamma)
    }

    /// Right-hand side of the envelope `q² ≤ 8 C z (E - A1 z^γ / ((γ-1)(k-n)))`.
    pub fn envelope(&self, energy: f64, z: f64) -> f64 {
        8.0 * self.c * z * (energy - self.a1 * z.powf(self.gamma) / self.energy_factor())
    }
}

/// Computes `B, C, K, δ, ω_n, A1, A2` for the given gas, weight and `inf S0`.
pub fn derived_constants(
    gas: &GasParameters,
    w: &WeightFunction,
    entropy_inf: f64,
) -> Result<ConstantsBundle> {
    let n = gas.n();
    if !(w.k() > n as f64) {
        return Err(invalid(
            "k",
            format!("shape parameter must exceed the dimension {n}, got {}", w.k()),
        ));
    }
    if !entropy_inf.is_finite() {
        return Err(invalid("entropy_inf", "infimum of the initial entropy must be finite"));
    }
    let gamma = gas.gamma();
    let k_integral = w.integral(n);
    let phi_power_integral = w.power_integral(n, gamma);
    let a1 = (w.k() - n as f64) * entropy_inf.exp() * phi_power_integral.powf(1.0 - gamma);
    let a2 = (2.0f64).max((gamma - 1.0) * w.k());
    Ok(ConstantsBundle {
        n,
        gamma,
        radius: w.radius(),
        k: w.k(),
        b: w.b(),
        c: w.c(),
        k_integral,
        phi_power_integral,
        delta: gas.delta(),
        omega_n: omega_n(n),
        entropy_inf,
        a1,
        a2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference() -> (GasParameters, WeightFunction) {
        (GasParameters::new(1, 3.0).unwrap(), WeightFunction::new(1.0, 2.0).unwrap())
    }

    #[test]
    fn phi_at_landmarks() {
        let (_, w) = reference();
        assert_eq!(phi_eval(0.0, &w), (1.0, 0.0));
        assert_eq!(phi_eval(1.0, &w), (0.0, 0.0));
        assert_eq!(phi_eval(3.0, &w), (0.0, 0.0));
        let rj = w.inner_radius();
        let inner = 1.0 - w.b() * rj * rj;
        let outer = w.c() * (rj - 1.0) * (rj - 1.0);
        assert!((inner - 0.5).abs() < 1e-15 && (outer - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reference_constants() {
        let (gas, w) = reference();
        let c = derived_constants(&gas, &w, 0.0).unwrap();
        assert_eq!(c.b, 2.0);
        assert_eq!(c.c, 2.0);
        assert_eq!(c.delta, 2.0);
        assert_eq!(c.a2, 4.0);
        assert_eq!(c.omega_n, 2.0);
        assert!((c.k_integral - 1.0).abs() < 1e-12);
        // mpmath at 30 digits: ∫ φ^{3/2} dx = 0.858462013693939038...
        assert!((c.phi_power_integral - 0.858_462_013_693_939).abs() < 1e-11);
        assert!((c.a1 - 1.356_931_219_473_378).abs() / 1.356_931_219_473_378 < 1e-10);
    }

    #[test]
    fn rejects_k_not_above_dimension() {
        let gas = GasParameters::new(3, 1.4).unwrap();
        let w = WeightFunction::new(1.0, 3.0).unwrap();
        assert!(derived_constants(&gas, &w, 0.0).is_err());
        assert!(GasParameters::new(1, 1.0).is_err());
        assert!(WeightFunction::new(0.0, 2.0).is_err());
    }

    #[test]
    fn sound_speed_examples() {
        assert!((sound_speed(1.0, 1.0, 3.0).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!((sound_speed(4.0, 1.0, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(sound_speed(1.0, 0.0, 3.0).is_err());
        assert!(sound_speed(-1.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn background_sigma_consistent() {
        let gas = GasParameters::new(2, 1.4).unwrap();
        let bg = Background::new(1.3, 0.7, 0.2, &gas).unwrap();
        assert!((bg.sigma * bg.sigma * bg.rho_bar - 1.4 * bg.p_bar).abs() < 1e-12 * bg.p_bar);
        assert!(bg.perturbation_radius(1.0) > bg.perturbation_radius(0.5));
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((omega_n(2) - PI).abs() < 1e-15);
        assert!((omega_n(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((omega_n(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn weight_integral_matches_closed_form() {
        // K = n ω_n [ rj^n/n - B rj^{n+2}/(n+2) + C ∫_{rj}^R (r-R)^2 r^{n-1} dr ]
        for n in 1..=4usize {
            let w = WeightFunction::new(1.7, n as f64 + 1.5).unwrap();
            let rj = w.inner_radius();
            let big_r = w.radius();
            let nf = n as f64;
            let poly = |r: f64| {
                r.powi(n as i32 + 2) / (nf + 2.0) - 2.0 * big_r * r.powi(n as i32 + 1) / (nf + 1.0)
                    + big_r * big_r * r.powi(n as i32) / nf
            };
            let inner = rj.powi(n as i32) / nf - w.b() * rj.powi(n as i32 + 2) / (nf + 2.0);
            let outer = w.c() * (poly(big_r) - poly(rj));
            let exact = nf * omega_n(n) * (inner + outer);
            assert!((w.integral(n) - exact).abs() < 1e-11 * exact, "n = {n}");
            assert!(exact < omega_n(n) * big_r.powi(n as i32));
        }
    }

    #[test]
    fn max_of_derivative_ratio_is_four_c() {
        let (_, w) = reference();
        let mut best: f64 = 0.0;
        for i in 1..200_000 {
            let r = i as f64 / 200_000.0;
            let (v, d) = phi_eval(r, &w);
            if v > 0.0 {
                best = best.max(d * d / v);
            }
        }
        assert!((best - 4.0 * w.c()).abs() / (4.0 * w.c()) < 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn branches_join_continuously(r in 0.01f64..50.0, extra in 0.01f64..20.0, n in 1usize..5) {
            let k = n as f64 + extra;
            let w = WeightFunction::new(r, k).unwrap();
            let rj = w.inner_radius();
            let (b, c) = (w.b(), w.c());
            let (v_in, d_in) = (1.0 - b * rj * rj, -2.0 * b * rj);
            let (v_out, d_out) = (c * (rj - r).powi(2), 2.0 * c * (rj - r));
            prop_assert!((v_in - v_out).abs() < 1e-12);
            prop_assert!((d_in - d_out).abs() < 1e-12 * (1.0 + d_in.abs()));
            prop_assert!((v_in - 1.0 / k).abs() < 1e-12);
        }

        #[test]
        fn weight_bounded(r in 0.0f64..3.0, k in 1.01f64..10.0) {
            let w = WeightFunction::new(1.0, k).unwrap();
            let v = w.value(r);
            prop_assert!((0.0..=1.0).contains(&v));
            if r >= 1.0 { prop_assert_eq!(v, 0.0); }
        }

        #[test]
        fn a2_dominates(gamma in 1.01f64..4.0, extra in 0.01f64..10.0) {
            let gas = GasParameters::new(1, gamma).unwrap();
            let w = WeightFunction::new(1.0, 1.0 + extra).unwrap();
            let c = derived_constants(&gas, &w, 0.0).unwrap();
            prop_assert!(c.a2 >= (gamma - 1.0) * w.k() && c.a2 >= 2.0);
            prop_assert!(c.g_plus(1.0) < c.g_plusplus(1.0));
        }
    }
}
