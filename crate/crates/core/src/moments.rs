//! Moment functionals `G_φ`, `G'_φ`, energies and the identities they obey.
//!
//! Radial fields are integrated on the half-line with the measure
//! `n ω_n r^{n-1} dr`; non-radial evaluators are integrated by midpoint sums
//! on a [`CartesianGrid`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr_free::standard_normal;

use crate::error::{Error, Result};
use crate::field::{
    angular_momentum_sq, CartesianGrid, FieldEvaluator, RadialProfile, RadialSlice, RadialState, Symmetry,
};
use crate::model::{omega_n, phi_eval, Background, GasParameters, WeightFunction};
use crate::quadrature::{half_line, simpson_with_breaks, Tolerance};

/// Tolerance for every moment quadrature.
pub const MOMENT_TOLERANCE: Tolerance = Tolerance::new(1e-13, 1e-11);

/// Relative slack allowed in the Hölder check.
pub const HOLDER_SLACK: f64 = 1e-9;

fn require_coverage<P: RadialProfile + ?Sized>(field: &P, radius: f64) -> Result<()> {
    let extent = field.extent();
    if extent < radius {
        return Err(Error::InsufficientCoverage {
            extent,
            required: radius,
        });
    }
    Ok(())
}

fn breaks_for<P: RadialProfile + ?Sized>(field: &P, lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    pts.extend(extra.iter().copied().filter(|&r| r > lo && r < hi));
    pts.extend(field.breakpoints(lo, hi));
    pts
}

/// `n ω_n ∫_lo^hi g(r, state) r^{n-1} dr`.
fn radial_quad<P, G>(field: &P, n: usize, lo: f64, hi: f64, extra: &[f64], g: G) -> f64
where
    P: RadialProfile + ?Sized,
    G: Fn(f64, RadialState) -> f64,
{
    let measure = n as f64 * omega_n(n);
    let power = n as i32 - 1;
    let pts = breaks_for(field, lo, hi, extra);
    measure * simpson_with_breaks(|r| g(r, field.state(r)) * r.powi(power), &pts, MOMENT_TOLERANCE)
}

/// `n ω_n ∫_0^∞ g r^{n-1} dr`, truncated at the field extent when it is finite.
fn whole_space<P, G>(field: &P, n: usize, g: G) -> f64
where
    P: RadialProfile + ?Sized,
    G: Fn(f64, RadialState) -> f64,
{
    let extent = field.extent();
    if extent.is_finite() {
        return radial_quad(field, n, 0.0, extent, &[], g);
    }
    let measure = n as f64 * omega_n(n);
    let power = n as i32 - 1;
    let split = field
        .breakpoints(0.0, f64::MAX)
        .into_iter()
        .fold(1.0f64, f64::max);
    let near = radial_quad(field, n, 0.0, split, &[], &g);
    let far = half_line(|r| g(r, field.state(r)) * r.powi(power), split, MOMENT_TOLERANCE);
    near + measure * far
}

/// `G_φ = ∫ ρ φ(|x|) dx`.
pub fn moment_g<P: RadialProfile + ?Sized>(field: &P, w: &WeightFunction, n: usize) -> Result<f64> {
    require_coverage(field, w.radius())?;
    Ok(radial_quad(field, n, 0.0, w.radius(), &[w.inner_radius()], |r, st| {
        st.rho * phi_eval(r, w).0
    }))
}

/// `G'_φ = ∫ φ'(|x|) / |x| (V·x) ρ dx`; for radial velocity this is `∫ φ' v_r ρ dx`.
pub fn moment_g_prime<P: RadialProfile + ?Sized>(field: &P, w: &WeightFunction, n: usize) -> Result<f64> {
    require_coverage(field, w.radius())?;
    Ok(radial_quad(field, n, 0.0, w.radius(), &[w.inner_radius()], |r, st| {
        phi_eval(r, w).1 * st.v_r * st.rho
    }))
}

/// Classical moment `½ ∫ ρ |x|² dx`.
pub fn classical_moment<P: RadialProfile + ?Sized>(field: &P, n: usize) -> f64 {
    0.5 * whole_space(field, n, |r, st| st.rho * r * r)
}

/// Total mass `∫ ρ dx` over the field's extent.
pub fn total_mass<P: RadialProfile + ?Sized>(field: &P, n: usize) -> f64 {
    whole_space(field, n, |_, st| st.rho)
}

/// Kinetic and potential energy of one region.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RegionEnergy {
    pub kinetic: f64,
    pub potential: f64,
}

impl RegionEnergy {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential
    }
}

/// Energies over the whole field and over `Ω1 = {|x| ≤ R - R/k}`,
/// `Ω2 = {R - R/k < |x| ≤ R}`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Energies {
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
    pub omega1: RegionEnergy,
    pub omega2: RegionEnergy,
}

fn region_energy<P: RadialProfile + ?Sized>(field: &P, n: usize, gamma: f64, lo: f64, hi: f64) -> RegionEnergy {
    RegionEnergy {
        kinetic: radial_quad(field, n, lo, hi, &[], |_, st| 0.5 * st.rho * st.v_r * st.v_r),
        potential: radial_quad(field, n, lo, hi, &[], |_, st| st.p) / (gamma - 1.0),
    }
}

pub fn regional_energies<P: RadialProfile + ?Sized>(
    field: &P,
    w: &WeightFunction,
    gas: &GasParameters,
) -> Result<Energies> {
    require_coverage(field, w.radius())?;
    let n = gas.n();
    let gamma = gas.gamma();
    let kinetic = whole_space(field, n, |_, st| 0.5 * st.rho * st.v_r * st.v_r);
    let potential = whole_space(field, n, |_, st| st.p) / (gamma - 1.0);
    Ok(Energies {
        kinetic,
        potential,
        total: kinetic + potential,
        omega1: region_energy(field, n, gamma, 0.0, w.inner_radius()),
        omega2: region_energy(field, n, gamma, w.inner_radius(), w.radius()),
    })
}

/// Excess mass `m(t)` and energy `e(t)` of a Case II field over `B_{R0 + σ t}`.
pub fn perturbation_totals<P: RadialProfile + ?Sized>(
    field: &P,
    gas: &GasParameters,
    bg: &Background,
    t: f64,
) -> Result<(f64, f64)> {
    let radius = bg.perturbation_radius(t);
    require_coverage(field, radius)?;
    let n = gas.n();
    let mass = radial_quad(field, n, 0.0, radius, &[], |_, st| st.rho - bg.rho_bar);
    let energy = radial_quad(field, n, 0.0, radius, &[], |_, st| {
        0.5 * st.rho * st.v_r * st.v_r + (st.p - bg.p_bar) / (gas.gamma() - 1.0)
    });
    Ok((mass, energy))
}

/// Both sides of `G_φ^γ ≤ e^{-inf S} ∫_{B_R} p dx (∫ φ^{γ/(γ-1)} dx)^{γ-1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub entropy_inf: f64,
    pub satisfied: bool,
}

pub fn holder_check<P: RadialProfile + ?Sized>(
    field: &P,
    w: &WeightFunction,
    gas: &GasParameters,
) -> Result<HolderCheck> {
    let n = gas.n();
    let gamma = gas.gamma();
    let g = moment_g(field, w, n)?;
    let entropy_inf = field
        .entropy_inf(gamma, w.radius())
        .ok_or_else(|| Error::InvalidField("no non-vacuum point inside the weight support".into()))?;
    let pressure = radial_quad(field, n, 0.0, w.radius(), &[w.inner_radius()], |_, st| st.p);
    let lhs = g.powf(gamma);
    let rhs = (-entropy_inf).exp() * pressure * w.power_integral(n, gamma).powf(gamma - 1.0);
    Ok(HolderCheck {
        lhs,
        rhs,
        entropy_inf,
        satisfied: lhs <= rhs * (1.0 + HOLDER_SLACK),
    })
}

/// Right-hand side of the `G''_φ` identity for a radial field (no angular momentum).
pub fn second_derivative_rhs<P: RadialProfile + ?Sized>(
    field: &P,
    w: &WeightFunction,
    gas: &GasParameters,
) -> Result<f64> {
    require_coverage(field, w.radius())?;
    let n = gas.n();
    let nf = n as f64;
    let (b, c, big_r, rj) = (w.b(), w.c(), w.radius(), w.inner_radius());
    let inner = radial_quad(field, n, 0.0, rj, &[], |_, st| st.rho * st.v_r * st.v_r + nf * st.p);
    let outer = radial_quad(field, n, rj, big_r, &[], |r, st| {
        st.rho * st.v_r * st.v_r + nf * st.p - (nf - 1.0) * big_r * st.p / r
    });
    Ok(-2.0 * b * inner + 2.0 * c * outer)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `G_φ` of a general evaluator by midpoint sums.
pub fn moment_g_grid<E: FieldEvaluator + ?Sized>(eval: &E, t: f64, grid: &CartesianGrid, w: &WeightFunction) -> f64 {
    grid.midpoint_sum(|x| {
        let r = dot(x, x).sqrt();
        if r >= w.radius() {
            return 0.0;
        }
        eval.eval(x, t).rho * w.value(r)
    })
}

/// `G'_φ` of a general evaluator by midpoint sums; `φ'(r)/r → -2B` at the origin.
pub fn moment_g_prime_grid<E: FieldEvaluator + ?Sized>(
    eval: &E,
    t: f64,
    grid: &CartesianGrid,
    w: &WeightFunction,
) -> f64 {
    grid.midpoint_sum(|x| {
        let r = dot(x, x).sqrt();
        if r >= w.radius() {
            return 0.0;
        }
        let ratio = if r == 0.0 { -2.0 * w.b() } else { w.derivative(r) / r };
        let st = eval.eval(x, t);
        ratio * dot(&st.velocity, x) * st.rho
    })
}

/// Right-hand side of the `G''_φ` identity by midpoint sums, including the
/// angular-momentum term.
pub fn second_derivative_rhs_grid<E: FieldEvaluator + ?Sized>(
    eval: &E,
    t: f64,
    grid: &CartesianGrid,
    w: &WeightFunction,
) -> f64 {
    let nf = grid.dim() as f64;
    let (b, c, big_r, rj) = (w.b(), w.c(), w.radius(), w.inner_radius());
    grid.midpoint_sum(|x| {
        let r = dot(x, x).sqrt();
        if r > big_r {
            return 0.0;
        }
        let st = eval.eval(x, t);
        let base = st.rho * st.speed_sq() + nf * st.p;
        if r <= rj {
            -2.0 * b * base
        } else {
            let sigma_sq = angular_momentum_sq(x, &st.velocity);
            2.0 * c * (base - big_r * st.rho * sigma_sq / r.powi(3) - (nf - 1.0) * big_r * st.p / r)
        }
    })
}

/// Second difference of `G_φ` against the identity's right-hand side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub second_difference: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Compares `(G(t+Δt) - 2G(t) + G(t-Δt)) / Δt²` with the identity at `t`.
///
/// Radial evaluators use the radial quadrature; general ones need `grid`.
pub fn second_derivative_identity_check<E: FieldEvaluator + ?Sized>(
    evaluator: &E,
    w: &WeightFunction,
    gas: &GasParameters,
    t: f64,
    dt: f64,
    grid: Option<&CartesianGrid>,
) -> Result<IdentityCheck> {
    if !(dt > 0.0) {
        return Err(crate::error::invalid("dt", "time step must be positive"));
    }
    let (g, rhs): (Box<dyn Fn(f64) -> Result<f64>>, f64) = match (evaluator.symmetry(), grid) {
        (Symmetry::Radial, None) => {
            let n = gas.n();
            let rhs = second_derivative_rhs(&RadialSlice::new(evaluator, t), w, gas)?;
            (Box::new(move |s| moment_g(&RadialSlice::new(evaluator, s), w, n)), rhs)
        }
        (_, Some(grid)) => {
            let rhs = second_derivative_rhs_grid(evaluator, t, grid, w);
            (Box::new(move |s| Ok(moment_g_grid(evaluator, s, grid, w))), rhs)
        }
        (Symmetry::General, None) => {
            return Err(crate::error::invalid("grid", "general evaluators need a Cartesian grid"));
        }
    };
    let second_difference = (g(t + dt)? - 2.0 * g(t)? + g(t - dt)?) / (dt * dt);
    Ok(IdentityCheck {
        second_difference,
        rhs,
        residual: (second_difference - rhs).abs(),
    })
}

/// Geometric radius ladder `R_j = base · 2^j`, `j = 0..=levels`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusLadder {
    pub base: f64,
    pub levels: usize,
}

impl Default for RadiusLadder {
    fn default() -> Self {
        Self {
            base: 1.0,
            levels: 10,
        }
    }
}

impl RadiusLadder {
    pub fn radii(&self) -> Vec<f64> {
        (0..=self.levels)
            .map(|j| self.base * 2f64.powi(j as i32))
            .collect()
    }
}

/// Unit directions used to approximate a supremum over a sphere.
///
/// One dimension uses `±e_1`, two dimensions `2ⁿ·32` equally spaced angles,
/// three a Fibonacci lattice of the same size, higher dimensions normalized
/// Gaussian samples from a fixed seed.
pub fn sphere_directions(n: usize) -> Vec<Vec<f64>> {
    let count = 32usize << n.min(12);
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let rad = (1.0 - z * z).sqrt();
                    let a = golden * i as f64;
                    vec![rad * a.cos(), rad * a.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
            (0..count)
                .map(|_| {
                    let v: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
                    let norm = dot(&v, &v).sqrt();
                    v.into_iter().map(|c| c / norm).collect()
                })
                .collect()
        }
    }
}

/// Points on the sphere of radius `r` where a supremum is sampled.
pub(crate) fn sphere_points<E: FieldEvaluator + ?Sized>(evaluator: &E, r: f64) -> Vec<Vec<f64>> {
    let n = evaluator.dim();
    match evaluator.symmetry() {
        Symmetry::Radial => {
            let mut x = vec![0.0; n];
            x[0] = r;
            vec![x]
        }
        Symmetry::General => sphere_directions(n)
            .into_iter()
            .map(|d| d.into_iter().map(|c| c * r).collect())
            .collect(),
    }
}

/// `sup_x |t (V·x) / (1 + |x|²)|` sampled over the spheres of `ladder`.
pub fn cho_functional<E: FieldEvaluator + ?Sized>(evaluator: &E, t: f64, ladder: &RadiusLadder) -> f64 {
    let mut best: f64 = 0.0;
    for r in ladder.radii() {
        for x in sphere_points(evaluator, r) {
            let st = evaluator.eval(&x, t);
            let v = (t * dot(&st.velocity, &x) / (1.0 + dot(&x, &x))).abs();
            best = best.max(v);
        }
    }
    best
}

/// Supremum and infimum of the density over `[0, radius]`: 1025 uniform
/// nodes plus the field's own break points, polished by golden-section search
/// around the extreme nodes.
pub fn density_extremes<P: RadialProfile + ?Sized>(field: &P, radius: f64) -> (f64, f64) {
    let hi = radius.min(field.extent());
    let mut nodes: Vec<f64> = (0..=1024).map(|i| hi * i as f64 / 1024.0).collect();
    nodes.extend(field.breakpoints(0.0, hi));
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rho = |r: f64| field.state(r).rho;
    let values: Vec<f64> = nodes.iter().map(|&r| rho(r)).collect();
    let imax = (0..values.len()).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    let imin = (0..values.len()).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    let polish = |i: usize, sign: f64| {
        let a = nodes[i.saturating_sub(1)];
        let b = nodes[(i + 1).min(nodes.len() - 1)];
        golden_extreme(|r| sign * rho(r), a, b).max(sign * values[i]) * sign
    };
    (polish(imax, 1.0), polish(imin, -1.0))
}

fn golden_extreme<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut best = f(a).max(f(b));
    for _ in 0..60 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        let (f1, f2) = (f(x1), f(x2));
        best = best.max(f1).max(f2);
        if f1 > f2 {
            b = x2;
        } else {
            a = x1;
        }
    }
    best
}

/// Moments and energies of one snapshot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSample {
    pub t: f64,
    pub g: f64,
    pub g_prime: f64,
    /// `G_φ - ρ̄ K` for Case II snapshots.
    pub q: Option<f64>,
    pub energies: Energies,
}

pub fn sample_moments<P: RadialProfile + ?Sized>(
    field: &P,
    w: &WeightFunction,
    gas: &GasParameters,
    t: f64,
    background: Option<&Background>,
) -> Result<MomentSample> {
    let n = gas.n();
    let g = moment_g(field, w, n)?;
    Ok(MomentSample {
        t,
        g,
        g_prime: moment_g_prime(field, w, n)?,
        q: background.map(|bg| g - bg.rho_bar * w.integral(n)),
        energies: regional_energies(field, w, gas)?,
    })
}

/// Minimal Box–Muller so the crate does not pull a distributions dependency
/// for one call site.
mod rand_distr_free {
    use rand::Rng;

    pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FnProfile, PointState};
    use crate::oracle::ExactSolution;

    fn reference() -> (GasParameters, WeightFunction) {
        (GasParameters::new(1, 3.0).unwrap(), WeightFunction::new(1.0, 2.0).unwrap())
    }

    #[test]
    fn uniform_density_gives_rho_k() {
        for n in 1..=3 {
            let gas = GasParameters::new(n, 1.4).unwrap();
            let w = WeightFunction::new(1.3, n as f64 + 1.0).unwrap();
            let prof = FnProfile(|_| RadialState { rho: 2.5, v_r: 0.0, p: 1.0 });
            let g = moment_g(&prof, &w, n).unwrap();
            assert!((g - 2.5 * w.integral(n)).abs() < 1e-11);
            assert_eq!(moment_g_prime(&prof, &w, n).unwrap(), 0.0);
            let _ = gas;
        }
    }

    #[test]
    fn vacuum_gives_zero_moment() {
        let (_, w) = reference();
        let prof = FnProfile(|_| RadialState { rho: 0.0, v_r: 1.0, p: 0.0 });
        assert_eq!(moment_g(&prof, &w, 1).unwrap(), 0.0);
    }

    #[test]
    fn rejects_short_fields() {
        let (_, w) = reference();
        let field = crate::field::RadialField::new(
            vec![
                crate::field::RadialSample { r: 0.0, rho: 1.0, v_r: 0.0, p: 1.0 },
                crate::field::RadialSample { r: 0.5, rho: 1.0, v_r: 0.0, p: 1.0 },
            ],
            3.0,
        )
        .unwrap();
        assert!(matches!(moment_g(&field, &w, 1), Err(Error::InsufficientCoverage { .. })));
    }

    #[test]
    fn linear_velocity_closed_form() {
        // V = a x, uniform ρ, n = 1: G' = 2ρa[ -2B ∫_0^rj r² dr + 2C ∫_rj^R r (r - R) dr ]
        let (_, w) = reference();
        let (a, rho) = (-1.7, 1.3);
        let prof = FnProfile(move |r| RadialState { rho, v_r: a * r, p: 1.0 });
        let (b, c, big_r, rj) = (w.b(), w.c(), w.radius(), w.inner_radius());
        let outer = |r: f64| r.powi(3) / 3.0 - big_r * r * r / 2.0;
        let exact = 2.0 * rho * a * (-2.0 * b * rj.powi(3) / 3.0 + 2.0 * c * (outer(big_r) - outer(rj)));
        let g1 = moment_g_prime(&prof, &w, 1).unwrap();
        assert!((g1 - exact).abs() < 1e-12 * exact.abs());
    }

    #[test]
    fn g_prime_matches_time_derivative_of_exact_solution() {
        let (_, w) = reference();
        let sol = ExactSolution::new(-7.0);
        let t = 0.3;
        let h = 1e-4;
        let fd = (moment_g(&sol.at(t + h), &w, 1).unwrap() - moment_g(&sol.at(t - h), &w, 1).unwrap()) / (2.0 * h);
        let gp = moment_g_prime(&sol.at(t), &w, 1).unwrap();
        assert!((fd - gp).abs() < 1e-6 * gp.abs(), "{fd} vs {gp}");
    }

    #[test]
    fn exact_energies() {
        let (gas, w) = reference();
        for &t in &[0.0, 0.5, 2.0, 10.0] {
            let sol = ExactSolution::new(-7.0);
            let e = regional_energies(&sol.at(t), &w, &gas).unwrap();
            assert!((e.potential - sol.potential_energy(t)).abs() < 1e-8 * sol.potential_energy(t));
            assert!((e.total - sol.energy()).abs() < 1e-8 * sol.energy());
            let split = e.omega1.total() + e.omega2.total();
            assert!(split < e.total);
        }
    }

    #[test]
    fn background_has_zero_perturbation() {
        let gas = GasParameters::new(1, 3.0).unwrap();
        let bg = Background::new(1.0, 1.0, 0.25, &gas).unwrap();
        let prof = FnProfile(|_| RadialState { rho: 1.0, v_r: 0.0, p: 1.0 });
        let (m, e) = perturbation_totals(&prof, &gas, &bg, 0.3).unwrap();
        assert_eq!((m, e), (0.0, 0.0));
    }

    #[test]
    fn holder_examples() {
        let (gas, w) = reference();
        // uniform state with p = e^{S} ρ^γ
        let prof = FnProfile(|_| RadialState { rho: 0.7, v_r: 0.0, p: 2.0 * 0.7f64.powi(3) });
        let h = holder_check(&prof, &w, &gas).unwrap();
        assert!(h.satisfied);
        let sol = ExactSolution::new(-7.0);
        let h = holder_check(&sol.at(0.0), &w, &gas).unwrap();
        assert!(h.satisfied && h.lhs / h.rhs < 1.0);
        assert!(h.entropy_inf.abs() < 1e-12);
        // density scaled by ten, pressure unchanged
        let scaled = FnProfile(|r| {
            let st = sol.at(0.0).state(r);
            RadialState { rho: 10.0 * st.rho, ..st }
        });
        assert!(holder_check(&scaled, &w, &gas).unwrap().satisfied);
    }

    #[test]
    fn identity_on_exact_solution() {
        let (gas, w) = reference();
        let sol = ExactSolution::new(-7.0);
        let chk = second_derivative_identity_check(&sol, &w, &gas, 0.2, 1e-4, None).unwrap();
        assert!(chk.residual < 1e-4 * chk.rhs.abs().max(1.0), "{chk:?}");
    }

    #[test]
    fn identity_on_constant_state_vanishes() {
        struct Uniform;
        impl FieldEvaluator for Uniform {
            fn dim(&self) -> usize {
                1
            }
            fn symmetry(&self) -> Symmetry {
                Symmetry::Radial
            }
            fn eval(&self, _x: &[f64], _t: f64) -> PointState {
                PointState { rho: 1.0, velocity: vec![0.0], p: 1.0 }
            }
        }
        let (gas, w) = reference();
        let chk = second_derivative_identity_check(&Uniform, &w, &gas, 0.0, 1e-3, None).unwrap();
        assert!(chk.rhs.abs() < 1e-10 && chk.residual < 1e-8, "{chk:?}");
    }

    #[test]
    fn identity_on_pressureless_static_gas() {
        struct Dust;
        impl FieldEvaluator for Dust {
            fn dim(&self) -> usize {
                1
            }
            fn symmetry(&self) -> Symmetry {
                Symmetry::Radial
            }
            fn eval(&self, x: &[f64], _t: f64) -> PointState {
                PointState { rho: 1.0 + x[0] * x[0], velocity: vec![0.0], p: 0.0 }
            }
        }
        let (gas, w) = reference();
        let chk = second_derivative_identity_check(&Dust, &w, &gas, 0.5, 1e-3, None).unwrap();
        assert_eq!(chk.rhs, 0.0);
        assert!(chk.residual < 1e-10);
    }

    #[test]
    fn identity_on_rotating_vortex_uses_angular_term() {
        // steady solid-body rotation: ρ = 1, V = ω(-y, x), p = p0 + ω² r² / 2
        struct Vortex;
        impl FieldEvaluator for Vortex {
            fn dim(&self) -> usize {
                2
            }
            fn symmetry(&self) -> Symmetry {
                Symmetry::General
            }
            fn eval(&self, x: &[f64], _t: f64) -> PointState {
                let om = 1.5;
                let r2 = x[0] * x[0] + x[1] * x[1];
                PointState { rho: 1.0, velocity: vec![-om * x[1], om * x[0]], p: 1.0 + 0.5 * om * om * r2 }
            }
        }
        let gas = GasParameters::new(2, 1.4).unwrap();
        let w = WeightFunction::new(1.0, 3.0).unwrap();
        let grid = CartesianGrid::cube(2, 1.0, 400).unwrap();
        let chk = second_derivative_identity_check(&Vortex, &w, &gas, 0.0, 1e-2, Some(&grid)).unwrap();
        assert!(chk.second_difference.abs() < 1e-10);
        // without the |σ|² term the right-hand side would be far from zero
        let scale = 2.0 * w.c() * 1.5 * 1.5;
        assert!(chk.rhs.abs() < 2e-3 * scale, "{chk:?}");
        let g_prime = moment_g_prime_grid(&Vortex, 0.0, &grid, &w);
        assert!(g_prime.abs() < 1e-12);
    }

    #[test]
    fn cho_functional_examples() {
        let sol = ExactSolution::new(-7.0);
        let ladder = RadiusLadder::default();
        let v = cho_functional(&sol, 10.0, &ladder);
        assert!((v - crate::oracle::exact_cho_supremum(&sol, 10.0)).abs() < 0.05);
        struct Still;
        impl FieldEvaluator for Still {
            fn dim(&self) -> usize {
                3
            }
            fn symmetry(&self) -> Symmetry {
                Symmetry::General
            }
            fn eval(&self, _x: &[f64], _t: f64) -> PointState {
                PointState { rho: 1.0, velocity: vec![0.0; 3], p: 1.0 }
            }
        }
        assert_eq!(cho_functional(&Still, 5.0, &ladder), 0.0);
    }

    #[test]
    fn sphere_directions_are_unit() {
        for n in 1..=5 {
            for d in sphere_directions(n) {
                assert!((dot(&d, &d) - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(sphere_directions(2).len(), 128);
    }

    #[test]
    fn density_extremes_of_exact_solution() {
        let sol = ExactSolution::new(-7.0);
        for &t in &[0.0, 0.1, 1.0] {
            let (sup, inf) = density_extremes(&sol.at(t), 1.0);
            assert!((sup - 1.0 / sol.psi(t)).abs() < 1e-14);
            assert!((inf - sol.fields(1.0, t).0).abs() < 1e-14);
        }
    }
}
