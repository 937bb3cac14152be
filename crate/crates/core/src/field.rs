//! Flow fields: radial profiles, sampled radial tables and space-time evaluators.

use crate::error::{Error, Result};

/// Densities at or below this value are treated as vacuum when taking the
/// infimum of the entropy.
pub const VACUUM_FLOOR: f64 = 1e-12;

/// Density, radial velocity and pressure at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialState {
    pub rho: f64,
    pub v_r: f64,
    pub p: f64,
}

/// `S = ln(p / ρ^γ)`.
pub fn entropy(rho: f64, p: f64, gamma: f64) -> f64 {
    p.ln() - gamma * rho.ln()
}

/// A radially symmetric state `r ↦ (ρ, v_r, p)`.
///
/// In one dimension the profile describes an even density and pressure and an
/// odd velocity on the whole line.
pub trait RadialProfile {
    fn state(&self, r: f64) -> RadialState;

    /// Largest radius at which the profile is defined.
    fn extent(&self) -> f64 {
        f64::INFINITY
    }

    /// Radii where the profile is not smooth; quadratures split there.
    fn breakpoints(&self, _lo: f64, _hi: f64) -> Vec<f64> {
        Vec::new()
    }

    /// Infimum of the entropy over `[0, radius]`, ignoring vacuum.
    ///
    /// The default samples 4097 uniform radii and polishes the smallest one
    /// by golden-section search on the neighbouring cells.
    fn entropy_inf(&self, gamma: f64, radius: f64) -> Option<f64> {
        sampled_entropy_inf(self, gamma, radius.min(self.extent()))
    }
}

fn sampled_entropy_inf<P: RadialProfile + ?Sized>(
    profile: &P,
    gamma: f64,
    radius: f64,
) -> Option<f64> {
    const NODES: usize = 4096;
    let s = |r: f64| {
        let st = profile.state(r);
        if st.rho > VACUUM_FLOOR && st.p > 0.0 {
            Some(entropy(st.rho, st.p, gamma))
        } else {
            None
        }
    };
    let h = radius / NODES as f64;
    let mut best: Option<(usize, f64)> = None;
    for i in 0..=NODES {
        if let Some(v) = s(i as f64 * h) {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
        }
    }
    let (i, mut value) = best?;
    let (mut a, mut b) = ((i.saturating_sub(1)) as f64 * h, ((i + 1).min(NODES)) as f64 * h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        match (s(x1), s(x2)) {
            (Some(f1), Some(f2)) => {
                value = value.min(f1).min(f2);
                if f1 < f2 {
                    b = x2;
                } else {
                    a = x1;
                }
            }
            _ => break,
        }
    }
    Some(value)
}

impl<P: RadialProfile + ?Sized> RadialProfile for &P {
    fn state(&self, r: f64) -> RadialState {
        (**self).state(r)
    }
    fn extent(&self) -> f64 {
        (**self).extent()
    }
    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        (**self).breakpoints(lo, hi)
    }
    fn entropy_inf(&self, gamma: f64, radius: f64) -> Option<f64> {
        (**self).entropy_inf(gamma, radius)
    }
}

/// Wraps a closure as a radial profile of unbounded extent.
pub struct FnProfile<F>(pub F);

impl<F: Fn(f64) -> RadialState> RadialProfile for FnProfile<F> {
    fn state(&self, r: f64) -> RadialState {
        (self.0)(r)
    }
}

/// One row of a sampled radial table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialSample {
    pub r: f64,
    pub rho: f64,
    pub v_r: f64,
    pub p: f64,
}

/// Tabulated radial field.
///
/// Between samples the density and velocity interpolate linearly and the
/// entropy `ln(p/ρ^γ)` interpolates linearly, so the entropy infimum is
/// attained at a sample. Next to vacuum samples the pressure interpolates
/// linearly instead.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialField {
    samples: Vec<RadialSample>,
    gamma: f64,
}

impl RadialField {
    pub fn new(samples: Vec<RadialSample>, gamma: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidField("need at least two samples".into()));
        }
        if samples[0].r < 0.0 {
            return Err(Error::InvalidField("radii must be nonnegative".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.r.is_finite() && s.rho.is_finite() && s.v_r.is_finite() && s.p.is_finite()) {
                return Err(Error::InvalidField(format!("non-finite value in sample {i}")));
            }
            if s.rho < 0.0 || s.p < 0.0 {
                return Err(Error::InvalidField(format!(
                    "negative density or pressure at r = {}",
                    s.r
                )));
            }
            if i > 0 && s.r <= samples[i - 1].r {
                return Err(Error::InvalidField(format!(
                    "radii must be strictly increasing (sample {i})"
                )));
            }
        }
        Ok(Self { samples, gamma })
    }

    /// Samples `profile` at the given radii.
    pub fn from_profile<P: RadialProfile + ?Sized>(profile: &P, radii: &[f64], gamma: f64) -> Result<Self> {
        let samples = radii
            .iter()
            .map(|&r| {
                let st = profile.state(r);
                RadialSample {
                    r,
                    rho: st.rho,
                    v_r: st.v_r,
                    p: st.p,
                }
            })
            .collect();
        Self::new(samples, gamma)
    }

    pub fn samples(&self) -> &[RadialSample] {
        &self.samples
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn locate(&self, r: f64) -> usize {
        // index i with samples[i].r <= r < samples[i+1].r, clamped
        let idx = self.samples.partition_point(|s| s.r <= r);
        idx.clamp(1, self.samples.len() - 1) - 1
    }
}

impl RadialProfile for RadialField {
    fn state(&self, r: f64) -> RadialState {
        let i = self.locate(r);
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let s = ((r - a.r) / (b.r - a.r)).clamp(0.0, 1.0);
        let lerp = |x: f64, y: f64| x + s * (y - x);
        let rho = lerp(a.rho, b.rho);
        let v_r = lerp(a.v_r, b.v_r);
        let p = if a.rho > VACUUM_FLOOR && b.rho > VACUUM_FLOOR && a.p > 0.0 && b.p > 0.0 {
            let sa = entropy(a.rho, a.p, self.gamma);
            let sb = entropy(b.rho, b.p, self.gamma);
            lerp(sa, sb).exp() * rho.powf(self.gamma)
        } else {
            lerp(a.p, b.p)
        };
        RadialState { rho, v_r, p }
    }

    fn extent(&self) -> f64 {
        self.samples[self.samples.len() - 1].r
    }

    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| s.r)
            .filter(|&r| r > lo && r < hi)
            .collect()
    }

    fn entropy_inf(&self, gamma: f64, radius: f64) -> Option<f64> {
        if gamma != self.gamma {
            return sampled_entropy_inf(self, gamma, radius.min(self.extent()));
        }
        let mut best: Option<f64> = None;
        let mut consider = |rho: f64, p: f64| {
            if rho > VACUUM_FLOOR && p > 0.0 {
                let s = entropy(rho, p, gamma);
                best = Some(best.map_or(s, |b: f64| b.min(s)));
            }
        };
        for s in self.samples.iter().take_while(|s| s.r <= radius) {
            consider(s.rho, s.p);
        }
        if radius < self.extent() {
            let st = self.state(radius);
            consider(st.rho, st.p);
        }
        best
    }
}

/// Symmetry declared by a field evaluator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// Density and pressure depend on `|x|` only and the velocity is parallel to `x`.
    Radial,
    General,
}

/// Primitive state at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointState {
    pub rho: f64,
    pub velocity: Vec<f64>,
    pub p: f64,
}

impl PointState {
    pub fn speed_sq(&self) -> f64 {
        self.velocity.iter().map(|v| v * v).sum()
    }
}

/// A flow given pointwise in space and time.
pub trait FieldEvaluator {
    fn dim(&self) -> usize;
    fn symmetry(&self) -> Symmetry;
    fn eval(&self, x: &[f64], t: f64) -> PointState;
}

/// `|σ|²` with `σ_k = V_i x_j - V_j x_i` over all pairs `i > j`.
pub fn angular_momentum_sq(x: &[f64], v: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..x.len() {
        for j in 0..i {
            let s = v[i] * x[j] - v[j] * x[i];
            sum += s * s;
        }
    }
    sum
}

/// Restriction of a radially symmetric evaluator to the ray along `e_1` at a fixed time.
pub struct RadialSlice<'a, E: ?Sized> {
    pub evaluator: &'a E,
    pub t: f64,
}

impl<'a, E: FieldEvaluator + ?Sized> RadialSlice<'a, E> {
    pub fn new(evaluator: &'a E, t: f64) -> Self {
        Self { evaluator, t }
    }
}

impl<E: FieldEvaluator + ?Sized> RadialProfile for RadialSlice<'_, E> {
    fn state(&self, r: f64) -> RadialState {
        let mut x = vec![0.0; self.evaluator.dim()];
        x[0] = r;
        let st = self.evaluator.eval(&x, self.t);
        RadialState {
            rho: st.rho,
            v_r: st.velocity[0],
            p: st.p,
        }
    }
}

/// Uniform Cartesian grid for midpoint sums of non-radial fields.
#[derive(Clone, Debug, PartialEq)]
pub struct CartesianGrid {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cells: Vec<usize>,
}

impl CartesianGrid {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, cells: Vec<usize>) -> Result<Self> {
        if lower.len() != upper.len() || lower.len() != cells.len() || lower.is_empty() {
            return Err(Error::InvalidField("grid dimensions disagree".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(u > l)) || cells.contains(&0) {
            return Err(Error::InvalidField("grid box is empty".into()));
        }
        Ok(Self { lower, upper, cells })
    }

    /// Cube `[-half, half]^n` with `cells` cells per axis.
    pub fn cube(n: usize, half: f64, cells: usize) -> Result<Self> {
        Self::new(vec![-half; n], vec![half; n], vec![cells; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim())
            .map(|d| (self.upper[d] - self.lower[d]) / self.cells[d] as f64)
            .product()
    }

    /// Midpoint sum `Σ g(x_c) |cell|` in row-major cell order.
    pub fn midpoint_sum<F: FnMut(&[f64]) -> f64>(&self, mut g: F) -> f64 {
        let n = self.dim();
        let widths: Vec<f64> = (0..n)
            .map(|d| (self.upper[d] - self.lower[d]) / self.cells[d] as f64)
            .collect();
        let mut idx = vec![0usize; n];
        let mut x = vec![0.0; n];
        let mut sum = 0.0;
        loop {
            for d in 0..n {
                x[d] = self.lower[d] + (idx[d] as f64 + 0.5) * widths[d];
            }
            sum += g(&x);
            let mut d = n;
            loop {
                if d == 0 {
                    return sum * self.cell_volume();
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < self.cells[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
    }
}
