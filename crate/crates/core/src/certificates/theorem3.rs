//! Finite-time singularity certificate for Case II data.
//!
//! While the perturbation has not reached `Ω2`, the moment obeys
//! `G(t) ≤ -B N t² + G'(0) t + G(0)`, so it must vanish before the smallest
//! positive root `T1` of that quadratic. If this happens before the
//! perturbation can reach `Ω2` (time `T2`), the solution loses smoothness.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::model::{omega_n, Background, GasParameters, WeightFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NBranch {
    Positive,
    Negative,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Theorem3Verdict {
    /// `δ e(0) + ω_n Rⁿ p̄ ((k-1)/k)ⁿ (n - δ/(γ-1))`.
    pub n_value: f64,
    pub branch: NBranch,
    /// Smallest positive root of `-B N t² + G'(0) t + G(0)`, if any.
    pub t1: Option<f64>,
    /// `((k-1)R/k - R0) / σ`.
    pub t2: f64,
    /// `0 < T1 ≤ T2`: singularity within `T1` inside `B_R`.
    pub applies: bool,
}

/// Smallest positive root of `-B N t² + g1 t + g0` with `g0 > 0`, in a form
/// free of cancellation.
pub fn smallest_positive_root(b: f64, n_value: f64, g0: f64, g1: f64) -> Option<f64> {
    if n_value == 0.0 {
        return (g1 < 0.0).then(|| -g0 / g1);
    }
    let disc = g1 * g1 + 4.0 * b * n_value * g0;
    if disc < 0.0 {
        return None;
    }
    if n_value < 0.0 && g1 >= 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let t = if g1 <= 0.0 {
        2.0 * g0 / (root - g1)
    } else {
        (g1 + root) / (2.0 * b * n_value)
    };
    (t > 0.0 && t.is_finite()).then_some(t)
}

/// Evaluates the certificate from `G(0)`, `G'(0)` and the excess energy `e(0)`.
pub fn theorem3_verdict(
    gas: &GasParameters,
    w: &WeightFunction,
    bg: &Background,
    g0: f64,
    g0_prime: f64,
    e0: f64,
) -> Result<Theorem3Verdict> {
    let n = gas.n();
    let (k, big_r) = (w.k(), w.radius());
    let inner = (k - 1.0) * big_r / k;
    if !(bg.r0 < inner) {
        return Err(invalid(
            "R0",
            format!("perturbation radius {} must be below (k-1)R/k = {inner}", bg.r0),
        ));
    }
    if !(g0 > 0.0) {
        return Err(invalid("G(0)", format!("initial moment must be positive, got {g0}")));
    }
    let nf = n as f64;
    let delta = gas.delta();
    let n_value = delta * e0
        + omega_n(n) * big_r.powi(n as i32) * bg.p_bar * ((k - 1.0) / k).powi(n as i32) * (nf - delta / (gas.gamma() - 1.0));
    let branch = if n_value > 0.0 {
        NBranch::Positive
    } else if n_value < 0.0 {
        NBranch::Negative
    } else {
        NBranch::Zero
    };
    let t1 = smallest_positive_root(w.b(), n_value, g0, g0_prime);
    let t2 = (inner - bg.r0) / bg.sigma;
    Ok(Theorem3Verdict {
        n_value,
        branch,
        t1,
        t2,
        applies: t1.is_some_and(|t| t > 0.0 && t <= t2),
    })
}
