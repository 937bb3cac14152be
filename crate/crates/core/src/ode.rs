//! Dormand–Prince 5(4) integrator with step-wise callbacks.
//!
//! The integrator hands every accepted step to the caller together with the
//! end-point derivatives, which is enough for cubic Hermite dense output and
//! for event location without a separate interpolant.

use crate::error::{Error, Result};

/// Step-size control settings.
#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            h_min: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

/// One accepted step `[t0, t1]`.
#[derive(Clone, Copy, Debug)]
pub struct StepRecord<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    pub dy0: [f64; N],
    pub dy1: [f64; N],
}

impl<const N: usize> StepRecord<N> {
    /// Cubic Hermite interpolant inside the step.
    pub fn interpolate(&self, t: f64) -> [f64; N] {
        hermite(self.t0, self.t1, &self.y0, &self.y1, &self.dy0, &self.dy1, t)
    }
}

pub(crate) fn hermite<const N: usize>(
    t0: f64,
    t1: f64,
    y0: &[f64; N],
    y1: &[f64; N],
    d0: &[f64; N],
    d1: &[f64; N],
    t: f64,
) -> [f64; N] {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * y0[i] + h10 * h * d0[i] + h01 * y1[i] + h11 * h * d1[i];
    }
    out
}

/// Returned by the step callback.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Summary of an integration run.
#[derive(Clone, Copy, Debug)]
pub struct OdeOutcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    pub stopped_early: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(&[f64; N], f64)]) -> [f64; N] {
    let mut out = *y;
    for (k, c) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step of size `h`, returning the 5th-order solution,
/// the embedded error vector and the derivative at the new point.
pub fn dopri_step<const N: usize, F>(
    rhs: &F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k2 = rhs(t + C2 * h, &axpy(y, h, &[(k1, A21)]));
    let k3 = rhs(t + C3 * h, &axpy(y, h, &[(k1, A31), (&k2, A32)]));
    let k4 = rhs(t + C4 * h, &axpy(y, h, &[(k1, A41), (&k2, A42), (&k3, A43)]));
    let k5 = rhs(
        t + C5 * h,
        &axpy(y, h, &[(k1, A51), (&k2, A52), (&k3, A53), (&k4, A54)]),
    );
    let k6 = rhs(
        t + h,
        &axpy(
            y,
            h,
            &[(k1, A61), (&k2, A62), (&k3, A63), (&k4, A64), (&k5, A65)],
        ),
    );
    let y_new = axpy(
        y,
        h,
        &[(k1, B1), (&k3, B3), (&k4, B4), (&k5, B5), (&k6, B6)],
    );
    let k7 = rhs(t + h, &y_new);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, err, k7)
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end`, invoking `on_step` after
/// every accepted step. The callback may stop the integration early.
pub fn integrate<const N: usize, F, C>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    mut on_step: C,
) -> Result<OdeOutcome<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    C: FnMut(&StepRecord<N>) -> Control,
{
    let span = t_end - t0;
    if span <= 0.0 {
        return Ok(OdeOutcome {
            t: t0,
            y: y0,
            steps: 0,
            stopped_early: false,
        });
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = opts
        .h_init
        .unwrap_or_else(|| initial_step(&rhs, t, &y, &k1, opts))
        .min(span)
        .min(opts.h_max);
    let mut steps = 0usize;

    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let (y_new, err, k7) = dopri_step(&rhs, t, &y, &k1, h);
        let mut norm = 0.0;
        for i in 0..N {
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            norm += (err[i] / sc).powi(2);
        }
        let norm = (norm / N as f64).sqrt();
        if norm <= 1.0 && norm.is_finite() {
            let t_new = if last { t_end } else { t + h };
            steps += 1;
            let rec = StepRecord {
                t0: t,
                t1: t_new,
                y0: y,
                y1: y_new,
                dy0: k1,
                dy1: k7,
            };
            t = t_new;
            y = y_new;
            k1 = k7;
            if on_step(&rec) == Control::Stop {
                return Ok(OdeOutcome {
                    t,
                    y,
                    steps,
                    stopped_early: true,
                });
            }
            let fac = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * fac).min(opts.h_max);
        } else {
            let fac = if norm.is_finite() {
                (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h *= fac;
            if h < opts.h_min * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t, h });
            }
        }
    }
    Ok(OdeOutcome {
        t,
        y,
        steps,
        stopped_early: false,
    })
}

fn initial_step<const N: usize, F>(
    rhs: &F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    opts: &OdeOptions,
) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (k1[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1 = axpy(y, h0, &[(k1, 1.0)]);
    let k2 = rhs(t + h0, &y1);
    let mut d2 = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y[i].abs();
        d2 += ((k2[i] - k1[i]) / sc).powi(2);
    }
    let d2 = (d2 / N as f64).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_full_period() {
        let tau = 2.0 * std::f64::consts::PI;
        let out = integrate(
            |_t, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            tau,
            &OdeOptions::default(),
            |_| Control::Continue,
        )
        .unwrap();
        assert!((out.y[0] - 1.0).abs() < 1e-8);
        assert!(out.y[1].abs() < 1e-8);
    }

    #[test]
    fn hermite_dense_output_is_accurate() {
        let mut worst: f64 = 0.0;
        integrate(
            |_t, y: &[f64; 1]| [y[0]],
            0.0,
            [1.0],
            2.0,
            &OdeOptions::default(),
            |rec| {
                let tm = 0.5 * (rec.t0 + rec.t1);
                worst = worst.max((rec.interpolate(tm)[0] - tm.exp()).abs() / tm.exp());
                Control::Continue
            },
        )
        .unwrap();
        assert!(worst < 1e-7, "{worst}");
    }

    #[test]
    fn callback_can_stop() {
        let out = integrate(
            |_t, _y: &[f64; 1]| [1.0],
            0.0,
            [0.0],
            10.0,
            &OdeOptions::default(),
            |rec| {
                if rec.y1[0] > 1.0 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        )
        .unwrap();
        assert!(out.stopped_early);
        assert!(out.t < 10.0);
    }
}
