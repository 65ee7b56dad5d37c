//! Dormand–Prince 5(4) integrator with adaptive steps.
//!
//! Integration runs in either direction; requested output times are hit
//! exactly by shortening the step that would cross them.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; `0` lets the integrator pick one.
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 0.0,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn combo<const N: usize>(y: &[f64; N], h: f64, ks: &[&[f64; N]], coef: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, &c) in ks.iter().zip(coef) {
        if c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// Integrates `y′ = f(t, y)` from `(t0, y0)` and returns the state at each
/// entry of `t_out`, which must be monotone in the direction of integration.
pub fn dopri5<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_out: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(t_out.len());
    let Some(&t_last) = t_out.last() else {
        return Ok(out);
    };
    let dir = if t_last >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = if opts.h_init > 0.0 {
        opts.h_init
    } else {
        let scale: f64 = (0..N)
            .map(|i| (k1[i].abs() / (opts.atol + opts.rtol * y[i].abs())).powi(2))
            .sum::<f64>()
            .sqrt()
            / (N as f64).sqrt();
        (0.01 / scale.max(1e-10)).min(1.0)
    }
    .min(opts.h_max);
    let mut steps = 0usize;

    for &target in t_out {
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::NonConvergence(format!(
                    "ODE step budget exhausted at t = {t}"
                )));
            }
            let remaining = (target - t).abs();
            let hit = h >= remaining;
            let hs = if hit { remaining } else { h } * dir;

            let k2 = f(t + C[0] * hs, &combo(&y, hs, &[&k1], &A2));
            let k3 = f(t + C[1] * hs, &combo(&y, hs, &[&k1, &k2], &A3));
            let k4 = f(t + C[2] * hs, &combo(&y, hs, &[&k1, &k2, &k3], &A4));
            let k5 = f(t + C[3] * hs, &combo(&y, hs, &[&k1, &k2, &k3, &k4], &A5));
            let k6 = f(t + C[4] * hs, &combo(&y, hs, &[&k1, &k2, &k3, &k4, &k5], &A6));
            let y_new = combo(&y, hs, &[&k1, &k2, &k3, &k4, &k5, &k6], &B);
            let k7 = f(t + hs, &y_new);

            let mut err = 0.0;
            let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
            for i in 0..N {
                let mut ei = 0.0;
                for (k, e) in ks.iter().zip(E) {
                    ei += e * k[i];
                }
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err += (hs * ei / sc).powi(2);
            }
            let err = (err / N as f64).sqrt();

            if !err.is_finite() {
                h *= 0.25;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::NonConvergence(format!(
                        "ODE right-hand side not finite near t = {t}"
                    )));
                }
                continue;
            }
            let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
            if err <= 1.0 {
                t = if hit { target } else { t + hs };
                y = y_new;
                k1 = k7;
                if !hit || factor < 1.0 {
                    h = (h * factor).min(opts.h_max);
                }
            } else {
                h = hs.abs() * factor;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::NonConvergence(format!(
                        "ODE step size underflow near t = {t}"
                    )));
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}
