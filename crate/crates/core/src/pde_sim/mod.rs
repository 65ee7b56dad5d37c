//! Simulation of
//!
//! ```text
//! f_t = θ f_xx + f_θθ + f(1 − ρ),   ρ(t, x) = ∫ f(t, x, θ) dθ,
//! ```
//!
//! on `[0, Lx] × [1, Θ]` by Strang splitting into Crank–Nicolson diffusion in
//! each direction and an explicit second-order reaction step. The step size
//! is driven by the distance between the Strang step and a first-order Lie
//! step.
//!
//! Both diffusions have zero flux at `x = 0` and `θ = 1` and vanish at the
//! far edges. Grid node `(i, j)` sits at `(iΔx, 1 + jΔθ)`; the far edges are
//! one step past the last node.

mod config;
mod diagnostics;
mod tridiag;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
pub use config::SimConfig;
pub use diagnostics::{
    diagnostics, exponent_fit, lower_level, u_slice, upper_level, FrontDiagnostics, USample,
    LOG_FLOOR,
};
use tridiag::CrankNicolson;

/// Nonnegative density on the `(x, θ)` grid, stored row by row in `θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    pub nx: usize,
    pub ntheta: usize,
    pub dx: f64,
    pub dtheta: f64,
    pub t: f64,
    /// `values[j * nx + i] = f(x_i, θ_j)`.
    pub values: Vec<f64>,
}

impl Field2D {
    pub fn zeros(nx: usize, ntheta: usize, lx: f64, theta_max: f64) -> Self {
        Field2D {
            nx,
            ntheta,
            dx: lx / nx as f64,
            dtheta: (theta_max - 1.0) / ntheta as f64,
            t: 0.0,
            values: vec![0.0; nx * ntheta],
        }
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(nx: usize, ntheta: usize, lx: f64, theta_max: f64, f: F) -> Self {
        let mut out = Self::zeros(nx, ntheta, lx, theta_max);
        for j in 0..ntheta {
            for i in 0..nx {
                out.values[j * nx + i] = f(out.x(i), out.theta(j));
            }
        }
        out
    }

    /// Indicator initial data from a configuration.
    pub fn initial(cfg: &SimConfig) -> Self {
        let x_end = cfg.x0_extent;
        let th_end = 1.0 + cfg.theta0_extent;
        Self::from_fn(cfg.nx, cfg.ntheta, cfg.lx, cfg.theta_max, |x, th| {
            if x <= x_end && th <= th_end {
                cfg.amplitude
            } else {
                0.0
            }
        })
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn theta(&self, j: usize) -> f64 {
        1.0 + j as f64 * self.dtheta
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// `ρ(x_i)` by the trapezoid rule in `θ`.
    pub fn density(&self) -> Vec<f64> {
        let mut rho = vec![0.0; self.nx];
        for (j, row) in self.values.chunks(self.nx).enumerate() {
            let w = if j == 0 { 0.5 } else { 1.0 } * self.dtheta;
            for (r, v) in rho.iter_mut().zip(row) {
                *r += w * v;
            }
        }
        rho
    }

    /// Discrete `L²` distance to another field on the same grid.
    pub fn l2_distance(&self, other: &Field2D) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (s * self.dx * self.dtheta).sqrt()
    }

    fn to_columns(&self) -> Vec<f64> {
        let (nx, nt) = (self.nx, self.ntheta);
        let mut cols = vec![0.0; nx * nt];
        for j in 0..nt {
            for i in 0..nx {
                cols[i * nt + j] = self.values[j * nx + i];
            }
        }
        cols
    }

    fn set_columns(&mut self, cols: &[f64]) {
        let (nx, nt) = (self.nx, self.ntheta);
        for j in 0..nt {
            for i in 0..nx {
                self.values[j * nx + i] = cols[i * nt + j];
            }
        }
    }
}

fn clamp_row(row: &mut [f64]) {
    for v in row {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// Crank–Nicolson step of `f_t = θ f_xx` over time `h`.
pub fn diffuse_x(f: &mut Field2D, h: f64) {
    let (nx, dx, dth) = (f.nx, f.dx, f.dtheta);
    f.values.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let theta = 1.0 + j as f64 * dth;
        let mut work = vec![0.0; nx];
        CrankNicolson::new(nx, h * theta / (2.0 * dx * dx)).apply(row, &mut work);
        clamp_row(row);
    });
}

fn diffuse_columns(cols: &mut [f64], ntheta: usize, dtheta: f64, h: f64) {
    let cn = CrankNicolson::new(ntheta, h / (2.0 * dtheta * dtheta));
    cols.par_chunks_mut(ntheta).for_each_init(
        || vec![0.0; ntheta],
        |work, col| {
            cn.apply(col, work);
            clamp_row(col);
        },
    );
}

fn react_columns(cols: &mut [f64], ntheta: usize, dtheta: f64, h: f64) {
    let density = |col: &[f64]| dtheta * (col.iter().sum::<f64>() - 0.5 * col[0]);
    cols.par_chunks_mut(ntheta).for_each_init(
        || vec![0.0; ntheta],
        |k1, col| {
            let r1 = 1.0 - density(col);
            for (k, v) in k1.iter_mut().zip(col.iter()) {
                *k = v * r1;
            }
            let pred: Vec<f64> = col.iter().zip(k1.iter()).map(|(v, k)| v + h * k).collect();
            let r2 = 1.0 - density(&pred);
            for ((v, k), p) in col.iter_mut().zip(k1.iter()).zip(&pred) {
                *v = (*v + 0.5 * h * (k + p * r2)).max(0.0);
            }
        },
    );
}

/// Crank–Nicolson step of `f_t = f_θθ` over time `h`.
pub fn diffuse_theta(f: &mut Field2D, h: f64) {
    let mut cols = f.to_columns();
    diffuse_columns(&mut cols, f.ntheta, f.dtheta, h);
    f.set_columns(&cols);
}

/// Heun step of `f_t = f(1 − ρ)` over time `h`.
pub fn react(f: &mut Field2D, h: f64) {
    let mut cols = f.to_columns();
    react_columns(&mut cols, f.ntheta, f.dtheta, h);
    f.set_columns(&cols);
}

/// Strang step `L^x_{h/2} L^θ_{h/2} R_h L^θ_{h/2} L^x_{h/2}`.
pub fn step_strang(f: &Field2D, h: f64) -> Field2D {
    let mut g = f.clone();
    diffuse_x(&mut g, 0.5 * h);
    let mut cols = g.to_columns();
    diffuse_columns(&mut cols, g.ntheta, g.dtheta, 0.5 * h);
    react_columns(&mut cols, g.ntheta, g.dtheta, h);
    diffuse_columns(&mut cols, g.ntheta, g.dtheta, 0.5 * h);
    g.set_columns(&cols);
    diffuse_x(&mut g, 0.5 * h);
    g.t = f.t + h;
    g
}

/// Strang step with the two diffusions swapped.
pub fn step_strang_commuted(f: &Field2D, h: f64) -> Field2D {
    let mut g = f.clone();
    diffuse_theta(&mut g, 0.5 * h);
    diffuse_x(&mut g, 0.5 * h);
    react(&mut g, h);
    diffuse_x(&mut g, 0.5 * h);
    diffuse_theta(&mut g, 0.5 * h);
    g.t = f.t + h;
    g
}

/// Lie step `L^x_h L^θ_h R_h` (reaction first).
pub fn step_lie(f: &Field2D, h: f64) -> Field2D {
    let mut g = f.clone();
    let mut cols = g.to_columns();
    react_columns(&mut cols, g.ntheta, g.dtheta, h);
    diffuse_columns(&mut cols, g.ntheta, g.dtheta, h);
    g.set_columns(&cols);
    diffuse_x(&mut g, h);
    g.t = f.t + h;
    g
}

/// Step-size controller outcome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDecision {
    pub accept: bool,
    pub h_next: f64,
}

/// Controller for an error indicator `err` observed with step `h`.
pub fn adapt_step(err: f64, h: f64, tol: f64, h_min: f64, h_max: f64) -> StepDecision {
    let ratio = if err > 0.0 {
        (0.9 * (tol / err).sqrt()).clamp(0.2, 5.0)
    } else {
        5.0
    };
    StepDecision {
        accept: err <= 2.0 * tol,
        h_next: (h * ratio).clamp(h_min, h_max),
    }
}

/// Integrates with a fixed step `h` up to time `t_end`.
pub fn integrate_fixed(f: &Field2D, h: f64, t_end: f64) -> Field2D {
    let n = ((t_end - f.t) / h).round().max(1.0) as usize;
    let h = (t_end - f.t) / n as f64;
    let mut g = f.clone();
    for _ in 0..n {
        g = step_strang(&g, h);
    }
    g.t = t_end;
    g
}

#[derive(Clone, Debug, Serialize)]
pub struct SimReport {
    pub accepted: usize,
    pub rejected: usize,
    /// Set when the run ended early because the front neared the far edge.
    pub stopped_early: bool,
    pub t_final: f64,
    pub diagnostics: Vec<FrontDiagnostics>,
}

fn is_multiple(t: f64, interval: f64) -> bool {
    let k = (t / interval).round();
    k >= 1.0 && (t - k * interval).abs() <= 1e-9 * interval.max(t)
}

/// Runs the adaptive simulation described by `cfg`.
///
/// `on_output` is called with the field and its diagnostics at every
/// multiple of `diag_interval`; `is_snapshot` is set at multiples of
/// `snapshot_interval` and at the final time.
pub fn simulate<F>(cfg: &SimConfig, mut on_output: F) -> Result<(SimReport, Field2D)>
where
    F: FnMut(&Field2D, &FrontDiagnostics, bool) -> Result<()>,
{
    cfg.validate()?;
    let mut f = Field2D::initial(cfg);
    let mut h = cfg.h0;
    let mut report = SimReport {
        accepted: 0,
        rejected: 0,
        stopped_early: false,
        t_final: 0.0,
        diagnostics: Vec::new(),
    };
    let mut history = Vec::new();
    let mut k_out = 1u64;
    let x_stop = cfg.front_stop * cfg.lx;

    while f.t < cfg.t_end {
        let t_next = (k_out as f64 * cfg.diag_interval).min(cfg.t_end);
        let trial_h = h.min(t_next - f.t);
        let clipped = trial_h < h;
        let strang = step_strang(&f, trial_h);
        let err = strang.l2_distance(&step_lie(&f, trial_h));
        let decision = adapt_step(err, trial_h, cfg.tol_step, cfg.h_min, cfg.h_max);
        if !decision.accept {
            report.rejected += 1;
            if trial_h <= cfg.h_min {
                return Err(Error::NonConvergence(format!(
                    "step size at its floor {} near t = {}",
                    cfg.h_min, f.t
                )));
            }
            h = decision.h_next;
            continue;
        }
        report.accepted += 1;
        h = if clipped { decision.h_next.max(h) } else { decision.h_next };
        f = strang;
        if f.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonConvergence(format!("non-finite density at t = {}", f.t)));
        }
        let reached = f.t >= t_next - 1e-12 * t_next.max(1.0);
        if reached {
            f.t = t_next;
            k_out += 1;
            let diag = diagnostics(&f, &history);
            if diag.x_half.is_finite() {
                history.push((f.t, diag.x_half));
            }
            report.diagnostics.push(diag);
            let front = diag.x_delta_01;
            let stop = !front.is_finite() || front > x_stop;
            let last = stop || f.t >= cfg.t_end;
            let snap = last || (cfg.snapshot_interval > 0.0 && is_multiple(f.t, cfg.snapshot_interval));
            on_output(&f, &diag, snap)?;
            if stop && f.t < cfg.t_end {
                log::warn!(
                    "front at x = {front:.1} passed {:.0}% of the domain at t = {}; stopping",
                    100.0 * cfg.front_stop,
                    f.t
                );
                report.stopped_early = true;
                break;
            }
        }
    }
    report.t_final = f.t;
    Ok((report, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(nx: usize, nt: usize) -> Field2D {
        Field2D::from_fn(nx, nt, 20.0, 11.0, |x, th| {
            0.3 * (-((x - 6.0).powi(2) + (th - 4.0).powi(2)) / 4.0).exp()
        })
    }

    #[test]
    fn constant_rows_are_preserved_away_from_the_edge() {
        let mut f = Field2D::from_fn(64, 8, 64.0, 9.0, |_, _| 1.0);
        diffuse_x(&mut f, 0.1);
        for j in 0..8 {
            for i in 0..40 {
                assert!((f.get(i, j) - 1.0).abs() < 1e-12);
            }
        }
        let mut g = Field2D::from_fn(8, 64, 9.0, 65.0, |_, _| 1.0);
        diffuse_theta(&mut g, 0.1);
        for j in 0..40 {
            assert!((g.get(3, j) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_mode_amplification() {
        // cosine modes are eigenvectors of the discrete operator with these ends
        let (n, dx, h) = (200, 0.5, 0.3);
        let k = 7.5 * std::f64::consts::PI / (n as f64 * dx);
        for theta in [1.0, 3.5] {
            let before: Vec<f64> = (0..n).map(|i| (k * i as f64 * dx).cos()).collect();
            let mut u = before.clone();
            let mut work = vec![0.0; n];
            CrankNicolson::new(n, h * theta / (2.0 * dx * dx)).apply(&mut u, &mut work);
            let kt2 = 4.0 / (dx * dx) * (0.5 * k * dx).sin().powi(2);
            let amp = (1.0 - 0.5 * h * theta * kt2) / (1.0 + 0.5 * h * theta * kt2);
            for (a, b) in u.iter().zip(&before) {
                assert!((a - amp * b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn diffusion_conserves_mass() {
        let f0 = Field2D::from_fn(160, 120, 40.0, 31.0, |x, th| {
            0.3 * (-((x - 10.0).powi(2) + (th - 6.0).powi(2)) / 4.0).exp()
        });
        let mass = |f: &Field2D| {
            let rho = f.density();
            rho.iter().sum::<f64>() - 0.5 * rho[0]
        };
        let mut f = f0.clone();
        diffuse_x(&mut f, 0.05);
        assert!((mass(&f) - mass(&f0)).abs() < 1e-12);
        let mut g = f0.clone();
        diffuse_theta(&mut g, 0.05);
        assert!((mass(&g) - mass(&f0)).abs() < 1e-12);
    }

    #[test]
    fn reaction_fixed_points() {
        let mut zero = Field2D::zeros(5, 5, 5.0, 6.0);
        react(&mut zero, 0.5);
        assert!(zero.values.iter().all(|&v| v == 0.0));
        // ρ = 1 for the slab f ≡ 1/(Θ − 1 − Δθ/2)
        let nt = 10;
        let mut slab = Field2D::zeros(4, nt, 4.0, 11.0);
        let level = 1.0 / (slab.dtheta * (nt as f64 - 0.5));
        slab.values.iter_mut().for_each(|v| *v = level);
        let before = slab.clone();
        react(&mut slab, 0.5);
        for (a, b) in slab.values.iter().zip(&before.values) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn reaction_matches_heun_on_one_cell() {
        let mut f = Field2D::zeros(1, 1, 1.0, 2.0);
        let w = 0.5 * f.dtheta;
        f.values[0] = 0.5 / w;
        let h = 0.1;
        react(&mut f, h);
        let r0 = 0.5;
        let k1 = r0 * (1.0 - r0);
        let r1 = r0 + h * k1;
        let heun = r0 + 0.5 * h * (k1 + r1 * (1.0 - r1));
        assert!((f.values[0] * w - heun).abs() < 1e-15);
        let exact = 1.0 / (1.0 + (-h).exp());
        assert!((heun - exact).abs() < h.powi(3));
    }

    #[test]
    fn controller_formula() {
        let d = adapt_step(1e-4, 0.1, 1e-4, 1e-9, 1.0);
        assert!(d.accept && (d.h_next - 0.09).abs() < 1e-15);
        let d = adapt_step(0.25e-4, 0.1, 1e-4, 1e-9, 1.0);
        assert!((d.h_next - 0.18).abs() < 1e-15);
        assert!(!adapt_step(2.01e-4, 0.1, 1e-4, 1e-9, 1.0).accept);
        assert_eq!(adapt_step(0.0, 0.5, 1e-4, 1e-9, 1.0).h_next, 1.0);
    }

    #[test]
    fn small_steps_are_consistent() {
        let f = bump(48, 24);
        let d1 = step_strang(&f, 1e-3).l2_distance(&f);
        let d2 = step_strang(&f, 5e-4).l2_distance(&f);
        assert!(d1 > 0.0 && (d1 / d2 - 2.0).abs() < 0.05);
    }

    #[test]
    fn commuted_splitting_agrees_to_second_order() {
        let f = bump(48, 24);
        let gap = |h: f64| {
            let mut a = f.clone();
            let mut b = f.clone();
            let n = (1.0 / h).round() as usize;
            for _ in 0..n {
                a = step_strang(&a, h);
                b = step_strang_commuted(&b, h);
            }
            a.l2_distance(&b)
        };
        let slope = (gap(0.1) / gap(0.05)).log2();
        assert!((slope - 2.0).abs() < 0.2, "slope {slope}");
    }
}
