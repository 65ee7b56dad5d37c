//! Direct minimization of the discretized action
//!
//! ```text
//! ∫₀¹ ẋ²/(4θ) + θ̇²/4 − 1 + μ·1{x < αt^{3/2}} dt
//! ```
//!
//! over paths from the origin to a fixed endpoint. It is an independent
//! check on the closed-form trajectories.
//!
//! Paths are piecewise linear on a mesh `t_i = (i/N)^γ` graded toward the
//! singular start, except on the first cell where the path follows the
//! self-similar profile `x ∝ t^{3/2}`, `θ ∝ t`. The kinetic part of the
//! action is then a convex function of the knots with a closed form on every
//! cell, minimized by a projected Newton method with a banded Hessian.

mod banded;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quad::gauss_legendre_8;
use crate::roots;
use crate::trajectories;
use banded::BandedSym;

/// How the saturated zone `{x < αt^{3/2}}` is charged.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Saturation {
    /// Cost `μ` per unit time spent in the zone.
    Penalty(f64),
    /// The zone is forbidden (the `μ = +∞` limit).
    Constraint,
}

impl Saturation {
    pub fn from_mu(mu: f64) -> Self {
        if mu.is_infinite() {
            Saturation::Constraint
        } else {
            Saturation::Penalty(mu)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionProblem {
    pub alpha: f64,
    pub saturation: Saturation,
    pub x: f64,
    pub theta: f64,
    pub n_segments: usize,
    /// Mesh grading exponent `γ` in `t_i = (i/N)^γ`.
    pub grading: f64,
    pub seed: u64,
}

impl ActionProblem {
    pub fn new(alpha: f64, mu: f64, x: f64, theta: f64, n_segments: usize) -> Self {
        ActionProblem {
            alpha,
            saturation: Saturation::from_mu(mu),
            x,
            theta,
            n_segments,
            grading: 2.0,
            seed: 0x5eed,
        }
    }

    pub fn with_segments(&self, n_segments: usize) -> Self {
        ActionProblem {
            n_segments,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=4.0 / 3.0 + 1e-12).contains(&self.alpha) {
            return Err(domain(format!("α = {} is outside [0, 4/3]", self.alpha)));
        }
        if let Saturation::Penalty(mu) = self.saturation {
            if !(mu >= 0.0) {
                return Err(domain(format!("μ = {mu} must be nonnegative")));
            }
        }
        if !(self.theta > 0.0) || !self.x.is_finite() {
            return Err(domain(format!(
                "endpoint ({}, {}) needs finite x and θ > 0",
                self.x, self.theta
            )));
        }
        if self.n_segments < 16 {
            return Err(domain(format!(
                "{} segments requested, at least 16 required",
                self.n_segments
            )));
        }
        if !(self.grading >= 1.0) {
            return Err(domain(format!("grading {} must be at least 1", self.grading)));
        }
        Ok(())
    }

    pub fn mesh(&self) -> Vec<f64> {
        let n = self.n_segments as f64;
        (0..=self.n_segments)
            .map(|i| (i as f64 / n).powf(self.grading))
            .collect()
    }
}

/// Knots `(t_i, x_i, θ_i)`, `i = 0..=N`, with `(x_0, θ_0) = (0, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteTrajectory {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub theta: Vec<f64>,
}

impl DiscreteTrajectory {
    /// Samples `path(t) = (x, θ)` at the mesh knots; the origin is imposed.
    pub fn sample<F: Fn(f64) -> (f64, f64)>(mesh: &[f64], path: F) -> Self {
        let (x, theta) = mesh
            .iter()
            .map(|&t| if t == 0.0 { (0.0, 0.0) } else { path(t) })
            .unzip();
        DiscreteTrajectory {
            t: mesh.to_vec(),
            x,
            theta,
        }
    }

    /// Largest amount by which a knot lies below `αt^{3/2}`.
    pub fn barrier_violation(&self, alpha: f64) -> f64 {
        self.t
            .iter()
            .zip(&self.x)
            .map(|(&t, &x)| barrier(alpha, t) - x)
            .fold(0.0, f64::max)
    }

    /// Largest increase of `η_i = θ_i/t_i` between consecutive knots.
    pub fn eta_increase(&self) -> f64 {
        let eta: Vec<f64> = self
            .t
            .iter()
            .zip(&self.theta)
            .skip(1)
            .map(|(&t, &th)| th / t)
            .collect();
        eta.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

#[inline]
fn barrier(alpha: f64, t: f64) -> f64 {
    alpha * t * t.sqrt()
}

/// `G(u, v) = ∫₀¹ dλ/((1−λ)u + λv) = ln(v/u)/(v − u)` and its first and
/// second partial derivatives `(G, G_u, G_v, G_uu, G_uv, G_vv)`.
fn inverse_mean(u: f64, v: f64) -> [f64; 6] {
    let d = v - u;
    if d.abs() < 0.2 * (u + v) {
        let mut g = [0.0; 6];
        for (l, w) in gauss_legendre_8() {
            let m = 1.0 - l;
            let r = 1.0 / (m * u + l * v);
            let r2 = r * r;
            let r3 = r2 * r;
            g[0] += w * r;
            g[1] -= w * m * r2;
            g[2] -= w * l * r2;
            g[3] += 2.0 * w * m * m * r3;
            g[4] += 2.0 * w * m * l * r3;
            g[5] += 2.0 * w * l * l * r3;
        }
        g
    } else {
        let lg = (v / u).ln();
        let d2 = d * d;
        let d3 = d2 * d;
        let nu = lg - d / u;
        let nv = lg - d / v;
        [
            lg / d,
            nu / d2,
            -nv / d2,
            1.0 / (u * u * d) + 2.0 * nu / d3,
            -1.0 / (u * v * d) - 2.0 * nu / d3,
            -1.0 / (v * v * d) + 2.0 * nv / d3,
        ]
    }
}

/// Time spent below the barrier by the chord from `(t0, x0)` to `(t1, x1)`.
///
/// `g = x − αt^{3/2}` is concave along the chord: increasing up to its peak
/// and decreasing after, so each side holds at most one root.
fn time_below(alpha: f64, t0: f64, t1: f64, x0: f64, x1: f64) -> f64 {
    let h = t1 - t0;
    let slope = (x1 - x0) / h;
    let g = |t: f64| x0 + slope * (t - t0) - barrier(alpha, t);
    let (g0, g1) = (g(t0), g(t1));
    if g0 >= 0.0 && g1 >= 0.0 {
        return 0.0;
    }
    let peak = if slope <= 0.0 {
        t0
    } else if alpha == 0.0 {
        t1
    } else {
        (slope / (1.5 * alpha)).powi(2).clamp(t0, t1)
    };
    let gp = g(peak);
    if gp <= 0.0 {
        return h;
    }
    let root = |a: f64, b: f64| roots::brent(g, a, b, 1e-16).unwrap_or(0.5 * (a + b));
    let left = if g0 < 0.0 { root(t0, peak) - t0 } else { 0.0 };
    let right = if g1 < 0.0 { t1 - root(peak, t1) } else { 0.0 };
    left + right
}

/// Exact discrete action of `traj`. Returns `+∞` for paths with a
/// nonpositive interior `θ`, or that enter the zone under a state constraint.
pub fn action_of(traj: &DiscreteTrajectory, prob: &ActionProblem) -> f64 {
    let (t, x, th) = (&traj.t, &traj.x, &traj.theta);
    let n = t.len() - 1;
    if th[1..].iter().any(|&v| !(v > 0.0)) {
        return f64::INFINITY;
    }
    let alpha = prob.alpha;
    let mu = match prob.saturation {
        Saturation::Penalty(mu) => mu,
        Saturation::Constraint => {
            if traj.barrier_violation(alpha) > 1e-12 {
                return f64::INFINITY;
            }
            0.0
        }
    };
    let (t1, x1, th1) = (t[1], x[1], th[1]);
    let mut total = 9.0 / 16.0 * x1 * x1 / (th1 * t1) + th1 * th1 / (4.0 * t1) - t1;
    if mu > 0.0 && x1 < barrier(alpha, t1) {
        total += mu * t1;
    }
    for i in 2..=n {
        let h = t[i] - t[i - 1];
        let a = x[i] - x[i - 1];
        let b = th[i] - th[i - 1];
        let g = inverse_mean(th[i - 1], th[i])[0];
        total += a * a * g / (4.0 * h) + b * b / (4.0 * h) - h;
        if mu > 0.0 {
            total += mu * time_below(alpha, t[i - 1], t[i], x[i - 1], x[i]);
        }
    }
    total
}

#[derive(Clone, Copy, Debug)]
enum Smoothing {
    None,
    Logistic { mu: f64, width: f64 },
}

/// Objective over the interior knots, packed as `z = (x_1, θ_1, …)`.
struct Objective<'a> {
    prob: &'a ActionProblem,
    t: &'a [f64],
    smoothing: Smoothing,
}

fn logistic(z: f64) -> (f64, f64, f64) {
    let s = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    let d1 = s * (1.0 - s);
    (s, d1, d1 * (1.0 - 2.0 * s))
}

impl Objective<'_> {
    fn knots(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.t.len() - 1;
        let mut x = vec![0.0; n + 1];
        let mut th = vec![0.0; n + 1];
        for i in 1..n {
            x[i] = z[2 * (i - 1)];
            th[i] = z[2 * (i - 1) + 1];
        }
        x[n] = self.prob.x;
        th[n] = self.prob.theta;
        (x, th)
    }

    /// Value, and when `deriv` is given, gradient and banded Hessian.
    fn eval(&self, z: &[f64], mut deriv: Option<(&mut [f64], &mut BandedSym)>) -> f64 {
        let t = self.t;
        let n = t.len() - 1;
        let (x, th) = self.knots(z);
        if th[1..].iter().any(|&v| !(v > 0.0)) {
            return f64::INFINITY;
        }
        if let Some((g, h)) = deriv.as_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
            **h = BandedSym::zeros(z.len(), 3);
        }
        // variable index of component c of knot i, if free
        let var = |i: usize, c: usize| (i >= 1 && i < n).then(|| 2 * (i - 1) + c);
        let alpha = self.prob.alpha;
        let mut total = 0.0;

        // first cell, self-similar profile
        let (t1, x1, u1) = (t[1], x[1], th[1]);
        total += 9.0 / 16.0 * x1 * x1 / (u1 * t1) + u1 * u1 / (4.0 * t1) - t1;
        let first = [
            (9.0 / 8.0 * x1 / (u1 * t1), 9.0 / 8.0 / (u1 * t1)),
            (
                -9.0 / 16.0 * x1 * x1 / (u1 * u1 * t1) + u1 / (2.0 * t1),
                9.0 / 8.0 * x1 * x1 / (u1 * u1 * u1 * t1) + 1.0 / (2.0 * t1),
            ),
        ];
        let cross = -9.0 / 8.0 * x1 / (u1 * u1 * t1);
        if let (Some((g, h)), Some(ix), Some(iu)) = (deriv.as_mut(), var(1, 0), var(1, 1)) {
            g[ix] += first[0].0;
            g[iu] += first[1].0;
            h.add(ix, ix, first[0].1);
            h.add(iu, iu, first[1].1);
            h.add(iu, ix, cross);
        }
        if let Smoothing::Logistic { mu, width } = self.smoothing {
            let (s, d1, d2) = logistic((barrier(alpha, t1) - x1) / width);
            total += mu * t1 * s;
            if let (Some((g, h)), Some(ix)) = (deriv.as_mut(), var(1, 0)) {
                g[ix] -= mu * t1 * d1 / width;
                h.add(ix, ix, mu * t1 * d2 / (width * width));
            }
        }

        for i in 2..=n {
            let hh = t[i] - t[i - 1];
            let a = x[i] - x[i - 1];
            let b = th[i] - th[i - 1];
            let gm = inverse_mean(th[i - 1], th[i]);
            total += a * a * gm[0] / (4.0 * hh) + b * b / (4.0 * hh) - hh;

            let mut pen = [0.0; 2];
            let mut pen_h = [[0.0; 2]; 2];
            if let Smoothing::Logistic { mu, width } = self.smoothing {
                for (l, w) in gauss_legendre_8() {
                    let tk = t[i - 1] + l * hh;
                    let xk = (1.0 - l) * x[i - 1] + l * x[i];
                    let (s, d1, d2) = logistic((barrier(alpha, tk) - xk) / width);
                    total += mu * hh * w * s;
                    let c = [1.0 - l, l];
                    for p in 0..2 {
                        pen[p] -= mu * hh * w * d1 * c[p] / width;
                        for q in 0..2 {
                            pen_h[p][q] += mu * hh * w * d2 * c[p] * c[q] / (width * width);
                        }
                    }
                }
            }

            if let Some((g, h)) = deriv.as_mut() {
                let inv2h = 1.0 / (2.0 * hh);
                let inv4h = 0.5 * inv2h;
                // local order: x_{i-1}, θ_{i-1}, x_i, θ_i
                let grad = [
                    -a * gm[0] * inv2h + pen[0],
                    a * a * gm[1] * inv4h - b * inv2h,
                    a * gm[0] * inv2h + pen[1],
                    a * a * gm[2] * inv4h + b * inv2h,
                ];
                let gx = gm[0] * inv2h;
                let hess = [
                    [gx + pen_h[0][0], 0.0, 0.0, 0.0],
                    [-a * gm[1] * inv2h, a * a * gm[3] * inv4h + inv2h, 0.0, 0.0],
                    [-gx + pen_h[1][0], a * gm[1] * inv2h, gx + pen_h[1][1], 0.0],
                    [
                        -a * gm[2] * inv2h,
                        a * a * gm[4] * inv4h - inv2h,
                        a * gm[2] * inv2h,
                        a * a * gm[5] * inv4h + inv2h,
                    ],
                ];
                let idx = [var(i - 1, 0), var(i - 1, 1), var(i, 0), var(i, 1)];
                for p in 0..4 {
                    let Some(ip) = idx[p] else { continue };
                    g[ip] += grad[p];
                    for q in 0..=p {
                        if let Some(iq) = idx[q] {
                            h.add(ip, iq, hess[p][q]);
                        }
                    }
                }
            }
        }
        total
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NewtonStats {
    pub iterations: usize,
    pub converged: bool,
    pub projected_gradient: f64,
}

fn project(z: &mut [f64], lb: &[f64]) {
    for (v, &l) in z.iter_mut().zip(lb) {
        if *v < l {
            *v = l;
        }
    }
}

/// Projected Newton iteration for `min f(z)` subject to `z ≥ lb`.
fn projected_newton(obj: &Objective, z: &mut Vec<f64>, lb: &[f64], max_iter: usize) -> NewtonStats {
    let n = z.len();
    project(z, lb);
    let mut g = vec![0.0; n];
    let mut h = BandedSym::zeros(n, 3);
    let mut stalls = 0;
    let mut pg = f64::INFINITY;
    for it in 0..max_iter {
        let f = obj.eval(z, Some((&mut g, &mut h)));
        pg = z
            .iter()
            .zip(&g)
            .zip(lb)
            .map(|((&zi, &gi), &l)| (zi - (zi - gi).max(l)).abs())
            .fold(0.0, f64::max);
        if pg < 1e-11 {
            return NewtonStats {
                iterations: it,
                converged: true,
                projected_gradient: pg,
            };
        }
        let eps_act = pg.min(1e-9);
        let diag: Vec<f64> = (0..n).map(|i| h.get(i, i)).collect();
        let active: Vec<bool> = (0..n)
            .map(|i| z[i] - lb[i] <= eps_act && g[i] > 0.0)
            .collect();
        let mut rhs: Vec<f64> = g.iter().map(|v| -v).collect();
        for i in 0..n {
            if active[i] {
                h.isolate(i, 1.0);
                rhs[i] = 0.0;
            }
        }
        let mut shift = 0.0;
        let scale = h.max_diag().max(1e-300);
        let mut d = loop {
            if let Some(d) = h.solve_shifted(shift, &rhs) {
                break d;
            }
            shift = if shift == 0.0 { 1e-12 * scale } else { shift * 10.0 };
            if shift > 1e6 * scale {
                break rhs.iter().map(|v| v / scale).collect();
            }
        };
        for i in 0..n {
            if active[i] {
                d[i] = -g[i] / diag[i].max(1e-300);
            }
        }
        let mut beta = 1.0;
        let mut accepted = None;
        while beta > 1e-14 {
            let mut trial: Vec<f64> = z.iter().zip(&d).map(|(zi, di)| zi + beta * di).collect();
            project(&mut trial, lb);
            let ft = obj.eval(&trial, None);
            let decrease: f64 = g.iter().zip(trial.iter().zip(z.iter())).map(|(gi, (a, b))| gi * (a - b)).sum();
            if ft.is_finite() && ft <= f + 1e-4 * decrease {
                accepted = Some((trial, ft));
                break;
            }
            beta *= 0.5;
        }
        let Some((trial, ft)) = accepted else {
            return NewtonStats {
                iterations: it,
                converged: pg < 1e-6,
                projected_gradient: pg,
            };
        };
        *z = trial;
        if f - ft <= 1e-15 * (1.0 + f.abs()) {
            stalls += 1;
            if stalls >= 3 {
                return NewtonStats {
                    iterations: it + 1,
                    converged: true,
                    projected_gradient: pg,
                };
            }
        } else {
            stalls = 0;
        }
    }
    NewtonStats {
        iterations: max_iter,
        converged: false,
        projected_gradient: pg,
    }
}

/// Outcome of one restart.
#[derive(Clone, Debug, Serialize)]
pub struct RestartSummary {
    pub start: String,
    pub action: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Minimum {
    pub u: f64,
    pub traj: DiscreteTrajectory,
    pub restarts: Vec<RestartSummary>,
}

const MAX_ITER: usize = 400;
const WIDTHS: [f64; 5] = [0.1, 0.03, 0.01, 0.003, 0.001];

fn pack(traj: &DiscreteTrajectory) -> Vec<f64> {
    let n = traj.t.len() - 1;
    (1..n).flat_map(|i| [traj.x[i], traj.theta[i]]).collect()
}

fn initial_guesses(prob: &ActionProblem, mesh: &[f64]) -> Vec<(String, DiscreteTrajectory)> {
    let (xe, te) = (prob.x, prob.theta);
    let mut starts = Vec::new();
    if prob.alpha > 0.0 && (prob.x - prob.alpha).abs() < 1e-12 {
        let s: Vec<f64> = mesh[1..].iter().map(|t| t.ln()).collect();
        if let Ok(tr) = trajectories::trajectory_at(te, prob.alpha, &s) {
            let mut traj = DiscreteTrajectory::sample(mesh, |_| (0.0, 0.0));
            for (k, r) in tr.rows.iter().enumerate() {
                traj.x[k + 1] = r.x;
                traj.theta[k + 1] = r.theta;
            }
            let n = mesh.len() - 1;
            traj.x[n] = xe;
            traj.theta[n] = te;
            starts.push(("analytic".to_string(), traj));
        }
    }
    starts.push((
        "straight".into(),
        DiscreteTrajectory::sample(mesh, |t| (xe * t, te * t)),
    ));
    starts.push((
        "barrier".into(),
        DiscreteTrajectory::sample(mesh, |t| (xe * t * t.sqrt(), te * t)),
    ));
    starts.push((
        "parabolic".into(),
        DiscreteTrajectory::sample(mesh, |t| (xe * t * t * (3.0 - t) / 2.0, te * t * (2.0 - t))),
    ));
    let base = starts.len();
    let mut rng = ChaCha8Rng::seed_from_u64(prob.seed);
    let n = mesh.len() - 1;
    let mut k = 0;
    while starts.len() < 8 {
        let (name, src) = &starts[k % base];
        let mut traj = src.clone();
        let cx: Vec<f64> = (1..=3).map(|m| 0.3 / m as f64 * rng.gen_range(-1.0..1.0)).collect();
        let ct: Vec<f64> = (1..=3).map(|m| 0.3 / m as f64 * rng.gen_range(-1.0..1.0)).collect();
        let bump = |c: &[f64], t: f64| -> f64 {
            c.iter()
                .enumerate()
                .map(|(m, cm)| cm * ((m + 1) as f64 * std::f64::consts::PI * t).sin())
                .sum()
        };
        for i in 1..n {
            traj.x[i] *= 1.0 + bump(&cx, mesh[i]);
            traj.theta[i] *= 1.0 + bump(&ct, mesh[i]);
        }
        starts.push((format!("{name}+noise{k}"), traj));
        k += 1;
    }
    starts
}

fn lower_bounds(prob: &ActionProblem, mesh: &[f64], constrained: bool) -> Vec<f64> {
    let n = mesh.len() - 1;
    (1..n)
        .flat_map(|i| {
            let xl = if constrained {
                barrier(prob.alpha, mesh[i])
            } else {
                f64::NEG_INFINITY
            };
            [xl, 1e-14]
        })
        .collect()
}

fn unpack(prob: &ActionProblem, mesh: &[f64], z: &[f64]) -> DiscreteTrajectory {
    let obj = Objective {
        prob,
        t: mesh,
        smoothing: Smoothing::None,
    };
    let (x, theta) = obj.knots(z);
    DiscreteTrajectory {
        t: mesh.to_vec(),
        x,
        theta,
    }
}

fn run_restart(prob: &ActionProblem, mesh: &[f64], start: &DiscreteTrajectory) -> (f64, Vec<f64>, NewtonStats) {
    let plain = Objective {
        prob,
        t: mesh,
        smoothing: Smoothing::None,
    };
    let mu = match prob.saturation {
        Saturation::Constraint => None,
        Saturation::Penalty(mu) => Some(mu),
    };
    let constrained = mu != Some(0.0);
    let lb = lower_bounds(prob, mesh, constrained);
    let mut z = pack(start);
    let mut stats = projected_newton(&plain, &mut z, &lb, MAX_ITER);
    let mut best = (action_of(&unpack(prob, mesh, &z), prob), z.clone());

    if let Some(mu) = mu.filter(|&m| m > 0.0) {
        let free = lower_bounds(prob, mesh, false);
        let mut zs = pack(start);
        for &w in &WIDTHS {
            let obj = Objective {
                prob,
                t: mesh,
                smoothing: Smoothing::Logistic { mu, width: w },
            };
            let s = projected_newton(&obj, &mut zs, &free, MAX_ITER);
            stats.iterations += s.iterations;
            let exact = action_of(&unpack(prob, mesh, &zs), prob);
            if exact < best.0 {
                best = (exact, zs.clone());
            }
        }
    }
    (best.0, best.1, stats)
}

/// Minimizes the discrete action from eight starting paths and returns the
/// best local minimum found.
pub fn minimize(prob: &ActionProblem) -> Result<Minimum> {
    prob.validate()?;
    let mesh = prob.mesh();
    let starts = initial_guesses(prob, &mesh);
    let outcomes: Vec<(RestartSummary, Vec<f64>)> = starts
        .par_iter()
        .map(|(name, start)| {
            let (u, z, stats) = run_restart(prob, &mesh, start);
            (
                RestartSummary {
                    start: name.clone(),
                    action: u,
                    iterations: stats.iterations,
                    converged: stats.converged,
                },
                z,
            )
        })
        .collect();
    if !outcomes.iter().any(|(s, _)| s.converged) {
        return Err(Error::NonConvergence(format!(
            "no restart converged for endpoint ({}, {})",
            prob.x, prob.theta
        )));
    }
    let best = outcomes
        .iter()
        .enumerate()
        .filter(|(_, (s, _))| s.action.is_finite())
        .min_by(|a, b| a.1 .0.action.total_cmp(&b.1 .0.action).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::NonConvergence("every restart has infinite action".into()))?;
    let traj = unpack(prob, &mesh, &outcomes[best].1);
    Ok(Minimum {
        u: outcomes[best].0.action,
        traj,
        restarts: outcomes.into_iter().map(|(s, _)| s).collect(),
    })
}

/// Mesh-refinement study with Richardson extrapolation.
#[derive(Clone, Debug, Serialize)]
pub struct Refinement {
    pub levels: Vec<usize>,
    pub values: Vec<f64>,
    /// Observed convergence order, clamped to `[1, 4]`.
    pub order: f64,
    /// Error estimate `ε_N` for the finest level.
    pub eps: f64,
    /// Extrapolated action.
    pub u_approx: f64,
    /// Largest knot difference `δ_N` between the two finest solutions.
    pub delta: f64,
    pub finest: Minimum,
}

pub const DEFAULT_LEVELS: [usize; 3] = [64, 128, 256];

/// Solves on each mesh in `levels` (each twice the previous) and
/// extrapolates.
pub fn refine(prob: &ActionProblem, levels: &[usize]) -> Result<Refinement> {
    if levels.len() < 2 || levels.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(domain("refinement levels must double, at least two of them"));
    }
    let mut values = Vec::with_capacity(levels.len());
    let mut sols = Vec::with_capacity(levels.len());
    for &n in levels {
        let m = minimize(&prob.with_segments(n))?;
        values.push(m.u);
        sols.push(m);
    }
    let k = values.len();
    let d_fine = values[k - 1] - values[k - 2];
    let order = if k >= 3 {
        let d_coarse = values[k - 2] - values[k - 3];
        if d_coarse * d_fine > 0.0 && d_fine != 0.0 {
            (d_coarse / d_fine).log2().clamp(1.0, 4.0)
        } else {
            1.0
        }
    } else {
        1.0
    };
    let factor = 2f64.powf(order) - 1.0;
    let eps = (d_fine.abs() / factor).max(1e-12);
    let u_approx = values[k - 1] + d_fine / factor;

    let fine = &sols[k - 1].traj;
    let coarse = &sols[k - 2].traj;
    let delta = (0..coarse.t.len())
        .map(|j| {
            (fine.x[2 * j] - coarse.x[j])
                .abs()
                .max((fine.theta[2 * j] - coarse.theta[j]).abs())
        })
        .fold(0.0, f64::max);

    Ok(Refinement {
        levels: levels.to_vec(),
        values,
        order,
        eps,
        u_approx,
        delta,
        finest: sols.pop().expect("at least two levels"),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MuReport {
    pub alpha: f64,
    pub theta: f64,
    pub mu: Vec<f64>,
    pub u_approx: Vec<f64>,
    pub eps: Vec<f64>,
    /// Largest pairwise difference of `u_approx`.
    pub spread: f64,
    /// Largest `ε_N` among the runs.
    pub eps_max: f64,
}

impl MuReport {
    pub fn independent(&self) -> bool {
        self.spread < 3.0 * self.eps_max
    }
}

/// Oracle values at the endpoint `(α, θ)` for each `μ` in `mu_list`.
pub fn verify_mu_independence(alpha: f64, theta: f64, mu_list: &[f64], levels: &[usize]) -> Result<MuReport> {
    let mut u = Vec::new();
    let mut eps = Vec::new();
    for &mu in mu_list {
        let r = refine(&ActionProblem::new(alpha, mu, alpha, theta, levels[0]), levels)?;
        u.push(r.u_approx);
        eps.push(r.eps);
    }
    let hi = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = u.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MuReport {
        alpha,
        theta,
        mu: mu_list.to_vec(),
        spread: hi - lo,
        eps_max: eps.iter().copied().fold(0.0, f64::max),
        u_approx: u,
        eps,
    })
}
