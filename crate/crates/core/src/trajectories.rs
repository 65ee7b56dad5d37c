//! Optimal trajectories ending on the line `{y = α}`, written in the
//! self-similar variables `s = log t`, `y = x/t^{3/2}`, `η = θ/t` with
//! momenta `(p, q)`.
//!
//! An optimal path ending at `(α, θ)` follows the line for `s ≤ s⊢` and then
//! leaves it on a free-motion arc. Endpoints with `θ ≥ θ⋄_α` never leave
//! (`s⊢ = 0`).
//!
//! All computations run with `ᾱ = 3α/4` normalized to one and are rescaled
//! on the way out: with `k = ᾱ^{1/3}`, `y` scales by `k³`, `η`, `q` by `k²`,
//! `p` by `k`, and `U + 1` by `k⁴`.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::alphastar;
use crate::error::{domain, Error, Result};
use crate::ode::{dopri5, OdeOptions};
use crate::qfunc::{self, alpha_bar, check_alpha};
use crate::quad;
use crate::roots;

/// `y` of the line in the normalized frame.
const LINE_Y: f64 = 4.0 / 3.0;

/// Number of τ samples in the contact inversion table.
pub const TAU_TABLE_SIZE: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhasePoint {
    pub s: f64,
    pub y: f64,
    pub eta: f64,
    pub p: f64,
    pub q: f64,
}

/// Integration constants of a free-motion arc and its endpoint at `s = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FreeMotionParams {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub x_end: f64,
    pub theta_end: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContactData {
    pub s_contact: f64,
    /// `e^{s⊢/2}`.
    pub tau: f64,
    /// `η(s⊢)`.
    pub theta_contact: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValueSample {
    pub theta: f64,
    pub u: f64,
    pub contact: ContactData,
    pub params: FreeMotionParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineSample {
    pub s: f64,
    pub eta: f64,
    pub q: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaMin {
    pub theta: f64,
    pub u: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub tau: f64,
}

/// One sample of an exported trajectory in both coordinate systems.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajRow {
    pub s: f64,
    pub t: f64,
    pub y: f64,
    pub eta: f64,
    pub p: f64,
    pub q: f64,
    pub x: f64,
    pub theta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub alpha: f64,
    pub theta: f64,
    pub contact: ContactData,
    pub params: FreeMotionParams,
    /// Rows in increasing `s`; `s⊢` is always one of them.
    pub rows: Vec<TrajRow>,
}

impl TrajRow {
    pub fn phase(&self) -> PhasePoint {
        PhasePoint {
            s: self.s,
            y: self.y,
            eta: self.eta,
            p: self.p,
            q: self.q,
        }
    }
}

fn frame(alpha: f64) -> f64 {
    alpha_bar(alpha).cbrt()
}

/// `H = −(3/2)yp − ηq + ηp² + q² + 1 − μ·1{y < α}`.
pub fn hamiltonian(pt: &PhasePoint, alpha: f64, mu: f64) -> f64 {
    let sat = if pt.y < alpha { mu } else { 0.0 };
    -1.5 * pt.y * pt.p - pt.eta * pt.q + pt.eta * pt.p * pt.p + pt.q * pt.q + 1.0 - sat
}

/// Running cost `ηp² + q² − 1` of an optimal path off the saturated zone.
pub fn running_cost(pt: &PhasePoint) -> f64 {
    pt.eta * pt.p * pt.p + pt.q * pt.q - 1.0
}

/// Closed-form free motion.
pub fn free_motion_eval(params: &FreeMotionParams, s: f64) -> PhasePoint {
    let FreeMotionParams {
        a,
        b,
        x_end: x,
        theta_end: theta,
    } = *params;
    let e = s.exp();
    let ei = 1.0 / e;
    let h = (0.5 * s).exp();
    let hi = 1.0 / h;
    let h3 = h * e;
    let hi3 = hi * ei;
    let p = a * h;
    let q = b + a * a * (1.0 - e);
    let eta = theta * ei + 2.0 * b * (1.0 - ei) + a * a * (2.0 - e - ei);
    let y = x * hi3
        + 2.0 * theta * a * (hi - hi3)
        + 2.0 * b * a * (h + hi3 - 2.0 * hi)
        + 2.0 / 3.0 * a * a * a * (hi3 - 3.0 * hi + 3.0 * h - h3);
    PhasePoint { s, y, eta, p, q }
}

fn line_rhs(_s: f64, st: &[f64; 2]) -> [f64; 2] {
    let eta = st[0];
    if !(eta > 0.0) {
        return [f64::NAN; 2];
    }
    match qfunc::q(eta) {
        Ok(q) => [-eta + 2.0 * q, -1.0 / (eta * eta)],
        Err(_) => [f64::NAN; 2],
    }
}

/// Integrates the dynamics on the line, `η̇ = −η + 2q`, `q̇ = −ᾱ²/η²`, from
/// `(η, q) = (eta0, q0)` at `s_start` to each time in `s_out`.
///
/// `η` follows the branch `q = Q_α(η)` selected by the initial data, while
/// `q` is accumulated separately from `q̇ = −ᾱ²/η²`; the first integral
/// `q = Q_α(η)` is therefore a genuine check on the result.
pub fn line_dynamics_integrate(
    eta0: f64,
    q0: f64,
    alpha: f64,
    s_start: f64,
    s_out: &[f64],
) -> Result<Vec<LineSample>> {
    check_alpha(alpha)?;
    if !(eta0 > 0.0) {
        return Err(domain(format!("η₀ = {eta0} must be positive")));
    }
    let branch = qfunc::q_alpha(eta0, alpha)?;
    if (q0 - branch).abs() > 1e-9 * branch.abs().max(1.0) {
        return Err(domain(format!(
            "q₀ = {q0} is not on the branch Q_α(η₀) = {branch}"
        )));
    }
    let k2 = frame(alpha).powi(2);
    let opts = OdeOptions {
        rtol: 1e-10,
        atol: 1e-12,
        ..OdeOptions::default()
    };
    let states = dopri5(line_rhs, s_start, [eta0 / k2, q0 / k2], s_out, &opts)?;
    Ok(s_out
        .iter()
        .zip(states)
        .map(|(&s, st)| LineSample {
            s,
            eta: k2 * st[0],
            q: k2 * st[1],
        })
        .collect())
}

/// Contact data in the normalized frame, parametrized by `τ = e^{s⊢/2}`.
#[derive(Clone, Copy, Debug)]
struct Contact {
    tau: f64,
    theta_c: f64,
    a: f64,
    b: f64,
    theta: f64,
}

/// Residual of `3Q(θ⊢)/θ⊢ = (1−τ²)/(τ²θ⊢³) + τ(τ+2)/(1+τ)²`.
fn matching_residual(tau: f64, theta_c: f64, q_c: f64) -> f64 {
    3.0 * q_c / theta_c
        - (1.0 - tau * tau) / (tau * tau * theta_c.powi(3))
        - tau * (tau + 2.0) / (1.0 + tau).powi(2)
}

fn contact_at_tau(tau: f64) -> Result<Contact> {
    let td = qfunc::theta_diamond()?;
    let theta_c = if tau >= 1.0 {
        td
    } else {
        let h = |t: f64| {
            qfunc::q(t)
                .map(|q| matching_residual(tau, t, q))
                .unwrap_or(f64::NAN)
        };
        let mut lo = td;
        while h(lo) > 0.0 {
            lo *= 0.5;
        }
        let mut hi = td;
        while h(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::NoBracket(format!("θ⊢ for τ = {tau}")));
            }
        }
        roots::brent(h, lo, hi, 1e-15 * hi)?
    };
    let one_m = 1.0 - tau * tau;
    let a = 1.0 / (tau * theta_c);
    let b = qfunc::q(theta_c)? - a * a * one_m;
    let theta = tau * tau * theta_c + 2.0 * one_m * b + a * a * one_m * one_m;
    Ok(Contact {
        tau,
        theta_c,
        a,
        b,
        theta,
    })
}

static TAU_TABLE: OnceLock<std::result::Result<Vec<(f64, f64)>, String>> = OnceLock::new();

fn build_tau_table() -> Result<Vec<(f64, f64)>> {
    let rows: Result<Vec<(f64, f64)>> = (1..=TAU_TABLE_SIZE)
        .into_par_iter()
        .map(|k| {
            let tau = k as f64 / TAU_TABLE_SIZE as f64;
            contact_at_tau(tau).map(|c| (tau, c.theta))
        })
        .collect();
    let rows = rows?;
    if let Some(w) = rows.windows(2).find(|w| w[1].1 <= w[0].1) {
        return Err(Error::Invariant(format!(
            "θ(τ) not increasing between τ = {} and τ = {}",
            w[0].0, w[1].0
        )));
    }
    Ok(rows)
}

/// Samples `(τ, θ(τ))` of the contact parametrization, normalized frame.
/// Built once and checked for strict monotonicity.
pub fn tau_table() -> Result<&'static [(f64, f64)]> {
    match TAU_TABLE.get_or_init(|| build_tau_table().map_err(|e| e.to_string())) {
        Ok(v) => Ok(v),
        Err(msg) => Err(Error::Invariant(msg.clone())),
    }
}

fn contact_normalized(theta_n: f64) -> Result<Contact> {
    let td = qfunc::theta_diamond()?;
    // tolerate the rounding of θ⋄_α/ᾱ^{2/3}
    if theta_n >= td * (1.0 - 8.0 * f64::EPSILON) {
        let q = qfunc::q(theta_n)?;
        return Ok(Contact {
            tau: 1.0,
            theta_c: theta_n,
            a: 1.0 / theta_n,
            b: q,
            theta: theta_n,
        });
    }
    let table = tau_table()?;
    let k = table.partition_point(|&(_, th)| th <= theta_n);
    if k == 0 {
        return Err(Error::NoSolution(format!(
            "normalized θ = {theta_n} lies below θ(τ = {})",
            table[0].0
        )));
    }
    let (lo, hi) = (table[k - 1].0, table[k].0);
    let tau = roots::brent(
        |t| contact_at_tau(t).map(|c| c.theta - theta_n).unwrap_or(f64::NAN),
        lo,
        hi,
        1e-16,
    )?;
    contact_at_tau(tau)
}

/// Contact time and height for the optimal path ending at `(α, θ)`.
pub fn contact_solve(theta: f64, alpha: f64) -> Result<ContactData> {
    check_alpha(alpha)?;
    if !(theta > 0.0) {
        return Err(domain(format!("θ = {theta} must be positive")));
    }
    let k2 = frame(alpha).powi(2);
    let c = contact_normalized(theta / k2)?;
    Ok(ContactData {
        s_contact: 2.0 * c.tau.ln(),
        tau: c.tau,
        theta_contact: if c.tau >= 1.0 { theta } else { k2 * c.theta_c },
    })
}

/// Residual of the contact matching condition for `data` (zero when exact).
pub fn contact_residual(data: &ContactData, alpha: f64) -> Result<f64> {
    let k2 = frame(alpha).powi(2);
    let tc = data.theta_contact / k2;
    Ok(matching_residual(data.tau, tc, qfunc::q(tc)?))
}

/// Value `U_α(α, θ)` and the optimal arc ending at `(α, θ)`.
pub fn value_on_line(theta: f64, alpha: f64) -> Result<ValueSample> {
    check_alpha(alpha)?;
    if !(theta > 0.0) {
        return Err(domain(format!("θ = {theta} must be positive")));
    }
    let k = frame(alpha);
    let k2 = k * k;
    let tn = theta / k2;
    let c = contact_normalized(tn)?;
    let u_n = 2.0 * c.a + tn * c.b - tn * c.a * c.a - c.b * c.b - 1.0;
    Ok(ValueSample {
        theta,
        u: k2 * k2 * (u_n + 1.0) - 1.0,
        contact: ContactData {
            s_contact: 2.0 * c.tau.ln(),
            tau: c.tau,
            theta_contact: if c.tau >= 1.0 { theta } else { k2 * c.theta_c },
        },
        params: FreeMotionParams {
            a: k * c.a,
            b: k2 * c.b,
            x_end: alpha,
            theta_end: theta,
        },
    })
}

/// Minimizer of `θ ↦ U_α(α, θ)` with the contact data of its trajectory.
pub fn theta_min(alpha: f64) -> Result<ThetaMin> {
    check_alpha(alpha)?;
    let tau = alphastar::alpha_star()?.tau0;
    let one_m = 1.0 - tau * tau;
    let a = ((1.0 - tau).powi(2) * (2.0 + tau) / (2.0 * one_m.powi(3))).cbrt();
    let theta_n = tau / a + a * a * one_m * one_m;
    let u_n = a * (2.0 - tau) - a.powi(4) * one_m * one_m - 1.0;
    let k = frame(alpha);
    let k2 = k * k;
    Ok(ThetaMin {
        theta: k2 * theta_n,
        u: k2 * k2 * (u_n + 1.0) - 1.0,
        a: k * a,
        tau,
    })
}

/// Samples the optimal path ending at `(α, θ)` on a uniform grid of
/// `n_samples` points in `[s_min, 0]`, with `s⊢` inserted.
pub fn export_trajectory(theta: f64, alpha: f64, n_samples: usize, s_min: f64) -> Result<Trajectory> {
    if n_samples < 2 {
        return Err(domain("need at least two samples"));
    }
    if !(s_min < 0.0) {
        return Err(domain(format!("s_min = {s_min} must be negative")));
    }
    let s_c = contact_solve(theta, alpha)?.s_contact;
    let mut grid: Vec<f64> = (0..n_samples)
        .map(|i| s_min * (1.0 - i as f64 / (n_samples - 1) as f64))
        .collect();
    if s_c > s_min && s_c < 0.0 && !grid.iter().any(|&s| (s - s_c).abs() < 1e-12) {
        let at = grid.partition_point(|&s| s < s_c);
        grid.insert(at, s_c);
    }
    trajectory_at(theta, alpha, &grid)
}

/// Samples the optimal path ending at `(α, θ)` at the given increasing,
/// nonpositive self-similar times.
pub fn trajectory_at(theta: f64, alpha: f64, s_values: &[f64]) -> Result<Trajectory> {
    if s_values.windows(2).any(|w| !(w[1] > w[0])) || s_values.last().is_some_and(|&s| s > 0.0) {
        return Err(domain("sample times must be increasing and nonpositive"));
    }
    let sample = value_on_line(theta, alpha)?;
    let k = frame(alpha);
    let k2 = k * k;
    let k3 = k2 * k;
    let s_c = sample.contact.s_contact;

    let free = FreeMotionParams {
        a: sample.params.a / k,
        b: sample.params.b / k2,
        x_end: LINE_Y,
        theta_end: theta / k2,
    };
    let split = s_values.partition_point(|&s| s < s_c);
    let mut rows = Vec::with_capacity(s_values.len());

    if split > 0 {
        let eta_c = sample.contact.theta_contact / k2;
        let q_c = qfunc::q(eta_c)?;
        let backward: Vec<f64> = s_values[..split].iter().rev().copied().collect();
        let states = dopri5(
            line_rhs,
            s_c,
            [eta_c, q_c],
            &backward,
            &OdeOptions::default(),
        )?;
        for (&s, st) in backward.iter().zip(states).rev() {
            rows.push(PhasePoint {
                s,
                y: LINE_Y,
                eta: st[0],
                p: 1.0 / st[0],
                q: st[1],
            });
        }
    }
    for &s in &s_values[split..] {
        rows.push(free_motion_eval(&free, s));
    }

    let rows = rows
        .into_iter()
        .map(|pt| {
            let t = pt.s.exp();
            let (y, eta) = (k3 * pt.y, k2 * pt.eta);
            TrajRow {
                s: pt.s,
                t,
                y,
                eta,
                p: k * pt.p,
                q: k2 * pt.q,
                x: t.powf(1.5) * y,
                theta: t * eta,
            }
        })
        .collect();
    Ok(Trajectory {
        alpha,
        theta,
        contact: sample.contact,
        params: sample.params,
        rows,
    })
}

/// `∫₀¹ L dt = ∫ L e^s ds` along an exported trajectory, by Simpson's rule
/// on each side of `s⊢`. The part below `s_min` is approximated by
/// `L(s_min) e^{s_min}`.
pub fn action_quadrature(traj: &Trajectory) -> f64 {
    let s_c = traj.contact.s_contact;
    let (xs, fs): (Vec<f64>, Vec<f64>) = traj
        .rows
        .iter()
        .map(|r| (r.s, running_cost(&r.phase()) * r.t))
        .unzip();
    let cut = xs.partition_point(|&s| s < s_c);
    let cut = cut.min(xs.len() - 1);
    let tail = fs[0];
    quad::simpson(&xs[..=cut], &fs[..=cut]) + quad::simpson(&xs[cut..], &fs[cut..]) + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR_THIRDS: f64 = 4.0 / 3.0;

    #[test]
    fn zero_momentum_arc() {
        let params = FreeMotionParams {
            a: 0.0,
            b: 0.0,
            x_end: 0.7,
            theta_end: 1.3,
        };
        for &s in &[-2.0, -0.5, 0.0] {
            let pt = free_motion_eval(&params, s);
            assert!((pt.y - 0.7 * (-1.5 * s).exp()).abs() < 1e-14);
            assert!((pt.eta - 1.3 * (-s).exp()).abs() < 1e-14);
            assert_eq!((pt.p, pt.q), (0.0, 0.0));
        }
    }

    #[test]
    fn linear_problem_arc() {
        let params = FreeMotionParams {
            a: 1.0,
            b: 0.0,
            x_end: FOUR_THIRDS,
            theta_end: 1.0,
        };
        for &s in &[-3.0, -1.0, -0.2, 0.0] {
            let pt = free_motion_eval(&params, s);
            let e = s.exp();
            assert!((pt.y - (2.0 * (0.5 * s).exp() - 2.0 / 3.0 * (1.5 * s).exp())).abs() < 1e-13);
            assert!((pt.eta - (2.0 - e)).abs() < 1e-13);
            let t = e;
            assert!((t.powf(1.5) * pt.y - (2.0 * t * t - 2.0 / 3.0 * t * t * t)).abs() < 1e-13);
            assert!(running_cost(&pt).abs() < 1e-13);
        }
    }

    #[test]
    fn endpoint_recovered_at_zero() {
        let params = FreeMotionParams {
            a: 0.4,
            b: -0.3,
            x_end: 1.1,
            theta_end: 0.9,
        };
        let pt = free_motion_eval(&params, 0.0);
        assert_eq!((pt.y, pt.eta, pt.p, pt.q), (1.1, 0.9, 0.4, -0.3));
    }

    #[test]
    fn free_motion_solves_hamiltonian_system() {
        let params = FreeMotionParams {
            a: 0.8,
            b: 0.2,
            x_end: 1.2,
            theta_end: 0.7,
        };
        let h = 1e-5;
        for &s in &[-2.0, -0.7, -0.1] {
            let pt = free_motion_eval(&params, s);
            let fwd = free_motion_eval(&params, s + h);
            let bwd = free_motion_eval(&params, s - h);
            let dy = (fwd.y - bwd.y) / (2.0 * h);
            let deta = (fwd.eta - bwd.eta) / (2.0 * h);
            let dq = (fwd.q - bwd.q) / (2.0 * h);
            assert!((dy - (-1.5 * pt.y + 2.0 * pt.eta * pt.p)).abs() < 1e-6);
            assert!((deta - (-pt.eta + 2.0 * pt.q)).abs() < 1e-6);
            assert!((dq + pt.p * pt.p).abs() < 1e-6);
            let cost0 = params.theta_end * params.a.powi(2) + params.b.powi(2) - 1.0;
            assert!((running_cost(&pt) - cost0).abs() < 1e-12);
        }
    }

    #[test]
    fn line_dynamics_keep_first_integral() {
        let td = qfunc::theta_diamond().unwrap();
        let s: Vec<f64> = (1..=40).map(|k| -0.5 * k as f64).collect();
        let path = line_dynamics_integrate(td, td / 4.0, FOUR_THIRDS, 0.0, &s).unwrap();
        let mut prev = td;
        for pt in &path {
            let drift = (pt.q - qfunc::q(pt.eta).unwrap()).abs();
            assert!(drift < 1e-6, "drift {drift} at s = {}", pt.s);
            assert!(pt.eta >= prev);
            prev = pt.eta;
        }
    }

    #[test]
    fn line_dynamics_rejects_off_branch_data() {
        assert!(line_dynamics_integrate(1.0, 0.5, FOUR_THIRDS, 0.0, &[-1.0]).is_err());
        assert!(line_dynamics_integrate(-1.0, 0.0, FOUR_THIRDS, 0.0, &[-1.0]).is_err());
    }

    #[test]
    fn contact_at_threshold_is_immediate() {
        let td = qfunc::theta_diamond().unwrap();
        let c = contact_solve(td, FOUR_THIRDS).unwrap();
        assert_eq!(c.s_contact, 0.0);
        assert_eq!(c.tau, 1.0);
        let alpha = 1.2;
        let c = contact_solve(qfunc::theta_diamond_alpha(alpha).unwrap(), alpha).unwrap();
        assert_eq!(c.s_contact, 0.0);
    }

    #[test]
    fn contact_below_threshold() {
        let td = qfunc::theta_diamond().unwrap();
        let c = contact_solve(0.5 * td, FOUR_THIRDS).unwrap();
        assert!(c.s_contact < 0.0 && c.tau < 1.0);
        assert!((c.tau - (0.5 * c.s_contact).exp()).abs() < 1e-15);
        assert!(c.theta_contact >= td - 1e-9);
        assert!(contact_residual(&c, FOUR_THIRDS).unwrap().abs() < 1e-10);
        let v = value_on_line(0.5 * td, FOUR_THIRDS).unwrap();
        let arc = free_motion_eval(&v.params, c.s_contact);
        assert!((arc.eta - c.theta_contact).abs() < 1e-10);
        assert!((arc.y - FOUR_THIRDS).abs() < 1e-10);
        assert!((arc.q - qfunc::q(c.theta_contact).unwrap()).abs() < 1e-10);
        assert!((arc.p - 1.0 / c.theta_contact).abs() < 1e-10);
    }

    #[test]
    fn tau_table_is_monotone_and_ends_at_threshold() {
        let table = tau_table().unwrap();
        assert_eq!(table.len(), TAU_TABLE_SIZE);
        let (tau, th) = *table.last().unwrap();
        assert_eq!(tau, 1.0);
        assert_eq!(th, qfunc::theta_diamond().unwrap());
        assert!(table[0].1 < 0.0);
    }

    #[test]
    fn value_is_continuous_at_threshold() {
        let td = qfunc::theta_diamond().unwrap();
        let l2 = value_on_line(td - 1e-9, FOUR_THIRDS).unwrap().u;
        let r2 = value_on_line(td + 1e-9, FOUR_THIRDS).unwrap().u;
        assert!((l2 - r2).abs() < 1e-8);
    }

    #[test]
    fn value_is_convex() {
        let us: Vec<f64> = (0..60)
            .map(|k| value_on_line(0.2 + 0.05 * k as f64, FOUR_THIRDS).unwrap().u)
            .collect();
        for w in us.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] > 0.0);
        }
    }

    #[test]
    fn value_matches_hamiltonian_at_endpoint() {
        for &(theta, alpha) in &[(0.6, FOUR_THIRDS), (2.0, FOUR_THIRDS), (0.9, 1.25)] {
            let v = value_on_line(theta, alpha).unwrap();
            let pt = PhasePoint {
                s: 0.0,
                y: alpha,
                eta: theta,
                p: v.params.a,
                q: v.params.b,
            };
            assert!((v.u + hamiltonian(&pt, alpha, 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn minimizer_closed_form() {
        let crit = alphastar::alpha_star().unwrap();
        let m = theta_min(FOUR_THIRDS).unwrap();
        assert!((m.u - crit.min_u_43).abs() < 1e-10);
        let tau = m.tau;
        let theta_c = 1.0 / (tau * m.a);
        let q_c = qfunc::q(theta_c).unwrap();
        assert!((q_c - m.a * m.a * (1.0 - tau * tau)).abs() < 1e-9);
        assert!((q_c - (1.0 / (tau * tau) - 1.0) / (theta_c * theta_c)).abs() < 1e-9);
        let v = value_on_line(m.theta, FOUR_THIRDS).unwrap();
        assert!((v.u - crit.min_u_43).abs() < 1e-8);
        assert!(v.params.b.abs() < 1e-8);
    }

    #[test]
    fn minimizer_rescales() {
        let crit = alphastar::alpha_star().unwrap();
        let m = theta_min(crit.alpha_star).unwrap();
        assert!(m.u.abs() < 1e-10);
        let v = value_on_line(m.theta, crit.alpha_star).unwrap();
        assert!(v.u.abs() < 1e-8);
    }

    #[test]
    fn exported_path_on_line_above_threshold() {
        let td = qfunc::theta_diamond().unwrap();
        let tr = export_trajectory(1.5 * td, FOUR_THIRDS, 61, -6.0).unwrap();
        for r in &tr.rows {
            assert!((r.x - FOUR_THIRDS * r.t.powf(1.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn exported_path_below_threshold() {
        let tr = export_trajectory(0.8, FOUR_THIRDS, 301, -15.0).unwrap();
        let s_c = tr.contact.s_contact;
        let i = tr.rows.iter().position(|r| r.s == s_c).unwrap();
        let arc = free_motion_eval(&tr.params, s_c);
        let r = tr.rows[i];
        assert!((r.eta - arc.eta).abs() < 1e-8);
        assert!((r.q - arc.q).abs() < 1e-8);
        assert!((r.p - arc.p).abs() < 1e-8);
        for w in tr.rows.windows(2) {
            assert!(w[1].eta <= w[0].eta + 1e-12);
        }
        assert!(tr.rows.iter().all(|r| r.y >= FOUR_THIRDS - 1e-9));
    }

    #[test]
    fn quadrature_reproduces_value() {
        let v = value_on_line(0.8, FOUR_THIRDS).unwrap();
        let tr = export_trajectory(0.8, FOUR_THIRDS, 4001, -30.0).unwrap();
        assert!((action_quadrature(&tr) - v.u).abs() < 1e-6);
    }
}
