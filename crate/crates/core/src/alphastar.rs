//! The critical acceleration constant α* and the quantities it is built from.
//!
//! `τ₀ ∈ (0, 1)` is the unique root of `V(τ)² = Q(ξ(τ))`, and
//!
//! ```text
//! α* = (4/3) [ (2(1−τ₀)/(2+τ₀))^{1/3} · 2(1+τ₀)²/(2 + 3τ₀ − τ₀²) ]^{3/4}.
//! ```

use std::sync::OnceLock;

use serde::Serialize;

use crate::airy;
use crate::error::{domain, Error, Result};
use crate::qfunc::{self, alpha_bar, check_alpha};
use crate::roots;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalData {
    pub tau0: f64,
    pub alpha_star: f64,
    /// `min_θ U_{4/3}(4/3, θ)`.
    pub min_u_43: f64,
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(domain(format!("τ = {tau} is outside (0, 1)")));
    }
    Ok(())
}

/// `V(τ) = [(1−τ)^{1/2}(2+τ) / (2(1+τ)^{3/2})]^{1/3}`.
pub fn v_of_tau(tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(((1.0 - tau).sqrt() * (2.0 + tau) / (2.0 * (1.0 + tau).powf(1.5))).cbrt())
}

/// `ξ(τ) = (1−τ²)^{1/2}/(τ V(τ))`.
pub fn xi_of_tau(tau: f64) -> Result<f64> {
    let v = v_of_tau(tau)?;
    Ok((1.0 - tau * tau).sqrt() / (tau * v))
}

/// `g(τ) = V(τ)² − Q(ξ(τ))`, whose root is τ₀.
pub fn tau_residual(tau: f64) -> Result<f64> {
    let v = v_of_tau(tau)?;
    Ok(v * v - qfunc::q(xi_of_tau(tau)?)?)
}

/// Root of [`tau_residual`] on `[0.01, 0.99]` by bisection.
pub fn solve_tau0() -> Result<f64> {
    let g = |t: f64| tau_residual(t).unwrap_or(f64::NAN);
    let tau0 = roots::bisect(g, 0.01, 0.99, 1e-15)?;
    let v = v_of_tau(tau0)?;
    let arg = v.powi(4) - 1.0 / xi_of_tau(tau0)?;
    let xi0 = airy::largest_zeros()?.xi0;
    if arg <= xi0 {
        return Err(Error::Invariant(format!(
            "V(τ₀)⁴ − 1/ξ(τ₀) = {arg} is not above Ξ₀"
        )));
    }
    Ok(tau0)
}

fn alpha_from_tau(tau: f64) -> f64 {
    let inner = (2.0 * (1.0 - tau) / (2.0 + tau)).cbrt() * 2.0 * (1.0 + tau).powi(2)
        / (2.0 + 3.0 * tau - tau * tau);
    4.0 / 3.0 * inner.powf(0.75)
}

static CRITICAL: OnceLock<std::result::Result<CriticalData, String>> = OnceLock::new();

fn compute_critical() -> Result<CriticalData> {
    let tau0 = solve_tau0()?;
    let alpha_star = alpha_from_tau(tau0);
    // α* = (4/3)(1/(m + 1))^{3/4}  ⇔  m = (4/(3α*))^{4/3} − 1
    let min_u_43 = (4.0 / (3.0 * alpha_star)).powf(4.0 / 3.0) - 1.0;
    Ok(CriticalData {
        tau0,
        alpha_star,
        min_u_43,
    })
}

/// τ₀, α* and `min_θ U_{4/3}(4/3, θ)`; computed once per process.
pub fn alpha_star() -> Result<CriticalData> {
    CRITICAL
        .get_or_init(|| compute_critical().map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::NoBracket)
}

/// `min_θ U_α(α, θ) = ᾱ^{4/3}(min_θ U_{4/3}(4/3, θ) + 1) − 1`.
pub fn min_u_alpha(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let m = alpha_star()?.min_u_43;
    Ok(alpha_bar(alpha).powf(4.0 / 3.0) * (m + 1.0) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU0: f64 = 0.67290315710474732827;
    const ALPHA_STAR: f64 = 1.3151350667442873817;
    const MIN_U_43: f64 = 0.018492506895893704177;
    const V_HALF: f64 = 0.78358487081706584442;
    const XI_HALF: f64 = 2.2104188991842319635;

    #[test]
    fn v_and_xi_at_one_half() {
        assert!((v_of_tau(0.5).unwrap() - V_HALF).abs() < 1e-15);
        assert!((xi_of_tau(0.5).unwrap() - XI_HALF).abs() < 1e-14);
    }

    #[test]
    fn v_limits() {
        assert!((v_of_tau(1e-12).unwrap() - 1.0).abs() < 1e-9);
        assert!(v_of_tau(1.0 - 1e-12).unwrap() < 1e-2);
        assert!(v_of_tau(0.0).is_err());
        assert!(xi_of_tau(1.0).is_err());
    }

    #[test]
    fn bracket_signs() {
        assert!(tau_residual(0.05).unwrap() < 0.0);
        assert!(tau_residual(0.95).unwrap() > 0.0);
    }

    #[test]
    fn tau0_and_residuals() {
        let tau0 = solve_tau0().unwrap();
        assert!((tau0 - TAU0).abs() < 1e-12);
        assert!(tau_residual(tau0).unwrap().abs() < 1e-12);
        let v = v_of_tau(tau0).unwrap();
        let arg = v.powi(4) - tau0 * v / (1.0 - tau0 * tau0).sqrt();
        assert!((v * v - airy::riccati(arg).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn critical_constant() {
        let c = alpha_star().unwrap();
        assert!((c.alpha_star - ALPHA_STAR).abs() < 1e-12);
        assert!((c.alpha_star - 1.315135).abs() < 1e-5);
        assert!(c.alpha_star > 1.25 && c.alpha_star < 4.0 / 3.0);
        assert!((4.0 / 3.0 - c.alpha_star) / (4.0 / 3.0) < 0.02);
        assert!((c.min_u_43 - MIN_U_43).abs() < 1e-12);
        let back = 4.0 / 3.0 * (1.0 / (c.min_u_43 + 1.0)).powf(0.75);
        assert!((back - c.alpha_star).abs() < 1e-14);
    }

    #[test]
    fn scaled_minimum() {
        let c = alpha_star().unwrap();
        assert!(min_u_alpha(c.alpha_star).unwrap().abs() < 1e-10);
        assert!((min_u_alpha(4.0 / 3.0).unwrap() - c.min_u_43).abs() < 1e-15);
        assert!(min_u_alpha(4.0 / 3.0).unwrap() > 0.0);
        let l54 = 25.0 / 64.0 * (0.66 - std::f64::consts::LN_2);
        let m54 = min_u_alpha(1.25).unwrap();
        assert!(m54 < 0.0 && m54 <= l54);
    }
}
