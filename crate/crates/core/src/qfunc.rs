//! The implicit function `Q(θ)` defined by `Q = R(Q² − 1/θ)`, its scaled
//! family `Q_α`, and the threshold `θ⋄` where `Q(θ⋄) = θ⋄/4`.
//!
//! `Q` is evaluated through the root `ξ₀` of `E(ξ₀) = 1/θ`, after which
//! `Q(θ) = R(ξ₀)` and `ξ₀ = Q² − 1/θ` hold together.

use std::sync::OnceLock;

use serde::Serialize;

use crate::airy;
use crate::error::{domain, Error, Result};
use crate::roots;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QPoint {
    pub theta: f64,
    pub q: f64,
    /// The ξ₀ with `E(ξ₀) = 1/θ`.
    pub xi_root: f64,
}

/// `ᾱ = 3α/4`.
#[inline]
pub fn alpha_bar(alpha: f64) -> f64 {
    0.75 * alpha
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 4.0 / 3.0 + 1e-12) {
        return Err(domain(format!("α = {alpha} is outside (0, 4/3]")));
    }
    Ok(())
}

/// Solves `E(ξ) = 1/θ` for ξ in `(Ξ₀, ∞)`.
///
/// Newton on `ln E` (whose derivative is `2R − 1/E`) inside a maintained
/// bracket; steps that leave the bracket fall back to bisection, taken in
/// geometric form relative to `Ξ₀` while the bracket spans decades.
fn solve_e_inverse(theta: f64) -> Result<f64> {
    let xi0 = airy::xi0();
    let target = -theta.ln();
    let phi = |x: f64| {
        let (r, e) = airy::riccati_pair(x);
        // 2R − 1/E cancels for large ξ, where d ln E/dξ = −1/(2ξ) (1 + O(ζ⁻¹))
        let slope = if x > airy::SERIES_LIMIT { -0.5 / x } else { 2.0 * r - 1.0 / e };
        (e.ln() - target, slope)
    };

    let mut lo = xi0 + 1e-9;
    let (phi_lo, _) = phi(lo);
    if !(phi_lo > 0.0) {
        return Err(Error::NoBracket(format!(
            "θ = {theta} too small: E(Ξ₀ + 1e-9) < 1/θ"
        )));
    }
    let mut hi = 1.0_f64;
    let mut phi_hi = phi(hi).0;
    while phi_hi > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::NoBracket(format!("θ = {theta} too large")));
        }
        phi_hi = phi(hi).0;
    }
    if phi_hi == 0.0 {
        return Ok(hi);
    }

    let split = |lo: f64, hi: f64| {
        if hi - xi0 > 4.0 * (lo - xi0) {
            xi0 + ((lo - xi0) * (hi - xi0)).sqrt()
        } else {
            0.5 * (lo + hi)
        }
    };
    let mut x = split(lo, hi);
    for _ in 0..300 {
        let (f, df) = phi(x);
        if f == 0.0 {
            return Ok(x);
        }
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - f / df;
        let next = if newton > lo && newton < hi && df.is_finite() {
            newton
        } else {
            split(lo, hi)
        };
        let tol = 4.0 * f64::EPSILON * next.abs().max(1e-3);
        if (next - x).abs() <= tol || hi - lo <= tol {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NonConvergence(format!("E(ξ) = 1/θ for θ = {theta}")))
}

/// Evaluates `Q(θ)` for `θ > 0`.
pub fn q_of_theta(theta: f64) -> Result<QPoint> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(domain(format!("θ = {theta} must be positive and finite")));
    }
    let xi_root = solve_e_inverse(theta)?;
    let (q, _) = airy::riccati_pair(xi_root);
    Ok(QPoint { theta, q, xi_root })
}

/// Shorthand for `q_of_theta(theta)?.q`.
pub fn q(theta: f64) -> Result<f64> {
    Ok(q_of_theta(theta)?.q)
}

/// `Q_α(θ) = ᾱ^{2/3} Q(θ/ᾱ^{2/3})`.
pub fn q_alpha(theta: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let s = alpha_bar(alpha).powf(2.0 / 3.0);
    Ok(s * q(theta / s)?)
}

static THETA_DIAMOND: OnceLock<std::result::Result<f64, String>> = OnceLock::new();

fn compute_theta_diamond() -> Result<f64> {
    let g = |t: f64| q(t).map(|v| v / t - 0.25).unwrap_or(f64::NAN);
    let mut bracket = None;
    let mut prev = 0.5;
    let mut g_prev = g(prev);
    for k in 0..8 {
        let t = 2f64.powi(k);
        let gt = g(t);
        if g_prev < 0.0 && gt >= 0.0 {
            bracket = Some((prev, t));
            break;
        }
        prev = t;
        g_prev = gt;
    }
    let (a, b) = bracket
        .ok_or_else(|| Error::NoBracket("Q(θ)/θ − 1/4 on θ ∈ {2^k}".into()))?;
    roots::brent(g, a, b, 1e-15)
}

/// The threshold `θ⋄`, unique root of `Q(θ) = θ/4`; computed once.
pub fn theta_diamond() -> Result<f64> {
    THETA_DIAMOND
        .get_or_init(|| compute_theta_diamond().map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::NoBracket)
}

/// `θ⋄_α = ᾱ^{2/3} θ⋄`.
pub fn theta_diamond_alpha(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(alpha_bar(alpha).powf(2.0 / 3.0) * theta_diamond()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q_AT_HALF: f64 = -0.69618881654064838080;
    const Q_AT_1: f64 = 0.019346166043849038507;
    const XI_AT_1: f64 = -0.99962572585940382244;
    const Q_AT_2: f64 = 0.80672741715882360102;
    const Q_AT_10: f64 = 4.9900394524230004492;
    const XI_AT_10: f64 = 24.800493736738038164;
    const THETA_DIAMOND: f64 = 1.3457872366377596036;

    #[test]
    fn reference_values() {
        let p = q_of_theta(1.0).unwrap();
        assert!((p.q - Q_AT_1).abs() < 1e-12);
        assert!((p.xi_root - XI_AT_1).abs() < 1e-12);
        assert!((q(0.5).unwrap() - Q_AT_HALF).abs() < 1e-12);
        assert!((q(2.0).unwrap() - Q_AT_2).abs() < 1e-12);
        let p10 = q_of_theta(10.0).unwrap();
        assert!((p10.q - Q_AT_10).abs() < 1e-11);
        assert!((p10.xi_root - XI_AT_10).abs() < 1e-10);
    }

    #[test]
    fn self_consistency() {
        for &t in &[0.05, 0.3, 1.0, 3.0, 20.0, 500.0] {
            let p = q_of_theta(t).unwrap();
            assert!((p.xi_root - (p.q * p.q - 1.0 / t)).abs() < 1e-10 * p.q.abs().max(1.0));
            let r = airy::riccati(p.q * p.q - 1.0 / t).unwrap();
            assert!((p.q - r).abs() < 1e-10 * p.q.abs().max(1.0), "θ={t}");
            assert!((airy::efunc(p.xi_root).unwrap() * t - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_of_q_sits_at_minus_inverse_xi1() {
        let z = airy::largest_zeros().unwrap();
        let t = -1.0 / z.xi1;
        assert!((t - 0.98155).abs() < 1e-4);
        let p = q_of_theta(t).unwrap();
        assert!(p.q.abs() < 1e-12);
        assert!((p.xi_root - z.xi1).abs() < 1e-12);
    }

    #[test]
    fn large_theta_limit() {
        let p = q_of_theta(1e6).unwrap();
        let ratio = p.q / 1e6;
        assert!(ratio > 0.49 && ratio < 0.51);
    }

    #[test]
    fn theta_diamond_value() {
        let td = theta_diamond().unwrap();
        assert!((td - THETA_DIAMOND).abs() < 1e-12);
        assert!((q(td).unwrap() / td - 0.25).abs() < 1e-10);
        assert!(q(2.0 * td).unwrap() / (2.0 * td) > 0.25);
        assert!(q(0.5 * td).unwrap() / (0.5 * td) < 0.25);
    }

    #[test]
    fn scaled_family() {
        let t = 0.8;
        assert_eq!(q_alpha(t, 4.0 / 3.0).unwrap(), q(t).unwrap());
        let alpha = 1.2;
        let s = alpha_bar(alpha).powf(2.0 / 3.0);
        assert!((q_alpha(s * t, alpha).unwrap() - s * q(t).unwrap()).abs() < 1e-14);
        let tda = theta_diamond_alpha(alpha).unwrap();
        assert!((q_alpha(tda, alpha).unwrap() - tda / 4.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(q_of_theta(0.0), Err(Error::Domain(_))));
        assert!(q_of_theta(-1.0).is_err());
        assert!(q_alpha(1.0, 1.5).is_err());
        assert!(q_alpha(1.0, 0.0).is_err());
    }
}
