//! Airy function Ai, its derivative, and the logarithmic-derivative family
//! built on top of it:
//!
//! * `R(ξ) = −Ai′(ξ)/Ai(ξ)`, which solves the Riccati equation `R′ = R² − ξ`;
//! * `E(ξ) = R(ξ)² − ξ`, a decreasing bijection of `(Ξ₀, ∞)` onto `(0, ∞)`;
//! * `F(ξ) = E² + 2R²E − R`, which is positive on `(Ξ₀, ∞)`.
//!
//! `Ξ₀` is the largest zero of Ai, where `R` has a pole.
//!
//! Ai and Ai′ come from the two Maclaurin series for `|ξ| ≤ 8` and from the
//! large-argument asymptotic expansion above that. The series alternate in
//! effective sign once combined, so they are summed in double-double
//! arithmetic; at `ξ = 8` the individual terms exceed the result by fourteen
//! orders of magnitude.

mod dd;

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::roots;
use dd::Dd;

/// Switch point between the Maclaurin series and the asymptotic expansion.
pub const SERIES_LIMIT: f64 = 8.0;

/// Ai(0) = 3^{-2/3}/Γ(2/3), as a double-double.
const AI_0: Dd = Dd::new(0.3550280538878172, 2.05233632436212e-17);
/// −Ai′(0) = 3^{-1/3}/Γ(1/3), as a double-double.
const NEG_AIP_0: Dd = Dd::new(0.2588194037928068, -2.522243111610832e-17);

const FRAC_1_2SQRTPI: f64 = 0.28209479177387814; // 1/(2√π)

/// Pointwise value of Ai and Ai′.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AiryEval {
    pub xi: f64,
    pub ai: f64,
    pub ai_prime: f64,
}

/// Largest zeros of Ai (`xi0`) and of Ai′ (`xi1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AiryZeros {
    pub xi0: f64,
    pub xi1: f64,
}

fn series_dd(xi: f64) -> (Dd, Dd) {
    let x = Dd::from_f64(xi);
    let x2 = x * x;
    let x3 = x2 * x;
    // f, g and their derivatives: Ai = c1 f − c2 g, Ai′ = c1 f′ − c2 g′.
    let mut f_term = Dd::from_f64(1.0);
    let mut f_sum = f_term;
    let mut g_term = x;
    let mut g_sum = g_term;
    let mut fp_term = x2.div_f64(2.0);
    let mut fp_sum = fp_term;
    let mut gp_term = Dd::from_f64(1.0);
    let mut gp_sum = gp_term;
    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        f_term = (f_term * x3).div_f64(k3 * (k3 - 1.0));
        g_term = (g_term * x3).div_f64((k3 + 1.0) * k3);
        gp_term = (gp_term * x3).div_f64(k3 * (k3 - 2.0));
        if k >= 2 {
            fp_term = (fp_term * x3).div_f64((k3 - 1.0) * (k3 - 3.0));
            fp_sum = fp_sum + fp_term;
        }
        f_sum = f_sum + f_term;
        g_sum = g_sum + g_term;
        gp_sum = gp_sum + gp_term;
        let scale = f_sum.hi.abs().max(g_sum.hi.abs()).max(1.0);
        let biggest = f_term
            .hi
            .abs()
            .max(g_term.hi.abs())
            .max(fp_term.hi.abs())
            .max(gp_term.hi.abs());
        if k > 3 && biggest < 1e-34 * scale {
            break;
        }
    }
    let ai = AI_0 * f_sum - NEG_AIP_0 * g_sum;
    let aip = AI_0 * fp_sum - NEG_AIP_0 * gp_sum;
    (ai, aip)
}

/// Ai and Ai′ from the Maclaurin series alone.
pub fn ai_series(xi: f64) -> (f64, f64) {
    let (a, b) = series_dd(xi);
    (a.to_f64(), b.to_f64())
}

/// Truncated asymptotic sums `U = Σ(−1)^k u_k ζ^{−k}`, `V = Σ(−1)^k v_k ζ^{−k}`
/// and `D = V − U`, with `ζ = (2/3) ξ^{3/2}`.
fn asymptotic_sums(xi: f64) -> (f64, f64, f64) {
    let zeta = 2.0 / 3.0 * xi * xi.sqrt();
    let mut u_k = 1.0;
    let mut u = 1.0;
    let mut v = 1.0;
    let mut d = 0.0;
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        u_k *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v_k = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u_k;
        pow *= -1.0 / zeta;
        let tu = u_k * pow;
        let tv = v_k * pow;
        let size = tu.abs().max(tv.abs());
        // stop at the smallest term of the divergent expansion
        if size > last {
            break;
        }
        u += tu;
        v += tv;
        d += tv - tu;
        last = size;
        if size < 1e-17 {
            break;
        }
    }
    (u, v, d)
}

/// Ai and Ai′ from the asymptotic expansion (meaningful for large positive ξ).
pub fn ai_asymptotic(xi: f64) -> (f64, f64) {
    let (u, v, _) = asymptotic_sums(xi);
    let zeta = 2.0 / 3.0 * xi * xi.sqrt();
    let q = xi.sqrt().sqrt();
    let decay = (-zeta).exp();
    (
        FRAC_1_2SQRTPI / q * decay * u,
        -FRAC_1_2SQRTPI * q * decay * v,
    )
}

/// Evaluates Ai and Ai′. Values underflow to zero beyond ξ ≈ 104; use
/// [`riccati`] for the logarithmic derivative in that range.
pub fn ai_eval(xi: f64) -> AiryEval {
    let (ai, ai_prime) = if xi <= SERIES_LIMIT {
        ai_series(xi)
    } else {
        ai_asymptotic(xi)
    };
    AiryEval { xi, ai, ai_prime }
}

static ZEROS: OnceLock<std::result::Result<AiryZeros, String>> = OnceLock::new();

fn compute_zeros() -> Result<AiryZeros> {
    let locate = |f: &dyn Fn(f64) -> f64, what: &str| -> Result<f64> {
        let (lo, hi) = roots::scan_bracket(f, -3.0, 0.0, 0.01)
            .ok_or_else(|| Error::NoBracket(format!("no sign change of {what} on [-3, 0]")))?;
        roots::bisect(f, lo, hi, 1e-15)
    };
    let xi0 = locate(&|x| ai_series(x).0, "Ai")?;
    let xi1 = locate(&|x| ai_series(x).1, "Ai'")?;
    Ok(AiryZeros { xi0, xi1 })
}

/// Largest zeros of Ai and Ai′, located once by a sign scan with step 0.01 on
/// `[−3, 0]` followed by bisection.
pub fn largest_zeros() -> Result<AiryZeros> {
    ZEROS
        .get_or_init(|| compute_zeros().map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::NoBracket)
}

pub(crate) fn xi0() -> f64 {
    largest_zeros().expect("Airy zero scan").xi0
}

/// `R` and `E` without domain checks. Callers guarantee `xi > Ξ₀`.
pub(crate) fn riccati_pair(xi: f64) -> (f64, f64) {
    if xi <= SERIES_LIMIT {
        let (ai, aip) = series_dd(xi);
        let a = ai.to_f64();
        let r = -aip.to_f64() / a;
        let num = aip * aip - (ai * ai).mul_f64(xi);
        let e = num.to_f64() / (a * a);
        (r, e)
    } else {
        let (u, v, d) = asymptotic_sums(xi);
        let r = xi.sqrt() * v / u;
        // R² − ξ = ξ (V − U)(V + U)/U² without cancelling the leading terms
        let e = xi * d * (v + u) / (u * u);
        (r, e)
    }
}

fn check_domain(xi: f64) -> Result<()> {
    let zeros = largest_zeros()?;
    if xi.is_nan() || xi <= zeros.xi0 {
        return Err(domain(format!(
            "ξ = {xi} is not above the largest zero of Ai ({})",
            zeros.xi0
        )));
    }
    Ok(())
}

/// Riccati function `R(ξ) = −Ai′(ξ)/Ai(ξ)` on `(Ξ₀, ∞)`.
pub fn riccati(xi: f64) -> Result<f64> {
    check_domain(xi)?;
    Ok(riccati_pair(xi).0)
}

/// `E(ξ) = R(ξ)² − ξ`, which equals `R′(ξ)`.
pub fn efunc(xi: f64) -> Result<f64> {
    check_domain(xi)?;
    Ok(riccati_pair(xi).1)
}

/// `F(ξ) = E² + 2R²E − R`.
///
/// Loses roughly `log10(ξ³)` digits to cancellation for large ξ.
pub fn ffunc(xi: f64) -> Result<f64> {
    check_domain(xi)?;
    let (r, e) = riccati_pair(xi);
    Ok(e * e + 2.0 * r * r * e - r)
}
