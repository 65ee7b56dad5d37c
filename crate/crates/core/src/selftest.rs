//! Quick invariant battery behind the `selftest` subcommand.

use serde::Serialize;

use crate::action_oracle::{self, ActionProblem};
use crate::error::Result;
use crate::{airy, alphastar, pde_sim, qfunc, trajectories};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, run: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match run() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Fourth-order central difference.
pub fn five_point(f: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    Ok((f(x - 2.0 * h)? - 8.0 * f(x - h)? + 8.0 * f(x + h)? - f(x + 2.0 * h)?) / (12.0 * h))
}

/// Runs every check; each takes well under a second except the small
/// oracle refinement.
pub fn run() -> Vec<Check> {
    vec![
        check("airy zeros", || {
            let z = airy::largest_zeros()?;
            let ok = (-2.35..=-2.33).contains(&z.xi0) && (-1.03..=-1.01).contains(&z.xi1);
            Ok((ok, format!("Ξ₀ = {:.15}, Ξ₁ = {:.15}", z.xi0, z.xi1)))
        }),
        check("riccati identities", || {
            let xi0 = airy::largest_zeros()?.xi0;
            let (lo, hi) = (xi0 + 0.05, 40.0);
            let mut worst: f64 = 0.0;
            for k in 0..1000 {
                let d = lo - xi0 + (hi - lo) * (k as f64 + 0.5) / 1000.0;
                let h = (4e-4 * d).log2().round().exp2();
                let xi = ((xi0 + d) / h).round() * h;
                let r = airy::riccati(xi)?;
                let e = airy::efunc(xi)?;
                let dr = five_point(|z| airy::riccati(z), xi, h)?;
                let de = five_point(|z| airy::efunc(z), xi, h)?;
                worst = worst
                    .max((dr - (r * r - xi)).abs())
                    .max((de - (2.0 * r * e - 1.0)).abs());
                if airy::ffunc(xi)? <= 0.0 {
                    return Ok((false, format!("F ≤ 0 at ξ = {xi}")));
                }
            }
            Ok((worst < 1e-7, format!("max residual {worst:.2e}")))
        }),
        check("Q(θ)/θ increasing", || {
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=80 {
                let theta = 10f64.powf(-1.0 + 5.0 * k as f64 / 80.0);
                let r = qfunc::q(theta)? / theta;
                if r <= prev {
                    return Ok((false, format!("not increasing at θ = {theta}")));
                }
                prev = r;
            }
            let tail = qfunc::q(1e4)? / 1e4;
            Ok(((tail - 0.5).abs() < 0.01, format!("Q(1e4)/1e4 = {tail:.6}")))
        }),
        check("alpha star", || {
            let c = alphastar::alpha_star()?;
            Ok((
                (c.alpha_star - 1.315135).abs() < 1e-5,
                format!("α* = {:.12}", c.alpha_star),
            ))
        }),
        check("minimum value cross-check", || {
            let a = alphastar::alpha_star()?.min_u_43;
            let b = trajectories::theta_min(4.0 / 3.0)?.u;
            Ok(((a - b).abs() < 1e-9, format!("{a:.15} vs {b:.15}")))
        }),
        check("oracle against value function", || {
            let prob = ActionProblem::new(4.0 / 3.0, f64::INFINITY, 4.0 / 3.0, 1.0, 16);
            let r = action_oracle::refine(&prob, &[16, 32, 64])?;
            let exact = trajectories::value_on_line(1.0, 4.0 / 3.0)?.u;
            let gap = (r.u_approx - exact).abs();
            Ok((gap < r.eps.max(1e-6), format!("gap {gap:.2e}, ε_N {:.2e}", r.eps)))
        }),
        check("splitting consistency", || {
            let f = pde_sim::Field2D::from_fn(32, 16, 20.0, 11.0, |x, th| {
                0.3 * (-((x - 6.0).powi(2) + (th - 4.0).powi(2)) / 4.0).exp()
            });
            let d1 = pde_sim::step_strang(&f, 2e-3).l2_distance(&f);
            let d2 = pde_sim::step_strang(&f, 1e-3).l2_distance(&f);
            let ratio = d1 / d2;
            Ok(((ratio - 2.0).abs() < 0.05, format!("step ratio {ratio:.4}")))
        }),
    ]
}
