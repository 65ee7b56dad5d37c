//! Acceptance battery: one PASS/FAIL line per criterion.

use std::fs;
use std::process::Command;
use std::time::Instant;

use toadfront::action_oracle::{self, ActionProblem, DiscreteTrajectory, DEFAULT_LEVELS};
use toadfront::pde_sim::{self, Field2D, SimConfig};
use toadfront::{airy, alphastar, qfunc, trajectories};

type Outcome = Result<(bool, String), String>;

struct Report {
    failed: usize,
}

impl Report {
    fn criterion(&mut self, id: &str, name: &str, run: impl FnOnce() -> Outcome) {
        let started = Instant::now();
        let (ok, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !ok {
            self.failed += 1;
        }
        println!(
            "{} {id} {name}: {detail} [{:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn bin(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_toadfront"))
        .args(args)
        .output()
        .map_err(err)
}

fn alpha_star() -> Outcome {
    let started = Instant::now();
    let out = bin(&["alpha-star", "--json"])?;
    let secs = started.elapsed().as_secs_f64();
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(err)?;
    let a = v["alpha_star"].as_f64().ok_or("missing alpha_star")?;
    let gap = (4.0 / 3.0 - a) / (4.0 / 3.0);
    let ok = (a - 1.315135).abs() < 1e-5 && secs < 1.0 && a > 1.25 && a < 1.333334 && gap < 0.02;
    Ok((ok, format!("α* = {a:.10}, runtime {secs:.3} s, relative gap {:.3}%", 100.0 * gap)))
}

fn airy_zeros() -> Outcome {
    let z = airy::largest_zeros().map_err(err)?;
    let ok = (-2.35..=-2.33).contains(&z.xi0) && (-1.03..=-1.01).contains(&z.xi1);
    Ok((ok, format!("Ξ₀ = {:.12}, Ξ₁ = {:.12}", z.xi0, z.xi1)))
}

fn identities() -> Outcome {
    let x0 = airy::largest_zeros().map_err(err)?.xi0;
    let five = |f: &dyn Fn(f64) -> f64, x: f64, h: f64| {
        (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
    };
    let r = |xi: f64| airy::riccati(xi).unwrap_or(f64::NAN);
    let e = |xi: f64| airy::efunc(xi).unwrap_or(f64::NAN);
    let (lo, hi) = (x0 + 0.05, 40.0);
    let (mut ric, mut der) = (0.0f64, 0.0f64);
    for k in 0..1000 {
        let d = lo - x0 + (hi - lo) * k as f64 / 999.0;
        // power-of-two step and a point on its lattice keep every abscissa exact
        let h = (4e-4 * d).log2().round().exp2();
        let xi = ((x0 + d) / h).round() * h;
        ric = ric.max((five(&r, xi, h) - (r(xi).powi(2) - xi)).abs());
        der = der.max((five(&e, xi, h) - (2.0 * r(xi) * e(xi) - 1.0)).abs());
    }
    let f_min = (0..1000)
        .map(|k| airy::ffunc(x0 + 1e-3 + (50.0 - x0 - 1e-3) * k as f64 / 999.0).unwrap_or(f64::NAN))
        .fold(f64::INFINITY, f64::min);
    let ratios = (0..=1000)
        .map(|k| {
            let th = 10f64.powf(-2.0 + 6.0 * k as f64 / 1000.0);
            qfunc::q(th).map(|q| q / th)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let tail = qfunc::q(1e4).map_err(err)? / 1e4;
    let ok = ric < 1e-7 && der < 1e-7 && f_min > 0.0 && increasing && (tail - 0.5).abs() < 0.01;
    Ok((
        ok,
        format!(
            "Riccati {ric:.2e}, E′ {der:.2e}, min F {f_min:.3e}, Q/θ increasing {increasing}, Q(1e4)/1e4 = {tail:.6}"
        ),
    ))
}

fn three_ways() -> Outcome {
    let a = alphastar::alpha_star().map_err(err)?.min_u_43;
    let m = trajectories::theta_min(4.0 / 3.0).map_err(err)?;
    let tr = trajectories::export_trajectory(m.theta, 4.0 / 3.0, 4000, -40.0).map_err(err)?;
    let c = trajectories::action_quadrature(&tr);
    let worst = (a - m.u).abs().max((a - c).abs()).max((m.u - c).abs());
    Ok((worst < 1e-6, format!("{a:.12}, {:.12}, {c:.12}; largest gap {worst:.2e}", m.u)))
}

fn explicit_values() -> Outcome {
    let exact = 25.0 / 64.0 * (0.66 - std::f64::consts::LN_2);
    let n = 2000;
    let third = 1.0 / 3.0;
    let mut mesh: Vec<f64> = (0..=n).map(|i| third * (i as f64 / n as f64).powi(2)).collect();
    mesh.extend((1..=2 * n).map(|i| third + 2.0 * third * i as f64 / (2 * n) as f64));
    let path = DiscreteTrajectory::sample(&mesh, |t| {
        let th = if t < third { 1.5 * t } else { 0.75 * t + 0.25 };
        (1.25 * t.powf(1.5), th)
    });
    let two_phase = action_oracle::action_of(&path, &ActionProblem::new(1.25, 1.0, 1.25, 1.0, 16));

    let prob = ActionProblem::new(0.0, 0.0, 4.0 / 3.0, 1.0, 2048);
    let linear = DiscreteTrajectory::sample(&prob.mesh(), |t| {
        (2.0 * t * t - 2.0 / 3.0 * t * t * t, 2.0 * t - t * t)
    });
    let zero = action_oracle::action_of(&linear, &prob);
    let ok = (two_phase - exact).abs() < 1e-6 && zero.abs() < 1e-6;
    Ok((
        ok,
        format!("two-phase path {two_phase:.10} (expected {exact:.10}), linear problem {zero:.2e}"),
    ))
}

fn mu_independence() -> Outcome {
    let a_star = alphastar::alpha_star().map_err(err)?.alpha_star;
    let diamond = qfunc::theta_diamond().map_err(err)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [4.0 / 3.0, a_star] {
        for theta in [0.5, 1.0, diamond] {
            let r = action_oracle::verify_mu_independence(alpha, theta, &[0.5, 1.0, 4.0], &DEFAULT_LEVELS)
                .map_err(err)?;
            ok &= r.independent();
            parts.push(format!("({alpha:.4},{theta:.4}) spread {:.1e}/ε {:.1e}", r.spread, r.eps_max));
        }
    }
    let at = |mu: f64| action_oracle::refine(&ActionProblem::new(4.0 / 3.0, mu, 4.0 / 3.0, 1.0, 64), &DEFAULT_LEVELS);
    let (r0, r1) = (at(0.0).map_err(err)?, at(1.0).map_err(err)?);
    let diff = (r0.u_approx - r1.u_approx).abs();
    let eps = r0.eps.max(r1.eps);
    ok &= diff > 10.0 * eps;
    parts.push(format!("μ=0 vs μ=1 differ by {diff:.3e} against 10ε = {:.1e}", 10.0 * eps));
    Ok((ok, parts.join("; ")))
}

fn oracle_vs_analytic() -> Outcome {
    let alpha = 4.0 / 3.0;
    let mut ok = true;
    let (mut worst_ratio, mut worst_barrier, mut worst_eta) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..10 {
        let theta = 0.3 + 2.7 * k as f64 / 9.0;
        let r = action_oracle::refine(&ActionProblem::new(alpha, 1.0, alpha, theta, 64), &DEFAULT_LEVELS)
            .map_err(err)?;
        let exact = trajectories::value_on_line(theta, alpha).map_err(err)?.u;
        let gap = (r.u_approx - exact).abs();
        let barrier = r.finest.traj.barrier_violation(alpha);
        let eta = r.finest.traj.eta_increase();
        ok &= gap < r.eps && barrier <= r.delta && eta <= r.delta;
        worst_ratio = worst_ratio.max(gap / r.eps);
        worst_barrier = worst_barrier.max(barrier - r.delta);
        worst_eta = worst_eta.max(eta - r.delta);
    }
    Ok((
        ok,
        format!(
            "max |u − U|/ε_N {worst_ratio:.3}, max barrier excess over δ_N {worst_barrier:.2e}, max η increase over δ_N {worst_eta:.2e}"
        ),
    ))
}

fn anomalous() -> Outcome {
    let eta0 = 2.0;
    let q0 = qfunc::q(eta0).map_err(err)?;
    let out = trajectories::line_dynamics_integrate(eta0, q0, 4.0 / 3.0, 0.0, &[-1e4]).map_err(err)?;
    let ratio = out[0].eta / 1e4f64.cbrt();
    let limit = 2.0 * 0.75f64.cbrt();
    let rel = (ratio / limit - 1.0).abs();
    Ok((rel < 0.05, format!("η/|s|^(1/3) = {ratio:.6} against {limit:.6} ({:.3}%)", 100.0 * rel)))
}

fn desk_run() -> Outcome {
    let blob = Field2D::from_fn(64, 32, 20.0, 11.0, |x, th| {
        0.3 * (-((x - 6.0).powi(2) + (th - 4.0).powi(2)) / 4.0).exp()
    });
    let h = 0.2;
    let reference = pde_sim::integrate_fixed(&blob, h / 16.0, 2.0);
    let errs: Vec<f64> = [h, h / 2.0, h / 4.0]
        .iter()
        .map(|&hh| pde_sim::integrate_fixed(&blob, hh, 2.0).l2_distance(&reference))
        .collect();
    let slopes: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let order_ok = slopes.iter().all(|s| (s - 2.0).abs() <= 0.2);

    let cfg = SimConfig::default();
    let mut negative = false;
    let (report, _) = pde_sim::simulate(&cfg, |f, _, _| {
        negative |= f.values.iter().any(|&v| v < 0.0);
        Ok(())
    })
    .map_err(err)?;
    let d = &report.diagnostics;
    let rho_max = d.iter().map(|r| r.rho_max).fold(0.0, f64::max);
    let overshoot = d.iter().map(|r| r.rho_overshoot).fold(0.0, f64::max);
    let last = d.last().ok_or("no diagnostics")?;
    let exponent = last.exponent_fit;
    let scaled: Vec<f64> = d
        .iter()
        .filter(|r| r.t >= last.t / 10.0 - 1e-9)
        .map(|r| r.width / r.t.sqrt())
        .collect();
    let hi = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let width_var = hi / lo - 1.0;

    let checks = [
        (order_ok, format!("Strang slopes {:.3}/{:.3}", slopes[0], slopes[1])),
        (!negative, format!("nonnegative {}", !negative)),
        (rho_max <= 1.005, format!("ρ_max {rho_max:.5}")),
        (overshoot <= 1e-3, format!("ρ increase {overshoot:.2e}")),
        ((1.4..=1.6).contains(&exponent), format!("exponent {exponent:.4}")),
        (width_var < 0.25, format!("width/√t varies {:.1}% on [{:.0}, {:.0}]", 100.0 * width_var, last.t / 10.0, last.t)),
    ];
    let ok = checks.iter().all(|c| c.0) && !report.stopped_early;
    let detail: Vec<String> = checks
        .iter()
        .map(|(pass, s)| if *pass { s.clone() } else { format!("{s} (out of tolerance)") })
        .collect();
    Ok((ok, format!("{} steps, {}", report.accepted, detail.join(", "))))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("toadfront-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).map_err(err)?;
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "lx = 200\ntheta_max = 20\nnx = 128\nntheta = 32\nt_end = 8\n").map_err(err)?;
    let mut outputs = Vec::new();
    for tag in ["a", "b"] {
        let sim = dir.join(format!("sim_{tag}"));
        let oracle = dir.join(format!("oracle_{tag}.csv"));
        let a = bin(&["simulate", "--config", cfg.to_str().unwrap(), "--out", sim.to_str().unwrap()])?;
        let b = bin(&[
            "oracle", "--alpha", "1.3", "--x", "1.3", "--theta", "0.8", "--segments", "64", "--out",
            oracle.to_str().unwrap(),
        ])?;
        if !a.status.success() || !b.status.success() {
            return Err("a run failed".into());
        }
        let mut bytes = b.stdout;
        for f in ["diagnostics.csv", "u_slice.csv", "config.txt"] {
            bytes.extend(fs::read(sim.join(f)).map_err(err)?);
        }
        bytes.extend(fs::read(&oracle).map_err(err)?);
        outputs.push(bytes);
    }
    let _ = fs::remove_dir_all(&dir);
    let same = outputs[0] == outputs[1];
    Ok((same, format!("{} bytes compared, identical {same}", outputs[0].len())))
}

fn main() {
    let mut report = Report { failed: 0 };
    report.criterion("1", "alpha star", alpha_star);
    report.criterion("2", "airy constants", airy_zeros);
    report.criterion("3", "identity suite", identities);
    report.criterion("4", "minimum three ways", three_ways);
    report.criterion("5", "explicit values", explicit_values);
    report.criterion("6", "mu independence", mu_independence);
    report.criterion("7", "oracle vs analytic", oracle_vs_analytic);
    report.criterion("8", "anomalous scaling", anomalous);
    report.criterion("9", "desk-scale front", desk_run);
    report.criterion("10", "determinism", determinism);
    println!("acceptance: {} of 10 criteria failed", report.failed);
    // report-only by default so the remaining test targets still run
    if report.failed > 0 && std::env::var_os("TOADFRONT_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
