//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::action_oracle::{self, ActionProblem};
use crate::error::{domain, Error, Result};
use crate::pde_sim::{self, SimConfig};
use crate::{airy, alphastar, qfunc, selftest, trajectories};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "TOADFRONT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "toadfront", version, about = "Front acceleration constant of the nonlocal cane-toads equation")]
pub struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical constant α* and the minimum of U at α = 4/3.
    AlphaStar,
    /// Airy function, Riccati quantities and the largest zeros.
    #[command(allow_negative_numbers = true)]
    Airy(GridArgs),
    /// The function Q(θ), optionally rescaled for α.
    #[command(allow_negative_numbers = true)]
    QOfTheta {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 4.0 / 3.0)]
        alpha: f64,
    },
    /// Optimal trajectory ending at (α, θ).
    #[command(allow_negative_numbers = true)]
    Trajectory {
        #[arg(long, default_value_t = 4.0 / 3.0)]
        alpha: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 400)]
        n: usize,
        /// Earliest self-similar time ln t sampled.
        #[arg(long, default_value_t = -20.0)]
        s_min: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Value function θ ↦ U_α(α, θ) on a uniform grid.
    #[command(allow_negative_numbers = true)]
    Value {
        #[arg(long, default_value_t = 4.0 / 3.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        theta_min: f64,
        #[arg(long, default_value_t = 10.0)]
        theta_max: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Direct minimization of the discretized action.
    #[command(allow_negative_numbers = true)]
    Oracle(OracleArgs),
    /// Front simulation of the full equation.
    Simulate {
        /// key = value configuration; defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs the invariant battery.
    Selftest,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Explicit evaluation points (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub at: Vec<f64>,
    #[arg(long)]
    pub min: Option<f64>,
    #[arg(long)]
    pub max: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub theta: f64,
    /// Finest mesh; the two coarser Richardson levels are N/2 and N/4.
    #[arg(long, default_value_t = 256)]
    pub segments: usize,
    /// Forbid the saturated zone outright (μ = ∞).
    #[arg(long)]
    pub constraint: bool,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Provenance record written next to every output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub parameters: Value,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn grid(args: &GridArgs) -> Result<Vec<f64>> {
    if !args.at.is_empty() {
        return Ok(args.at.clone());
    }
    match (args.min, args.max) {
        (Some(lo), Some(hi)) if hi > lo && args.n >= 2 => Ok((0..args.n)
            .map(|k| lo + (hi - lo) * k as f64 / (args.n - 1) as f64)
            .collect()),
        (Some(_), Some(_)) => Err(domain("need --max > --min and --n ≥ 2")),
        _ => Err(domain("give --at values or --min, --max and --n")),
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}

struct Run {
    name: &'static str,
    argv: Vec<String>,
    parameters: Value,
    seed: Option<u64>,
    started: Instant,
    outputs: Vec<String>,
}

impl Run {
    fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, contents)?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn finish(self, manifest_path: &Path) -> Result<()> {
        let manifest = RunManifest {
            subcommand: self.name.to_string(),
            argv: self.argv,
            parameters: self.parameters,
            version: env!("CARGO_PKG_VERSION"),
            seed: self.seed,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
        };
        fs::write(manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(())
    }
}

/// Writes `table` to `out` with a manifest, or to stdout.
fn emit_table(run: Run, out: Option<&PathBuf>, table: &str) -> Result<()> {
    let mut run = run;
    match out {
        Some(path) => {
            run.write(path, table)?;
            run.finish(&sidecar(path))
        }
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn execute(cli: Cli, argv: Vec<String>) -> Result<()> {
    let started = Instant::now();
    let run = |name: &'static str, parameters: Value, seed: Option<u64>| Run {
        name,
        argv: argv.clone(),
        parameters,
        seed,
        started,
        outputs: Vec::new(),
    };
    match cli.command {
        Command::AlphaStar => {
            let c = alphastar::alpha_star()?;
            if cli.json {
                print_json(&json!(c))?;
            } else {
                println!("alpha_star = {}", fmt_f64(c.alpha_star));
                println!("tau0       = {}", fmt_f64(c.tau0));
                println!("min_u_43   = {}", fmt_f64(c.min_u_43));
            }
        }
        Command::Airy(args) => {
            if args.at.is_empty() && args.min.is_none() {
                let z = airy::largest_zeros()?;
                if cli.json {
                    print_json(&json!(z))?;
                } else {
                    println!("xi0 = {}\nxi1 = {}", fmt_f64(z.xi0), fmt_f64(z.xi1));
                }
                return Ok(());
            }
            let xs = grid(&args)?;
            let xi0 = airy::largest_zeros()?.xi0;
            let rows = xs.iter().map(|&xi| {
                let a = airy::ai_eval(xi);
                let (r, e, f) = if xi > xi0 {
                    (
                        airy::riccati(xi).unwrap_or(f64::NAN),
                        airy::efunc(xi).unwrap_or(f64::NAN),
                        airy::ffunc(xi).unwrap_or(f64::NAN),
                    )
                } else {
                    (f64::NAN, f64::NAN, f64::NAN)
                };
                vec![xi, a.ai, a.ai_prime, r, e, f]
            });
            let table = csv(&["xi", "ai", "ai_prime", "R", "E", "F"], rows);
            emit_table(run("airy", json!({"points": xs}), None), args.out.as_ref(), &table)?;
        }
        Command::QOfTheta { grid: args, alpha } => {
            let thetas = grid(&args)?;
            let rows = thetas
                .iter()
                .map(|&th| Ok(vec![th, qfunc::q_alpha(th, alpha)?]))
                .collect::<Result<Vec<_>>>()?;
            if cli.json && args.out.is_none() {
                let pts: Vec<Value> = rows.iter().map(|r| json!({"theta": r[0], "q": r[1]})).collect();
                return print_json(&json!(pts));
            }
            let table = csv(&["theta", "q"], rows);
            let params = json!({"alpha": alpha, "points": thetas});
            emit_table(run("q-of-theta", params, None), args.out.as_ref(), &table)?;
        }
        Command::Trajectory { alpha, theta, n, s_min, out } => {
            let tr = trajectories::export_trajectory(theta, alpha, n, s_min)?;
            let summary = json!({
                "alpha": tr.alpha,
                "theta": tr.theta,
                "contact": tr.contact,
                "params": tr.params,
                "action": trajectories::action_quadrature(&tr),
                "value": trajectories::value_on_line(theta, alpha)?.u,
            });
            let rows = tr.rows.iter().map(|r| vec![r.s, r.t, r.y, r.eta, r.p, r.q, r.x, r.theta]);
            let table = csv(&["s", "t", "y", "eta", "p", "q", "x", "theta"], rows);
            let params = json!({"alpha": alpha, "theta": theta, "n": n, "s_min": s_min});
            match &out {
                Some(_) => emit_table(run("trajectory", params, None), out.as_ref(), &table)?,
                None if cli.json => {}
                None => print!("{table}"),
            }
            if cli.json || out.is_some() {
                print_json(&summary)?;
            }
        }
        Command::Value { alpha, theta_min, theta_max, n, out } => {
            if !(theta_min > 0.0 && theta_max > theta_min && n >= 2) {
                return Err(domain("need 0 < --theta-min < --theta-max and --n ≥ 2"));
            }
            let rows = (0..n)
                .map(|k| {
                    let th = theta_min + (theta_max - theta_min) * k as f64 / (n - 1) as f64;
                    let v = trajectories::value_on_line(th, alpha)?;
                    Ok(vec![th, v.u, v.contact.tau, v.contact.theta_contact, v.params.a, v.params.b])
                })
                .collect::<Result<Vec<_>>>()?;
            let table = csv(&["theta", "u", "tau", "theta_contact", "A", "B"], rows);
            let params = json!({"alpha": alpha, "theta_min": theta_min, "theta_max": theta_max, "n": n});
            emit_table(run("value", params, None), out.as_ref(), &table)?;
        }
        Command::Oracle(args) => oracle(args, run("oracle", Value::Null, None))?,
        Command::Simulate { config, out } => {
            let cfg = match &config {
                Some(path) => SimConfig::load(path)?,
                None => SimConfig::default(),
            };
            simulate(&cfg, &out, run("simulate", json!(cfg), None), cli.json)?;
        }
        Command::Selftest => {
            let checks = selftest::run();
            let failed = checks.iter().filter(|c| !c.passed).count();
            if cli.json {
                print_json(&json!(checks))?;
            } else {
                for c in &checks {
                    println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                }
            }
            if failed > 0 {
                return Err(Error::Invariant(format!("{failed} selftest check(s) failed")));
            }
        }
    }
    Ok(())
}

fn oracle(args: OracleArgs, mut run: Run) -> Result<()> {
    let n = args.segments;
    if n < 64 || n % 4 != 0 {
        return Err(domain("--segments must be a multiple of 4 and at least 64"));
    }
    let mu = if args.constraint { f64::INFINITY } else { args.mu };
    let mut prob = ActionProblem::new(args.alpha, mu, args.x, args.theta, n);
    prob.seed = args.seed;
    prob.validate()?;
    run.parameters = json!(prob);
    run.seed = Some(args.seed);
    let r = action_oracle::refine(&prob, &[n / 4, n / 2, n])?;
    let traj = &r.finest.traj;
    let report = json!({
        "u_approx": r.u_approx,
        "eps_est": r.eps,
        "barrier_violation": traj.barrier_violation(args.alpha),
        "restarts": r.finest.restarts,
        "u_levels": r.values,
        "levels": r.levels,
        "order": r.order,
        "delta": r.delta,
    });
    print_json(&report)?;
    if let Some(path) = &args.out {
        let rows = (0..traj.t.len()).map(|i| vec![traj.t[i], traj.x[i], traj.theta[i]]);
        run.write(path, &csv(&["t", "x", "theta"], rows))?;
        run.finish(&sidecar(path))?;
    }
    Ok(())
}

fn simulate(cfg: &SimConfig, out: &Path, mut run: Run, json_out: bool) -> Result<()> {
    fs::create_dir_all(out)?;
    run.write(&out.join("config.txt"), &cfg.to_text())?;
    let mut snapshots = Vec::new();
    let (report, last) = pde_sim::simulate(cfg, |f, _, snap| {
        if snap {
            let mut s = String::from("x,theta,f\n");
            for j in 0..f.ntheta {
                for i in 0..f.nx {
                    let _ = writeln!(s, "{},{},{}", fmt_f64(f.x(i)), fmt_f64(f.theta(j)), fmt_f64(f.get(i, j)));
                }
            }
            let path = out.join(format!("snapshot_t{:010.4}.csv", f.t));
            fs::write(&path, s)?;
            snapshots.push(path.display().to_string());
        }
        Ok(())
    })?;
    run.outputs.extend(snapshots);

    let rows = report.diagnostics.iter().map(|d| {
        vec![d.t, d.rho_max, d.x_half, d.x_delta_01, d.width, d.prefactor, d.exponent_fit, d.rho_overshoot, d.f_min]
    });
    let header = [
        "t", "rho_max", "X_half", "X_delta_01", "width", "prefactor", "exponent_fit", "rho_overshoot", "f_min",
    ];
    run.write(&out.join("diagnostics.csv"), &csv(&header, rows))?;

    let stride = (last.nx.max(last.ntheta) / 192).max(1);
    let rows = pde_sim::u_slice(&last, stride).into_iter().map(|u| vec![u.y, u.eta, u.u]);
    run.write(&out.join("u_slice.csv"), &csv(&["y", "eta", "u"], rows))?;
    run.write(&out.join("plot.gp"), GNUPLOT)?;

    let summary = json!({
        "accepted": report.accepted,
        "rejected": report.rejected,
        "stopped_early": report.stopped_early,
        "t_final": report.t_final,
        "final": report.diagnostics.last(),
    });
    run.write(&out.join("summary.json"), &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    run.finish(&out.join("manifest.json"))?;
    if json_out {
        print_json(&summary)?;
    } else if let Some(d) = report.diagnostics.last() {
        println!(
            "t = {}  X_half = {:.3}  prefactor = {:.4}  exponent_fit = {:.4}  steps = {}",
            d.t, d.x_half, d.prefactor, d.exponent_fit, report.accepted
        );
    }
    Ok(())
}

const GNUPLOT: &str = "set datafile separator ','
set key autotitle columnhead
set multiplot layout 2,2
set logscale xy
plot 'diagnostics.csv' using 1:3 with lines
unset logscale
plot 'diagnostics.csv' using 1:6 with lines
plot 'diagnostics.csv' using 1:($5/sqrt($1)) with lines title 'width/sqrt(t)'
set view map
splot 'u_slice.csv' using 1:2:3 with points palette pt 5 ps 0.3
unset multiplot
";

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} = `{v}` is not a thread count")))?;
        // a pool that already exists (tests, repeated calls) is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let argv = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let result = configure_threads().and_then(|_| execute(cli, argv));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
