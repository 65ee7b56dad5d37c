//! Reduced front simulation printing the front position, the fitted
//! growth exponent and the scaled width.
//!
//! Pass `full` to run the default desk-scale configuration instead.

use toadfront::pde_sim::{self, SimConfig};

fn main() -> toadfront::Result<()> {
    let full = std::env::args().any(|a| a == "full");
    let cfg = if full {
        SimConfig::default()
    } else {
        SimConfig { lx: 600.0, theta_max: 40.0, nx: 256, ntheta: 64, t_end: 25.0, ..SimConfig::default() }
    };
    println!("{:>6} {:>9} {:>10} {:>10} {:>10} {:>9}", "t", "rho_max", "X_half", "X/t^1.5", "width/√t", "fit");
    let (report, _) = pde_sim::simulate(&cfg, |_, d, _| {
        if (d.t / cfg.diag_interval).round() as u64 % 10 == 0 {
            println!(
                "{:>6.1} {:>9.5} {:>10.3} {:>10.5} {:>10.4} {:>9.4}",
                d.t, d.rho_max, d.x_half, d.prefactor, d.width / d.t.sqrt(), d.exponent_fit
            );
        }
        Ok(())
    })?;
    println!("accepted {} steps, rejected {}", report.accepted, report.rejected);
    Ok(())
}
