//! Computes the critical constant α* and compares it with 4/3.

use toadfront::alphastar;

fn main() -> toadfront::Result<()> {
    let t0 = std::time::Instant::now();
    let c = alphastar::alpha_star()?;
    let elapsed = t0.elapsed();
    println!("τ₀        = {:.16}", c.tau0);
    println!("α*        = {:.16}", c.alpha_star);
    println!("4/3 − α*  = {:.3e} (relative {:.3}%)", 4.0 / 3.0 - c.alpha_star,
        100.0 * (1.0 - 0.75 * c.alpha_star));
    println!("min_θ U_{{4/3}}(4/3, θ) = {:.16}", c.min_u_43);
    println!("solved in {elapsed:?}");

    println!();
    println!("V and ξ along the matching curve:");
    for tau in [0.2, 0.4, 0.6, c.tau0, 0.8] {
        println!(
            "  τ = {tau:.6}  V = {:.12}  ξ = {:.12}  residual = {:+.3e}",
            alphastar::v_of_tau(tau)?,
            alphastar::xi_of_tau(tau)?,
            alphastar::tau_residual(tau)?
        );
    }
    Ok(())
}
