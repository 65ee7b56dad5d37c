use toadfront::qfunc;

fn main() -> toadfront::Result<()> {
    let diamond = qfunc::theta_diamond()?;
    println!("θ⋄ = {diamond:.16}  (Q(θ⋄) = θ⋄/4)");
    println!();
    println!("{:>12} {:>22} {:>22} {:>12}", "theta", "Q(theta)", "xi root", "Q/theta");
    for k in 0..=12 {
        let theta = 10f64.powf(-1.0 + 0.5 * k as f64);
        let p = qfunc::q_of_theta(theta)?;
        println!("{:>12.4e} {:>22.15e} {:>22.15e} {:>12.8}", p.theta, p.q, p.xi_root, p.q / p.theta);
    }
    println!();
    for alpha in [1.25, 1.3, 4.0 / 3.0] {
        println!(
            "α = {alpha:.6}: ᾱ = {:.10}, θ⋄_α = {:.12}, Q_α(1) = {:.12}",
            qfunc::alpha_bar(alpha),
            qfunc::theta_diamond_alpha(alpha)?,
            qfunc::q_alpha(1.0, alpha)?
        );
    }
    Ok(())
}
