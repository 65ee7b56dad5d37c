use toadfront::{alphastar, trajectories};

/// Prints θ ↦ U_α(α, θ) for α = 4/3 and α = α*, with discrete second
/// differences as a convexity check.
fn main() -> toadfront::Result<()> {
    let a_star = alphastar::alpha_star()?.alpha_star;
    for alpha in [4.0 / 3.0, a_star] {
        let m = trajectories::theta_min(alpha)?;
        println!("α = {alpha:.10}: min U = {:.12} at θ = {:.12}", m.u, m.theta);
        let thetas: Vec<f64> = (0..=16).map(|k| 0.25 + 0.125 * k as f64).collect();
        let us = thetas
            .iter()
            .map(|&th| trajectories::value_on_line(th, alpha).map(|v| v.u))
            .collect::<toadfront::Result<Vec<_>>>()?;
        for (k, (th, u)) in thetas.iter().zip(&us).enumerate() {
            let second = if k > 0 && k + 1 < us.len() {
                format!("{:+.3e}", us[k + 1] - 2.0 * u + us[k - 1])
            } else {
                String::new()
            };
            println!("  θ = {th:6.3}  U = {u:+.12}  {second}");
        }
        println!();
    }
    Ok(())
}
