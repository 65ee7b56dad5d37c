//! Optimal path ending on the line `x = αt^{3/2}` at `(α, θ)`, its contact
//! time, and the action recovered by quadrature.

use toadfront::trajectories;

fn main() -> toadfront::Result<()> {
    let alpha = 4.0 / 3.0;
    let theta = trajectories::theta_min(alpha)?.theta;
    let tr = trajectories::export_trajectory(theta, alpha, 24, -30.0)?;
    println!("endpoint (α, θ) = ({alpha:.6}, {theta:.12})");
    println!(
        "contact: s⊢ = {:.10}, τ = {:.10}, θ⊢ = {:.10}",
        tr.contact.s_contact, tr.contact.tau, tr.contact.theta_contact
    );
    println!("free motion: A = {:.12}, B = {:.12}", tr.params.a, tr.params.b);
    println!();
    println!("{:>10} {:>12} {:>12} {:>12} {:>12}", "s", "t", "x", "theta", "eta");
    for r in &tr.rows {
        println!("{:>10.4} {:>12.6e} {:>12.6e} {:>12.6e} {:>12.6}", r.s, r.t, r.x, r.theta, r.eta);
    }
    let dense = trajectories::export_trajectory(theta, alpha, 4000, -40.0)?;
    println!();
    println!("action by quadrature = {:.12}", trajectories::action_quadrature(&dense));
    println!("value function       = {:.12}", trajectories::value_on_line(theta, alpha)?.u);

    // anomalous regime (ᾱ = 1): η grows like |s|^{1/3} far in the past
    let s_far = -1e4;
    let eta0 = 2.0;
    let q0 = toadfront::qfunc::q(eta0)?;
    let far = trajectories::line_dynamics_integrate(eta0, q0, 4.0 / 3.0, 0.0, &[s_far])?;
    let ratio = far[0].eta / s_far.abs().powf(1.0 / 3.0);
    println!("η(−1e4)/|s|^{{1/3}} = {ratio:.6} (limit {:.6})", 2.0 * 0.75f64.powf(1.0 / 3.0));
    Ok(())
}
