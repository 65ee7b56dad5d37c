//! Tabulates Ai, Ai′ and the Riccati quantities R, E, F across the series
//! and asymptotic regimes.

use toadfront::airy;

fn main() -> toadfront::Result<()> {
    let zeros = airy::largest_zeros()?;
    println!("largest zero of Ai   Ξ₀ = {:.15}", zeros.xi0);
    println!("largest zero of Ai′  Ξ₁ = {:.15}", zeros.xi1);
    println!();
    println!("{:>8} {:>24} {:>24} {:>14} {:>14} {:>14}", "xi", "Ai", "Ai'", "R", "E", "F");
    for &xi in &[-2.3, -2.0, -1.0, 0.0, 1.0, 4.0, 8.0, 8.5, 20.0, 100.0] {
        let a = airy::ai_eval(xi);
        println!(
            "{:>8.2} {:>24.16e} {:>24.16e} {:>14.10} {:>14.10} {:>14.6e}",
            xi,
            a.ai,
            a.ai_prime,
            airy::riccati(xi)?,
            airy::efunc(xi)?,
            airy::ffunc(xi)?
        );
    }

    // the two evaluation paths agree where they meet
    let (s_ai, s_aip) = airy::ai_series(airy::SERIES_LIMIT);
    let (a_ai, a_aip) = airy::ai_asymptotic(airy::SERIES_LIMIT);
    println!();
    println!("crossover at ξ = {}: relative gaps {:.2e} (Ai), {:.2e} (Ai′)",
        airy::SERIES_LIMIT,
        (s_ai / a_ai - 1.0).abs(),
        (s_aip / a_aip - 1.0).abs());
    Ok(())
}
