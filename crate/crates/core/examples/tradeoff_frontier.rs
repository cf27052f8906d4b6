//! Fisher information against expected energy as the weight ρ varies: a
//! larger ρ buys cheaper manoeuvres at the cost of predictability.
//!
//!     cargo run --release --example tradeoff_frontier

use stochastic_evasion::pursuit::tradeoff_sweep;

fn main() -> stochastic_evasion::Result<()> {
    let rhos: Vec<f64> = (-8..=8).map(|k| 2f64.powf(k as f64 / 4.0)).collect();
    let points = tradeoff_sweep(&rhos, std::f64::consts::FRAC_PI_4, 1.0)?;
    println!("{:>8} {:>12} {:>16} {:>10}", "rho", "fisher", "expected_energy", "bound");
    for p in &points {
        println!(
            "{:>8.4} {:>12.4} {:>16.4} {:>10.4}",
            p.rho,
            p.fisher_trace,
            p.expected_energy,
            1.0 / p.fisher_trace
        );
    }
    Ok(())
}
