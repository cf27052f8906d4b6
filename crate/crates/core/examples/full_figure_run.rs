//! The full-size pursuit experiment: 10⁶ trajectories of 10 steps, reduced
//! in streaming fashion (no traces are kept). Takes a few seconds per core.
//!
//!     cargo run --release --example full_figure_run [-- TRAJECTORIES SEED]

use std::time::Instant;

use stochastic_evasion::pursuit::{run_statistics, PursuitConfig, PursuitPolicy};

fn main() -> stochastic_evasion::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|a| a.parse().ok()).unwrap_or(1_000_000);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);
    let cfg = PursuitConfig {
        n_trajectories: n,
        n_steps: 10,
        seed,
        ..PursuitConfig::default()
    };
    let started = Instant::now();
    let policy = PursuitPolicy::new(&cfg)?;
    let stats = run_statistics(&cfg, &policy);
    println!("{n} trajectories, seed {seed}, {:.1}s", started.elapsed().as_secs_f64());
    println!("bound = {:.4}", stats.bound);
    for s in &stats.steps[1..] {
        println!(
            "  k={:2}  E[d^2] = {:.4} ± {:.4}  P(d^2 >= bound) = {:.4}",
            s.k, s.mean_sq_distance, s.std_error, s.fraction_above_bound
        );
    }
    println!("pooled P(d^2 >= bound) = {:.4}", stats.pooled_fraction_above_bound);
    println!("captures = {}", stats.captures);
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(())
}
