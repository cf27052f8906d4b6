//! The repeated game: each period the prey draws a waypoint from the optimal
//! density pointed away from the predator, and the predator jumps to that
//! density's mean. Prints one trajectory and per-step distance statistics,
//! and writes traces and the squared-distance histograms to the output
//! directory.
//!
//!     cargo run --release --example pursuit -- /tmp/pursuit 20000

use std::path::PathBuf;

use stochastic_evasion::io::{create, write_histogram, write_traces};
use stochastic_evasion::pursuit::{
    distance_histogram, run_with_policy, DistanceVariable, PursuitConfig, PursuitPolicy, PursuitStatistics,
};

fn main() -> stochastic_evasion::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "pursuit-out".into()));
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(20_000);
    std::fs::create_dir_all(&out)?;

    let cfg = PursuitConfig {
        n_trajectories: n,
        ..PursuitConfig::default()
    };
    let policy = PursuitPolicy::new(&cfg)?;
    let traces = run_with_policy(&cfg, &policy);

    println!("trajectory 0:");
    let t = &traces[0];
    for k in 0..t.len() {
        println!(
            "  k={k:2}  prey=({:7.3}, {:7.3})  predator=({:7.3}, {:7.3})  distance={:.3}",
            t.prey[k].x, t.prey[k].y, t.predator[k].x, t.predator[k].y, t.distances[k]
        );
    }

    let stats = PursuitStatistics::from_traces(&traces, policy.bound());
    println!("\nbound = {:.4}", stats.bound);
    for s in &stats.steps {
        println!(
            "  k={:2}  E[d^2] = {:.4} ± {:.4}  P(d^2 >= bound) = {:.4}",
            s.k, s.mean_sq_distance, s.std_error, s.fraction_above_bound
        );
    }
    println!("pooled P(d^2 >= bound) over k >= 1 = {:.4}", stats.pooled_fraction_above_bound);

    write_traces(create(&out.join("traces.csv"))?, &traces)?;
    for k in 0..=cfg.n_steps {
        let h = distance_histogram(&traces, k, 60, DistanceVariable::SquaredDistance)?;
        write_histogram(create(&out.join(format!("sq_distance_k{k:02}.csv")))?, &h)?;
    }
    // Straight-line positions between waypoints, for continuous-time plots.
    let mut f = csv::Writer::from_writer(create(&out.join("trajectory0_interpolated.csv"))?);
    f.write_record(["t", "prey_x", "prey_y", "pred_x", "pred_y"])?;
    for (time, y, z) in t.interpolated(20) {
        f.write_record([time, y.x, y.y, z.x, z.y].map(|v| v.to_string()))?;
    }
    f.flush()?;
    println!("wrote traces and histograms to {}", out.display());
    Ok(())
}
