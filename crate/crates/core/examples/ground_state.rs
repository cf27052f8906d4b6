//! Finite-difference ground state against the analytic optimum.
//!
//! Solves the eigenproblem on three meshes and prints `μ`, the eigen-residual
//! and the largest nodal gap to the closed-form density.
//!
//!     cargo run --release --example ground_state [-- 64 128 256]

use std::time::Instant;

use stochastic_evasion::solver::closed_form_gap;
use stochastic_evasion::{ClosedFormDensity, EnergyPotential, Point2, SolverSettings, WedgeDomain, WedgeMesh};

fn main() -> stochastic_evasion::Result<()> {
    let sizes: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let sizes = if sizes.is_empty() { vec![64, 128, 256] } else { sizes };

    let (prey, predator) = (Point2::ORIGIN, Point2::new(-2.0, 0.0));
    let (theta_max, rho, horizon) = (std::f64::consts::FRAC_PI_4, 1.0, 1.0);
    let r_max = ClosedFormDensity::tail_radius(theta_max, rho, horizon)?;
    let wedge = WedgeDomain::from_positions(prey, predator, theta_max, r_max)?;
    let exact = ClosedFormDensity::new(wedge, rho, horizon)?;
    let pot = EnergyPotential::single_integrator(horizon, prey)?;

    println!("closed form: mu = {}", exact.stationary_mu());
    println!("{:>6} {:>12} {:>11} {:>11} {:>6} {:>8}", "n", "mu", "residual", "linf_gap", "iters", "secs");
    for n in sizes {
        let t = Instant::now();
        let mesh = WedgeMesh::new(wedge, n, n)?;
        let gs = stochastic_evasion::solve(mesh, &pot, rho, SolverSettings::default())?;
        println!(
            "{:>6} {:>12.6} {:>11.3e} {:>11.3e} {:>6} {:>8.2}",
            n,
            gs.mu,
            gs.residual_norm,
            closed_form_gap(&gs, &exact),
            gs.iterations,
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
