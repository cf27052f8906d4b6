//! A user-supplied energy cost: tabulate it on the solver mesh, round-trip
//! it through CSV, and solve for the optimal density. The cost below makes
//! turning left cheaper than turning right, so the density leans left.
//!
//!     cargo run --release --example tabulated_potential

use stochastic_evasion::solver::density_from_state;
use stochastic_evasion::{
    metrics, ClosedFormDensity, EnergyPotential, Point2, SolverSettings, TabulatedPotential, WedgeDomain, WedgeMesh,
};

fn main() -> stochastic_evasion::Result<()> {
    let (theta_max, rho, horizon) = (std::f64::consts::FRAC_PI_4, 1.0, 1.0);
    let r_max = ClosedFormDensity::tail_radius(theta_max, rho, horizon)?;
    let wedge = WedgeDomain::from_positions(Point2::ORIGIN, Point2::new(-2.0, 0.0), theta_max, r_max)?;
    let mesh = WedgeMesh::new(wedge, 128, 96)?;

    let values: Vec<f64> = (0..mesh.len())
        .map(|k| {
            let o = mesh.polar(k);
            o.r * o.r / horizon * (1.0 - 0.4 * o.theta / theta_max)
        })
        .collect();
    let table = TabulatedPotential::new(mesh, values, false)?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    let table = TabulatedPotential::from_csv(csv.as_slice(), mesh, false)?;
    let pot = EnergyPotential::Tabulated(table);

    let gs = stochastic_evasion::solve(mesh, &pot, rho, SolverSettings::default())?;
    let density = density_from_state(&gs);
    let m = metrics(&density, &pot, rho)?;
    let mean = density.mean();
    println!("mu = {:.6} after {} iterations", gs.mu, gs.iterations);
    println!("fisher_trace = {:.4}, bound = {:.4}", m.fisher_trace, m.bound);
    println!("expected_energy = {:.4}", m.expected_energy);
    println!("mean = ({:.4}, {:.4})", mean.x, mean.y);
    Ok(())
}
