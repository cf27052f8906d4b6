//! The prediction bound: any predictor of the prey's next waypoint has mean
//! squared error at least 1 / trace 𝓘. Compares three predictors against it.
//!
//!     cargo run --release --example evasion_bound

use stochastic_evasion::metrics::{mse_summary, IsotropicGaussian};
use stochastic_evasion::rng::substream;
use stochastic_evasion::{metrics, ClosedFormDensity, EnergyPotential, EvasionDensity, Point2, WedgeDomain};

fn main() -> stochastic_evasion::Result<()> {
    let wedge = WedgeDomain::from_positions(Point2::ORIGIN, Point2::new(-2.0, 0.0), std::f64::consts::FRAC_PI_4, 1.0)?;
    let density = ClosedFormDensity::new(wedge, 1.0, 1.0)?;
    let pot = EnergyPotential::single_integrator(1.0, Point2::ORIGIN)?;
    let m = metrics(&EvasionDensity::ClosedForm(density.clone()), &pot, 1.0)?;
    println!("fisher_trace    = {:.6}", m.fisher_trace);
    println!("bound           = {:.4}", m.bound);
    println!("expected_energy = {:.6}", m.expected_energy);
    println!("objective       = {:.6}", m.objective);
    println!(
        "unit Gaussian trace = {:.6} (equals the dimension)",
        IsotropicGaussian::unit().fisher_trace()?
    );

    let n = 1_000_000;
    let waypoints = density.sample(&mut substream(1, 0), n);
    let predictors = [
        ("conditional mean", vec![density.mean(); n]),
        ("stay at apex", vec![density.wedge().apex(); n]),
        ("independent draw", density.sample(&mut substream(1, 1), n)),
    ];
    println!("\n{:<18} {:>10} {:>10}", "predictor", "MSE", "std err");
    for (name, guesses) in &predictors {
        let s = mse_summary(guesses, &waypoints)?;
        println!("{name:<18} {:>10.4} {:>10.4}", s.mean, s.std_error);
    }
    Ok(())
}
