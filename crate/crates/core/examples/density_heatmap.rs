//! The optimal evasion density for a prey at the origin fleeing a predator at
//! (-2, 0): writes `density_grid.csv` and a PGM heatmap (darker is likelier)
//! into the directory given as the first argument.
//!
//!     cargo run --release --example density_heatmap -- /tmp/fig1

use std::path::PathBuf;

use stochastic_evasion::io::{create, write_density_grid, Extent, Heatmap};
use stochastic_evasion::{ClosedFormDensity, EvasionDensity, Point2, WedgeDomain};

fn main() -> stochastic_evasion::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "density-out".into()));
    std::fs::create_dir_all(&out)?;

    let wedge = WedgeDomain::from_positions(Point2::ORIGIN, Point2::new(-2.0, 0.0), std::f64::consts::FRAC_PI_4, 1.0)?;
    let density = ClosedFormDensity::new(wedge, 1.0, 1.0)?;
    println!("r_max (tail mass < 1e-10) = {:.4}", density.wedge().r_max());
    println!("normalization = {:.9}", density.total_mass()?);
    println!("E[r] = {:.6}, E[r^2] = {:.6}", density.mean_radius(), density.second_moment());
    let mean = density.mean();
    println!("mean = ({:.6}, {:.6})", mean.x, mean.y);

    let density = EvasionDensity::ClosedForm(density);
    write_density_grid(create(&out.join("density_grid.csv"))?, &density, 128, 64)?;
    // Frame the bulk of the mass rather than the full truncation radius.
    let extent = Extent {
        x0: -0.5,
        x1: 5.5,
        y0: -3.0,
        y1: 3.0,
    };
    Heatmap::render(&density, 600, 600, extent)?.write_pgm(create(&out.join("density.pgm"))?)?;
    println!("wrote {}/density_grid.csv and density.pgm", out.display());
    Ok(())
}
