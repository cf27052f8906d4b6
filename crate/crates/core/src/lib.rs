//! Optimal stochastic evasion.
//!
//! A prey at `y₀` that sees a predator at `z₀` picks its next waypoint at
//! random from a density `ξ` supported on a wedge pointing away from the
//! predator. The predator's best mean-squared prediction of that waypoint is
//! bounded below by `1 / trace 𝓘(ξ)`, the reciprocal Fisher information. The
//! density minimizing `trace 𝓘(ξ) + ϱ 𝔼[U]` for an energy cost `U` is `u²`,
//! where `u` is the ground state of `-∇²u + (ϱ/4)U u = (μ/4) u` with `u = 0`
//! on the wedge boundary.
//!
//! * [`closed_form`]: the analytic optimum for a single-integrator cost
//!   `U = ‖y₁ - y₀‖² / T`, with exact sampling.
//! * [`solver`]: a polar finite-difference ground-state solver for any
//!   tabulated cost.
//! * [`metrics`]: Fisher trace, expected energy and the prediction bound.
//! * [`pursuit`]: the repeated predator–prey game as a Monte Carlo
//!   simulation, and the Fisher–energy trade-off sweep.
//! * [`io`] and [`cli`]: file formats and the `evasion` binary.
//!
//! ```
//! use stochastic_evasion::{ClosedFormDensity, Point2, WedgeDomain};
//!
//! let wedge = WedgeDomain::from_positions(
//!     Point2::ORIGIN, Point2::new(-2.0, 0.0), std::f64::consts::FRAC_PI_4, 1.0,
//! )?;
//! let density = ClosedFormDensity::new(wedge, 1.0, 1.0)?;
//! let trace = density.fisher_trace()?;
//! assert!((trace - 6.0).abs() < 1e-6);
//! # Ok::<(), stochastic_evasion::EvasionError>(())
//! ```

pub mod cli;
pub mod closed_form;
pub mod density;
pub mod error;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod potential;
pub mod pursuit;
pub mod quadrature;
pub mod rng;
pub mod solver;
pub mod stats;

pub use closed_form::ClosedFormDensity;
pub use density::{EvasionDensity, GriddedDensity};
pub use error::{EvasionError, Result};
pub use geometry::{Point2, PolarOffset, WedgeDomain};
pub use metrics::{metrics, EvasionMetrics};
pub use potential::{EnergyPotential, TabulatedPotential};
pub use pursuit::{PursuitConfig, PursuitPolicy, PursuitTrace};
pub use solver::{solve, GroundState, SolverSettings, WedgeMesh};
