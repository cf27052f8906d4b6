//! Finite-difference ground states of `∇²u + ¼(μ - ϱU)u = 0` on a wedge with
//! `u = 0` on the boundary and `∫u² = 1`.
//!
//! The equation is the eigenproblem `(-∇² + (ϱ/4)U) u = (μ/4) u`. The
//! smallest eigenpair is found by shifted inverse iteration on a banded
//! Cholesky factorization; its eigenvector is the nodeless (positive) ground
//! state and `ξ = u²` is the optimal evasion density on the mesh.

mod banded;
mod mesh;
mod operator;

pub use banded::BandedCholesky;
pub use mesh::{Edge, MeshSummary, WedgeMesh, MIN_NODES};
pub use operator::{OperatorStats, SparseOperator};

use serde::Serialize;

use crate::closed_form::ClosedFormDensity;
use crate::density::{EvasionDensity, GriddedDensity};
use crate::error::{EvasionError, Result};
use crate::potential::EnergyPotential;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SolverSettings {
    /// Stop once successive eigenvalue estimates differ by less than this.
    pub tol: f64,
    pub max_iter: usize,
    /// The eigen-residual must also fall below this.
    pub residual_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-8,
            max_iter: 500,
            residual_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub mesh: WedgeMesh,
    /// Nodal amplitude, normalized so that `Σ u² · area = 1`.
    pub u: Vec<f64>,
    /// Lowest eigenvalue of `-∇² + (ϱ/4)U`.
    pub eigenvalue: f64,
    /// `4 × eigenvalue`.
    pub mu: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub shift: f64,
}

impl GroundState {
    pub fn normalization(&self) -> f64 {
        self.u
            .iter()
            .enumerate()
            .map(|(k, u)| u * u * self.mesh.area(k))
            .sum()
    }
}

/// Shifted inverse iteration for the smallest eigenpair of `op`.
///
/// The shift sits just below the Gershgorin lower bound, so the shifted
/// matrix is positive definite and the iteration converges to the bottom of
/// the spectrum.
pub fn ground_state(op: &SparseOperator, settings: SolverSettings) -> Result<GroundState> {
    if !(settings.tol > 0.0) || !(settings.residual_tol > 0.0) {
        return Err(EvasionError::invalid("tol", "tolerances must be > 0"));
    }
    let mesh = *op.mesh();
    let n = op.len();
    let g = op.gershgorin_lower();
    let shift = g - 1e-3 * (1.0 + g.abs());
    let chol = BandedCholesky::factor(op, shift)?;

    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut sv = vec![0.0; n];
    op.apply_symmetric(&v, &mut sv);
    let mut lambda = dot(&v, &sv);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < settings.max_iter {
        iterations += 1;
        chol.solve_in_place(&mut v);
        let norm = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        op.apply_symmetric(&v, &mut sv);
        let next = dot(&v, &sv);
        residual = sv
            .iter()
            .zip(&v)
            .map(|(s, x)| (s - next * x).powi(2))
            .sum::<f64>()
            .sqrt();
        let change = (next - lambda).abs();
        lambda = next;
        if change < settings.tol && residual < settings.residual_tol {
            converged = true;
            break;
        }
    }

    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let u: Vec<f64> = v.iter().zip(op.sqrt_area()).map(|(v, s)| v / s).collect();
    let state = GroundState {
        mesh,
        u,
        eigenvalue: lambda,
        mu: 4.0 * lambda,
        residual_norm: residual,
        iterations,
        shift,
    };
    if !converged {
        return Err(EvasionError::NoConvergence {
            max_iter: settings.max_iter,
            last: Box::new(state),
        });
    }
    if let Some(node) = state.u.iter().position(|u| !(*u > 0.0)) {
        return Err(EvasionError::NotNodeless { node });
    }
    Ok(state)
}

/// Assembles the operator for `pot` on `mesh` and returns its ground state.
pub fn solve(mesh: WedgeMesh, pot: &EnergyPotential, rho: f64, settings: SolverSettings) -> Result<GroundState> {
    if !(rho > 0.0) {
        return Err(EvasionError::invalid("rho", format!("{rho} is not > 0")));
    }
    let op = SparseOperator::assemble(mesh, pot, rho)?;
    ground_state(&op, settings)
}

/// `ξ = u²` on the mesh, interpolated bilinearly and zero outside the wedge.
pub fn density_from_state(gs: &GroundState) -> EvasionDensity {
    EvasionDensity::Gridded(GriddedDensity::from_amplitude(gs.mesh, gs.u.clone()))
}

/// Largest nodal gap `|u² - ξ_closed|` between a ground state and the analytic
/// density.
pub fn closed_form_gap(gs: &GroundState, density: &ClosedFormDensity) -> f64 {
    gs.u
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let o = gs.mesh.polar(k);
            (u * u - density.pdf_polar(o.r, o.theta)).abs()
        })
        .fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
