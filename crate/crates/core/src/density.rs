//! Evasion densities behind one interface: the analytic single-integrator
//! policy or a solver density tabulated on a polar mesh.

use std::sync::Arc;

use rand::Rng;

use crate::closed_form::ClosedFormDensity;
use crate::error::Result;
use crate::geometry::{Point2, PolarOffset, WedgeDomain};
use crate::potential::EnergyPotential;
use crate::solver::{Edge, SparseOperator, WedgeMesh};

#[derive(Clone, Debug)]
pub enum EvasionDensity {
    ClosedForm(ClosedFormDensity),
    Gridded(GriddedDensity),
}

/// `ξ = u²` on the nodes of a [`WedgeMesh`].
///
/// Point evaluation interpolates bilinearly and vanishes on the wedge
/// boundary. Sampling treats ξ as constant over each cell and draws
/// area-uniformly inside the chosen cell; [`GriddedDensity::local_mean`] is
/// the exact mean of that sampler.
#[derive(Clone, Debug)]
pub struct GriddedDensity {
    mesh: WedgeMesh,
    amplitude: Arc<[f64]>,
    xi: Arc<[f64]>,
    cumulative: Arc<[f64]>,
    local_mean: Point2,
}

impl GriddedDensity {
    pub fn from_amplitude(mesh: WedgeMesh, amplitude: Vec<f64>) -> Self {
        assert_eq!(amplitude.len(), mesh.len(), "amplitude must cover the mesh");
        let xi: Vec<f64> = amplitude.iter().map(|u| u * u).collect();
        let mut cumulative = Vec::with_capacity(xi.len());
        let mut acc = 0.0;
        let mut along = 0.0;
        let mut across = 0.0;
        let dr = mesh.dr();
        for (k, x) in xi.iter().enumerate() {
            let mass = x * mesh.area(k);
            acc += mass;
            cumulative.push(acc);
            let (i, j) = mesh.node(k);
            let (r_lo, r_hi) = (i as f64 * dr, (i + 1) as f64 * dr);
            let mean_r = 2.0 / 3.0 * (r_hi.powi(3) - r_lo.powi(3)) / (r_hi * r_hi - r_lo * r_lo);
            let (t_lo, t_hi) = cell_angles(&mesh, j);
            let mean_cos = (t_hi.sin() - t_lo.sin()) / (t_hi - t_lo);
            let mean_sin = (t_lo.cos() - t_hi.cos()) / (t_hi - t_lo);
            along += mass * mean_r * mean_cos;
            across += mass * mean_r * mean_sin;
        }
        GriddedDensity {
            mesh,
            amplitude: amplitude.into(),
            xi: xi.into(),
            cumulative: cumulative.into(),
            local_mean: Point2::new(along / acc, across / acc),
        }
    }

    pub fn mesh(&self) -> &WedgeMesh {
        &self.mesh
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn node_values(&self) -> &[f64] {
        &self.xi
    }

    pub fn wedge(&self) -> &WedgeDomain {
        self.mesh.wedge()
    }

    pub fn recentered(&self, wedge: WedgeDomain) -> Self {
        let mut d = self.clone();
        d.mesh = self.mesh.with_wedge(wedge.with_r_max(self.wedge().r_max()).expect("r_max already validated"));
        d
    }

    pub fn pdf(&self, y1: Point2) -> f64 {
        let o = self.wedge().to_polar(y1);
        self.mesh.interpolate(&self.xi, o, Edge::Dirichlet).unwrap_or(0.0)
    }

    /// Mesh quadrature `Σ ξ · area`.
    pub fn total_mass(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    /// Mean in the wedge frame: `x` along the heading, `y` across it.
    pub fn local_mean(&self) -> Point2 {
        self.local_mean
    }

    pub fn sample_offset<R: Rng + ?Sized>(&self, rng: &mut R) -> PolarOffset {
        let target = rng.random::<f64>() * self.total_mass();
        let k = self
            .cumulative
            .partition_point(|c| *c <= target)
            .min(self.cumulative.len() - 1);
        let (i, j) = self.mesh.node(k);
        let dr = self.mesh.dr();
        let (r_lo, r_hi) = (i as f64 * dr, (i + 1) as f64 * dr);
        let (t_lo, t_hi) = cell_angles(&self.mesh, j);
        let v: f64 = rng.random();
        let w: f64 = rng.random();
        let r = (r_lo * r_lo + v * (r_hi * r_hi - r_lo * r_lo)).sqrt();
        PolarOffset::new(r, t_lo + w * (t_hi - t_lo))
    }

    /// `4 Σ area · u(-∇²u)`, the discrete `trace 𝓘 = 4∫‖∇u‖²`.
    pub fn fisher_trace(&self) -> f64 {
        let op = SparseOperator::kinetic(self.mesh);
        4.0 * op.quadratic_form(&self.amplitude) / self.total_mass()
    }

    pub fn expected_energy(&self, pot: &EnergyPotential) -> Result<f64> {
        let mut acc = 0.0;
        for (k, x) in self.xi.iter().enumerate() {
            acc += pot.evaluate(self.mesh.point(k))? * x * self.mesh.area(k);
        }
        Ok(acc / self.total_mass())
    }
}

fn cell_angles(mesh: &WedgeMesh, j: usize) -> (f64, f64) {
    let half = mesh.wedge().half_angle();
    if mesh.has_angular_term() {
        let t_lo = -half + j as f64 * mesh.dtheta();
        (t_lo, t_lo + mesh.dtheta())
    } else {
        (-half, half)
    }
}

impl EvasionDensity {
    pub fn wedge(&self) -> &WedgeDomain {
        match self {
            EvasionDensity::ClosedForm(d) => d.wedge(),
            EvasionDensity::Gridded(d) => d.wedge(),
        }
    }

    pub fn pdf(&self, y1: Point2) -> f64 {
        match self {
            EvasionDensity::ClosedForm(d) => d.pdf(y1),
            EvasionDensity::Gridded(d) => d.pdf(y1),
        }
    }

    pub fn total_mass(&self) -> Result<f64> {
        match self {
            EvasionDensity::ClosedForm(d) => d.total_mass(),
            EvasionDensity::Gridded(d) => Ok(d.total_mass()),
        }
    }

    /// Mean offset in the wedge frame (`x` along the heading).
    pub fn local_mean(&self) -> Point2 {
        match self {
            EvasionDensity::ClosedForm(d) => Point2::new(d.mean_along_heading(), 0.0),
            EvasionDensity::Gridded(d) => d.local_mean(),
        }
    }

    pub fn mean(&self) -> Point2 {
        to_world(self.wedge(), self.local_mean())
    }

    pub fn sample_offset<R: Rng + ?Sized>(&self, rng: &mut R) -> PolarOffset {
        match self {
            EvasionDensity::ClosedForm(d) => d.sample_offset(rng),
            EvasionDensity::Gridded(d) => d.sample_offset(rng),
        }
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2 {
        self.wedge().from_polar(self.sample_offset(rng))
    }

    pub fn fisher_trace(&self) -> Result<f64> {
        match self {
            EvasionDensity::ClosedForm(d) => d.fisher_trace(),
            EvasionDensity::Gridded(d) => Ok(d.fisher_trace()),
        }
    }

    pub fn expected_energy(&self, pot: &EnergyPotential) -> Result<f64> {
        match self {
            EvasionDensity::ClosedForm(d) => d.expected_energy(pot),
            EvasionDensity::Gridded(d) => d.expected_energy(pot),
        }
    }

    /// The same policy re-anchored to another wedge of equal opening.
    pub fn recentered(&self, wedge: WedgeDomain) -> Result<Self> {
        Ok(match self {
            EvasionDensity::ClosedForm(d) => EvasionDensity::ClosedForm(d.recentered(wedge)?),
            EvasionDensity::Gridded(d) => EvasionDensity::Gridded(d.recentered(wedge)),
        })
    }
}

/// Maps a wedge-frame offset (`x` along the heading) to world coordinates.
pub fn to_world(wedge: &WedgeDomain, local: Point2) -> Point2 {
    let h = wedge.heading();
    wedge.apex() + Point2::new(h.x * local.x - h.y * local.y, h.y * local.x + h.x * local.y)
}
