//! Minimum control energy needed to reach a destination within one horizon.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{EvasionError, Result};
use crate::geometry::{Point2, PolarOffset};
use crate::solver::{Edge, WedgeMesh};

#[derive(Clone, Debug)]
pub enum EnergyPotential {
    /// `ẋ = u` with running cost `uᵀu`: reaching `y1` from `origin` in time
    /// `horizon` costs `‖y1 - origin‖² / horizon`.
    SingleIntegrator { horizon: f64, origin: Point2 },
    Tabulated(TabulatedPotential),
}

/// Node values of a potential on a [`WedgeMesh`], interpolated bilinearly in
/// `(r, θ)`. Only continuous potentials are meaningful here.
#[derive(Clone, Debug)]
pub struct TabulatedPotential {
    mesh: WedgeMesh,
    values: Arc<[f64]>,
    radial: bool,
}

impl EnergyPotential {
    pub fn single_integrator(horizon: f64, origin: Point2) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(EvasionError::invalid("horizon", format!("{horizon} is not > 0")));
        }
        if !origin.is_finite() {
            return Err(EvasionError::invalid("origin", "non-finite component"));
        }
        Ok(EnergyPotential::SingleIntegrator { horizon, origin })
    }

    pub fn evaluate(&self, y1: Point2) -> Result<f64> {
        match self {
            EnergyPotential::SingleIntegrator { horizon, origin } => Ok(y1.distance_sq(*origin) / horizon),
            EnergyPotential::Tabulated(t) => t.evaluate(y1),
        }
    }

    /// The potential as a function of distance from the origin alone.
    pub fn radial_profile(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(EvasionError::invalid("r", format!("{r} is negative")));
        }
        match self {
            EnergyPotential::SingleIntegrator { horizon, .. } => Ok(r * r / horizon),
            EnergyPotential::Tabulated(t) if t.radial => t
                .mesh
                .interpolate(&t.values, PolarOffset::new(r, 0.0), Edge::Clamp)
                .ok_or(EvasionError::OutOfDomain { x: r, y: 0.0 }),
            EnergyPotential::Tabulated(_) => Err(EvasionError::NotRadial),
        }
    }

    pub fn is_single_integrator(&self) -> bool {
        matches!(self, EnergyPotential::SingleIntegrator { .. })
    }
}

impl TabulatedPotential {
    pub fn new(mesh: WedgeMesh, values: Vec<f64>, radial: bool) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(EvasionError::Table(format!(
                "{} values for a mesh of {} nodes",
                values.len(),
                mesh.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(EvasionError::Table(format!("potential value {bad} is not finite and >= 0")));
        }
        Ok(TabulatedPotential {
            mesh,
            values: values.into(),
            radial,
        })
    }

    /// Samples any potential at the nodes of `mesh`.
    pub fn sample(pot: &EnergyPotential, mesh: WedgeMesh, radial: bool) -> Result<Self> {
        let values = (0..mesh.len())
            .map(|k| pot.evaluate(mesh.point(k)))
            .collect::<Result<Vec<_>>>()?;
        TabulatedPotential::new(mesh, values, radial)
    }

    pub fn mesh(&self) -> &WedgeMesh {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_radial(&self) -> bool {
        self.radial
    }

    pub fn evaluate(&self, y1: Point2) -> Result<f64> {
        let o = self.mesh.wedge().to_polar(y1);
        self.mesh
            .interpolate(&self.values, o, Edge::Clamp)
            .ok_or(EvasionError::OutOfDomain { x: y1.x, y: y1.y })
    }

    /// Reads `r,theta,value` rows (header first) that must cover every node
    /// of `mesh` exactly once.
    pub fn from_csv<R: Read>(reader: R, mesh: WedgeMesh, radial: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut values = vec![f64::NAN; mesh.len()];
        let (dr, dt) = (mesh.dr(), mesh.dtheta());
        for row in rdr.records() {
            let row = row?;
            if row.len() != 3 {
                return Err(EvasionError::Table(format!("expected 3 columns, found {}", row.len())));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| EvasionError::Table(format!("bad number `{s}`: {e}")))
            };
            let (r, theta, value) = (parse(&row[0])?, parse(&row[1])?, parse(&row[2])?);
            let i = (r / dr - 0.5).round();
            let j = if mesh.has_angular_term() {
                ((theta + mesh.wedge().half_angle()) / dt - 0.5).round()
            } else {
                0.0
            };
            if i < 0.0 || j < 0.0 || i as usize >= mesh.n_r() || j as usize >= mesh.n_theta() {
                return Err(EvasionError::Table(format!("row ({r}, {theta}) is off the mesh")));
            }
            let k = mesh.index(i as usize, j as usize);
            let node = mesh.polar(k);
            if (node.r - r).abs() > 1e-6 * dr || (mesh.has_angular_term() && (node.theta - theta).abs() > 1e-6 * dt) {
                return Err(EvasionError::Table(format!("row ({r}, {theta}) is not a mesh node")));
            }
            if !values[k].is_nan() {
                return Err(EvasionError::Table(format!("node ({r}, {theta}) listed twice")));
            }
            values[k] = value;
        }
        if let Some(k) = values.iter().position(|v| v.is_nan()) {
            let o = mesh.polar(k);
            return Err(EvasionError::Table(format!("node ({}, {}) missing", o.r, o.theta)));
        }
        TabulatedPotential::new(mesh, values, radial)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["r", "theta", "value"])?;
        for (k, v) in self.values.iter().enumerate() {
            let o = self.mesh.polar(k);
            w.write_record(&[o.r.to_string(), o.theta.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
