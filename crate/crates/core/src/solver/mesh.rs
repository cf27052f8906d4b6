use serde::Serialize;

use crate::error::{EvasionError, Result};
use crate::geometry::{Point2, PolarOffset, WedgeDomain};

/// Smallest resolution accepted along either axis of a two-dimensional mesh.
pub const MIN_NODES: usize = 8;

/// Cell-centered polar mesh over a truncated wedge.
///
/// Nodes sit at `r_i = (i + ½)Δr` and `θ_j = -θ_max + (j + ½)Δθ`, so no node
/// lies on the apex or on the boundary. Node `(i, j)` has flat index
/// `i * n_theta + j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WedgeMesh {
    wedge: WedgeDomain,
    n_r: usize,
    n_theta: usize,
    angular: bool,
}

/// How interpolation treats the half cells between the outermost nodes and
/// the domain edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Edge {
    /// Hold the outermost node value.
    Clamp,
    /// Fall linearly to zero at the apex, at `r_max` and at `±θ_max`.
    Dirichlet,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeshSummary {
    pub n_r: usize,
    pub n_theta: usize,
    pub r_max: f64,
    pub half_angle: f64,
    pub dr: f64,
    pub dtheta: f64,
}

impl WedgeMesh {
    pub fn new(wedge: WedgeDomain, n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < MIN_NODES || n_theta < MIN_NODES {
            return Err(EvasionError::invalid(
                "mesh",
                format!("{n_r}x{n_theta} is below the {MIN_NODES}x{MIN_NODES} minimum"),
            ));
        }
        Ok(WedgeMesh {
            wedge,
            n_r,
            n_theta,
            angular: true,
        })
    }

    /// A single angular cell with the angular operator switched off: the
    /// radially symmetric (zero angular momentum) problem on `[0, r_max]`.
    pub fn radial(wedge: WedgeDomain, n_r: usize) -> Result<Self> {
        if n_r < MIN_NODES {
            return Err(EvasionError::invalid("mesh", format!("n_r = {n_r} < {MIN_NODES}")));
        }
        Ok(WedgeMesh {
            wedge,
            n_r,
            n_theta: 1,
            angular: false,
        })
    }

    pub fn wedge(&self) -> &WedgeDomain {
        &self.wedge
    }

    /// The same node layout attached to a different wedge of equal shape.
    pub fn with_wedge(mut self, wedge: WedgeDomain) -> Self {
        self.wedge = wedge;
        self
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn has_angular_term(&self) -> bool {
        self.angular
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dr(&self) -> f64 {
        self.wedge.r_max() / self.n_r as f64
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * self.wedge.half_angle() / self.n_theta as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr()
    }

    pub fn theta(&self, j: usize) -> f64 {
        if self.angular {
            -self.wedge.half_angle() + (j as f64 + 0.5) * self.dtheta()
        } else {
            0.0
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    pub fn node(&self, k: usize) -> (usize, usize) {
        (k / self.n_theta, k % self.n_theta)
    }

    pub fn polar(&self, k: usize) -> PolarOffset {
        let (i, j) = self.node(k);
        PolarOffset::new(self.r(i), self.theta(j))
    }

    pub fn point(&self, k: usize) -> Point2 {
        self.wedge.from_polar(self.polar(k))
    }

    /// Cell area `r_i Δr Δθ` of node `k`.
    pub fn area(&self, k: usize) -> f64 {
        let (i, _) = self.node(k);
        self.r(i) * self.dr() * self.dtheta()
    }

    pub fn areas(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.area(k)).collect()
    }

    pub fn summary(&self) -> MeshSummary {
        MeshSummary {
            n_r: self.n_r,
            n_theta: self.n_theta,
            r_max: self.wedge.r_max(),
            half_angle: self.wedge.half_angle(),
            dr: self.dr(),
            dtheta: self.dtheta(),
        }
    }

    pub fn in_hull(&self, o: PolarOffset) -> bool {
        let slack = 1e-12;
        o.r <= self.wedge.r_max() * (1.0 + slack) && o.theta.abs() <= self.wedge.half_angle() * (1.0 + slack)
    }

    /// Bilinear interpolation in `(r, θ)` of nodal `values`; `None` outside
    /// the mesh hull.
    pub fn interpolate(&self, values: &[f64], o: PolarOffset, edge: Edge) -> Option<f64> {
        debug_assert_eq!(values.len(), self.len());
        if !self.in_hull(o) {
            return None;
        }
        let dirichlet = edge == Edge::Dirichlet;
        let radial = axis_weights(o.r, 0.0, self.dr(), self.n_r, dirichlet);
        let angular = if self.angular {
            axis_weights(o.theta, -self.wedge.half_angle(), self.dtheta(), self.n_theta, dirichlet)
        } else {
            [(Some(0), 1.0), (None, 0.0)]
        };
        let mut acc = 0.0;
        for &(ri, rw) in &radial {
            let Some(i) = ri else { continue };
            for &(tj, tw) in &angular {
                let Some(j) = tj else { continue };
                acc += rw * tw * values[self.index(i, j)];
            }
        }
        Some(acc)
    }
}

/// Interpolation stencil along one cell-centered axis. `None` marks the
/// zero boundary value.
fn axis_weights(x: f64, start: f64, h: f64, n: usize, dirichlet: bool) -> [(Option<usize>, f64); 2] {
    let t = (x - start) / h - 0.5;
    let last = (n - 1) as f64;
    if t <= 0.0 {
        if dirichlet {
            let w = (2.0 * t + 1.0).clamp(0.0, 1.0);
            [(None, 1.0 - w), (Some(0), w)]
        } else {
            [(Some(0), 1.0), (None, 0.0)]
        }
    } else if t >= last {
        if dirichlet {
            let w = (1.0 - 2.0 * (t - last)).clamp(0.0, 1.0);
            [(Some(n - 1), w), (None, 1.0 - w)]
        } else {
            [(Some(n - 1), 1.0), (None, 0.0)]
        }
    } else {
        let k = t.floor() as usize;
        let f = t - k as f64;
        [(Some(k), 1.0 - f), (Some(k + 1), f)]
    }
}
