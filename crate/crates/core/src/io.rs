//! File formats. Every CSV starts with a header row and lists rows in a
//! deterministic order; floats use the shortest round-trip representation.
//!
//! | file | columns |
//! |------|---------|
//! | density grid | `r, theta, xi` |
//! | solution | `r, theta, u, xi` |
//! | traces | `trajectory_id, k, prey_x, prey_y, pred_x, pred_y, distance` |
//! | histogram | `bin_lo, bin_hi, mass` |
//! | trade-off | `rho, fisher_trace, expected_energy` |
//!
//! The heatmap is a binary PGM (`P5`, 8-bit, row-major, top row first) in
//! which darker pixels mean larger density. Comment lines in the header
//! carry the plotting extent and the wedge geometry; boundary pixels are
//! drawn dashed in mid gray.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::density::EvasionDensity;
use crate::error::{EvasionError, Result};
use crate::geometry::{Point2, PolarOffset, WedgeDomain};
use crate::pursuit::{PursuitTrace, TradeoffPoint};
use crate::solver::{GroundState, OperatorStats};
use crate::stats::Histogram;

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

#[derive(Serialize)]
struct DensityRow {
    r: f64,
    theta: f64,
    xi: f64,
}

/// Density on a cell-centered `n_r × n_theta` polar grid of its wedge.
pub fn write_density_grid<W: Write>(out: W, density: &EvasionDensity, n_r: usize, n_theta: usize) -> Result<()> {
    if n_r == 0 || n_theta == 0 {
        return Err(EvasionError::invalid("grid", "needs at least one node per axis"));
    }
    let wedge = density.wedge();
    let dr = wedge.r_max() / n_r as f64;
    let dt = 2.0 * wedge.half_angle() / n_theta as f64;
    let mut w = csv::Writer::from_writer(out);
    for i in 0..n_r {
        for j in 0..n_theta {
            let r = (i as f64 + 0.5) * dr;
            let theta = -wedge.half_angle() + (j as f64 + 0.5) * dt;
            let xi = density.pdf(wedge.from_polar(PolarOffset::new(r, theta)));
            w.serialize(DensityRow { r, theta, xi })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SolutionRow {
    r: f64,
    theta: f64,
    u: f64,
    xi: f64,
}

pub fn write_solution<W: Write>(out: W, gs: &GroundState) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (k, u) in gs.u.iter().enumerate() {
        let o = gs.mesh.polar(k);
        w.serialize(SolutionRow {
            r: o.r,
            theta: o.theta,
            u: *u,
            xi: u * u,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TraceRow {
    trajectory_id: u64,
    k: usize,
    prey_x: f64,
    prey_y: f64,
    pred_x: f64,
    pred_y: f64,
    distance: f64,
}

pub fn write_traces<W: Write>(out: W, traces: &[PursuitTrace]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for t in traces {
        for k in 0..t.len() {
            w.serialize(TraceRow {
                trajectory_id: t.trajectory_id,
                k,
                prey_x: t.prey[k].x,
                prey_y: t.prey[k].y,
                pred_x: t.predator[k].x,
                pred_y: t.predator[k].y,
                distance: t.distances[k],
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct HistogramRow {
    bin_lo: f64,
    bin_hi: f64,
    mass: f64,
}

pub fn write_histogram<W: Write>(out: W, h: &Histogram) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for ((lo, hi), m) in h.bin_lo.iter().zip(&h.bin_hi).zip(&h.mass) {
        w.serialize(HistogramRow {
            bin_lo: *lo,
            bin_hi: *hi,
            mass: *m,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_tradeoff<W: Write>(out: W, points: &[TradeoffPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

/// Axis-aligned plotting window `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Extent {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Extent {
    /// Bounding box of the truncated wedge, out to radius `r`.
    pub fn of_wedge(wedge: &WedgeDomain, r: f64) -> Self {
        let mut e = Extent {
            x0: wedge.apex().x,
            x1: wedge.apex().x,
            y0: wedge.apex().y,
            y1: wedge.apex().y,
        };
        let h = wedge.half_angle();
        for s in 0..=512 {
            let theta = -h + 2.0 * h * s as f64 / 512.0;
            let p = wedge.from_polar(PolarOffset::new(r, theta));
            e.x0 = e.x0.min(p.x);
            e.x1 = e.x1.max(p.x);
            e.y0 = e.y0.min(p.y);
            e.y1 = e.y1.max(p.y);
        }
        e
    }
}

/// Grayscale raster of a density over a Cartesian window.
#[derive(Clone, Debug)]
pub struct Heatmap {
    pub width: usize,
    pub height: usize,
    pub extent: Extent,
    /// Row-major, top row (largest `y`) first.
    pub pixels: Vec<u8>,
    /// Density value mapped to black.
    pub peak: f64,
    wedge: WedgeDomain,
}

const BOUNDARY_GRAY: u8 = 128;
const DASH: usize = 6;

impl Heatmap {
    pub fn render(density: &EvasionDensity, width: usize, height: usize, extent: Extent) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(EvasionError::invalid("raster", "needs at least 2×2 pixels"));
        }
        if !(extent.x1 > extent.x0) || !(extent.y1 > extent.y0) {
            return Err(EvasionError::invalid("extent", "empty plotting window"));
        }
        let px = |c: usize| extent.x0 + (c as f64 + 0.5) * (extent.x1 - extent.x0) / width as f64;
        let py = |r: usize| extent.y1 - (r as f64 + 0.5) * (extent.y1 - extent.y0) / height as f64;
        let mut values = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                values.push(density.pdf(Point2::new(px(col), py(row))));
            }
        }
        let peak = values.iter().cloned().fold(0.0, f64::max);
        let scale = if peak > 0.0 { 255.0 / peak } else { 0.0 };
        let pixels = values
            .iter()
            .map(|v| 255 - (v * scale).round().clamp(0.0, 255.0) as u8)
            .collect();
        let mut map = Heatmap {
            width,
            height,
            extent,
            pixels,
            peak,
            wedge: *density.wedge(),
        };
        map.draw_boundary();
        Ok(map)
    }

    fn to_pixel(&self, p: Point2) -> Option<(usize, usize)> {
        let e = self.extent;
        let c = (p.x - e.x0) / (e.x1 - e.x0) * self.width as f64;
        let r = (e.y1 - p.y) / (e.y1 - e.y0) * self.height as f64;
        (c >= 0.0 && r >= 0.0 && c < self.width as f64 && r < self.height as f64).then(|| (r as usize, c as usize))
    }

    fn draw_boundary(&mut self) {
        let w = self.wedge;
        let step = ((self.extent.x1 - self.extent.x0) / self.width as f64)
            .min((self.extent.y1 - self.extent.y0) / self.height as f64)
            * 0.5;
        let mut path = Vec::new();
        let n_ray = (w.r_max() / step).ceil() as usize;
        for side in [-1.0, 1.0] {
            for s in 0..=n_ray {
                path.push(w.from_polar(PolarOffset::new(s as f64 * step, side * w.half_angle())));
            }
        }
        let n_arc = (2.0 * w.half_angle() * w.r_max() / step).ceil() as usize;
        for s in 0..=n_arc {
            let theta = -w.half_angle() + 2.0 * w.half_angle() * s as f64 / n_arc as f64;
            path.push(w.from_polar(PolarOffset::new(w.r_max(), theta)));
        }
        // Dash by arc length in half-pixel steps: DASH pixels on, DASH off.
        for (s, p) in path.into_iter().enumerate() {
            if (s / (2 * DASH)) % 2 == 0 {
                if let Some((r, c)) = self.to_pixel(p) {
                    self.pixels[r * self.width + c] = BOUNDARY_GRAY;
                }
            }
        }
    }

    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        let e = self.extent;
        let w = self.wedge;
        writeln!(out, "P5")?;
        writeln!(out, "# stochastic-evasion density heatmap; darker = larger density")?;
        writeln!(out, "# extent x0={} x1={} y0={} y1={}", e.x0, e.x1, e.y0, e.y1)?;
        writeln!(out, "# peak {}", self.peak)?;
        writeln!(
            out,
            "# wedge apex=({}, {}) heading=({}, {}) half_angle={} r_max={}",
            w.apex().x,
            w.apex().y,
            w.heading().x,
            w.heading().y,
            w.half_angle(),
            w.r_max()
        )?;
        writeln!(out, "# boundary dashed gray={BOUNDARY_GRAY}")?;
        writeln!(out, "{} {}", self.width, self.height)?;
        writeln!(out, "255")?;
        out.write_all(&self.pixels)?;
        out.flush()?;
        Ok(())
    }
}

/// Everything needed to rerun a command bit-exactly.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub metrics: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorStats>,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_owned(),
            config: serde_json::Value::Null,
            seed: None,
            metrics: serde_json::Value::Null,
            operator: None,
            wall_time_s: 0.0,
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = create(path)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        writeln!(f)?;
        f.flush()?;
        Ok(())
    }
}
