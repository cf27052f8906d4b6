//! Planar points, polar offsets and the wedge of admissible escape
//! destinations.
//!
//! A [`WedgeDomain`] is the set of points whose bearing from the prey deviates
//! from the away-from-predator direction by at most `half_angle`, cut off at a
//! numerical truncation radius `r_max`. Polar offsets are always measured in
//! the wedge frame: `theta = 0` along the heading, positive counter-clockwise.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{EvasionError, Result};

/// Below this separation the prey and predator are treated as coincident.
pub const COINCIDENCE_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn distance_sq(self, other: Point2) -> f64 {
        (self - other).norm_sq()
    }

    /// Rotates counter-clockwise by `angle` radians about the origin.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Offset from a wedge apex in the wedge frame. `theta` lies in (-π, π].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarOffset {
    pub r: f64,
    pub theta: f64,
}

impl PolarOffset {
    pub fn new(r: f64, theta: f64) -> Self {
        PolarOffset { r, theta }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WedgeDomain {
    apex: Point2,
    heading: Point2,
    half_angle: f64,
    r_max: f64,
}

impl WedgeDomain {
    /// Builds a wedge from an apex and any non-zero heading vector, which is
    /// normalized here.
    pub fn new(apex: Point2, heading: Point2, half_angle: f64, r_max: f64) -> Result<Self> {
        if !apex.is_finite() || !heading.is_finite() {
            return Err(EvasionError::invalid("apex/heading", "non-finite component"));
        }
        let len = heading.norm();
        if len < COINCIDENCE_EPS {
            return Err(EvasionError::CoincidentPositions);
        }
        validate_half_angle(half_angle)?;
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(EvasionError::invalid("r_max", format!("{r_max} is not finite and > 0")));
        }
        Ok(WedgeDomain {
            apex,
            heading: heading * (1.0 / len),
            half_angle,
            r_max,
        })
    }

    /// The escape wedge of a prey at `prey` fleeing a predator at `predator`.
    pub fn from_positions(prey: Point2, predator: Point2, half_angle: f64, r_max: f64) -> Result<Self> {
        if !prey.is_finite() || !predator.is_finite() {
            return Err(EvasionError::invalid("prey/predator", "non-finite component"));
        }
        let away = prey - predator;
        if away.norm() < COINCIDENCE_EPS {
            return Err(EvasionError::CoincidentPositions);
        }
        WedgeDomain::new(prey, away, half_angle, r_max)
    }

    pub fn apex(&self) -> Point2 {
        self.apex
    }

    pub fn heading(&self) -> Point2 {
        self.heading
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn with_r_max(mut self, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(EvasionError::invalid("r_max", format!("{r_max} is not finite and > 0")));
        }
        self.r_max = r_max;
        Ok(self)
    }

    /// Same shape and size, re-anchored at a new apex and heading.
    pub fn moved_to(&self, apex: Point2, heading: Point2) -> Result<Self> {
        WedgeDomain::new(apex, heading, self.half_angle, self.r_max)
    }

    pub fn to_polar(&self, p: Point2) -> PolarOffset {
        let d = p - self.apex;
        let along = d.dot(self.heading);
        let across = self.heading.cross(d);
        let mut theta = across.atan2(along);
        if theta <= -PI {
            theta = PI;
        }
        PolarOffset {
            r: d.norm(),
            theta,
        }
    }

    pub fn from_polar(&self, o: PolarOffset) -> Point2 {
        let (s, c) = o.theta.sin_cos();
        let h = self.heading;
        // Local (c, s) rotated into the world frame by the heading.
        let local = Point2::new(c * h.x - s * h.y, s * h.x + c * h.y);
        self.apex + local * o.r
    }

    /// Membership test; the angular boundary and the apex count as inside.
    pub fn contains(&self, p: Point2) -> bool {
        let o = self.to_polar(p);
        if o.r == 0.0 {
            return true;
        }
        o.theta.abs() <= self.half_angle && o.r <= self.r_max
    }
}

pub(crate) fn validate_half_angle(half_angle: f64) -> Result<()> {
    if !(half_angle > 0.0 && half_angle <= PI) {
        return Err(EvasionError::invalid(
            "half_angle",
            format!("{half_angle} is not in (0, π]"),
        ));
    }
    Ok(())
}
