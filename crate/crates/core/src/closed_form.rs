//! The analytic optimal evasion density for single-integrator prey.
//!
//! With `ω = π/(2θ_max)` and `a = √(ϱ/T)`, the density over the wedge in
//! polar offsets `(r, θ)` from the prey is
//!
//! ```text
//! ξ(r, θ) = C · exp(-a r²/2) · r^(2ω) · cos²(ωθ),
//! C       = a^(ω+1) / (θ_max · Γ(ω+1) · 2^ω)
//! ```
//!
//! and zero outside. It factorizes: `s = r²` follows Gamma(ω + 1, 2/a) and
//! `θ` independently has density `cos²(ωθ)/θ_max` on `[-θ_max, θ_max]`.

use std::cell::Cell;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::{gamma, gamma_ur, ln_gamma};

use crate::error::{EvasionError, Result};
use crate::geometry::{validate_half_angle, Point2, PolarOffset, WedgeDomain};
use crate::metrics::{fisher_trace_polar, Amplitude, AmplitudeField};
use crate::potential::EnergyPotential;
use crate::quadrature::{integrate, integrate_2d, Tolerance};

/// Probability mass allowed beyond the truncation radius.
pub const TAIL_MASS: f64 = 1e-10;

/// Angular offsets this close to `±θ_max` are treated as on the boundary.
const BOUNDARY_EPS: f64 = 1e-12;

/// Inverse-CDF tolerance in θ.
const ANGLE_TOL: f64 = 1e-12;

fn quad_tol() -> Tolerance {
    Tolerance::new(1e-14, 1e-10)
}

#[derive(Clone, Debug)]
pub struct ClosedFormDensity {
    wedge: WedgeDomain,
    rho: f64,
    horizon: f64,
    omega: f64,
    rate_a: f64,
    norm_const: f64,
    radial_law: Gamma<f64>,
}

impl ClosedFormDensity {
    /// Builds the density on `wedge`, raising the wedge's `r_max` to the
    /// tail radius if it is smaller.
    pub fn new(wedge: WedgeDomain, rho: f64, horizon: f64) -> Result<Self> {
        check_positive("rho", rho)?;
        check_positive("horizon", horizon)?;
        let half_angle = wedge.half_angle();
        validate_half_angle(half_angle)?;
        let omega = std::f64::consts::PI / (2.0 * half_angle);
        let rate_a = (rho / horizon).sqrt();
        let norm_const = rate_a.powf(omega + 1.0) / (half_angle * gamma(omega + 1.0) * 2f64.powf(omega));
        let tail = Self::tail_radius(half_angle, rho, horizon)?;
        let wedge = if wedge.r_max() < tail {
            wedge.with_r_max(tail)?
        } else {
            wedge
        };
        let radial_law = Gamma::new(omega + 1.0, 2.0 / rate_a)
            .map_err(|e| EvasionError::invalid("rho/horizon", e.to_string()))?;
        Ok(ClosedFormDensity {
            wedge,
            rho,
            horizon,
            omega,
            rate_a,
            norm_const,
            radial_law,
        })
    }

    /// Smallest radius whose exterior carries less than [`TAIL_MASS`],
    /// found by bisection on the regularized upper incomplete gamma.
    pub fn tail_radius(half_angle: f64, rho: f64, horizon: f64) -> Result<f64> {
        check_positive("rho", rho)?;
        check_positive("horizon", horizon)?;
        validate_half_angle(half_angle)?;
        let shape = std::f64::consts::PI / (2.0 * half_angle) + 1.0;
        let scale = 2.0 / (rho / horizon).sqrt();
        let (mut lo, mut hi) = (0.0f64, shape + 10.0);
        while gamma_ur(shape, hi) >= TAIL_MASS {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if gamma_ur(shape, mid) < TAIL_MASS {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok((hi * scale).sqrt())
    }

    pub fn wedge(&self) -> &WedgeDomain {
        &self.wedge
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn rate_a(&self) -> f64 {
        self.rate_a
    }

    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// Shape of the Gamma law of `r²`.
    pub fn radial_shape(&self) -> f64 {
        self.omega + 1.0
    }

    /// Scale of the Gamma law of `r²`.
    pub fn radial_scale(&self) -> f64 {
        2.0 / self.rate_a
    }

    /// Same policy anchored to another wedge of equal opening angle.
    pub fn recentered(&self, wedge: WedgeDomain) -> Result<Self> {
        if wedge.half_angle() != self.wedge.half_angle() {
            return Err(EvasionError::invalid("wedge", "half angle differs from the policy's"));
        }
        let mut d = self.clone();
        d.wedge = wedge.with_r_max(wedge.r_max().max(self.wedge.r_max()))?;
        Ok(d)
    }

    pub fn pdf_polar(&self, r: f64, theta: f64) -> f64 {
        let half = self.wedge.half_angle();
        if r > self.wedge.r_max() || theta.abs() >= half - BOUNDARY_EPS * half.max(1.0) {
            return 0.0;
        }
        let c = (self.omega * theta).cos();
        self.norm_const * (-0.5 * self.rate_a * r * r).exp() * r.powf(2.0 * self.omega) * c * c
    }

    pub fn pdf(&self, y1: Point2) -> f64 {
        let o = self.wedge.to_polar(y1);
        self.pdf_polar(o.r, o.theta)
    }

    /// `∫ ξ` over the truncated wedge by adaptive quadrature.
    pub fn total_mass(&self) -> Result<f64> {
        let est = integrate_2d(
            |r, theta| self.pdf_polar(r, theta) * r,
            (0.0, self.wedge.r_max()),
            (-self.wedge.half_angle(), self.wedge.half_angle()),
            quad_tol(),
        )?;
        Ok(est.value)
    }

    /// CDF of the angular marginal.
    pub fn angular_cdf(&self, theta: f64) -> f64 {
        let half = self.wedge.half_angle();
        let t = theta.clamp(-half, half);
        0.5 + t / (2.0 * half) + (2.0 * self.omega * t).sin() / (4.0 * self.omega * half)
    }

    /// Inverts [`Self::angular_cdf`] by Newton steps safeguarded with
    /// bisection.
    pub fn angular_quantile(&self, p: f64) -> f64 {
        let half = self.wedge.half_angle();
        let (mut lo, mut hi) = (-half, half);
        let mut theta = half * (2.0 * p - 1.0);
        for _ in 0..200 {
            let f = self.angular_cdf(theta) - p;
            if f > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            let c = (self.omega * theta).cos();
            let slope = c * c / half;
            let newton = theta - f / slope;
            let next = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let step = (next - theta).abs();
            theta = next;
            if step < ANGLE_TOL || hi - lo < ANGLE_TOL {
                break;
            }
        }
        theta
    }

    /// One draw as a polar offset in the wedge frame. `r²` is drawn first,
    /// then the angle from one uniform variate.
    pub fn sample_offset<R: Rng + ?Sized>(&self, rng: &mut R) -> PolarOffset {
        let r_max_sq = self.wedge.r_max() * self.wedge.r_max();
        let s = loop {
            let s = self.radial_law.sample(rng);
            if s <= r_max_sq {
                break s;
            }
        };
        let p: f64 = rng.random();
        PolarOffset::new(s.sqrt(), self.angular_quantile(p))
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2 {
        self.wedge.from_polar(self.sample_offset(rng))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Point2> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    /// `E[r]` from the Gamma law of `r²`.
    pub fn mean_radius(&self) -> f64 {
        let k = self.radial_shape();
        (ln_gamma(k + 0.5) - ln_gamma(k)).exp() * self.radial_scale().sqrt()
    }

    /// `E[r²] = shape · scale`.
    pub fn second_moment(&self) -> f64 {
        self.radial_shape() * self.radial_scale()
    }

    /// `E[cos θ]` under the angular marginal, by quadrature.
    pub fn mean_cos(&self) -> f64 {
        let half = self.wedge.half_angle();
        let w = self.omega;
        let est = integrate(
            |t| {
                let c = (w * t).cos();
                t.cos() * c * c
            },
            -half,
            half,
            Tolerance::new(1e-15, 1e-13),
        )
        .expect("smooth bounded integrand");
        est.value / half
    }

    /// Distance of the mean from the apex along the heading.
    pub fn mean_along_heading(&self) -> f64 {
        self.mean_radius() * self.mean_cos()
    }

    /// Conditional mean of the next destination: the least-mean-square
    /// prediction of a predator that knows the policy.
    pub fn mean(&self) -> Point2 {
        self.wedge.apex() + self.wedge.heading() * self.mean_along_heading()
    }

    pub fn fisher_trace(&self) -> Result<f64> {
        fisher_trace_polar(self, self.wedge.r_max(), self.wedge.half_angle(), quad_tol())
    }

    /// `ψ = E[U(y1)]` by quadrature over the wedge.
    pub fn expected_energy(&self, pot: &EnergyPotential) -> Result<f64> {
        let failure: Cell<Option<EvasionError>> = Cell::new(None);
        let est = integrate_2d(
            |r, theta| {
                let xi = self.pdf_polar(r, theta);
                if xi == 0.0 {
                    return 0.0;
                }
                match pot.evaluate(self.wedge.from_polar(PolarOffset::new(r, theta))) {
                    Ok(u) => u * xi * r,
                    Err(e) => {
                        failure.set(Some(e));
                        0.0
                    }
                }
            },
            (0.0, self.wedge.r_max()),
            (-self.wedge.half_angle(), self.wedge.half_angle()),
            quad_tol(),
        );
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(est?.value)
    }

    /// Eigenvalue multiplier obtained by substituting the density's square
    /// root into the stationary equation: `μ = 4a(ω + 1)`.
    pub fn stationary_mu(&self) -> f64 {
        4.0 * self.rate_a * (self.omega + 1.0)
    }
}

impl AmplitudeField for ClosedFormDensity {
    fn amplitude(&self, r: f64, theta: f64) -> Amplitude {
        let half = self.wedge.half_angle();
        if theta.abs() > half || r > self.wedge.r_max() {
            return Amplitude {
                value: 0.0,
                d_r: 0.0,
                d_theta: 0.0,
            };
        }
        let w = self.omega;
        let a = self.rate_a;
        let envelope = self.norm_const.sqrt() * (-0.25 * a * r * r).exp();
        let (s, c) = (w * theta).sin_cos();
        let rw = r.powf(w);
        Amplitude {
            value: envelope * rw * c,
            d_r: envelope * r.powf(w - 1.0) * (w - 0.5 * a * r * r) * c,
            d_theta: -w * envelope * rw * s,
        }
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(EvasionError::invalid(name, format!("{v} is not > 0")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::rng::substream;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn reference() -> ClosedFormDensity {
        let w = WedgeDomain::from_positions(Point2::ORIGIN, Point2::new(-2.0, 0.0), FRAC_PI_4, 1.0).unwrap();
        ClosedFormDensity::new(w, 1.0, 1.0).unwrap()
    }

    #[test]
    fn constants_for_reference_config() {
        let d = reference();
        assert!((d.omega() - 2.0).abs() < 1e-12);
        assert!((d.rate_a() - 1.0).abs() < 1e-12);
        // 1 / (θ_max Γ(3) 2²) = 1/(2π)
        assert!((d.norm_const() - 0.5 / PI).abs() < 1e-12);
        assert!((d.stationary_mu() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn right_angle_wedge_exponent() {
        let w = WedgeDomain::new(Point2::ORIGIN, Point2::new(1.0, 0.0), FRAC_PI_2, 1.0).unwrap();
        let d = ClosedFormDensity::new(w, 1.0, 1.0).unwrap();
        assert!((d.omega() - 1.0).abs() < 1e-12);
        // r^(2ω) = r²: doubling r at fixed θ scales by 4·exp(-a(4-1)r²/2).
        let ratio = d.pdf_polar(0.2, 0.1) / d.pdf_polar(0.1, 0.1);
        assert!((ratio - 4.0 * (-0.5 * 0.03f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters() {
        let w = *reference().wedge();
        assert!(matches!(
            ClosedFormDensity::new(w, 0.0, 1.0),
            Err(EvasionError::InvalidParameter { name: "rho", .. })
        ));
        assert!(ClosedFormDensity::new(w, 1.0, -1.0).is_err());
    }

    #[test]
    fn tail_radius_matches_incomplete_gamma() {
        let d = reference();
        let r = d.wedge().r_max();
        // Gamma(3, 2) survival: exp(-x/2)(1 + x/2 + x²/8).
        let surv = |x: f64| (-x / 2.0).exp() * (1.0 + x / 2.0 + x * x / 8.0);
        assert!(surv(r * r) < TAIL_MASS);
        assert!(surv((r * (1.0 - 1e-9)).powi(2)) >= TAIL_MASS * (1.0 - 1e-6));
        assert!((r - 7.634_906_872_887).abs() < 1e-9, "{r}");
    }

    #[test]
    fn zero_on_boundary_and_apex() {
        let d = reference();
        let w = d.wedge();
        for r in [0.5, 1.0, 3.0] {
            for t in [FRAC_PI_4, -FRAC_PI_4] {
                assert_eq!(d.pdf(w.from_polar(PolarOffset::new(r, t))), 0.0);
            }
        }
        assert_eq!(d.pdf(Point2::ORIGIN), 0.0);
        assert_eq!(d.pdf(Point2::new(-1.0, 0.0)), 0.0);
        assert!(d.pdf(Point2::new(2.0, 0.0)) > 0.0);
    }

    #[test]
    fn normalized() {
        let m = reference().total_mass().unwrap();
        assert!((m - 1.0).abs() < 1e-8, "{m}");
    }

    #[test]
    fn angular_quantile_inverts_cdf() {
        let d = reference();
        for p in [0.0, 1e-9, 0.1, 0.5, 0.77, 0.999_999, 1.0] {
            let t = d.angular_quantile(p);
            assert!((d.angular_cdf(t) - p).abs() < 1e-11, "p={p}");
        }
        assert!(d.angular_quantile(0.5).abs() < 1e-12);
    }

    #[test]
    fn mean_components() {
        let d = reference();
        // Γ(3.5)/Γ(3)·√2 = (15√π/8)/2·√2
        let er = 15.0 * PI.sqrt() / 16.0 * 2f64.sqrt();
        assert!((d.mean_radius() - er).abs() < 1e-12);
        // ∫cosθ cos²2θ over ±π/4 = sin(π/4) + (sin(5π/4)/5 + sin(3π/4)/3)/2
        let s = FRAC_PI_4.sin();
        let ecos = (s + (-s / 5.0 + s / 3.0) / 2.0) / FRAC_PI_4;
        assert!((d.mean_cos() - ecos).abs() < 1e-12);
        let m = d.mean();
        assert_eq!(m.y, 0.0);
        assert!((m.x - 2.256_758_334_191).abs() < 1e-9);
        assert!(d.wedge().contains(m));
    }

    #[test]
    fn samples_stay_in_wedge() {
        let d = reference();
        let mut rng = substream(11, 0);
        for p in d.sample(&mut rng, 20_000) {
            assert!(d.wedge().contains(p));
        }
    }

    #[test]
    fn fisher_and_energy_reference_values() {
        let d = reference();
        let f = d.fisher_trace().unwrap();
        assert!((f - 6.0).abs() < 1e-6, "{f}");
        let pot = EnergyPotential::single_integrator(1.0, Point2::ORIGIN).unwrap();
        let e = d.expected_energy(&pot).unwrap();
        assert!((e - 6.0).abs() < 1e-6, "{e}");
    }
}
