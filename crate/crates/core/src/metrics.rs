//! Fisher information of planar densities, the resulting lower bound on any
//! predictor's mean squared error, and the unpredictability/energy objective.

use serde::Serialize;

use crate::density::EvasionDensity;
use crate::error::{EvasionError, Result};
use crate::geometry::Point2;
use crate::potential::EnergyPotential;
use crate::quadrature::{integrate_2d, Tolerance};

/// Square-root density `u = √ξ` and its polar partial derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitude {
    pub value: f64,
    pub d_r: f64,
    pub d_theta: f64,
}

/// A density known through its amplitude `u = √ξ` in polar coordinates about
/// some apex.
pub trait AmplitudeField {
    fn amplitude(&self, r: f64, theta: f64) -> Amplitude;
}

/// `trace 𝓘(ξ) = ∫ ‖∇ξ‖²/ξ = 4 ∫ ‖∇u‖²` over the sector `r ≤ r_max`,
/// `|θ| ≤ half_angle`.
///
/// The amplitude form stays bounded where `ξ → 0`, unlike `‖∇ξ‖²/ξ`.
pub fn fisher_trace_polar<F: AmplitudeField>(field: &F, r_max: f64, half_angle: f64, tol: Tolerance) -> Result<f64> {
    let est = integrate_2d(
        |r, theta| {
            let a = field.amplitude(r, theta);
            4.0 * (a.d_r * a.d_r * r + a.d_theta * a.d_theta / r)
        },
        (0.0, r_max),
        (-half_angle, half_angle),
        tol,
    )?;
    Ok(est.value)
}

/// Isotropic planar Gaussian with standard deviation `sigma` per axis.
#[derive(Clone, Copy, Debug)]
pub struct IsotropicGaussian {
    pub sigma: f64,
}

impl IsotropicGaussian {
    pub fn unit() -> Self {
        IsotropicGaussian { sigma: 1.0 }
    }

    pub fn pdf(&self, offset: Point2) -> f64 {
        let s2 = self.sigma * self.sigma;
        (-offset.norm_sq() / (2.0 * s2)).exp() / (2.0 * std::f64::consts::PI * s2)
    }

    /// Radius beyond which the mass is below `1e-16`.
    pub fn support_radius(&self) -> f64 {
        self.sigma * (2.0 * 16.0 * std::f64::consts::LN_10).sqrt()
    }

    pub fn fisher_trace(&self) -> Result<f64> {
        fisher_trace_polar(self, self.support_radius(), std::f64::consts::PI, Tolerance::new(1e-13, 1e-10))
    }
}

impl AmplitudeField for IsotropicGaussian {
    fn amplitude(&self, r: f64, _theta: f64) -> Amplitude {
        let s2 = self.sigma * self.sigma;
        let value = (-r * r / (4.0 * s2)).exp() / (2.0 * std::f64::consts::PI * s2).sqrt();
        Amplitude {
            value,
            d_r: -r / (2.0 * s2) * value,
            d_theta: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvasionMetrics {
    pub fisher_trace: f64,
    /// Lower bound `1 / fisher_trace` on the predictor's mean squared error.
    pub bound: f64,
    pub expected_energy: f64,
    pub rho: f64,
    /// `fisher_trace + rho * expected_energy`.
    pub objective: f64,
}

impl EvasionMetrics {
    pub fn from_parts(fisher_trace: f64, expected_energy: f64, rho: f64) -> Self {
        EvasionMetrics {
            fisher_trace,
            bound: 1.0 / fisher_trace,
            expected_energy,
            rho,
            objective: fisher_trace + rho * expected_energy,
        }
    }
}

pub fn metrics(density: &EvasionDensity, pot: &EnergyPotential, rho: f64) -> Result<EvasionMetrics> {
    if !(rho > 0.0) {
        return Err(EvasionError::invalid("rho", format!("{rho} is not > 0")));
    }
    let fisher = density.fisher_trace()?;
    let energy = density.expected_energy(pot)?;
    Ok(EvasionMetrics::from_parts(fisher, energy, rho))
}

/// Mean of `‖estimate - realization‖²` over paired samples.
pub fn empirical_mse(estimates: &[Point2], realizations: &[Point2]) -> Result<f64> {
    Ok(mse_summary(estimates, realizations)?.mean)
}

/// Sample mean of squared errors with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MseSummary {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

pub fn mse_summary(estimates: &[Point2], realizations: &[Point2]) -> Result<MseSummary> {
    if estimates.len() != realizations.len() || estimates.is_empty() {
        return Err(EvasionError::LengthMismatch {
            left: estimates.len(),
            right: realizations.len(),
        });
    }
    let sq: Vec<f64> = estimates
        .iter()
        .zip(realizations)
        .map(|(e, y)| e.distance_sq(*y))
        .collect();
    Ok(summarize(&sq))
}

pub(crate) fn summarize(values: &[f64]) -> MseSummary {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    MseSummary {
        mean,
        std_error: (var / n as f64).sqrt(),
        n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_gaussian_fisher_trace_is_dimension() {
        let f = IsotropicGaussian::unit().fisher_trace().unwrap();
        assert!((f - 2.0).abs() < 1e-8, "{f}");
        let m = EvasionMetrics::from_parts(f, 0.0, 1.0);
        assert!((m.bound - 0.5).abs() < 1e-8);
    }

    #[test]
    fn gaussian_scaling() {
        // Lengths scaled by c rescale the trace by 1/c².
        let f = IsotropicGaussian { sigma: 2.0 }.fisher_trace().unwrap();
        assert!((f - 0.5).abs() < 1e-8, "{f}");
    }

    #[test]
    fn mse_basics() {
        let a = [Point2::new(1.0, 2.0), Point2::new(-3.0, 0.5)];
        assert_eq!(empirical_mse(&a, &a).unwrap(), 0.0);
        assert_eq!(empirical_mse(&[Point2::ORIGIN], &[Point2::new(3.0, 4.0)]).unwrap(), 25.0);
        assert!(matches!(
            empirical_mse(&a, &a[..1]),
            Err(EvasionError::LengthMismatch { left: 2, right: 1 })
        ));
        assert!(empirical_mse(&[], &[]).is_err());
    }

    #[test]
    fn metrics_fields_consistent() {
        let m = EvasionMetrics::from_parts(6.0, 6.0, 1.0);
        assert_eq!(m.bound * m.fisher_trace, 1.0);
        assert_eq!(m.objective, 12.0);
    }
}
