use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use proptest::prelude::*;
use statrs::function::gamma::gamma_lr;
use stochastic_evasion::quadrature::{integrate, Tolerance};
use stochastic_evasion::rng::substream;
use stochastic_evasion::stats::{chi_square, ks_statistic};
use stochastic_evasion::{
    ClosedFormDensity, EnergyPotential, EvasionDensity, Point2, PolarOffset, TabulatedPotential, WedgeDomain,
    WedgeMesh,
};

fn density(theta_max: f64, rho: f64, horizon: f64) -> ClosedFormDensity {
    let w = WedgeDomain::from_positions(Point2::ORIGIN, Point2::new(-2.0, 0.0), theta_max, 1.0).unwrap();
    ClosedFormDensity::new(w, rho, horizon).unwrap()
}

#[test]
fn normalized_and_zero_on_boundary_across_parameters() {
    for theta_max in [FRAC_PI_8, FRAC_PI_4, FRAC_PI_2, PI] {
        for rho in [0.5, 1.0, 2.0] {
            for horizon in [0.5, 1.0, 2.0] {
                let d = density(theta_max, rho, horizon);
                let mass = d.total_mass().unwrap();
                assert!((mass - 1.0).abs() < 1e-6, "θ={theta_max} ρ={rho} T={horizon}: {mass}");
                let w = d.wedge();
                for r in [0.0, 0.3, 1.0, 2.5, 0.5 * w.r_max()] {
                    for side in [-1.0, 1.0] {
                        let p = w.from_polar(PolarOffset::new(r, side * theta_max));
                        assert_eq!(d.pdf(p), 0.0);
                        assert_eq!(d.pdf_polar(r, side * theta_max), 0.0);
                    }
                }
                assert_eq!(d.pdf(w.apex()), 0.0);
            }
        }
    }
}

#[test]
fn sampler_matches_radial_and_angular_laws() {
    let d = density(FRAC_PI_4, 1.0, 1.0);
    let n = 1_000_000;
    let mut rng = substream(2024, 0);
    let offsets: Vec<PolarOffset> = (0..n).map(|_| d.sample_offset(&mut rng)).collect();

    // r² ~ Gamma(ω + 1, 2/a).
    let s: Vec<f64> = offsets.iter().map(|o| o.r * o.r).collect();
    let (shape, scale) = (FRAC_PI_2 / FRAC_PI_4 + 1.0, 2.0);
    let ks = ks_statistic(&s, |x| if x <= 0.0 { 0.0 } else { gamma_lr(shape, x / scale) });
    assert!(ks < 0.002, "KS = {ks}");
    let mean_s = s.iter().sum::<f64>() / n as f64;
    assert!((mean_s - 6.0).abs() < 0.02, "E[r²] = {mean_s}");

    // θ has density cos²(2θ)/θ_max on [-π/4, π/4].
    let bins = 64;
    let width = 2.0 * FRAC_PI_4 / bins as f64;
    let mut counts = vec![0u64; bins];
    for o in &offsets {
        counts[(((o.theta + FRAC_PI_4) / width) as usize).min(bins - 1)] += 1;
    }
    let cdf = |t: f64| 0.5 + t / (2.0 * FRAC_PI_4) + (4.0 * t).sin() / (8.0 * FRAC_PI_4);
    let expected: Vec<f64> = (0..bins)
        .map(|b| {
            let lo = -FRAC_PI_4 + b as f64 * width;
            n as f64 * (cdf(lo + width) - cdf(lo))
        })
        .collect();
    let chi = chi_square(&counts, &expected).unwrap();
    assert!(chi.p_value > 0.01, "χ² p = {}", chi.p_value);

    let thetas: Vec<f64> = offsets.iter().map(|o| o.theta).collect();
    let mean_t = thetas.iter().sum::<f64>() / n as f64;
    let sd_t = (thetas.iter().map(|t| (t - mean_t).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
    assert!(mean_t.abs() < 3.0 * sd_t / (n as f64).sqrt());
    let below = thetas.iter().filter(|t| **t <= 0.0).count() as f64 / n as f64;
    assert!((below - 0.5).abs() < 0.002);
}

#[test]
fn mean_matches_independent_oracle() {
    // E[r] = Γ(3.5)/Γ(3)·√2 and E[cos θ] from an independent quadrature.
    let d = density(FRAC_PI_4, 1.0, 1.0);
    assert!((d.mean_radius() - 2.349_964_007_466_563).abs() < 1e-12);
    assert!((d.mean_cos() - 0.960_337_403_900_913).abs() < 1e-10);
    let m = d.mean();
    assert!((m.x - 2.256_758_334_191_026).abs() < 1e-9);
    assert_eq!(m.y, 0.0);

    // Strictly inside the wedge for every opening up to a half plane.
    for theta_max in [FRAC_PI_8, FRAC_PI_4, FRAC_PI_2] {
        let d = density(theta_max, 1.0, 1.0);
        assert!(d.mean_cos() > theta_max.cos());
        let o = d.wedge().to_polar(d.mean());
        assert!(o.r > 0.0 && o.theta.abs() < theta_max);
    }
}

#[test]
fn fisher_trace_scales_inverse_square_with_length() {
    // Lengths scale as (T/ρ)^¼; ρ/16 stretches them by c = 2.
    let base = density(FRAC_PI_4, 1.0, 1.0).fisher_trace().unwrap();
    let stretched = density(FRAC_PI_4, 1.0 / 16.0, 1.0).fisher_trace().unwrap();
    assert!((base - 6.0).abs() < 0.01);
    assert!((stretched - base / 4.0).abs() < 1e-4 * base);
}

#[test]
fn expected_energy_cases() {
    let d = density(FRAC_PI_4, 1.0, 1.0);
    let pot = EnergyPotential::single_integrator(1.0, Point2::ORIGIN).unwrap();
    let psi = d.expected_energy(&pot).unwrap();
    assert!((psi - 6.0).abs() < 0.01);

    // Monte Carlo cross-check of ψ = E[r²]/T.
    let mut rng = substream(11, 0);
    let n = 200_000;
    let mc: f64 = d.sample(&mut rng, n).iter().map(|p| p.norm_sq()).sum::<f64>() / n as f64;
    assert!((mc - psi).abs() < 0.05);

    // Zero cost.
    let mesh = WedgeMesh::new(*d.wedge(), 16, 16).unwrap();
    let zero = EnergyPotential::Tabulated(TabulatedPotential::new(mesh, vec![0.0; mesh.len()], true).unwrap());
    assert_eq!(d.expected_energy(&zero).unwrap(), 0.0);

    // Doubling T at fixed ρ: E[r²] grows by √2 and ψ = E[r²]/T falls by √2.
    let d2 = density(FRAC_PI_4, 1.0, 2.0);
    let pot2 = EnergyPotential::single_integrator(2.0, Point2::ORIGIN).unwrap();
    let psi2 = d2.expected_energy(&pot2).unwrap();
    assert!(psi2 < psi);
    assert!((psi2 - psi / 2f64.sqrt()).abs() < 1e-4 * psi);
}

#[test]
fn radial_marginal_matches_gamma_density() {
    // ∫ pdf dθ · r equals the Gamma(3, 2) density of s = r² times 2r.
    let d = density(FRAC_PI_4, 1.0, 1.0);
    for r in [0.5, 1.7, 3.0] {
        let marginal = integrate(|t| d.pdf_polar(r, t), -FRAC_PI_4, FRAC_PI_4, Tolerance::default())
            .unwrap()
            .value
            * r;
        let s: f64 = r * r;
        let gamma_pdf = s * s * (-s / 2.0).exp() / (2.0 * 8.0);
        assert!((marginal - 2.0 * r * gamma_pdf).abs() < 1e-10);
    }
}

#[test]
fn tradeoff_frontier_is_monotone() {
    let pot = EnergyPotential::single_integrator(1.0, Point2::ORIGIN).unwrap();
    let mut last: Option<(f64, f64)> = None;
    for rho in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let d = EvasionDensity::ClosedForm(density(FRAC_PI_4, rho, 1.0));
        let m = stochastic_evasion::metrics(&d, &pot, rho).unwrap();
        if let Some((f, e)) = last {
            assert!(m.fisher_trace > f && m.expected_energy < e);
        }
        last = Some((m.fisher_trace, m.expected_energy));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pdf_nonnegative_and_supported_on_wedge(
        x in -10.0f64..10.0, y in -10.0f64..10.0, theta_max in 0.1f64..PI, rho in 0.2f64..5.0,
    ) {
        let d = density(theta_max, rho, 1.0);
        let p = Point2::new(x, y);
        let v = d.pdf(p);
        prop_assert!(v >= 0.0 && v.is_finite());
        if !d.wedge().contains(p) {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn mean_is_rotation_equivariant(angle in -PI..PI, ax in -5.0f64..5.0, ay in -5.0f64..5.0) {
        let base = density(FRAC_PI_4, 1.0, 1.0);
        let apex = Point2::new(ax, ay);
        let heading = Point2::new(1.0, 0.0).rotated(angle);
        let moved = base.recentered(base.wedge().moved_to(apex, heading).unwrap()).unwrap();
        let expected = (base.mean() - base.wedge().apex()).rotated(angle);
        let got = moved.mean() - apex;
        prop_assert!((got - expected).norm() < 1e-12);
    }
}
