//! Goodness-of-fit statistics and histograms for checking samplers and
//! simulation output.

use serde::Serialize;
use statrs::function::gamma::gamma_ur;

use crate::error::{EvasionError, Result};

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n - F|`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic Kolmogorov survival `P(K > lambda)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = (-2.0 * j * j * lambda * lambda).exp();
        sum += if j as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> TestOutcome {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let ne = (n * m / (n + m)).sqrt();
    TestOutcome {
        statistic: d,
        p_value: kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d),
    }
}

/// Pearson χ² test of observed counts against expected counts, with
/// `bins - 1` degrees of freedom.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Result<TestOutcome> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(EvasionError::LengthMismatch {
            left: observed.len(),
            right: expected.len(),
        });
    }
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (*o as f64 - e).powi(2) / e)
        .sum();
    let dof = (observed.len() - 1) as f64;
    Ok(TestOutcome {
        statistic,
        p_value: if statistic > 0.0 {
            gamma_ur(dof / 2.0, statistic / 2.0)
        } else {
            1.0
        },
    })
}

/// Equal-width histogram normalized to unit total mass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_lo: Vec<f64>,
    pub bin_hi: Vec<f64>,
    pub mass: Vec<f64>,
}

impl Histogram {
    /// Bins `[0, max]` (slightly widened so the maximum lands inside).
    pub fn from_values(values: &[f64], bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(EvasionError::invalid("bins", format!("{bins} < 2")));
        }
        if values.is_empty() {
            return Err(EvasionError::invalid("values", "no samples"));
        }
        let max = values.iter().cloned().fold(0.0, f64::max);
        let top = if max > 0.0 { max * (1.0 + 1e-9) } else { 1.0 };
        let width = top / bins as f64;
        let mut counts = vec![0u64; bins];
        for &v in values {
            let b = ((v / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        let n = values.len() as f64;
        Ok(Histogram {
            bin_lo: (0..bins).map(|b| b as f64 * width).collect(),
            bin_hi: (0..bins).map(|b| (b + 1) as f64 * width).collect(),
            mass: counts.iter().map(|c| *c as f64 / n).collect(),
        })
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        self.bin_lo
            .iter()
            .zip(&self.bin_hi)
            .position(|(lo, hi)| x >= *lo && x < *hi)
    }
}
