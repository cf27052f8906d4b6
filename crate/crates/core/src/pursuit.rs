//! Repeated pursuit: every period the prey draws its next waypoint from the
//! optimal density anchored at its current position and oriented away from
//! the predator, while the predator, knowing the policy, jumps to the
//! conditional mean of that same density.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::ClosedFormDensity;
use crate::density::{to_world, EvasionDensity};
use crate::error::{EvasionError, Result};
use crate::geometry::{validate_half_angle, Point2, WedgeDomain};
use crate::metrics::{metrics, summarize};
use crate::potential::EnergyPotential;
use crate::rng::{substream, SeededGenerator};
use crate::solver::{density_from_state, solve, SolverSettings, WedgeMesh};
use crate::stats::Histogram;

/// Separations below this count as a capture.
pub const CAPTURE_DISTANCE: f64 = 1e-6;

/// Trajectories per aggregation chunk; fixes the summation order so
/// statistics are bit-reproducible regardless of thread count.
const CHUNK: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensitySource {
    ClosedForm,
    Solver { n_r: usize, n_theta: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PursuitConfig {
    pub y0: Point2,
    pub z0: Point2,
    pub theta_max: f64,
    pub rho: f64,
    pub horizon: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub seed: u64,
    pub density_source: DensitySource,
}

impl Default for PursuitConfig {
    fn default() -> Self {
        PursuitConfig {
            y0: Point2::ORIGIN,
            z0: Point2::new(-2.0, 0.0),
            theta_max: std::f64::consts::FRAC_PI_4,
            rho: 1.0,
            horizon: 1.0,
            n_steps: 10,
            n_trajectories: 1000,
            seed: 7,
            density_source: DensitySource::ClosedForm,
        }
    }
}

impl PursuitConfig {
    pub fn validate(&self) -> Result<()> {
        validate_half_angle(self.theta_max)?;
        if !(self.rho > 0.0) || !(self.horizon > 0.0) {
            return Err(EvasionError::invalid("rho/horizon", "must be > 0"));
        }
        if self.n_trajectories == 0 {
            return Err(EvasionError::invalid("n_trajectories", "must be >= 1"));
        }
        if self.y0.distance(self.z0) < CAPTURE_DISTANCE {
            return Err(EvasionError::CoincidentPositions);
        }
        Ok(())
    }
}

/// The prey's policy in a canonical frame (apex at the origin, heading +x),
/// re-anchored at every step.
#[derive(Clone, Debug)]
pub struct PursuitPolicy {
    template: EvasionDensity,
    local_mean: Point2,
    fisher_trace: f64,
}

impl PursuitPolicy {
    pub fn new(cfg: &PursuitConfig) -> Result<Self> {
        cfg.validate()?;
        let r_max = ClosedFormDensity::tail_radius(cfg.theta_max, cfg.rho, cfg.horizon)?;
        let wedge = WedgeDomain::new(Point2::ORIGIN, Point2::new(1.0, 0.0), cfg.theta_max, r_max)?;
        let template = match cfg.density_source {
            DensitySource::ClosedForm => EvasionDensity::ClosedForm(ClosedFormDensity::new(wedge, cfg.rho, cfg.horizon)?),
            DensitySource::Solver { n_r, n_theta } => {
                let mesh = WedgeMesh::new(wedge, n_r, n_theta)?;
                let pot = EnergyPotential::single_integrator(cfg.horizon, Point2::ORIGIN)?;
                density_from_state(&solve(mesh, &pot, cfg.rho, SolverSettings::default())?)
            }
        };
        let fisher_trace = template.fisher_trace()?;
        Ok(PursuitPolicy {
            local_mean: template.local_mean(),
            template,
            fisher_trace,
        })
    }

    pub fn template(&self) -> &EvasionDensity {
        &self.template
    }

    pub fn fisher_trace(&self) -> f64 {
        self.fisher_trace
    }

    /// Lower bound on the predator's mean squared prediction error.
    pub fn bound(&self) -> f64 {
        1.0 / self.fisher_trace
    }

    /// The policy's density for a prey at `prey` fleeing `predator`.
    pub fn density_at(&self, prey: Point2, predator: Point2) -> Result<EvasionDensity> {
        let w = self.template.wedge();
        let wedge = WedgeDomain::from_positions(prey, predator, w.half_angle(), w.r_max())?;
        self.template.recentered(wedge)
    }
}

/// One period: returns the prey's new waypoint and the predator's new
/// position (its prediction of that waypoint).
pub fn step(
    prey: Point2,
    predator: Point2,
    policy: &PursuitPolicy,
    rng: &mut SeededGenerator,
) -> Result<(Point2, Point2)> {
    let distance = prey.distance(predator);
    if distance < CAPTURE_DISTANCE {
        return Err(EvasionError::CaptureEvent { distance });
    }
    let w = policy.template.wedge();
    let wedge = WedgeDomain::from_positions(prey, predator, w.half_angle(), w.r_max())?;
    let offset = policy.template.sample_offset(rng);
    Ok((wedge.from_polar(offset), to_world(&wedge, policy.local_mean)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PursuitTrace {
    pub trajectory_id: u64,
    pub seed: u64,
    /// `y(kT)`, `k = 0..=n_steps` (shorter after a capture).
    pub prey: Vec<Point2>,
    /// `z(kT)`.
    pub predator: Vec<Point2>,
    /// `‖z(kT) - y(kT)‖`.
    pub distances: Vec<f64>,
    /// Mean of the density drawn from at step `k`, i.e. the prediction of
    /// `y((k+1)T)`.
    pub density_means: Vec<Point2>,
    pub captured_at: Option<usize>,
}

impl PursuitTrace {
    pub fn len(&self) -> usize {
        self.prey.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prey.is_empty()
    }

    /// Straight-line positions between waypoints, `per_period` samples per
    /// period, as `(t / T, prey, predator)`.
    pub fn interpolated(&self, per_period: usize) -> Vec<(f64, Point2, Point2)> {
        let per = per_period.max(1);
        let mut out = Vec::with_capacity(self.len().saturating_sub(1) * per + 1);
        for k in 0..self.len().saturating_sub(1) {
            for s in 0..per {
                let f = s as f64 / per as f64;
                let lerp = |a: Point2, b: Point2| a + (b - a) * f;
                out.push((
                    k as f64 + f,
                    lerp(self.prey[k], self.prey[k + 1]),
                    lerp(self.predator[k], self.predator[k + 1]),
                ));
            }
        }
        if let (Some(y), Some(z)) = (self.prey.last(), self.predator.last()) {
            out.push(((self.len() - 1) as f64, *y, *z));
        }
        out
    }
}

/// Simulates trajectory `id` on its own substream of `cfg.seed`.
pub fn simulate_trajectory(cfg: &PursuitConfig, policy: &PursuitPolicy, id: u64) -> PursuitTrace {
    let mut rng = substream(cfg.seed, id);
    let cap = cfg.n_steps + 1;
    let mut trace = PursuitTrace {
        trajectory_id: id,
        seed: cfg.seed,
        prey: Vec::with_capacity(cap),
        predator: Vec::with_capacity(cap),
        distances: Vec::with_capacity(cap),
        density_means: Vec::with_capacity(cfg.n_steps),
        captured_at: None,
    };
    let (mut y, mut z) = (cfg.y0, cfg.z0);
    trace.prey.push(y);
    trace.predator.push(z);
    trace.distances.push(y.distance(z));
    for k in 0..cfg.n_steps {
        match step(y, z, policy, &mut rng) {
            Ok((ny, nz)) => {
                y = ny;
                z = nz;
            }
            Err(_) => {
                trace.captured_at = Some(k);
                break;
            }
        }
        trace.density_means.push(z);
        trace.prey.push(y);
        trace.predator.push(z);
        let d = y.distance(z);
        trace.distances.push(d);
        if d < CAPTURE_DISTANCE {
            trace.captured_at = Some(k + 1);
            break;
        }
    }
    trace
}

/// All trajectories of `cfg`, in trajectory order.
pub fn run(cfg: &PursuitConfig) -> Result<Vec<PursuitTrace>> {
    let policy = PursuitPolicy::new(cfg)?;
    Ok(run_with_policy(cfg, &policy))
}

pub fn run_with_policy(cfg: &PursuitConfig, policy: &PursuitPolicy) -> Vec<PursuitTrace> {
    (0..cfg.n_trajectories as u64)
        .into_par_iter()
        .map(|id| simulate_trajectory(cfg, policy, id))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepStatistics {
    pub k: usize,
    pub samples: usize,
    pub mean_sq_distance: f64,
    pub std_error: f64,
    /// Fraction with `‖z - y‖² ≥ bound`.
    pub fraction_above_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PursuitStatistics {
    pub bound: f64,
    pub trajectories: usize,
    pub steps: Vec<StepStatistics>,
    /// Fraction over all `k ≥ 1` with `‖z - y‖² ≥ bound`.
    pub pooled_fraction_above_bound: f64,
    pub captures: usize,
}

#[derive(Clone, Debug)]
struct Accumulator {
    n: Vec<u64>,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    above: Vec<u64>,
    captures: usize,
}

impl Accumulator {
    fn new(steps: usize) -> Self {
        Accumulator {
            n: vec![0; steps + 1],
            sum: vec![0.0; steps + 1],
            sum_sq: vec![0.0; steps + 1],
            above: vec![0; steps + 1],
            captures: 0,
        }
    }

    fn add(&mut self, trace: &PursuitTrace, bound: f64) {
        for (k, d) in trace.distances.iter().enumerate() {
            let d2 = d * d;
            self.n[k] += 1;
            self.sum[k] += d2;
            self.sum_sq[k] += d2 * d2;
            if d2 >= bound {
                self.above[k] += 1;
            }
        }
        if trace.captured_at.is_some() {
            self.captures += 1;
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        for k in 0..self.n.len() {
            self.n[k] += other.n[k];
            self.sum[k] += other.sum[k];
            self.sum_sq[k] += other.sum_sq[k];
            self.above[k] += other.above[k];
        }
        self.captures += other.captures;
    }

    fn finish(self, bound: f64, trajectories: usize) -> PursuitStatistics {
        let steps = (0..self.n.len())
            .map(|k| {
                let n = self.n[k] as f64;
                let mean = self.sum[k] / n;
                let var = if n > 1.0 {
                    ((self.sum_sq[k] - n * mean * mean) / (n - 1.0)).max(0.0)
                } else {
                    0.0
                };
                StepStatistics {
                    k,
                    samples: self.n[k] as usize,
                    mean_sq_distance: mean,
                    std_error: (var / n).sqrt(),
                    fraction_above_bound: self.above[k] as f64 / n,
                }
            })
            .collect();
        let pooled_n: u64 = self.n.iter().skip(1).sum();
        let pooled_above: u64 = self.above.iter().skip(1).sum();
        PursuitStatistics {
            bound,
            trajectories,
            steps,
            pooled_fraction_above_bound: if pooled_n > 0 {
                pooled_above as f64 / pooled_n as f64
            } else {
                f64::NAN
            },
            captures: self.captures,
        }
    }
}

impl PursuitStatistics {
    pub fn from_traces(traces: &[PursuitTrace], bound: f64) -> Self {
        let steps = traces.iter().map(|t| t.len()).max().unwrap_or(1) - 1;
        let mut acc = Accumulator::new(steps);
        for t in traces {
            acc.add(t, bound);
        }
        acc.finish(bound, traces.len())
    }
}

/// Distance statistics without keeping traces in memory. Chunks are reduced
/// in a fixed order, so the result does not depend on scheduling.
pub fn run_statistics(cfg: &PursuitConfig, policy: &PursuitPolicy) -> PursuitStatistics {
    let bound = policy.bound();
    let n = cfg.n_trajectories;
    let chunks: Vec<Accumulator> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = Accumulator::new(cfg.n_steps);
            for id in c * CHUNK..((c + 1) * CHUNK).min(n) {
                acc.add(&simulate_trajectory(cfg, policy, id as u64), bound);
            }
            acc
        })
        .collect();
    let mut total = Accumulator::new(cfg.n_steps);
    for c in &chunks {
        total.merge(c);
    }
    total.finish(bound, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceVariable {
    Distance,
    SquaredDistance,
}

/// Normalized histogram of predator–prey separation at step `k`, over the
/// trajectories still running at that step.
pub fn distance_histogram(
    traces: &[PursuitTrace],
    k: usize,
    bins: usize,
    variable: DistanceVariable,
) -> Result<Histogram> {
    let max_k = traces.iter().map(|t| t.len()).max().unwrap_or(0).saturating_sub(1);
    if k > max_k {
        return Err(EvasionError::IndexOutOfRange { index: k, max: max_k });
    }
    let values: Vec<f64> = traces
        .iter()
        .filter_map(|t| t.distances.get(k))
        .map(|d| match variable {
            DistanceVariable::Distance => *d,
            DistanceVariable::SquaredDistance => d * d,
        })
        .collect();
    Histogram::from_values(&values, bins)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TradeoffPoint {
    pub rho: f64,
    pub fisher_trace: f64,
    pub expected_energy: f64,
}

/// Fisher trace and expected energy of the closed-form optimum for each
/// trade-off weight.
pub fn tradeoff_sweep(rhos: &[f64], theta_max: f64, horizon: f64) -> Result<Vec<TradeoffPoint>> {
    if let Some(bad) = rhos.iter().find(|r| !(**r > 0.0)) {
        return Err(EvasionError::invalid("rho", format!("{bad} is not > 0")));
    }
    rhos.par_iter()
        .map(|&rho| {
            let wedge = WedgeDomain::new(Point2::ORIGIN, Point2::new(1.0, 0.0), theta_max, 1.0)?;
            let density = EvasionDensity::ClosedForm(ClosedFormDensity::new(wedge, rho, horizon)?);
            let pot = EnergyPotential::single_integrator(horizon, Point2::ORIGIN)?;
            let m = metrics(&density, &pot, rho)?;
            Ok(TradeoffPoint {
                rho,
                fisher_trace: m.fisher_trace,
                expected_energy: m.expected_energy,
            })
        })
        .collect()
}

/// Squared prediction errors at step `k ≥ 1` pooled over traces, with
/// their mean and standard error.
pub fn prediction_error(traces: &[PursuitTrace], k: usize) -> Option<crate::metrics::MseSummary> {
    let sq: Vec<f64> = traces.iter().filter_map(|t| t.distances.get(k)).map(|d| d * d).collect();
    (!sq.is_empty()).then(|| summarize(&sq))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: usize) -> PursuitConfig {
        PursuitConfig {
            n_trajectories: n,
            n_steps: 6,
            ..PursuitConfig::default()
        }
    }

    #[test]
    fn first_step_predator_moves_to_mean() {
        let cfg = small(1);
        let policy = PursuitPolicy::new(&cfg).unwrap();
        let mut rng = substream(1, 0);
        let (y, z) = step(cfg.y0, cfg.z0, &policy, &mut rng).unwrap();
        assert!((z.x - 2.256_758_334_191).abs() < 1e-9);
        assert_eq!(z.y, 0.0);
        let wedge = WedgeDomain::from_positions(cfg.y0, cfg.z0, cfg.theta_max, 1e3).unwrap();
        assert!(wedge.contains(y));
    }

    #[test]
    fn capture_rejected() {
        let policy = PursuitPolicy::new(&small(1)).unwrap();
        let mut rng = substream(1, 0);
        let p = Point2::new(1.0, 1.0);
        assert!(matches!(
            step(p, p, &policy, &mut rng),
            Err(EvasionError::CaptureEvent { .. })
        ));
    }

    #[test]
    fn zero_steps_keeps_initial_positions() {
        let cfg = PursuitConfig {
            n_steps: 0,
            ..small(3)
        };
        let traces = run(&cfg).unwrap();
        for t in &traces {
            assert_eq!(t.len(), 1);
            assert_eq!(t.distances, vec![2.0]);
        }
    }

    #[test]
    fn traces_are_reproducible() {
        let cfg = small(64);
        assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
        let other = PursuitConfig { seed: 8, ..cfg };
        assert_ne!(run(&cfg).unwrap(), run(&other).unwrap());
    }

    #[test]
    fn statistics_match_between_streaming_and_traces() {
        let cfg = small(3000);
        let policy = PursuitPolicy::new(&cfg).unwrap();
        let traces = run_with_policy(&cfg, &policy);
        let a = PursuitStatistics::from_traces(&traces, policy.bound());
        let b = run_statistics(&cfg, &policy);
        for (x, y) in a.steps.iter().zip(&b.steps) {
            assert_eq!(x.samples, y.samples);
            assert!((x.mean_sq_distance - y.mean_sq_distance).abs() < 1e-12);
            assert_eq!(x.fraction_above_bound, y.fraction_above_bound);
        }
    }

    #[test]
    fn histogram_errors_and_start() {
        let traces = run(&small(50)).unwrap();
        assert!(matches!(
            distance_histogram(&traces, 7, 10, DistanceVariable::Distance),
            Err(EvasionError::IndexOutOfRange { index: 7, max: 6 })
        ));
        assert!(distance_histogram(&traces, 0, 1, DistanceVariable::Distance).is_err());
        let h = distance_histogram(&traces, 0, 10, DistanceVariable::Distance).unwrap();
        assert_eq!(h.mass[h.bin_of(2.0).unwrap()], 1.0);
    }

    #[test]
    fn interpolation_hits_waypoints() {
        let traces = run(&small(1)).unwrap();
        let pts = traces[0].interpolated(4);
        assert_eq!(pts.len(), 6 * 4 + 1);
        assert_eq!(pts[4].1, traces[0].prey[1]);
        assert_eq!(pts.last().unwrap().2, *traces[0].predator.last().unwrap());
    }

    #[test]
    fn tradeoff_rejects_nonpositive_rho() {
        assert!(tradeoff_sweep(&[1.0, 0.0], std::f64::consts::FRAC_PI_4, 1.0).is_err());
    }
}
