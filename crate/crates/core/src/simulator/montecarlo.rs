//! Spin-noise dispersion of the touchdown speed.
//!
//! Each trial perturbs the planned spin by a transverse error
//! `w_e ~ Normal(0, sigma_w)` and evaluates the touchdown speed twice: with the
//! closed-form misdirected-impulse law and by flying the perturbed spin
//! through the rigid-body simulator.
//!
//! Normal deviates come from the Box–Muller transform applied to uniforms
//! drawn from ChaCha8. Trial `i` uses the stream `i` of a generator seeded
//! with the run seed, so the report does not depend on how trials are
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::attitude::{impact_speed_with_noise, pointing_error, Direction3, SpinPlan};
use crate::ballistics::BodyEnvironment;
use crate::error::{Error, Result};
use crate::simulator::flight::{integrate_with_burn, optimize_ignition, Ignition, RigidState, SimConfig};
use crate::simulator::thruster::ThrusterSpec;

/// Everything needed to fly one planned mission.
#[derive(Debug, Clone, PartialEq)]
pub struct FlightSetup {
    /// m/s
    pub v0: f64,
    /// rad
    pub theta: f64,
    /// m
    pub floor_depth: f64,
    pub env: BodyEnvironment,
    /// Bot mass at launch, kg.
    pub mass: f64,
    /// Pre-impact speed from the closed form, m/s.
    pub v_f: f64,
    pub spin: SpinPlan,
    pub thruster: ThrusterSpec,
}

impl FlightSetup {
    pub fn initial_state(&self) -> RigidState {
        RigidState::launch(self.v0, self.theta, &self.spin)
    }
}

/// Box–Muller standard normal deviate.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // u1 in (0, 1] keeps the logarithm finite
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    /// Transverse spin error, rad/s.
    pub w_e: f64,
    /// Pointing error, rad.
    pub phi_e: f64,
    /// Closed-form touchdown speed, m/s.
    pub v_i_closed: f64,
    /// Simulated touchdown speed, m/s; `None` when the simulator column is off.
    pub v_i_sim: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnStats {
    pub mean: f64,
    pub std: f64,
    pub p50: f64,
    pub p95: f64,
    pub p99: f64,
}

impl ColumnStats {
    /// Mean, sample standard deviation and linearly interpolated percentiles.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std: f64::NAN,
                p50: f64::NAN,
                p95: f64::NAN,
                p99: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            mean,
            std,
            p50: percentile(&sorted, 0.50),
            p95: percentile(&sorted, 0.95),
            p99: percentile(&sorted, 0.99),
        }
    }
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` ascending edges, m/s.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Equal-width bins over `[0, max]`; the last bin is closed.
    pub fn from_values(values: &[f64], bins: usize) -> Self {
        let bins = bins.max(1);
        let max = values.iter().copied().fold(0.0, f64::max);
        let width = if max > 0.0 { max / bins as f64 } else { 1.0 / bins as f64 };
        let edges = (0..=bins).map(|i| i as f64 * width).collect();
        let mut counts = vec![0; bins];
        for &v in values {
            let i = ((v / width).floor() as usize).min(bins - 1);
            counts[i] += 1;
        }
        Self { edges, counts }
    }
}

pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionReport {
    pub seed: u64,
    pub sigma_w: f64,
    /// Ignition time shared by all simulated trials, s.
    pub ignition_time: f64,
    pub trials: Vec<TrialRecord>,
    pub closed: ColumnStats,
    pub closed_histogram: Histogram,
    pub sim: Option<ColumnStats>,
    pub sim_histogram: Option<Histogram>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloOptions {
    pub trials: usize,
    /// Standard deviation of the transverse spin error, rad/s.
    pub sigma_w: f64,
    pub seed: u64,
    /// Fly every trial through the rigid-body simulator.
    pub simulate: bool,
}

/// Runs the dispersion study for a planned flight.
///
/// Simulated trials all ignite at the touchdown-optimal time of the
/// noise-free flight (or `cfg.ignition` when it is fixed); the noise only
/// changes the spin the launcher imparts.
pub fn monte_carlo(setup: &FlightSetup, opts: &MonteCarloOptions, cfg: &SimConfig) -> Result<DispersionReport> {
    if opts.trials == 0 {
        return Err(Error::domain("Monte Carlo needs at least one trial"));
    }
    if !(opts.sigma_w.is_finite() && opts.sigma_w >= 0.0) {
        return Err(Error::domain(format!("sigma_w must be >= 0, got {}", opts.sigma_w)));
    }
    let spin = &setup.spin;
    let w_nominal_closed = spin.w_f * spin.e_d.as_vector();
    let e_t_closed = spin.e_d.tangent().as_vector();
    let spin_axis = Direction3::new(spin.spin_vector()).unwrap_or(spin.e_o);
    let e_t_sim = spin_axis.tangent().as_vector();

    let ignition_time = if opts.simulate {
        match cfg.ignition {
            Ignition::At(t) => t,
            Ignition::Auto => {
                optimize_ignition(
                    &setup.initial_state(),
                    spin,
                    &setup.thruster,
                    setup.mass,
                    &setup.env,
                    setup.floor_depth,
                    cfg,
                )?
                .0
            }
        }
    } else {
        f64::NAN
    };
    let trial_cfg = SimConfig {
        ignition: Ignition::At(ignition_time),
        require_full_rotations: false,
        ..*cfg
    };

    let run_trial = |i: usize| -> Result<TrialRecord> {
        let mut rng = trial_rng(opts.seed, i as u64);
        let w_e = opts.sigma_w * standard_normal(&mut rng);
        let w_actual = w_nominal_closed + w_e * e_t_closed;
        let phi_e = if spin.w_f > 0.0 {
            pointing_error(&w_nominal_closed, &w_actual)?
        } else {
            0.0
        };
        let v_i_closed = impact_speed_with_noise(setup.v_f, phi_e);
        let v_i_sim = if opts.simulate {
            let mut s0 = setup.initial_state();
            s0.w += w_e * e_t_sim;
            let out = integrate_with_burn(
                &s0,
                spin,
                &setup.thruster,
                setup.mass,
                &setup.env,
                setup.floor_depth,
                &trial_cfg,
            )?;
            Some(out.v_impact)
        } else {
            None
        };
        Ok(TrialRecord {
            trial: i,
            w_e,
            phi_e,
            v_i_closed,
            v_i_sim,
        })
    };

    let trials: Vec<TrialRecord> = (0..opts.trials)
        .into_par_iter()
        .map(run_trial)
        .collect::<Result<_>>()?;

    let closed_values: Vec<f64> = trials.iter().map(|r| r.v_i_closed).collect();
    let sim_values: Option<Vec<f64>> = trials.iter().map(|r| r.v_i_sim).collect();
    Ok(DispersionReport {
        seed: opts.seed,
        sigma_w: opts.sigma_w,
        ignition_time,
        closed: ColumnStats::from_values(&closed_values),
        closed_histogram: Histogram::from_values(&closed_values, HISTOGRAM_BINS),
        sim: sim_values.as_deref().map(ColumnStats::from_values),
        sim_histogram: sim_values.as_deref().map(|v| Histogram::from_values(v, HISTOGRAM_BINS)),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn box_muller_moments() {
        let mut rng = trial_rng(7, 0);
        let xs: Vec<f64> = (0..200_000).map(|_| standard_normal(&mut rng)).collect();
        let s = ColumnStats::from_values(&xs);
        assert!(s.mean.abs() < 0.01, "{}", s.mean);
        assert_relative_eq!(s.std, 1.0, epsilon = 0.01);
        assert_relative_eq!(s.p50, 0.0, epsilon = 0.01);
        assert_relative_eq!(s.p95, 1.6449, epsilon = 0.02);
    }

    #[test]
    fn streams_are_independent_of_order() {
        let a: Vec<f64> = (0..4).map(|i| standard_normal(&mut trial_rng(1, i))).collect();
        let b: Vec<f64> = (0..4).rev().map(|i| standard_normal(&mut trial_rng(1, i))).collect();
        let b: Vec<f64> = b.into_iter().rev().collect();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn percentiles_interpolate() {
        let s = ColumnStats::from_values(&[4.0, 1.0, 3.0, 2.0, 5.0]);
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.p50, 3.0);
        assert_relative_eq!(s.p95, 4.8);
        assert_relative_eq!(s.std, 2.5f64.sqrt());
        let one = ColumnStats::from_values(&[2.0]);
        assert_eq!((one.p99, one.std), (2.0, 0.0));
    }

    #[test]
    fn histogram_counts_everything() {
        let h = Histogram::from_values(&[0.0, 0.5, 1.0, 1.0], 2);
        assert_eq!(h.edges, vec![0.0, 0.5, 1.0]);
        assert_eq!(h.counts, vec![1, 3]);
        let z = Histogram::from_values(&[0.0, 0.0], 4);
        assert_eq!(z.counts.iter().sum::<usize>(), 2);
    }
}
