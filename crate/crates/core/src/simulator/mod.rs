//! Independent numerical oracle: 3D rigid-body flight of the spinning bot,
//! the cone-sweeping landing burn, and Monte Carlo spin-noise dispersion.

mod flight;
mod montecarlo;
mod thruster;

pub use flight::{
    auto_ignition_time, integrate_unpowered, integrate_with_burn, optimize_ignition_in,
    spin_rate_for_revolutions, trace_with_burn, BurnStatus, Ignition, ImpactOutcome, RigidState, SimConfig,
};
pub use montecarlo::{
    monte_carlo, standard_normal, trial_rng, ColumnStats, DispersionReport, FlightSetup, Histogram,
    MonteCarloOptions, TrialRecord, HISTOGRAM_BINS,
};
pub use thruster::{parse_thrust_curve, ThrustProfile, ThrusterSpec, STANDARD_GRAVITY};
