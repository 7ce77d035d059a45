//! Fixed-step RK4 propagation of the spinning sphere, with and without the
//! landing burn.

use std::f64::consts::TAU;
use std::ops::{Add, Mul};

use nalgebra::{Quaternion, UnitQuaternion, Vector3};

use crate::attitude::SpinPlan;
use crate::ballistics::{BodyEnvironment, TrajectorySample};
use crate::error::{Error, Result};
use crate::simulator::thruster::ThrusterSpec;

/// Full translational and rotational state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidState {
    /// s
    pub t: f64,
    /// Position in E, m.
    pub r: Vector3<f64>,
    /// Velocity in E, m/s.
    pub v: Vector3<f64>,
    /// Attitude, body B to inertial E.
    pub q: UnitQuaternion<f64>,
    /// Angular velocity in E, rad/s.
    pub w: Vector3<f64>,
}

impl RigidState {
    /// State at launcher release for a spin plan.
    pub fn launch(v0: f64, theta: f64, spin: &SpinPlan) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            t: 0.0,
            r: Vector3::zeros(),
            v: Vector3::new(v0 * c, 0.0, v0 * s),
            q: spin.body_attitude(),
            w: spin.spin_vector(),
        }
    }

    /// Kinetic plus potential energy per unit mass, J/kg.
    pub fn specific_energy(&self, g: f64) -> f64 {
        0.5 * self.v.norm_squared() + g * self.r.z
    }

    /// Nozzle-opposite body axis +b_z expressed in E; thrust acts along it.
    pub fn thrust_axis(&self) -> Vector3<f64> {
        self.q * Vector3::z()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ignition {
    /// Golden-section search for the touchdown-minimizing ignition time.
    Auto,
    /// Absolute ignition time, s.
    At(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Integration step, s.
    pub dt: f64,
    pub ignition: Ignition,
    /// Deplete propellant in proportion to delivered impulse.
    pub variable_mass: bool,
    /// Seed for noise sampling.
    pub seed: u64,
    /// Give up after this long without a floor crossing, s. `None` means ten
    /// times the closed-form floor time.
    pub max_time: Option<f64>,
    /// Reject spin plans whose burn does not span whole revolutions.
    pub require_full_rotations: bool,
    /// Largest touchdown speed the ignition search accepts, m/s.
    pub soft_landing_threshold: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            ignition: Ignition::Auto,
            variable_mass: false,
            seed: 0,
            max_time: None,
            require_full_rotations: true,
            soft_landing_threshold: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurnStatus {
    BurnoutAboveFloor,
    FloorHitMidBurn,
    FloorHitBeforeIgnition,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpactOutcome {
    /// s
    pub t_impact: f64,
    /// Speed at the floor crossing, m/s.
    pub v_impact: f64,
    /// Velocity at the floor crossing, m/s.
    pub velocity: Vector3<f64>,
    /// m
    pub r_impact: Vector3<f64>,
    /// Magnitude of delivered impulse orthogonal to e_o, N·s.
    pub residual_transverse_impulse: f64,
    /// Delivered impulse along −e_o (opposing the pre-impact velocity), N·s.
    pub axial_impulse: f64,
    /// Delivered impulse vector, N·s.
    pub delivered_impulse: Vector3<f64>,
    /// s
    pub ignition_time: f64,
    pub burn_status: BurnStatus,
}

// ODE state: position, velocity, raw attitude quaternion, angular velocity and
// the running thrust impulse.
#[derive(Debug, Clone, Copy)]
struct Y {
    r: Vector3<f64>,
    v: Vector3<f64>,
    q: Quaternion<f64>,
    w: Vector3<f64>,
    p: Vector3<f64>,
}

impl Add for Y {
    type Output = Y;
    fn add(self, o: Y) -> Y {
        Y {
            r: self.r + o.r,
            v: self.v + o.v,
            q: self.q + o.q,
            w: self.w + o.w,
            p: self.p + o.p,
        }
    }
}

impl Mul<f64> for Y {
    type Output = Y;
    fn mul(self, s: f64) -> Y {
        Y {
            r: self.r * s,
            v: self.v * s,
            q: self.q * s,
            w: self.w * s,
            p: self.p * s,
        }
    }
}

impl Y {
    fn lerp(&self, o: &Y, s: f64) -> Y {
        *self * (1.0 - s) + *o * s
    }
}

struct Burn<'a> {
    thruster: &'a ThrusterSpec,
    ignition: f64,
    mass: f64,
    variable_mass: bool,
}

struct Dynamics<'a> {
    g: f64,
    burn: Option<Burn<'a>>,
}

impl Dynamics<'_> {
    fn deriv(&self, t: f64, y: &Y) -> Y {
        let mut a = Vector3::new(0.0, 0.0, -self.g);
        let mut pdot = Vector3::zeros();
        if let Some(b) = &self.burn {
            let tau = (t - b.ignition).clamp(0.0, b.thruster.burn_duration);
            let f = b.thruster.thrust(tau);
            let m = if b.variable_mass {
                b.mass - b.thruster.propellant_mass * b.thruster.impulse_until(tau) / b.thruster.total_impulse
            } else {
                b.mass
            };
            // unnormalized q within a step; rotate with the unit part
            let qn = UnitQuaternion::from_quaternion(y.q);
            let dir = qn * Vector3::z();
            pdot = dir * f;
            a += pdot / m;
        }
        Y {
            r: y.v,
            v: a,
            q: Quaternion::from_imag(y.w) * y.q * 0.5,
            w: Vector3::zeros(),
            p: pdot,
        }
    }

    fn step(&self, t: f64, y: &Y, h: f64) -> Y {
        let k1 = self.deriv(t, y);
        let k2 = self.deriv(t + 0.5 * h, &(*y + k1 * (0.5 * h)));
        let k3 = self.deriv(t + 0.5 * h, &(*y + k2 * (0.5 * h)));
        let k4 = self.deriv(t + h, &(*y + k3 * h));
        let mut out = *y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        out.q = out.q.normalize();
        out
    }
}

enum SegmentEnd {
    Reached(Y),
    Crossed { t: f64, y: Y },
}

/// Steps from `t0` to `t1` with step `dt` (the last step shortened), stopping
/// early at the first crossing of `z = floor_z`, located by linear interpolation.
fn propagate(
    dyn_: &Dynamics,
    y0: Y,
    t0: f64,
    t1: f64,
    dt: f64,
    floor_z: f64,
    mut sink: Option<&mut Vec<TrajectorySample>>,
) -> SegmentEnd {
    let mut y = y0;
    let mut t = t0;
    let n = ((t1 - t0) / dt).ceil().max(0.0) as u64;
    for i in 0..n {
        let t_next = if i + 1 == n { t1 } else { t0 + (i + 1) as f64 * dt };
        let h = t_next - t;
        if h <= 0.0 {
            continue;
        }
        let y_next = dyn_.step(t, &y, h);
        if y_next.r.z <= floor_z && y.r.z > floor_z {
            let s = (y.r.z - floor_z) / (y.r.z - y_next.r.z);
            let mut yc = y.lerp(&y_next, s);
            yc.q = yc.q.normalize();
            yc.w = y_next.w;
            yc.r.z = floor_z;
            return SegmentEnd::Crossed { t: t + s * h, y: yc };
        }
        y = y_next;
        t = t_next;
        if let Some(buf) = sink.as_deref_mut() {
            buf.push(TrajectorySample { t, r: y.r, v: y.v });
        }
    }
    SegmentEnd::Reached(y)
}

fn to_y(s: &RigidState) -> Y {
    Y {
        r: s.r,
        v: s.v,
        q: *s.q.quaternion(),
        w: s.w,
        p: Vector3::zeros(),
    }
}

fn to_state(t: f64, y: &Y) -> RigidState {
    RigidState {
        t,
        r: y.r,
        v: y.v,
        q: UnitQuaternion::from_quaternion(y.q),
        w: y.w,
    }
}

/// Time after `state.t` at which the unpowered arc reaches `z = floor_z`.
fn ballistic_floor_time(state: &RigidState, g: f64, floor_z: f64) -> f64 {
    let drop = state.r.z - floor_z;
    let vz = state.v.z;
    if g > 0.0 {
        (vz + (vz * vz + 2.0 * g * drop).sqrt()) / g
    } else if vz < 0.0 {
        drop / -vz
    } else {
        f64::INFINITY
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("integration step must be > 0, got {dt}")))
    }
}

fn max_time(initial: &RigidState, env: &BodyEnvironment, floor_z: f64, cfg: &SimConfig) -> f64 {
    cfg.max_time
        .unwrap_or_else(|| 10.0 * ballistic_floor_time(initial, env.g, floor_z))
}

/// Propagates the unpowered flight to the floor `floor_depth` below the launch
/// plane. Returns every step sample (the first is the initial state) and the
/// interpolated state at the crossing.
pub fn integrate_unpowered(
    initial: &RigidState,
    env: &BodyEnvironment,
    floor_depth: f64,
    cfg: &SimConfig,
) -> Result<(Vec<TrajectorySample>, RigidState)> {
    check_dt(cfg.dt)?;
    let floor_z = -floor_depth;
    if initial.r.z <= floor_z {
        return Err(Error::domain("initial state is not above the floor"));
    }
    let limit = max_time(initial, env, floor_z, cfg);
    if !limit.is_finite() {
        return Err(Error::NoCrossing { max_time: limit });
    }
    let dynamics = Dynamics {
        g: env.g,
        burn: None,
    };
    let mut samples = vec![TrajectorySample {
        t: initial.t,
        r: initial.r,
        v: initial.v,
    }];
    match propagate(&dynamics, to_y(initial), initial.t, initial.t + limit, cfg.dt, floor_z, Some(&mut samples)) {
        SegmentEnd::Crossed { t, y } => Ok((samples, to_state(t, &y))),
        SegmentEnd::Reached(_) => Err(Error::NoCrossing { max_time: limit }),
    }
}

fn check_burn_inputs(spin: &SpinPlan, thruster: &ThrusterSpec, cfg: &SimConfig) -> Result<()> {
    check_dt(cfg.dt)?;
    thruster.validate()?;
    if cfg.dt > thruster.burn_duration / 50.0 {
        return Err(Error::domain(format!(
            "integration step {} s exceeds burn_duration/50 = {} s",
            cfg.dt,
            thruster.burn_duration / 50.0
        )));
    }
    if cfg.require_full_rotations && (spin.revolutions - spin.revolutions.round()).abs() > 1e-6 {
        return Err(Error::domain(format!(
            "spin completes {} revolutions during the burn; whole revolutions are required",
            spin.revolutions
        )));
    }
    Ok(())
}

/// Flies from `initial` through a burn ignited at `ignition` to the floor.
fn fly_with_burn(
    initial: &RigidState,
    spin: &SpinPlan,
    thruster: &ThrusterSpec,
    mass: f64,
    env: &BodyEnvironment,
    floor_z: f64,
    ignition: f64,
    cfg: &SimConfig,
    mut sink: Option<&mut Vec<TrajectorySample>>,
) -> Result<ImpactOutcome> {
    let coast = Dynamics {
        g: env.g,
        burn: None,
    };
    let burning = Dynamics {
        g: env.g,
        burn: Some(Burn {
            thruster,
            ignition,
            mass,
            variable_mass: cfg.variable_mass,
        }),
    };
    let e_o = spin.e_o.as_vector();
    let finish = |t: f64, y: &Y, status: BurnStatus| {
        let axial = -y.p.dot(&e_o);
        let transverse = (y.p + e_o * axial).norm();
        ImpactOutcome {
            t_impact: t,
            v_impact: y.v.norm(),
            velocity: y.v,
            r_impact: y.r,
            residual_transverse_impulse: transverse,
            axial_impulse: axial,
            delivered_impulse: y.p,
            ignition_time: ignition,
            burn_status: status,
        }
    };

    let mut y = to_y(initial);
    let mut t = initial.t;
    if ignition > t {
        match propagate(&coast, y, t, ignition, cfg.dt, floor_z, sink.as_deref_mut()) {
            SegmentEnd::Crossed { t, y } => return Ok(finish(t, &y, BurnStatus::FloorHitBeforeIgnition)),
            SegmentEnd::Reached(next) => {
                y = next;
                t = ignition;
            }
        }
    }

    let burn_start = t.max(ignition);
    let burn_end = ignition + thruster.burn_duration;
    let mut knots: Vec<f64> = thruster
        .breakpoints()
        .into_iter()
        .map(|k| ignition + k)
        .filter(|&k| k > burn_start)
        .collect();
    knots.push(burn_end);
    for knot in knots {
        match propagate(&burning, y, t, knot, cfg.dt, floor_z, sink.as_deref_mut()) {
            SegmentEnd::Crossed { t, y } => return Ok(finish(t, &y, BurnStatus::FloorHitMidBurn)),
            SegmentEnd::Reached(next) => {
                y = next;
                t = knot;
            }
        }
    }

    let limit = t + max_time(&to_state(t, &y), env, floor_z, cfg);
    if !limit.is_finite() {
        return Err(Error::NoCrossing { max_time: limit });
    }
    match propagate(&coast, y, t, limit, cfg.dt, floor_z, sink.as_deref_mut()) {
        SegmentEnd::Crossed { t, y } => Ok(finish(t, &y, BurnStatus::BurnoutAboveFloor)),
        SegmentEnd::Reached(_) => Err(Error::NoCrossing { max_time: limit }),
    }
}

/// Flies the full mission from `initial` with the landing burn.
///
/// Thrust of magnitude F(t) acts along the body +b_z axis (the nozzle points
/// along −b_z) through the centre of mass, so the spin is untouched.
/// `mass` is the bot mass at launch, kg.
pub fn integrate_with_burn(
    initial: &RigidState,
    spin: &SpinPlan,
    thruster: &ThrusterSpec,
    mass: f64,
    env: &BodyEnvironment,
    floor_depth: f64,
    cfg: &SimConfig,
) -> Result<ImpactOutcome> {
    check_burn_inputs(spin, thruster, cfg)?;
    let floor_z = -floor_depth;
    if initial.r.z <= floor_z {
        return Err(Error::domain("initial state is not above the floor"));
    }
    match cfg.ignition {
        Ignition::At(t_ig) => fly_with_burn(initial, spin, thruster, mass, env, floor_z, t_ig, cfg, None),
        Ignition::Auto => optimize_ignition(initial, spin, thruster, mass, env, floor_depth, cfg).map(|(_, o)| o),
    }
}

/// Flies the mission with the burn ignited at `ignition` and returns the
/// outcome with every step sample, the first being `initial`.
pub fn trace_with_burn(
    initial: &RigidState,
    spin: &SpinPlan,
    thruster: &ThrusterSpec,
    mass: f64,
    env: &BodyEnvironment,
    floor_depth: f64,
    ignition: f64,
    cfg: &SimConfig,
) -> Result<(ImpactOutcome, Vec<TrajectorySample>)> {
    check_burn_inputs(spin, thruster, cfg)?;
    let floor_z = -floor_depth;
    if initial.r.z <= floor_z {
        return Err(Error::domain("initial state is not above the floor"));
    }
    let mut samples = vec![TrajectorySample {
        t: initial.t,
        r: initial.r,
        v: initial.v,
    }];
    let outcome = fly_with_burn(initial, spin, thruster, mass, env, floor_z, ignition, cfg, Some(&mut samples))?;
    samples.push(TrajectorySample {
        t: outcome.t_impact,
        r: outcome.r_impact,
        v: outcome.velocity,
    });
    Ok((outcome, samples))
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const IGNITION_BRACKET_TOL: f64 = 1e-8;

/// Ignition time that minimizes touchdown speed, searched by golden section
/// over `[t_f − 2·burn, t_f]` where t_f is the unpowered floor time.
pub fn auto_ignition_time(
    initial: &RigidState,
    spin: &SpinPlan,
    thruster: &ThrusterSpec,
    mass: f64,
    env: &BodyEnvironment,
    floor_depth: f64,
    cfg: &SimConfig,
) -> Result<f64> {
    optimize_ignition(initial, spin, thruster, mass, env, floor_depth, cfg).map(|(t, _)| t)
}

/// Same search as [`auto_ignition_time`] over an explicit bracket, returning
/// the touchdown outcome at the optimum.
pub fn optimize_ignition_in(
    initial: &RigidState,
    spin: &SpinPlan,
    thruster: &ThrusterSpec,
    mass: f64,
    env: &BodyEnvironment,
    floor_depth: f64,
    bracket: (f64, f64),
    cfg: &SimConfig,
) -> Result<(f64, ImpactOutcome)> {
    check_burn_inputs(spin, thruster, cfg)?;
    let floor_z = -floor_depth;
    let (lo, hi) = (bracket.0.max(initial.t), bracket.1);
    if !(lo < hi) {
        return Err(Error::domain(format!("empty ignition bracket [{lo}, {hi}]")));
    }

    // The coast up to the bracket start is shared by every candidate.
    let coast = Dynamics {
        g: env.g,
        burn: None,
    };
    let start = if lo > initial.t {
        match propagate(&coast, to_y(initial), initial.t, lo, cfg.dt, floor_z, None) {
            SegmentEnd::Reached(y) => to_state(lo, &y),
            SegmentEnd::Crossed { .. } => {
                return Err(Error::domain("floor reached before the ignition search bracket"))
            }
        }
    } else {
        *initial
    };
    let eval = |t_ig: f64| fly_with_burn(&start, spin, thruster, mass, env, floor_z, t_ig, cfg, None);

    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = eval(c)?.v_impact;
    let mut fd = eval(d)?.v_impact;
    while b - a > IGNITION_BRACKET_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = eval(c)?.v_impact;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = eval(d)?.v_impact;
        }
    }
    let t_best = 0.5 * (a + b);
    let outcome = eval(t_best)?;
    if outcome.v_impact > cfg.soft_landing_threshold {
        return Err(Error::UnreachableSoftLanding {
            best_speed: outcome.v_impact,
            threshold: cfg.soft_landing_threshold,
        });
    }
    Ok((t_best, outcome))
}

pub(crate) fn optimize_ignition(
    initial: &RigidState,
    spin: &SpinPlan,
    thruster: &ThrusterSpec,
    mass: f64,
    env: &BodyEnvironment,
    floor_depth: f64,
    cfg: &SimConfig,
) -> Result<(f64, ImpactOutcome)> {
    let t_f = initial.t + ballistic_floor_time(initial, env.g, -floor_depth);
    if !t_f.is_finite() {
        return Err(Error::NoCrossing { max_time: t_f });
    }
    if thruster.burn_duration >= t_f - initial.t {
        return Err(Error::domain(format!(
            "burn duration {} s is not shorter than the flight time {} s",
            thruster.burn_duration,
            t_f - initial.t
        )));
    }
    let bracket = (t_f - 2.0 * thruster.burn_duration, t_f);
    optimize_ignition_in(initial, spin, thruster, mass, env, floor_depth, bracket, cfg)
}

/// Spin rate giving `revolutions` turns over the burn, for deliberately
/// non-nulling plans.
pub fn spin_rate_for_revolutions(burn_duration: f64, revolutions: f64) -> f64 {
    TAU * revolutions / burn_duration
}
