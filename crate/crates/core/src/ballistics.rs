//! Closed-form planar flight from launcher release to the instant before the
//! landing burn.
//!
//! The bot moves in the x-z plane of the inertial frame E (x toward the pit,
//! z up). Only gravity acts, so every quantity here follows from the constant
//! acceleration kinematics of a point mass.

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Lunar surface gravity, m/s².
pub const MOON_GRAVITY: f64 = 1.625;
/// Martian surface gravity, m/s².
pub const MARS_GRAVITY: f64 = 3.71;
/// Stiffness of the stock launcher spring, N/m.
pub const DEFAULT_SPRING_K: f64 = 4012.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyEnvironment {
    /// Gravitational acceleration, m/s².
    pub g: f64,
}

impl BodyEnvironment {
    pub fn new(g: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::domain(format!("gravity must be finite and > 0, got {g}")));
        }
        Ok(Self { g })
    }

    pub fn moon() -> Self {
        Self { g: MOON_GRAVITY }
    }

    pub fn mars() -> Self {
        Self { g: MARS_GRAVITY }
    }
}

impl Default for BodyEnvironment {
    fn default() -> Self {
        Self::moon()
    }
}

/// Target pit, measured from the launch point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitGeometry {
    /// Horizontal distance to the pit opening, m.
    pub d: f64,
    /// Depth of the floor below the launch plane, m.
    pub h: f64,
}

impl PitGeometry {
    pub fn new(d: f64, h: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::domain(format!("pit distance d must be finite and > 0, got {d}")));
        }
        if !(h.is_finite() && h >= 0.0) {
            return Err(Error::domain(format!("pit depth h must be finite and >= 0, got {h}")));
        }
        Ok(Self { d, h })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BotProperties {
    /// Total bot mass including propellant, kg.
    pub m: f64,
    /// Bot (sphere) radius, m.
    pub r_b: f64,
    /// Launcher wheel radius, m.
    pub r_w: f64,
}

impl BotProperties {
    pub fn new(m: f64, r_b: f64, r_w: f64) -> Result<Self> {
        for (name, value) in [("m", m), ("r_b", r_b), ("r_w", r_w)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::domain(format!("bot {name} must be finite and > 0, got {value}")));
            }
        }
        Ok(Self { m, r_b, r_w })
    }

    /// No-slip surface speed ratio r_b / r_w between bot and wheel.
    pub fn wheel_ratio(&self) -> f64 {
        self.r_b / self.r_w
    }
}

impl Default for BotProperties {
    fn default() -> Self {
        Self {
            m: 1.0,
            r_b: 0.04,
            r_w: 0.01325,
        }
    }
}

/// Launcher setting for a single shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaunchParams {
    /// Launch speed, m/s.
    pub v0: f64,
    /// Elevation angle, rad.
    pub theta: f64,
    /// Spring stiffness, N/m.
    pub k: f64,
    /// Spring compression, m.
    pub x: f64,
}

impl LaunchParams {
    /// Builds the launcher setting that throws the bot a horizontal distance `d`.
    pub fn for_range(d: f64, theta: f64, k: f64, bot: &BotProperties, env: &BodyEnvironment) -> Result<Self> {
        let v0 = required_launch_speed(d, theta, env)?;
        let x = spring_compression(v0, bot, k)?;
        Ok(Self { v0, theta, k, x })
    }
}

/// Point on the ballistic arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// Time since launch, s.
    pub t: f64,
    /// Position in E, m.
    pub r: Vector3<f64>,
    /// Velocity in E, m/s.
    pub v: Vector3<f64>,
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 && theta < std::f64::consts::FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::InvalidAngle {
            theta_deg: theta.to_degrees(),
        })
    }
}

/// Launch speed that lands the bot at the pit opening `d` meters away on the
/// launch plane.
pub fn required_launch_speed(d: f64, theta: f64, env: &BodyEnvironment) -> Result<f64> {
    check_theta(theta)?;
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::domain(format!("range d must be finite and > 0, got {d}")));
    }
    let (s, c) = theta.sin_cos();
    Ok((d * env.g / (2.0 * s * c)).sqrt())
}

/// Spring compression that stores the bot's launch kinetic energy.
pub fn spring_compression(v0: f64, bot: &BotProperties, k: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::domain(format!("spring stiffness k must be > 0, got {k}")));
    }
    if !(v0.is_finite() && v0 >= 0.0) {
        return Err(Error::domain(format!("launch speed must be >= 0, got {v0}")));
    }
    Ok(v0 * (bot.m / k).sqrt())
}

/// Inverse of [`spring_compression`]: the launch speed produced by compression `x`.
pub fn launch_speed_from_compression(x: f64, bot: &BotProperties, k: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::domain(format!("spring stiffness k must be > 0, got {k}")));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::domain(format!("spring compression must be >= 0, got {x}")));
    }
    Ok(x * (k / bot.m).sqrt())
}

/// Time for the arc to return to the launch plane.
pub fn time_to_range(v0: f64, theta: f64, env: &BodyEnvironment) -> Result<f64> {
    check_theta(theta)?;
    if !(v0.is_finite() && v0 > 0.0) {
        return Err(Error::domain(format!("launch speed must be > 0, got {v0}")));
    }
    Ok(2.0 * v0 * theta.sin() / env.g)
}

/// Time at which the arc reaches the pit floor `h` below the launch plane.
pub fn flight_time_to_floor(v0: f64, theta: f64, h: f64, env: &BodyEnvironment) -> Result<f64> {
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::domain(format!("depth h must be >= 0, got {h}")));
    }
    if !(v0.is_finite() && v0 >= 0.0) {
        return Err(Error::domain(format!("launch speed must be >= 0, got {v0}")));
    }
    let vz0 = v0 * theta.sin();
    Ok(((2.0 * env.g * h + vz0 * vz0).sqrt() + vz0) / env.g)
}

/// Position and velocity `t` seconds after launch, before any burn.
pub fn state_at(t: f64, v0: f64, theta: f64, env: &BodyEnvironment) -> TrajectorySample {
    let (s, c) = theta.sin_cos();
    let g = env.g;
    TrajectorySample {
        t,
        r: Vector3::new(v0 * t * c, 0.0, v0 * t * s - 0.5 * g * t * t),
        v: Vector3::new(v0 * c, 0.0, v0 * s - g * t),
    }
}

/// Velocity vector at the floor and its magnitude v_f.
pub fn preimpact_velocity(v0: f64, theta: f64, h: f64, env: &BodyEnvironment) -> Result<(Vector3<f64>, f64)> {
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::domain(format!("depth h must be >= 0, got {h}")));
    }
    let (s, c) = theta.sin_cos();
    let vz = (2.0 * env.g * h + v0 * v0 * s * s).sqrt();
    let v_vec = Vector3::new(v0 * c, 0.0, -vz);
    Ok((v_vec, (v0 * v0 + 2.0 * env.g * h).sqrt()))
}
