//! Spin stabilization, precession throttling and wheel kinematics.
//!
//! The bot's thruster nozzle lies on the body −b_z axis. Before launch it is
//! aligned with the pre-impact velocity direction e_o and then tilted by the
//! precession angle φ onto e_d. The bot spins about the e_o line, so during
//! the burn the nozzle sweeps a cone of half-angle φ around the velocity and
//! only `J·cos φ` of the motor impulse survives once the sweep covers whole
//! revolutions.
//!
//! In body coordinates that spin is `w_s·b_z + w_i·b_y` with
//! `w_s = w_f·cos φ` (stabilization, from wheel 0) and `w_i = w_f·sin φ`
//! (precession, from wheel 1).

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};

use crate::ballistics::BotProperties;
use crate::error::{Error, Result};

/// Unit vector in the inertial frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction3(Vector3<f64>);

impl Direction3 {
    /// Normalizes `v`; fails on zero or non-finite vectors.
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::domain("direction from a zero or non-finite vector"));
        }
        Ok(Self(v / n))
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        self.0
    }

    pub fn dot(&self, other: &Direction3) -> f64 {
        self.0.dot(&other.0)
    }

    /// Angle to `other`, rad.
    pub fn angle_to(&self, other: &Direction3) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    /// Deterministic unit tangent: `normalize(self × e_z)`, or `self × e_x`
    /// when `self` is parallel to e_z.
    pub fn tangent(&self) -> Direction3 {
        let t = self.0.cross(&Vector3::z());
        if t.norm() > 1e-9 {
            Direction3(t.normalize())
        } else {
            Direction3(self.0.cross(&Vector3::x()).normalize())
        }
    }
}

/// Full spin prescription handed to the launcher wheels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinPlan {
    /// Optimal impulse axis (pre-impact velocity direction).
    pub e_o: Direction3,
    /// Nozzle axis after precession tilt.
    pub e_d: Direction3,
    /// Precession half-cone angle, rad.
    pub phi: f64,
    /// Total spin magnitude, rad/s.
    pub w_f: f64,
    /// Stabilization component along b_z, rad/s.
    pub w_s: f64,
    /// Precession component along b_y, rad/s.
    pub w_i: f64,
    /// Revolutions completed during the burn; a whole number for nulling plans.
    pub revolutions: f64,
    /// Wheel 0 angular speed, rad/s.
    pub w0: f64,
    /// Wheel 1 angular speed, rad/s (negative: drives −b_y).
    pub w1: f64,
}

impl SpinPlan {
    /// Plan that completes exactly `n` revolutions over `burn_duration`.
    pub fn new(e_o: Direction3, phi: f64, burn_duration: f64, n: u32, bot: &BotProperties) -> Result<Self> {
        let w_f = full_rotation_spin_rate(burn_duration, n)?;
        Self::with_spin_rate(e_o, phi, w_f, burn_duration, bot)
    }

    /// Plan with an arbitrary spin rate; the revolution count may be fractional.
    pub fn with_spin_rate(e_o: Direction3, phi: f64, w_f: f64, burn_duration: f64, bot: &BotProperties) -> Result<Self> {
        check_phi(phi)?;
        if !(w_f.is_finite() && w_f >= 0.0) {
            return Err(Error::domain(format!("spin rate must be >= 0, got {w_f}")));
        }
        let e_d = desired_impulse_axis(&e_o, phi)?;
        let (w_s, w_i) = decompose_spin(w_f, phi)?;
        Ok(Self {
            e_o,
            e_d,
            phi,
            w_f,
            w_s,
            w_i,
            revolutions: w_f * burn_duration / TAU,
            w0: wheel_rate_for_spin(w_s, bot),
            w1: wheel_rate_for_precession(w_i, bot),
        })
    }

    /// Inertial spin vector. The bot turns about the e_o line; the sign is
    /// fixed so that the b_z component equals +w_s.
    pub fn spin_vector(&self) -> Vector3<f64> {
        -self.w_f * self.e_o.as_vector()
    }

    /// Attitude (B → E) with the nozzle −b_z on e_d and the spin vector in
    /// the b_y-b_z plane, giving body components (0, w_i, w_s).
    pub fn body_attitude(&self) -> UnitQuaternion<f64> {
        let b_z = -self.e_d.as_vector();
        let axis = -self.e_o.as_vector();
        let perp = axis - b_z * axis.dot(&b_z);
        let b_y = if perp.norm() > 1e-12 {
            perp.normalize()
        } else {
            self.e_d.tangent().as_vector()
        };
        let b_x = b_y.cross(&b_z);
        let m = Matrix3::from_columns(&[b_x, b_y, b_z]);
        UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(m))
    }
}

/// Transverse spin-noise model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Standard deviation of the transverse spin error, rad/s.
    pub sigma_w: f64,
    /// Direction of the error component, orthogonal to the nominal axis.
    pub e_t: Direction3,
}

impl NoiseModel {
    pub fn new(sigma_w: f64, axis: &Direction3) -> Result<Self> {
        if !(sigma_w.is_finite() && sigma_w >= 0.0) {
            return Err(Error::domain(format!("sigma_w must be >= 0, got {sigma_w}")));
        }
        Ok(Self {
            sigma_w,
            e_t: axis.tangent(),
        })
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if phi.is_finite() && (0.0..=std::f64::consts::FRAC_PI_2).contains(&phi) {
        Ok(())
    } else {
        Err(Error::domain(format!("precession angle must lie in [0, pi/2], got {phi}")))
    }
}

/// Direction of the pre-impact velocity; the thrust must oppose it.
pub fn optimal_impulse_axis(v_tf: &Vector3<f64>) -> Result<Direction3> {
    Direction3::new(*v_tf)
}

/// Rotation about e_y that takes the nozzle axis onto e_o.
pub fn rotation_align(theta_align: f64) -> Matrix3<f64> {
    y_rotation(theta_align)
}

/// Alignment angle for [`rotation_align`] such that `R·(−e_z) = e_o` for an
/// axis in the x-z plane.
pub fn alignment_angle(e_o: &Direction3) -> f64 {
    e_o.x().atan2(-e_o.z())
}

fn y_rotation(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, -s, 0.0, 1.0, 0.0, s, 0.0, c)
}

/// Cone half-angle that throttles a motor of impulse `j` down to `j_net`.
pub fn precession_angle(j_net: f64, j: f64) -> Result<f64> {
    if !(j.is_finite() && j > 0.0) {
        return Err(Error::domain(format!("motor impulse must be > 0, got {j}")));
    }
    if !(j_net.is_finite() && j_net >= 0.0) {
        return Err(Error::domain(format!("net impulse must be >= 0, got {j_net}")));
    }
    if j_net > j {
        return Err(Error::InsufficientImpulse {
            required: j_net,
            available: j,
        });
    }
    Ok((j_net / j).acos())
}

/// Nozzle axis after tilting e_o by `phi` about e_y.
pub fn desired_impulse_axis(e_o: &Direction3, phi: f64) -> Result<Direction3> {
    check_phi(phi)?;
    Direction3::new(y_rotation(phi) * e_o.as_vector())
}

/// Wheel 0 speed that imparts stabilization spin `w_s` without slip.
pub fn wheel_rate_for_spin(w_s: f64, bot: &BotProperties) -> f64 {
    w_s * bot.wheel_ratio()
}

/// Wheel 1 speed that imparts precession spin `w_i`; it drives −b_y.
pub fn wheel_rate_for_precession(w_i: f64, bot: &BotProperties) -> f64 {
    -w_i * bot.wheel_ratio()
}

/// Spin rate at which exactly `n` revolutions fit in the burn.
pub fn full_rotation_spin_rate(burn_duration: f64, n: u32) -> Result<f64> {
    if !(burn_duration.is_finite() && burn_duration > 0.0) {
        return Err(Error::domain(format!("burn duration must be > 0, got {burn_duration}")));
    }
    if n == 0 {
        return Err(Error::domain("revolution count must be >= 1"));
    }
    Ok(TAU * f64::from(n) / burn_duration)
}

/// Splits total spin into (stabilization, precession) components.
pub fn decompose_spin(w_f: f64, phi: f64) -> Result<(f64, f64)> {
    check_phi(phi)?;
    let (s, c) = phi.sin_cos();
    Ok((w_f * c, w_f * s))
}

/// Angle between planned and actual spin vectors, rad. Exactly zero for
/// identical vectors.
pub fn pointing_error(w_nominal: &Vector3<f64>, w_actual: &Vector3<f64>) -> Result<f64> {
    let denom = w_nominal.norm() * w_actual.norm();
    if !(denom.is_finite() && denom > 0.0) {
        return Err(Error::domain("pointing error of a zero spin vector"));
    }
    Ok(w_nominal.cross(w_actual).norm().atan2(w_nominal.dot(w_actual)))
}

/// Residual speed when an impulse sized to cancel `v_f` is misdirected by `phi_e`.
pub fn impact_speed_with_noise(v_f: f64, phi_e: f64) -> f64 {
    debug_assert!((0.0..=PI + 1e-12).contains(&phi_e));
    v_f * (2.0 - 2.0 * phi_e.cos()).max(0.0).sqrt()
}
