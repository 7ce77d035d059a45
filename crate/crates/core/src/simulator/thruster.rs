//! Solid motor description and thrust-curve ingestion.

use crate::error::{Error, Result};

/// Standard gravity used for specific-impulse conversions, m/s².
pub const STANDARD_GRAVITY: f64 = 9.80665;

#[derive(Debug, Clone, PartialEq)]
pub enum ThrustProfile {
    /// `total_impulse / burn_duration` for the whole burn.
    Constant,
    /// Piecewise-linear (time since ignition s, thrust N) table starting at t = 0.
    Tabulated(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThrusterSpec {
    pub name: String,
    /// N·s
    pub total_impulse: f64,
    /// s
    pub burn_duration: f64,
    pub profile: ThrustProfile,
    /// kg
    pub propellant_mass: f64,
    /// s
    pub isp: f64,
}

impl ThrusterSpec {
    pub fn constant(
        name: impl Into<String>,
        total_impulse: f64,
        burn_duration: f64,
        propellant_mass: f64,
        isp: f64,
    ) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            total_impulse,
            burn_duration,
            profile: ThrustProfile::Constant,
            propellant_mass,
            isp,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Motor whose impulse and burn time come from a thrust table. A table
    /// that starts after t = 0 is extended with a linear ramp from (0, 0).
    pub fn from_curve(
        name: impl Into<String>,
        mut points: Vec<(f64, f64)>,
        propellant_mass: f64,
        isp: f64,
    ) -> Result<Self> {
        check_curve(&points)?;
        if points[0].0 > 0.0 {
            points.insert(0, (0.0, 0.0));
        }
        let total_impulse = trapezoid(&points);
        let burn_duration = points.last().map(|p| p.0).unwrap_or(0.0);
        let spec = Self {
            name: name.into(),
            total_impulse,
            burn_duration,
            profile: ThrustProfile::Tabulated(points),
            propellant_mass,
            isp,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::domain(format!("thruster {}: {name} must be > 0, got {v}", self.name)))
            }
        };
        positive("total_impulse", self.total_impulse)?;
        positive("burn_duration", self.burn_duration)?;
        positive("isp", self.isp)?;
        if !(self.propellant_mass.is_finite() && self.propellant_mass >= 0.0) {
            return Err(Error::domain(format!(
                "thruster {}: propellant_mass must be >= 0, got {}",
                self.name, self.propellant_mass
            )));
        }
        if let ThrustProfile::Tabulated(points) = &self.profile {
            check_curve(points)?;
            let integral = trapezoid(points);
            if ((integral - self.total_impulse) / self.total_impulse).abs() > 1e-3 {
                return Err(Error::domain(format!(
                    "thruster {}: thrust curve integrates to {integral} N*s, not {} N*s",
                    self.name, self.total_impulse
                )));
            }
        }
        if self.propellant_mass > 0.0 {
            let from_isp = self.isp * STANDARD_GRAVITY * self.propellant_mass;
            if ((from_isp - self.total_impulse) / self.total_impulse).abs() > 5e-3 {
                return Err(Error::domain(format!(
                    "thruster {}: Isp*g0*m_prop = {from_isp} N*s disagrees with total impulse {} N*s",
                    self.name, self.total_impulse
                )));
            }
        }
        Ok(())
    }

    /// Thrust `tau` seconds after ignition, N. Zero outside the burn.
    pub fn thrust(&self, tau: f64) -> f64 {
        if !(0.0..=self.burn_duration).contains(&tau) {
            return 0.0;
        }
        match &self.profile {
            ThrustProfile::Constant => self.total_impulse / self.burn_duration,
            ThrustProfile::Tabulated(points) => interpolate(points, tau),
        }
    }

    /// Impulse delivered between ignition and `tau`, N·s.
    pub fn impulse_until(&self, tau: f64) -> f64 {
        let tau = tau.clamp(0.0, self.burn_duration);
        match &self.profile {
            ThrustProfile::Constant => self.total_impulse * tau / self.burn_duration,
            ThrustProfile::Tabulated(points) => {
                let mut acc = 0.0;
                for w in points.windows(2) {
                    let (t0, f0) = w[0];
                    let (t1, f1) = w[1];
                    if tau <= t0 {
                        break;
                    }
                    let te = tau.min(t1);
                    let fe = f0 + (f1 - f0) * (te - t0) / (t1 - t0);
                    acc += 0.5 * (f0 + fe) * (te - t0);
                }
                acc
            }
        }
    }

    /// Interior times (since ignition) where the thrust curve has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.profile {
            ThrustProfile::Constant => Vec::new(),
            ThrustProfile::Tabulated(points) => points
                .iter()
                .map(|p| p.0)
                .filter(|&t| t > 0.0 && t < self.burn_duration)
                .collect(),
        }
    }
}

fn check_curve(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::domain("thrust curve needs at least two points"));
    }
    for (i, &(t, f)) in points.iter().enumerate() {
        if !(t.is_finite() && f.is_finite() && t >= 0.0 && f >= 0.0) {
            return Err(Error::domain(format!("thrust curve point {i} ({t}, {f}) must be finite and >= 0")));
        }
        if i > 0 && t <= points[i - 1].0 {
            return Err(Error::domain(format!("thrust curve times must increase strictly (point {i})")));
        }
    }
    Ok(())
}

fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum()
}

fn interpolate(points: &[(f64, f64)], tau: f64) -> f64 {
    let i = points.partition_point(|p| p.0 <= tau);
    if i == 0 {
        return points[0].1;
    }
    if i == points.len() {
        return points[i - 1].1;
    }
    let (t0, f0) = points[i - 1];
    let (t1, f1) = points[i];
    f0 + (f1 - f0) * (tau - t0) / (t1 - t0)
}

/// Parses a two-column `time thrust` table. Columns are separated by
/// whitespace or a comma; blank lines and lines starting with `#` are skipped.
pub fn parse_thrust_curve(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::ThrustCurve {
                line: lineno,
                message: format!("expected 2 columns, found {}", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| Error::ThrustCurve {
                line: lineno,
                message: format!("`{s}` is not a number"),
            })
        };
        points.push((parse(fields[0])?, parse(fields[1])?));
    }
    check_curve(&points).map_err(|e| Error::ThrustCurve {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(points)
}
