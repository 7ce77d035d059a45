//! End-to-end mission planning and the trade-study sweeps.

use std::collections::BTreeMap;

use nalgebra::Vector3;

use crate::attitude::{
    alignment_angle, optimal_impulse_axis, precession_angle, Direction3, SpinPlan,
};
use crate::ballistics::{
    check_theta, flight_time_to_floor, preimpact_velocity, required_launch_speed, spring_compression,
    time_to_range, BodyEnvironment, BotProperties, PitGeometry, DEFAULT_SPRING_K,
};
use crate::error::{Error, Result};
use crate::simulator::{FlightSetup, ThrusterSpec, STANDARD_GRAVITY};

/// Default ceiling on either launcher wheel speed when choosing `n`, rad/s.
pub const DEFAULT_MAX_WHEEL_RATE: f64 = 300.0;

/// How many spin revolutions the burn should span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rotations {
    Fixed(u32),
    /// Largest count that keeps both wheels at or under `max_wheel_rate` rad/s.
    Auto { max_wheel_rate: f64 },
}

impl Default for Rotations {
    fn default() -> Self {
        Rotations::Auto {
            max_wheel_rate: DEFAULT_MAX_WHEEL_RATE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanInputs {
    pub pit: PitGeometry,
    /// Launch elevation, rad.
    pub theta: f64,
    pub env: BodyEnvironment,
    pub bot: BotProperties,
    /// N/m
    pub spring_k: f64,
    pub thruster: ThrusterSpec,
    pub rotations: Rotations,
}

impl PlanInputs {
    pub fn new(pit: PitGeometry, theta: f64, env: BodyEnvironment, thruster: ThrusterSpec) -> Self {
        Self {
            pit,
            theta,
            env,
            bot: BotProperties::default(),
            spring_k: DEFAULT_SPRING_K,
            thruster,
            rotations: Rotations::default(),
        }
    }
}

/// A fully resolved launch, spin and landing prescription.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionPlan {
    pub inputs: PlanInputs,
    /// Launch speed, m/s.
    pub v0: f64,
    /// Spring compression, m.
    pub x: f64,
    /// Time to cross the pit opening plane, s.
    pub t_d: f64,
    /// Time to reach the floor unpowered, s.
    pub t_f: f64,
    /// Pre-impact speed, m/s.
    pub v_f: f64,
    /// Pre-impact velocity, m/s.
    pub v_preimpact: Vector3<f64>,
    pub e_o: Direction3,
    /// Alignment rotation angle taking −b_z onto e_o, rad.
    pub theta_align: f64,
    /// Impulse that cancels the pre-impact momentum, N·s.
    pub j_net: f64,
    /// Precession angle for an instantaneous burn, arccos(m·v_f / J), rad.
    pub phi: f64,
    /// Net impulse the finite burn must deliver to also absorb gravity during
    /// the burn, N·s. Equals `j_net` in the instantaneous limit.
    pub j_flight: f64,
    /// Spin actually imparted. Its axis tilts off `e_o` to absorb gravity
    /// across the burn and its precession angle targets `j_flight`.
    pub spin: SpinPlan,
    /// Estimated ignition time for the finite burn, s.
    pub ignition_time: f64,
    /// Touchdown speed the closed form predicts, m/s; zero when the motor covers `j_flight`.
    pub predicted_v_impact: f64,
    /// Propellant mass equivalent to a v_f burn, kg.
    pub fuel_equivalent_mass: f64,
}

impl MissionPlan {
    /// Flight description for the simulator.
    pub fn flight_setup(&self) -> FlightSetup {
        FlightSetup {
            v0: self.v0,
            theta: self.inputs.theta,
            floor_depth: self.inputs.pit.h,
            env: self.inputs.env,
            mass: self.inputs.bot.m,
            v_f: self.v_f,
            spin: self.spin,
            thruster: self.inputs.thruster.clone(),
        }
    }
}

/// Constant-thrust burn that ends at rest on the floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteBurn {
    /// s
    pub ignition_time: f64,
    /// Spin axis for the burn, in the sense of the velocity it cancels.
    pub axis: Direction3,
    /// Net impulse the burn must deliver along `axis`, N·s.
    pub impulse: f64,
}

/// Ignition time, axis and net impulse for a burn of length `burn` that brings
/// the bot to rest on the floor while gravity keeps acting. Velocity falls
/// linearly to zero, so the burn covers `v_ig·burn/2` and must cancel
/// `v_ig + g·burn`. Reduces to `m·v_f` along the pre-impact velocity as
/// `burn → 0`.
pub fn finite_burn_solution(
    v0: f64,
    theta: f64,
    h: f64,
    env: &BodyEnvironment,
    burn: f64,
    mass: f64,
) -> Result<FiniteBurn> {
    let (s, c) = theta.sin_cos();
    let g = env.g;
    // z(t) + vz(t)·burn/2 = −h
    let b = v0 * s - 0.5 * g * burn;
    let t_ig = ((b + (b * b + 2.0 * g * (0.5 * v0 * s * burn + h)).sqrt()) / g).max(0.0);
    let cancel = Vector3::new(v0 * c, 0.0, v0 * s - g * t_ig - g * burn);
    Ok(FiniteBurn {
        ignition_time: t_ig,
        axis: Direction3::new(cancel)?,
        impulse: mass * cancel.norm(),
    })
}

fn choose_rotations(rotations: Rotations, phi: f64, burn: f64, bot: &BotProperties) -> Result<u32> {
    match rotations {
        Rotations::Fixed(n) if n >= 1 => Ok(n),
        Rotations::Fixed(_) => Err(Error::domain("revolution count must be >= 1")),
        Rotations::Auto { max_wheel_rate } => {
            let per_wf = bot.wheel_ratio() * phi.cos().max(phi.sin());
            let w_f_max = max_wheel_rate / per_wf;
            let n = (w_f_max * burn / std::f64::consts::TAU + 1e-12).floor();
            if n < 1.0 {
                return Err(Error::domain(format!(
                    "wheel limit {max_wheel_rate} rad/s cannot spin one revolution over a {burn} s burn"
                )));
            }
            Ok(n.min(f64::from(u32::MAX)) as u32)
        }
    }
}

/// Composes ballistics and attitude into a full mission plan.
pub fn plan_mission(inputs: &PlanInputs) -> Result<MissionPlan> {
    check_theta(inputs.theta)?;
    inputs.thruster.validate()?;
    let PlanInputs {
        pit, theta, env, bot, ..
    } = inputs;
    let theta = *theta;
    let j = inputs.thruster.total_impulse;

    let v0 = required_launch_speed(pit.d, theta, env)?;
    let x = spring_compression(v0, bot, inputs.spring_k)?;
    let t_d = time_to_range(v0, theta, env)?;
    let t_f = flight_time_to_floor(v0, theta, pit.h, env)?;
    let (v_preimpact, v_f) = preimpact_velocity(v0, theta, pit.h, env)?;
    let e_o = optimal_impulse_axis(&v_preimpact)?;

    let j_net = bot.m * v_f;
    let phi = precession_angle(j_net, j)?;

    let burn = inputs.thruster.burn_duration;
    let flown = finite_burn_solution(v0, theta, pit.h, env, burn, bot.m)?;
    let j_flight = flown.impulse;
    let (phi_flight, predicted_v_impact) = if j_flight <= j {
        ((j_flight / j).acos(), 0.0)
    } else {
        (0.0, (j_flight - j) / bot.m)
    };
    let n = choose_rotations(inputs.rotations, phi_flight, burn, bot)?;
    let spin = SpinPlan::new(flown.axis, phi_flight, burn, n, bot)?;
    let ignition_time = flown.ignition_time;

    Ok(MissionPlan {
        inputs: inputs.clone(),
        v0,
        x,
        t_d,
        t_f,
        v_f,
        v_preimpact,
        e_o,
        theta_align: alignment_angle(&e_o),
        j_net,
        phi,
        j_flight,
        spin,
        ignition_time,
        predicted_v_impact,
        fuel_equivalent_mass: fuel_mass(v_f, bot, inputs.thruster.isp)?,
    })
}

/// Deepest pit a motor of impulse `j` can soft-land in.
pub fn max_depth(j: f64, d: f64, theta: f64, env: &BodyEnvironment, bot: &BotProperties) -> Result<f64> {
    if !(j.is_finite() && j > 0.0) {
        return Err(Error::domain(format!("impulse must be > 0, got {j}")));
    }
    let v0 = required_launch_speed(d, theta, env)?;
    let dv = j / bot.m;
    if dv < v0 {
        return Err(Error::UnreachableDepth { v0, dv });
    }
    Ok((dv * dv - v0 * v0) / (2.0 * env.g))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthRow {
    /// N·s
    pub j: f64,
    /// m
    pub h_max: f64,
}

/// Maximum depth for each motor impulse in `j_values` (ascending).
pub fn sweep_depth_vs_impulse(
    d: f64,
    theta: f64,
    env: &BodyEnvironment,
    bot: &BotProperties,
    j_values: &[f64],
) -> Result<Vec<DepthRow>> {
    if j_values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("impulse grid must be ascending"));
    }
    j_values
        .iter()
        .map(|&j| Ok(DepthRow {
            j,
            h_max: max_depth(j, d, theta, env, bot)?,
        }))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecessionRow {
    /// m
    pub h: f64,
    /// rad
    pub phi: f64,
}

/// Instantaneous-burn precession angle against pit depth; depths the motor
/// cannot cover are left out.
pub fn sweep_precession_vs_depth(
    j: f64,
    d: f64,
    theta: f64,
    env: &BodyEnvironment,
    bot: &BotProperties,
    depths: &[f64],
) -> Result<Vec<PrecessionRow>> {
    let v0 = required_launch_speed(d, theta, env)?;
    let mut rows = Vec::with_capacity(depths.len());
    for &h in depths {
        let (_, v_f) = preimpact_velocity(v0, theta, h, env)?;
        match precession_angle(bot.m * v_f, j) {
            Ok(phi) => rows.push(PrecessionRow { h, phi }),
            Err(Error::InsufficientImpulse { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaRow {
    /// rad
    pub theta: f64,
    /// m/s
    pub v0: f64,
    /// Soft-landing Δv (= v_f), m/s.
    pub delta_v: f64,
    /// kg
    pub fuel_mass: f64,
}

/// Launch speed, landing Δv and fuel for each launch angle. Rows run in
/// parallel but come back in grid order.
pub fn sweep_theta(
    d: f64,
    h: f64,
    env: &BodyEnvironment,
    bot: &BotProperties,
    isp: f64,
    thetas: &[f64],
) -> Result<Vec<ThetaRow>> {
    use rayon::prelude::*;
    thetas
        .par_iter()
        .map(|&theta| {
            let v0 = required_launch_speed(d, theta, env)?;
            let (_, v_f) = preimpact_velocity(v0, theta, h, env)?;
            Ok(ThetaRow {
                theta,
                v0,
                delta_v: v_f,
                fuel_mass: fuel_mass(v_f, bot, isp)?,
            })
        })
        .collect()
}

/// Relative spread `(max − min) / mean` of the landing Δv over the rows whose
/// launch angle lies in `[lo_deg, hi_deg]` (rounded to whole degrees).
pub fn delta_v_spread(rows: &[ThetaRow], lo_deg: f64, hi_deg: f64) -> Result<f64> {
    let band: Vec<f64> = rows
        .iter()
        .filter(|r| (lo_deg..=hi_deg).contains(&r.theta.to_degrees().round()))
        .map(|r| r.delta_v)
        .collect();
    if band.is_empty() {
        return Err(Error::domain(format!("no sweep rows in [{lo_deg}, {hi_deg}] deg")));
    }
    let (lo, hi) = band.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    Ok((hi - lo) / (band.iter().sum::<f64>() / band.len() as f64))
}

/// Propellant that delivers `delta_v` to the bot at constant mass, kg.
pub fn fuel_mass(delta_v: f64, bot: &BotProperties, isp: f64) -> Result<f64> {
    if !(isp.is_finite() && isp > 0.0) {
        return Err(Error::domain(format!("Isp must be > 0, got {isp}")));
    }
    Ok(bot.m * delta_v / (isp * STANDARD_GRAVITY))
}

/// Battery and sustained draws. Component values are read as mW draws
/// against a mWh battery, giving durations in hours.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerBudget {
    /// mWh
    pub battery_energy: f64,
    /// Named sustained draws, mW.
    pub base_loads: Vec<(String, f64)>,
    /// mW
    pub payload_draw: f64,
}

impl Default for PowerBudget {
    fn default() -> Self {
        Self {
            battery_energy: 9000.0,
            base_loads: vec![
                ("computer".into(), 120.0),
                ("cameras".into(), 200.0),
                ("radio".into(), 1100.0),
            ],
            payload_draw: 0.0,
        }
    }
}

impl PowerBudget {
    pub fn total_draw(&self) -> f64 {
        self.base_loads.iter().map(|(_, p)| p).sum::<f64>() + self.payload_draw
    }
}

/// Hours of operation on one battery.
pub fn mission_duration(budget: &PowerBudget) -> Result<f64> {
    let loads = budget.base_loads.iter().map(|(_, p)| *p);
    if budget.battery_energy < 0.0 || budget.payload_draw < 0.0 || loads.clone().any(|p| p < 0.0) {
        return Err(Error::domain("power budget entries must be >= 0"));
    }
    let draw = budget.total_draw();
    if draw == 0.0 {
        return Err(Error::InfiniteDuration);
    }
    Ok(budget.battery_energy / draw)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub thruster: ThrusterSpec,
    /// Loaded motor mass, kg, when known.
    pub motor_mass: Option<f64>,
    /// Extra mass relative to the baseline motor, taken from payload, kg.
    pub mass_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThrusterCatalog {
    entries: BTreeMap<String, CatalogEntry>,
}

impl ThrusterCatalog {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, entry: CatalogEntry) -> Result<()> {
        entry.thruster.validate()?;
        self.entries.insert(entry.thruster.name.clone(), entry);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }
}

impl Default for ThrusterCatalog {
    /// Estes D12 (20 N·s) and the 30 N·s variant.
    fn default() -> Self {
        const ISP: f64 = 81.7784;
        const D12_BURN: f64 = 1.65;
        let d12 = ThrusterSpec::constant("D12", 20.0, D12_BURN, 0.02493, ISP).expect("D12 spec");
        let d30 = ThrusterSpec::constant("D-30", 30.0, D12_BURN * 30.0 / 20.0, 30.0 / (ISP * STANDARD_GRAVITY), ISP)
            .expect("D-30 spec");
        let mut catalog = Self::new();
        for entry in [
            CatalogEntry {
                thruster: d12,
                motor_mass: Some(0.042),
                mass_delta: 0.0,
            },
            CatalogEntry {
                thruster: d30,
                motor_mass: None,
                mass_delta: 0.014,
            },
        ] {
            catalog.insert(entry).expect("catalog entry");
        }
        catalog
    }
}
