//! Flat `key = value` run configuration.
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! Keys are case-sensitive, each may appear once, and unknown keys are
//! errors. The whole file is validated before a [`RunConfig`] is returned.
//!
//! | key | unit | default | constraint |
//! |-----|------|---------|------------|
//! | `body` | | `moon` | `moon` or `mars`; exclusive with `g` |
//! | `g` | m/s² | 1.625 | > 0 |
//! | `d` | m | 5 | > 0 |
//! | `h` | m | 80 | ≥ 0 |
//! | `theta_deg` | deg | 45 | in (0, 90) |
//! | `m` | kg | 1 | > 0 |
//! | `r_b` | m | 0.04 | > 0 |
//! | `r_w` | m | 0.01325 | > 0 |
//! | `k` | N/m | 4012 | > 0 |
//! | `thruster` | | `D12` | catalog name (`D12`, `D-30`) or `custom` |
//! | `thruster_impulse` | N·s | | custom only, > 0 |
//! | `thruster_burn` | s | | custom only, > 0 |
//! | `thruster_isp` | s | | custom only, > 0 |
//! | `thruster_propellant` | kg | 0 | custom only, ≥ 0 |
//! | `thrust_curve` | path | | custom only; replaces impulse and burn |
//! | `rotations` | | `auto` | `auto` or an integer ≥ 1 |
//! | `max_wheel_rate` | rad/s | 300 | > 0; `auto` rotations only |
//! | `sigma_w` | rad/s | | ≥ 0; exclusive with `sigma_w_rel` |
//! | `sigma_w_rel` | | 0.1 | ≥ 0, fraction of the spin rate |
//! | `trials` | | 1000 | ≥ 1 |
//! | `seed` | | 0 | u64 |
//! | `dt` | s | 0.001 | > 0 |
//! | `ignition` | s | `auto` | `auto` or a time ≥ 0 |
//! | `variable_mass` | | `false` | `true` or `false` |
//! | `soft_landing_threshold` | m/s | 2 | > 0 |
//! | `mc_simulate` | | `true` | `true` or `false` |
//! | `battery_mwh` | mWh | 9000 | ≥ 0 |
//! | `payload_mw` | mW | 0 | ≥ 0 |
//! | `out` | path | `.` | |
//!
//! A relative `thrust_curve` path is resolved against the config file's
//! directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use pitshot::ballistics::{BodyEnvironment, BotProperties, PitGeometry, DEFAULT_SPRING_K};
use pitshot::planner::{PlanInputs, PowerBudget, Rotations, ThrusterCatalog, DEFAULT_MAX_WHEEL_RATE};
use pitshot::simulator::{parse_thrust_curve, Ignition, SimConfig, ThrusterSpec};
use pitshot::{Error, Result};

const KEYS: &[&str] = &[
    "body",
    "g",
    "d",
    "h",
    "theta_deg",
    "m",
    "r_b",
    "r_w",
    "k",
    "thruster",
    "thruster_impulse",
    "thruster_burn",
    "thruster_isp",
    "thruster_propellant",
    "thrust_curve",
    "rotations",
    "max_wheel_rate",
    "sigma_w",
    "sigma_w_rel",
    "trials",
    "seed",
    "dt",
    "ignition",
    "variable_mass",
    "soft_landing_threshold",
    "mc_simulate",
    "battery_mwh",
    "payload_mw",
    "out",
];

/// Spin-noise level for Monte Carlo runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSigma {
    /// rad/s
    Absolute(f64),
    /// Fraction of the planned spin rate.
    Relative(f64),
}

impl NoiseSigma {
    pub fn resolve(&self, w_f: f64) -> f64 {
        match *self {
            NoiseSigma::Absolute(s) => s,
            NoiseSigma::Relative(f) => f * w_f,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub env: BodyEnvironment,
    pub pit: PitGeometry,
    pub theta_deg: f64,
    pub bot: BotProperties,
    /// N/m
    pub spring_k: f64,
    pub thruster: ThrusterSpec,
    pub rotations: Rotations,
    pub sigma: NoiseSigma,
    pub trials: usize,
    pub seed: u64,
    /// s
    pub dt: f64,
    pub ignition: Ignition,
    pub variable_mass: bool,
    /// m/s
    pub soft_landing_threshold: f64,
    pub mc_simulate: bool,
    /// mWh
    pub battery_mwh: f64,
    /// mW
    pub payload_mw: f64,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn theta(&self) -> f64 {
        self.theta_deg.to_radians()
    }

    pub fn plan_inputs(&self) -> PlanInputs {
        PlanInputs {
            pit: self.pit,
            theta: self.theta(),
            env: self.env,
            bot: self.bot,
            spring_k: self.spring_k,
            thruster: self.thruster.clone(),
            rotations: self.rotations,
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            dt: self.dt,
            ignition: self.ignition,
            variable_mass: self.variable_mass,
            seed: self.seed,
            soft_landing_threshold: self.soft_landing_threshold,
            ..SimConfig::default()
        }
    }

    pub fn power_budget(&self) -> PowerBudget {
        PowerBudget {
            battery_energy: self.battery_mwh,
            payload_draw: self.payload_mw,
            ..PowerBudget::default()
        }
    }
}

/// Parses a config; relative paths resolve against the working directory.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_in(text, Path::new("."))
}

/// Reads and parses the config at `path`.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_in(&text, base)
}

struct Entry {
    line: usize,
    value: String,
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn err(&self, key: &str, message: impl Into<String>) -> Error {
        let (line, value) = self
            .0
            .get(key)
            .map(|e| (e.line, e.value.clone()))
            .unwrap_or((0, String::new()));
        Error::ConfigValue {
            line,
            key: key.to_string(),
            value,
            message: message.into(),
        }
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|e| e.value.as_str())
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| self.err(key, format!("expected {what}"))),
        }
    }

    /// A finite number satisfying `ok`, whose text is quoted on failure.
    fn number(&self, key: &str, default: Option<f64>, ok: fn(f64) -> bool, invariant: &str) -> Result<Option<f64>> {
        let v = match self.parsed::<f64>(key, "a number")? {
            Some(v) => v,
            None => return Ok(default),
        };
        if v.is_finite() && ok(v) {
            Ok(Some(v))
        } else {
            Err(self.err(key, format!("must satisfy {invariant}")))
        }
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(key, Some(default), |v| v > 0.0, &format!("{key} > 0"))?.unwrap_or(default))
    }

    fn non_negative(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(key, Some(default), |v| v >= 0.0, &format!("{key} >= 0"))?.unwrap_or(default))
    }

    fn boolean(&self, key: &str, default: bool) -> Result<bool> {
        Ok(self.parsed::<bool>(key, "`true` or `false`")?.unwrap_or(default))
    }
}

fn tokenize(text: &str) -> Result<Entries> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::ConfigSyntax {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::ConfigSyntax {
                line,
                message: "missing key before `=`".into(),
            });
        }
        if !KEYS.contains(&key) {
            return Err(Error::ConfigValue {
                line,
                key: key.into(),
                value: value.into(),
                message: "unknown key".into(),
            });
        }
        if value.is_empty() {
            return Err(Error::ConfigValue {
                line,
                key: key.into(),
                value: value.into(),
                message: "missing value".into(),
            });
        }
        if let Some(prev) = map.get(key) {
            let prev: &Entry = prev;
            return Err(Error::ConfigValue {
                line,
                key: key.into(),
                value: value.into(),
                message: format!("duplicate key, first set on line {}", prev.line),
            });
        }
        map.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }
    Ok(Entries(map))
}

fn parse_config_in(text: &str, base: &Path) -> Result<RunConfig> {
    let e = tokenize(text)?;

    let env = match (e.raw("body"), e.has("g")) {
        (Some(_), true) => return Err(e.err("g", "set either `body` or `g`, not both")),
        (Some("moon"), false) => BodyEnvironment::moon(),
        (Some("mars"), false) => BodyEnvironment::mars(),
        (Some(_), false) => return Err(e.err("body", "expected `moon` or `mars`")),
        (None, _) => BodyEnvironment {
            g: e.positive("g", BodyEnvironment::moon().g)?,
        },
    };

    let d = e.positive("d", 5.0)?;
    let h = e.non_negative("h", 80.0)?;
    let pit = PitGeometry::new(d, h).map_err(|err| e.err("d", err.to_string()))?;
    let theta_deg = e
        .number(
            "theta_deg",
            Some(45.0),
            |v| v > 0.0 && v < 90.0,
            "theta_deg in the open interval (0, 90)",
        )?
        .unwrap_or(45.0);

    let defaults = BotProperties::default();
    let bot = BotProperties {
        m: e.positive("m", defaults.m)?,
        r_b: e.positive("r_b", defaults.r_b)?,
        r_w: e.positive("r_w", defaults.r_w)?,
    };
    let spring_k = e.positive("k", DEFAULT_SPRING_K)?;

    let thruster = thruster(&e, base)?;

    let rotations = match e.raw("rotations") {
        None | Some("auto") => Rotations::Auto {
            max_wheel_rate: e.positive("max_wheel_rate", DEFAULT_MAX_WHEEL_RATE)?,
        },
        Some(_) => {
            if e.has("max_wheel_rate") {
                return Err(e.err("max_wheel_rate", "only applies with `rotations = auto`"));
            }
            match e.parsed::<u32>("rotations", "`auto` or an integer >= 1")? {
                Some(n) if n >= 1 => Rotations::Fixed(n),
                _ => return Err(e.err("rotations", "must satisfy rotations >= 1")),
            }
        }
    };

    let sigma = match (e.has("sigma_w"), e.has("sigma_w_rel")) {
        (true, true) => return Err(e.err("sigma_w_rel", "set either `sigma_w` or `sigma_w_rel`, not both")),
        (true, false) => NoiseSigma::Absolute(e.non_negative("sigma_w", 0.0)?),
        (false, _) => NoiseSigma::Relative(e.non_negative("sigma_w_rel", 0.1)?),
    };

    let trials = match e.parsed::<usize>("trials", "an integer >= 1")? {
        None => 1000,
        Some(0) => return Err(e.err("trials", "must satisfy trials >= 1")),
        Some(n) => n,
    };
    let seed = e.parsed::<u64>("seed", "an unsigned 64-bit integer")?.unwrap_or(0);
    let dt = e.positive("dt", SimConfig::default().dt)?;
    if thruster.burn_duration > 0.0 && dt > thruster.burn_duration / 50.0 {
        return Err(e.err(
            "dt",
            format!("must satisfy dt <= burn duration / 50 = {}", thruster.burn_duration / 50.0),
        ));
    }
    let ignition = match e.raw("ignition") {
        None | Some("auto") => Ignition::Auto,
        Some(_) => Ignition::At(
            e.number("ignition", None, |v| v >= 0.0, "`auto` or ignition >= 0")?
                .expect("key present"),
        ),
    };

    Ok(RunConfig {
        env,
        pit,
        theta_deg,
        bot,
        spring_k,
        thruster,
        rotations,
        sigma,
        trials,
        seed,
        dt,
        ignition,
        variable_mass: e.boolean("variable_mass", false)?,
        soft_landing_threshold: e.positive("soft_landing_threshold", SimConfig::default().soft_landing_threshold)?,
        mc_simulate: e.boolean("mc_simulate", true)?,
        battery_mwh: e.non_negative("battery_mwh", PowerBudget::default().battery_energy)?,
        payload_mw: e.non_negative("payload_mw", 0.0)?,
        out: e.raw("out").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
    })
}

const CUSTOM_KEYS: &[&str] = &[
    "thruster_impulse",
    "thruster_burn",
    "thruster_isp",
    "thruster_propellant",
    "thrust_curve",
];

fn thruster(e: &Entries, base: &Path) -> Result<ThrusterSpec> {
    let name = e.raw("thruster").unwrap_or("D12");
    if name != "custom" {
        if let Some(key) = CUSTOM_KEYS.iter().find(|k| e.has(k)) {
            return Err(e.err(key, "only applies with `thruster = custom`"));
        }
        let catalog = ThrusterCatalog::default();
        return match catalog.get(name) {
            Some(entry) => Ok(entry.thruster.clone()),
            None => {
                let known: Vec<&str> = catalog.names().collect();
                Err(e.err(
                    "thruster",
                    format!("unknown thruster; expected one of {} or `custom`", known.join(", ")),
                ))
            }
        };
    }

    let require = |key: &str| -> Result<f64> {
        e.number(key, None, |v| v > 0.0, &format!("{key} > 0"))?
            .ok_or_else(|| e.err(key, "required with `thruster = custom`"))
    };
    let isp = require("thruster_isp")?;
    let propellant = e.non_negative("thruster_propellant", 0.0)?;

    let spec = match e.raw("thrust_curve") {
        Some(path) => {
            for key in ["thruster_impulse", "thruster_burn"] {
                if e.has(key) {
                    return Err(e.err(key, "conflicts with `thrust_curve`, which sets impulse and burn"));
                }
            }
            let full = base.join(path);
            let text = std::fs::read_to_string(&full)
                .map_err(|err| e.err("thrust_curve", format!("{}: {err}", full.display())))?;
            let points = parse_thrust_curve(&text).map_err(|err| e.err("thrust_curve", err.to_string()))?;
            ThrusterSpec::from_curve("custom", points, propellant, isp)
                .map_err(|err| e.err("thrust_curve", err.to_string()))?
        }
        None => ThrusterSpec::constant("custom", require("thruster_impulse")?, require("thruster_burn")?, propellant, isp)
            .map_err(|err| e.err("thruster_impulse", err.to_string()))?,
    };
    Ok(spec)
}
