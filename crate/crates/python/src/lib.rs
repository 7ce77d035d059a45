//! Python bindings. Angles are radians, as in the Rust API; the
//! configuration-driven `run_command` takes degrees like the CLI.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pitshot::attitude::{impact_speed_with_noise as impact_speed, precession_angle as precession};
use pitshot::ballistics::{self, BodyEnvironment, BotProperties, PitGeometry, DEFAULT_SPRING_K};
use pitshot::planner::{self, MissionPlan, PlanInputs, PowerBudget, Rotations, ThrusterCatalog, DEFAULT_MAX_WHEEL_RATE};
use pitshot::simulator::{self, ColumnStats, Ignition, MonteCarloOptions, SimConfig, ThrusterSpec};

create_exception!(pitshot, PitshotError, PyValueError);

fn err(e: pitshot::Error) -> PyErr {
    PitshotError::new_err(e.to_string())
}

fn env(g: f64) -> PyResult<BodyEnvironment> {
    BodyEnvironment::new(g).map_err(err)
}

/// A landing motor.
#[pyclass(name = "Thruster", frozen, from_py_object)]
#[derive(Clone)]
struct PyThruster {
    inner: ThrusterSpec,
}

#[pymethods]
impl PyThruster {
    /// Constant-thrust motor.
    #[new]
    #[pyo3(signature = (name, total_impulse, burn_duration, propellant_mass, isp))]
    fn new(name: &str, total_impulse: f64, burn_duration: f64, propellant_mass: f64, isp: f64) -> PyResult<Self> {
        ThrusterSpec::constant(name, total_impulse, burn_duration, propellant_mass, isp)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    /// Catalog motor by name (`"D12"`, `"D-30"`).
    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Self> {
        ThrusterCatalog::default()
            .get(name)
            .map(|e| Self {
                inner: e.thruster.clone(),
            })
            .ok_or_else(|| PitshotError::new_err(format!("unknown thruster `{name}`")))
    }

    /// Motor from a thrust table of `(t, F)` pairs.
    #[staticmethod]
    #[pyo3(signature = (name, points, propellant_mass, isp))]
    fn from_curve(name: &str, points: Vec<(f64, f64)>, propellant_mass: f64, isp: f64) -> PyResult<Self> {
        ThrusterSpec::from_curve(name, points, propellant_mass, isp)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }
    #[getter]
    fn total_impulse(&self) -> f64 {
        self.inner.total_impulse
    }
    #[getter]
    fn burn_duration(&self) -> f64 {
        self.inner.burn_duration
    }
    #[getter]
    fn propellant_mass(&self) -> f64 {
        self.inner.propellant_mass
    }
    #[getter]
    fn isp(&self) -> f64 {
        self.inner.isp
    }

    fn __repr__(&self) -> String {
        format!(
            "Thruster(name={:?}, total_impulse={}, burn_duration={})",
            self.inner.name, self.inner.total_impulse, self.inner.burn_duration
        )
    }
}

fn stats_dict<'py>(py: Python<'py>, s: &ColumnStats) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("mean", s.mean)?;
    d.set_item("std", s.std)?;
    d.set_item("p50", s.p50)?;
    d.set_item("p95", s.p95)?;
    d.set_item("p99", s.p99)?;
    Ok(d)
}

/// A full launch, spin and landing plan.
#[pyclass(name = "MissionPlan", frozen)]
struct PyMissionPlan {
    inner: MissionPlan,
}

#[pymethods]
impl PyMissionPlan {
    #[getter]
    fn v0(&self) -> f64 {
        self.inner.v0
    }
    #[getter]
    fn x(&self) -> f64 {
        self.inner.x
    }
    #[getter]
    fn t_d(&self) -> f64 {
        self.inner.t_d
    }
    #[getter]
    fn t_f(&self) -> f64 {
        self.inner.t_f
    }
    #[getter]
    fn v_f(&self) -> f64 {
        self.inner.v_f
    }
    #[getter]
    fn v_preimpact(&self) -> (f64, f64, f64) {
        let v = self.inner.v_preimpact;
        (v.x, v.y, v.z)
    }
    #[getter]
    fn e_o(&self) -> (f64, f64, f64) {
        let e = self.inner.e_o;
        (e.x(), e.y(), e.z())
    }
    #[getter]
    fn theta_align(&self) -> f64 {
        self.inner.theta_align
    }
    #[getter]
    fn j_net(&self) -> f64 {
        self.inner.j_net
    }
    #[getter]
    fn phi(&self) -> f64 {
        self.inner.phi
    }
    #[getter]
    fn j_flight(&self) -> f64 {
        self.inner.j_flight
    }
    #[getter]
    fn phi_flight(&self) -> f64 {
        self.inner.spin.phi
    }
    #[getter]
    fn e_d(&self) -> (f64, f64, f64) {
        let e = self.inner.spin.e_d;
        (e.x(), e.y(), e.z())
    }
    #[getter]
    fn revolutions(&self) -> f64 {
        self.inner.spin.revolutions
    }
    #[getter]
    fn w_f(&self) -> f64 {
        self.inner.spin.w_f
    }
    #[getter]
    fn w_s(&self) -> f64 {
        self.inner.spin.w_s
    }
    #[getter]
    fn w_i(&self) -> f64 {
        self.inner.spin.w_i
    }
    #[getter]
    fn wheel_rates(&self) -> (f64, f64) {
        (self.inner.spin.w0, self.inner.spin.w1)
    }
    #[getter]
    fn ignition_time(&self) -> f64 {
        self.inner.ignition_time
    }
    #[getter]
    fn predicted_v_impact(&self) -> f64 {
        self.inner.predicted_v_impact
    }
    #[getter]
    fn fuel_equivalent_mass(&self) -> f64 {
        self.inner.fuel_equivalent_mass
    }
    #[getter]
    fn thruster(&self) -> PyThruster {
        PyThruster {
            inner: self.inner.inputs.thruster.clone(),
        }
    }

    /// Flies the plan through the rigid-body simulator. `ignition` is a time
    /// in seconds, or `None` for the touchdown-optimal time.
    #[pyo3(signature = (dt = 1e-3, ignition = None, variable_mass = false))]
    fn simulate<'py>(
        &self,
        py: Python<'py>,
        dt: f64,
        ignition: Option<f64>,
        variable_mass: bool,
    ) -> PyResult<Bound<'py, PyDict>> {
        let setup = self.inner.flight_setup();
        let cfg = SimConfig {
            dt,
            ignition: ignition.map_or(Ignition::Auto, Ignition::At),
            variable_mass,
            ..SimConfig::default()
        };
        let out = py
            .detach(|| {
                simulator::integrate_with_burn(
                    &setup.initial_state(),
                    &setup.spin,
                    &setup.thruster,
                    setup.mass,
                    &setup.env,
                    setup.floor_depth,
                    &cfg,
                )
            })
            .map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("t_impact", out.t_impact)?;
        d.set_item("v_impact", out.v_impact)?;
        d.set_item("velocity", (out.velocity.x, out.velocity.y, out.velocity.z))?;
        d.set_item("position", (out.r_impact.x, out.r_impact.y, out.r_impact.z))?;
        d.set_item("residual_transverse_impulse", out.residual_transverse_impulse)?;
        d.set_item("axial_impulse", out.axial_impulse)?;
        d.set_item("ignition_time", out.ignition_time)?;
        d.set_item("burn_status", format!("{:?}", out.burn_status))?;
        Ok(d)
    }

    /// Spin-noise Monte Carlo over `trials` seeded trials.
    #[pyo3(signature = (trials, sigma_w, seed = 0, simulate = true, dt = 1e-3))]
    fn monte_carlo<'py>(
        &self,
        py: Python<'py>,
        trials: usize,
        sigma_w: f64,
        seed: u64,
        simulate: bool,
        dt: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let setup = self.inner.flight_setup();
        let opts = MonteCarloOptions {
            trials,
            sigma_w,
            seed,
            simulate,
        };
        let cfg = SimConfig {
            dt,
            seed,
            ..SimConfig::default()
        };
        let r = py.detach(|| simulator::monte_carlo(&setup, &opts, &cfg)).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("seed", r.seed)?;
        d.set_item("sigma_w", r.sigma_w)?;
        d.set_item("ignition_time", simulate.then_some(r.ignition_time))?;
        d.set_item("closed", stats_dict(py, &r.closed)?)?;
        d.set_item("sim", r.sim.as_ref().map(|s| stats_dict(py, s)).transpose()?)?;
        let rows: Vec<(usize, f64, f64, f64, Option<f64>)> = r
            .trials
            .iter()
            .map(|t| (t.trial, t.w_e, t.phi_e, t.v_i_closed, t.v_i_sim))
            .collect();
        d.set_item("trials", rows)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "MissionPlan(v0={}, x={}, v_f={}, phi={})",
            self.inner.v0, self.inner.x, self.inner.v_f, self.inner.phi
        )
    }
}

/// Plans a mission. `thruster` is a catalog name or a `Thruster`;
/// `rotations=None` picks the largest count under `max_wheel_rate`.
#[pyfunction]
#[pyo3(signature = (
    d, h, theta, g = ballistics::MOON_GRAVITY, thruster = None, m = 1.0, r_b = 0.04, r_w = 0.01325,
    k = DEFAULT_SPRING_K, rotations = None, max_wheel_rate = DEFAULT_MAX_WHEEL_RATE
))]
#[allow(clippy::too_many_arguments)]
fn plan_mission(
    d: f64,
    h: f64,
    theta: f64,
    g: f64,
    thruster: Option<&Bound<'_, PyAny>>,
    m: f64,
    r_b: f64,
    r_w: f64,
    k: f64,
    rotations: Option<u32>,
    max_wheel_rate: f64,
) -> PyResult<PyMissionPlan> {
    let thruster = match thruster {
        None => PyThruster::catalog("D12")?.inner,
        Some(obj) => match obj.extract::<PyThruster>() {
            Ok(t) => t.inner,
            Err(_) => PyThruster::catalog(&obj.extract::<String>()?)?.inner,
        },
    };
    let inputs = PlanInputs {
        pit: PitGeometry::new(d, h).map_err(err)?,
        theta,
        env: env(g)?,
        bot: BotProperties::new(m, r_b, r_w).map_err(err)?,
        spring_k: k,
        thruster,
        rotations: rotations.map_or(Rotations::Auto { max_wheel_rate }, Rotations::Fixed),
    };
    planner::plan_mission(&inputs)
        .map(|inner| PyMissionPlan { inner })
        .map_err(err)
}

/// Launch speed that lands `d` metres away at elevation `theta`, m/s.
#[pyfunction]
#[pyo3(signature = (d, theta, g = ballistics::MOON_GRAVITY))]
fn required_launch_speed(d: f64, theta: f64, g: f64) -> PyResult<f64> {
    ballistics::required_launch_speed(d, theta, &env(g)?).map_err(err)
}

/// Spring compression for launch speed `v0`, m.
#[pyfunction]
#[pyo3(signature = (v0, m = 1.0, k = DEFAULT_SPRING_K))]
fn spring_compression(v0: f64, m: f64, k: f64) -> PyResult<f64> {
    let bot = BotProperties { m, ..BotProperties::default() };
    ballistics::spring_compression(v0, &bot, k).map_err(err)
}

/// Time to fall to `h` below the launch plane, s.
#[pyfunction]
#[pyo3(signature = (v0, theta, h, g = ballistics::MOON_GRAVITY))]
fn flight_time_to_floor(v0: f64, theta: f64, h: f64, g: f64) -> PyResult<f64> {
    ballistics::flight_time_to_floor(v0, theta, h, &env(g)?).map_err(err)
}

/// Pre-impact velocity vector and speed at depth `h`.
#[pyfunction]
#[pyo3(signature = (v0, theta, h, g = ballistics::MOON_GRAVITY))]
fn preimpact_velocity(v0: f64, theta: f64, h: f64, g: f64) -> PyResult<((f64, f64, f64), f64)> {
    let (v, s) = ballistics::preimpact_velocity(v0, theta, h, &env(g)?).map_err(err)?;
    Ok(((v.x, v.y, v.z), s))
}

/// Precession half-angle `arccos(j_net / j)`, rad.
#[pyfunction]
fn precession_angle(j_net: f64, j: f64) -> PyResult<f64> {
    precession(j_net, j).map_err(err)
}

/// Touchdown speed for pointing error `phi_e`, m/s.
#[pyfunction]
fn impact_speed_with_noise(v_f: f64, phi_e: f64) -> f64 {
    impact_speed(v_f, phi_e)
}

/// Deepest pit reachable with impulse `j`, m.
#[pyfunction]
#[pyo3(signature = (j, d, theta, g = ballistics::MOON_GRAVITY, m = 1.0))]
fn max_depth(j: f64, d: f64, theta: f64, g: f64, m: f64) -> PyResult<f64> {
    let bot = BotProperties { m, ..BotProperties::default() };
    planner::max_depth(j, d, theta, &env(g)?, &bot).map_err(err)
}

/// Propellant for a landing `delta_v`, kg.
#[pyfunction]
#[pyo3(signature = (delta_v, isp, m = 1.0))]
fn fuel_mass(delta_v: f64, isp: f64, m: f64) -> PyResult<f64> {
    let bot = BotProperties { m, ..BotProperties::default() };
    planner::fuel_mass(delta_v, &bot, isp).map_err(err)
}

/// Hours of operation with the default battery and base loads.
#[pyfunction]
#[pyo3(signature = (payload_mw = 0.0))]
fn mission_duration(payload_mw: f64) -> PyResult<f64> {
    planner::mission_duration(&PowerBudget {
        payload_draw: payload_mw,
        ..PowerBudget::default()
    })
    .map_err(err)
}

/// Runs a CLI subcommand on config text; returns `(report, {file: csv})`.
#[pyfunction]
fn run_command(py: Python<'_>, command: &str, config: &str) -> PyResult<(String, Vec<(String, String)>)> {
    let cfg = pitshot_cli::parse_config(config).map_err(err)?;
    let cmd = match command {
        "plan" => pitshot_cli::cmd_plan,
        "simulate" => pitshot_cli::cmd_simulate,
        "sweep" => pitshot_cli::cmd_sweep,
        "montecarlo" => pitshot_cli::cmd_montecarlo,
        "figures" => pitshot_cli::cmd_figures,
        other => return Err(PitshotError::new_err(format!("unknown command `{other}`"))),
    };
    let out = py.detach(|| cmd(&cfg)).map_err(|e| PitshotError::new_err(e.to_string()))?;
    Ok((out.report, out.files))
}

#[pymodule]
#[pyo3(name = "pitshot")]
fn pitshot_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PitshotError", m.py().get_type::<PitshotError>())?;
    m.add("MOON_GRAVITY", ballistics::MOON_GRAVITY)?;
    m.add("MARS_GRAVITY", ballistics::MARS_GRAVITY)?;
    m.add_class::<PyThruster>()?;
    m.add_class::<PyMissionPlan>()?;
    m.add_function(wrap_pyfunction!(plan_mission, m)?)?;
    m.add_function(wrap_pyfunction!(required_launch_speed, m)?)?;
    m.add_function(wrap_pyfunction!(spring_compression, m)?)?;
    m.add_function(wrap_pyfunction!(flight_time_to_floor, m)?)?;
    m.add_function(wrap_pyfunction!(preimpact_velocity, m)?)?;
    m.add_function(wrap_pyfunction!(precession_angle, m)?)?;
    m.add_function(wrap_pyfunction!(impact_speed_with_noise, m)?)?;
    m.add_function(wrap_pyfunction!(max_depth, m)?)?;
    m.add_function(wrap_pyfunction!(fuel_mass, m)?)?;
    m.add_function(wrap_pyfunction!(mission_duration, m)?)?;
    m.add_function(wrap_pyfunction!(run_command, m)?)?;
    Ok(())
}
