//! Subcommands. Each returns its console report and the files to write;
//! nothing here touches the filesystem.

use pitshot::ballistics::{flight_time_to_floor, preimpact_velocity, required_launch_speed, state_at};
use pitshot::planner::{
    delta_v_spread, max_depth, mission_duration, plan_mission, sweep_depth_vs_impulse, sweep_precession_vs_depth, sweep_theta,
    MissionPlan, PowerBudget,
};
use pitshot::simulator::{
    auto_ignition_time, integrate_unpowered, monte_carlo, trace_with_burn, ColumnStats, DispersionReport,
    Histogram, Ignition, MonteCarloOptions,
};
use pitshot::attitude::impact_speed_with_noise;
use thiserror::Error;

use crate::config::RunConfig;
use crate::csv::{fmt_sig, Cell, Table};

/// Spacing of trajectory CSV rows, s.
pub const TRAJECTORY_INTERVAL: f64 = 0.01;

/// A failed subcommand, classified for the process exit code.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("config error: {0}")]
    Config(pitshot::Error),
    #[error("planning failed: {0}")]
    Infeasible(pitshot::Error),
    #[error("simulation failed: {0}")]
    Simulation(pitshot::Error),
    #[error("I/O error: {0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Simulation(_) => 4,
            Failure::Io(_) => 1,
        }
    }
}

pub type CmdResult = std::result::Result<Output, Failure>;

/// Console text plus `(file name, contents)` pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Output {
    pub report: String,
    pub files: Vec<(String, String)>,
}

impl Output {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }
}

/// Launch angles 5°..=85° in 1° steps, rad.
pub fn theta_grid() -> Vec<f64> {
    (5..=85).map(|d| f64::from(d).to_radians()).collect()
}

/// Motor impulses 5..=40 N·s in 0.5 N·s steps.
pub fn impulse_grid() -> Vec<f64> {
    (0..=70).map(|i| 5.0 + 0.5 * f64::from(i)).collect()
}

/// Payload draws 0..=5000 mW in 100 mW steps.
pub fn payload_grid() -> Vec<f64> {
    (0..=50).map(|i| 100.0 * f64::from(i)).collect()
}

fn plan(cfg: &RunConfig) -> Result<MissionPlan, Failure> {
    plan_mission(&cfg.plan_inputs()).map_err(Failure::Infeasible)
}

fn plan_fields(p: &MissionPlan) -> Vec<(&'static str, Cell, &'static str)> {
    let i = &p.inputs;
    let s = &p.spin;
    vec![
        ("g", i.env.g.into(), "m/s^2"),
        ("d", i.pit.d.into(), "m"),
        ("h", i.pit.h.into(), "m"),
        ("theta", i.theta.to_degrees().into(), "deg"),
        ("m", i.bot.m.into(), "kg"),
        ("r_b", i.bot.r_b.into(), "m"),
        ("r_w", i.bot.r_w.into(), "m"),
        ("k", i.spring_k.into(), "N/m"),
        ("thruster", i.thruster.name.as_str().into(), ""),
        ("thruster_impulse", i.thruster.total_impulse.into(), "N*s"),
        ("thruster_burn", i.thruster.burn_duration.into(), "s"),
        ("thruster_isp", i.thruster.isp.into(), "s"),
        ("v0", p.v0.into(), "m/s"),
        ("x", p.x.into(), "m"),
        ("t_d", p.t_d.into(), "s"),
        ("t_f", p.t_f.into(), "s"),
        ("v_f", p.v_f.into(), "m/s"),
        ("v_preimpact_x", p.v_preimpact.x.into(), "m/s"),
        ("v_preimpact_y", p.v_preimpact.y.into(), "m/s"),
        ("v_preimpact_z", p.v_preimpact.z.into(), "m/s"),
        ("e_o_x", p.e_o.x().into(), ""),
        ("e_o_y", p.e_o.y().into(), ""),
        ("e_o_z", p.e_o.z().into(), ""),
        ("theta_align", p.theta_align.to_degrees().into(), "deg"),
        ("j_net", p.j_net.into(), "N*s"),
        ("phi", p.phi.to_degrees().into(), "deg"),
        ("j_flight", p.j_flight.into(), "N*s"),
        ("phi_flight", s.phi.to_degrees().into(), "deg"),
        ("e_d_x", s.e_d.x().into(), ""),
        ("e_d_y", s.e_d.y().into(), ""),
        ("e_d_z", s.e_d.z().into(), ""),
        ("revolutions", s.revolutions.into(), ""),
        ("w_f", s.w_f.into(), "rad/s"),
        ("w_s", s.w_s.into(), "rad/s"),
        ("w_i", s.w_i.into(), "rad/s"),
        ("w0", s.w0.into(), "rad/s"),
        ("w1", s.w1.into(), "rad/s"),
        ("ignition_time", p.ignition_time.into(), "s"),
        ("predicted_v_impact", p.predicted_v_impact.into(), "m/s"),
        ("fuel_equivalent_mass", (p.fuel_equivalent_mass * 1e3).into(), "g"),
    ]
}

/// Mission plan: `plan.csv` with one `field,value,unit` row per plan field.
pub fn cmd_plan(cfg: &RunConfig) -> CmdResult {
    let p = plan(cfg)?;
    let fields = plan_fields(&p);
    let mut table = Table::new(&["field", "value", "unit"]);
    let mut report = String::from("mission plan\n");
    for (name, value, unit) in fields {
        report.push_str(&format!("  {name:<22} {:>16} {unit}\n", value.render()));
        table.push(vec![name.into(), value, unit.into()]);
    }
    Ok(Output {
        report,
        files: vec![("plan.csv".into(), table.render())],
    })
}

fn trajectory_table(samples: &[pitshot::ballistics::TrajectorySample], dt: f64) -> Table {
    let stride = ((TRAJECTORY_INTERVAL / dt).round() as usize).max(1);
    let mut table = Table::new(&["t_s", "x_m", "y_m", "z_m", "vx_mps", "vy_mps", "vz_mps", "speed_mps"]);
    let last = samples.len().saturating_sub(1);
    for (k, s) in samples.iter().enumerate() {
        if k % stride == 0 || k == last {
            table.push(vec![
                s.t.into(),
                s.r.x.into(),
                s.r.y.into(),
                s.r.z.into(),
                s.v.x.into(),
                s.v.y.into(),
                s.v.z.into(),
                s.v.norm().into(),
            ]);
        }
    }
    table
}

/// Flies the plan through the rigid-body simulator: `simulate.csv` holds the
/// trajectory at 10 ms spacing plus the touchdown sample.
pub fn cmd_simulate(cfg: &RunConfig) -> CmdResult {
    let p = plan(cfg)?;
    let setup = p.flight_setup();
    let sim_cfg = cfg.sim_config();
    let initial = setup.initial_state();
    let sim = |e| Failure::Simulation(e);

    let t_ig = match cfg.ignition {
        Ignition::At(t) => t,
        Ignition::Auto => auto_ignition_time(
            &initial,
            &setup.spin,
            &setup.thruster,
            setup.mass,
            &setup.env,
            setup.floor_depth,
            &sim_cfg,
        )
        .map_err(sim)?,
    };
    let (out, samples) = trace_with_burn(
        &initial,
        &setup.spin,
        &setup.thruster,
        setup.mass,
        &setup.env,
        setup.floor_depth,
        t_ig,
        &sim_cfg,
    )
    .map_err(sim)?;
    let (_, crossing) = integrate_unpowered(&initial, &setup.env, setup.floor_depth, &sim_cfg).map_err(sim)?;

    let j = setup.thruster.total_impulse;
    let axial_expected = j * setup.spin.phi.cos();
    let v_pre = crossing.v.norm();
    let mut report = String::from("simulated touchdown\n");
    let mut line = |name: &str, value: f64, unit: &str| {
        report.push_str(&format!("  {name:<34} {:>16} {unit}\n", fmt_sig(value)));
    };
    line("touchdown speed", out.v_impact, "m/s");
    line("touchdown time", out.t_impact, "s");
    line("ignition time", out.ignition_time, "s");
    line("planned ignition estimate", p.ignition_time, "s");
    line("residual transverse impulse", out.residual_transverse_impulse, "N*s");
    line("axial impulse", out.axial_impulse, "N*s");
    line("closed-form axial impulse J cos(phi)", axial_expected, "N*s");
    line("unpowered pre-impact speed", v_pre, "m/s");
    line("closed-form pre-impact speed", p.v_f, "m/s");
    line("pre-impact speed relative delta", (v_pre - p.v_f) / p.v_f, "");
    line("unpowered floor time", crossing.t, "s");
    line("closed-form floor time", p.t_f, "s");
    report.push_str(&format!("  {:<34} {:?}\n", "burn status", out.burn_status));

    Ok(Output {
        report,
        files: vec![("simulate.csv".into(), trajectory_table(&samples, cfg.dt).render())],
    })
}

fn stats_lines(label: &str, s: &ColumnStats, h: &Histogram) -> Vec<String> {
    let mut lines = vec![format!(
        "{label}: mean={} std={} p50={} p95={} p99={} (m/s)",
        fmt_sig(s.mean),
        fmt_sig(s.std),
        fmt_sig(s.p50),
        fmt_sig(s.p95),
        fmt_sig(s.p99)
    )];
    for (k, count) in h.counts.iter().enumerate() {
        lines.push(format!(
            "{label} histogram [{}, {}) m/s: {count}",
            fmt_sig(h.edges[k]),
            fmt_sig(h.edges[k + 1])
        ));
    }
    lines
}

fn dispersion_table(r: &DispersionReport) -> Table {
    let mut table = Table::new(&["trial", "w_e_radps", "phi_e_deg", "v_i_closed_mps", "v_i_sim_mps"]);
    table.comments.push(format!("seed={}", r.seed));
    table.comments.push(format!("trials={}", r.trials.len()));
    table.comments.push(format!("sigma_w={} rad/s", fmt_sig(r.sigma_w)));
    table.comments.push(format!("ignition_time={} s", fmt_sig(r.ignition_time)));
    table.comments.extend(stats_lines("closed", &r.closed, &r.closed_histogram));
    if let (Some(s), Some(h)) = (&r.sim, &r.sim_histogram) {
        table.comments.extend(stats_lines("sim", s, h));
    }
    for t in &r.trials {
        table.push(vec![
            t.trial.into(),
            t.w_e.into(),
            t.phi_e.to_degrees().into(),
            t.v_i_closed.into(),
            t.v_i_sim.into(),
        ]);
    }
    table
}

/// Spin-noise dispersion: `montecarlo.csv` with a `#` summary block.
pub fn cmd_montecarlo(cfg: &RunConfig) -> CmdResult {
    let p = plan(cfg)?;
    let opts = MonteCarloOptions {
        trials: cfg.trials,
        sigma_w: cfg.sigma.resolve(p.spin.w_f),
        seed: cfg.seed,
        simulate: cfg.mc_simulate,
    };
    let r = monte_carlo(&p.flight_setup(), &opts, &cfg.sim_config()).map_err(Failure::Simulation)?;
    let table = dispersion_table(&r);
    let report = table.comments.iter().map(|c| format!("{c}\n")).collect();
    Ok(Output {
        report,
        files: vec![("montecarlo.csv".into(), table.render())],
    })
}

fn impulse_table(cfg: &RunConfig) -> Result<Table, Failure> {
    let rows = sweep_depth_vs_impulse(cfg.pit.d, cfg.theta(), &cfg.env, &cfg.bot, &impulse_grid())
        .map_err(Failure::Infeasible)?;
    let mut t = Table::new(&["impulse_Ns", "max_depth_m"]);
    for r in rows {
        t.push(vec![r.j.into(), r.h_max.into()]);
    }
    Ok(t)
}

fn precession_table(cfg: &RunConfig) -> Result<Table, Failure> {
    let j = cfg.thruster.total_impulse;
    let h_max = max_depth(j, cfg.pit.d, cfg.theta(), &cfg.env, &cfg.bot).map_err(Failure::Infeasible)?;
    let depths: Vec<f64> = (0..=h_max.floor() as u32).map(f64::from).collect();
    let rows = sweep_precession_vs_depth(j, cfg.pit.d, cfg.theta(), &cfg.env, &cfg.bot, &depths)
        .map_err(Failure::Infeasible)?;
    let mut t = Table::new(&["depth_m", "precession_deg"]);
    for r in rows {
        t.push(vec![r.h.into(), r.phi.to_degrees().into()]);
    }
    Ok(t)
}

fn theta_rows(cfg: &RunConfig) -> Result<Vec<pitshot::planner::ThetaRow>, Failure> {
    sweep_theta(cfg.pit.d, cfg.pit.h, &cfg.env, &cfg.bot, cfg.thruster.isp, &theta_grid()).map_err(Failure::Infeasible)
}

fn duration_table(cfg: &RunConfig) -> Result<Table, Failure> {
    let mut t = Table::new(&["payload_mw", "duration_h"]);
    for payload in payload_grid() {
        let budget = PowerBudget {
            payload_draw: payload,
            ..cfg.power_budget()
        };
        t.push(vec![payload.into(), mission_duration(&budget).map_err(Failure::Infeasible)?.into()]);
    }
    Ok(t)
}

/// Trade sweeps on the default grids: launch angle, motor impulse and depth.
pub fn cmd_sweep(cfg: &RunConfig) -> CmdResult {
    let rows = theta_rows(cfg)?;
    let mut theta = Table::new(&["theta_deg", "v0_mps", "delta_v_mps", "fuel_g"]);
    for r in &rows {
        theta.push(vec![
            r.theta.to_degrees().into(),
            r.v0.into(),
            r.delta_v.into(),
            (r.fuel_mass * 1e3).into(),
        ]);
    }
    let best = rows
        .iter()
        .min_by(|a, b| a.delta_v.total_cmp(&b.delta_v))
        .expect("non-empty grid");
    let j = cfg.thruster.total_impulse;
    let h_max = max_depth(j, cfg.pit.d, cfg.theta(), &cfg.env, &cfg.bot).map_err(Failure::Infeasible)?;
    let report = format!(
        "trade sweeps\n  minimum delta-v {} m/s at theta {} deg\n  delta-v spread over [10, 80] deg: {}\n  \
         max depth for {} ({} N*s): {} m\n",
        fmt_sig(best.delta_v),
        fmt_sig(best.theta.to_degrees()),
        fmt_sig(delta_v_spread(&rows, 10.0, 80.0).map_err(Failure::Infeasible)?),
        cfg.thruster.name,
        fmt_sig(j),
        fmt_sig(h_max),
    );
    Ok(Output {
        report,
        files: vec![
            ("sweep_theta.csv".into(), theta.render()),
            ("sweep_impulse.csv".into(), impulse_table(cfg)?.render()),
            ("sweep_depth.csv".into(), precession_table(cfg)?.render()),
        ],
    })
}

/// Unpowered arc to the floor at 10 ms spacing, with the impact speed
/// `v_f sqrt(2 − 2 cos φ_e)` for pointing errors spread evenly over
/// `[0, 90]` deg down the rows.
fn traj_table(cfg: &RunConfig) -> Result<Table, Failure> {
    let theta = cfg.theta();
    let inf = Failure::Infeasible;
    let v0 = required_launch_speed(cfg.pit.d, theta, &cfg.env).map_err(inf)?;
    let t_f = flight_time_to_floor(v0, theta, cfg.pit.h, &cfg.env).map_err(Failure::Infeasible)?;
    let (_, v_f) = preimpact_velocity(v0, theta, cfg.pit.h, &cfg.env).map_err(Failure::Infeasible)?;
    let steps = (t_f / TRAJECTORY_INTERVAL + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=steps).map(|k| k as f64 * TRAJECTORY_INTERVAL).collect();
    if t_f - times[steps] > 1e-9 {
        times.push(t_f);
    }
    let last = (times.len() - 1).max(1) as f64;
    let mut t = Table::new(&["t_s", "x_m", "z_m", "vx_mps", "vz_mps", "phi_e_deg", "v_i_mps"]);
    for (k, &time) in times.iter().enumerate() {
        let s = state_at(time, v0, theta, &cfg.env);
        let phi_e = 90.0 * k as f64 / last;
        t.push(vec![
            time.into(),
            s.r.x.into(),
            s.r.z.into(),
            s.v.x.into(),
            s.v.z.into(),
            phi_e.into(),
            impact_speed_with_noise(v_f, phi_e.to_radians()).into(),
        ]);
    }
    Ok(t)
}

/// Plot-ready figure data: `fig8a.csv` (max depth vs impulse), `fig8b.csv`
/// (precession vs depth), `fig9a.csv` (launch speed and Δv vs angle),
/// `fig9b.csv` (fuel vs angle), `fig4.csv` (duration vs payload draw) and
/// `traj.csv`.
pub fn cmd_figures(cfg: &RunConfig) -> CmdResult {
    let rows = theta_rows(cfg)?;
    let mut fig9a = Table::new(&["theta_deg", "v0_mps", "delta_v_mps"]);
    let mut fig9b = Table::new(&["theta_deg", "fuel_g"]);
    for r in &rows {
        let deg = r.theta.to_degrees();
        fig9a.push(vec![deg.into(), r.v0.into(), r.delta_v.into()]);
        fig9b.push(vec![deg.into(), (r.fuel_mass * 1e3).into()]);
    }
    let files: Vec<(String, String)> = vec![
        ("fig8a.csv".into(), impulse_table(cfg)?.render()),
        ("fig8b.csv".into(), precession_table(cfg)?.render()),
        ("fig9a.csv".into(), fig9a.render()),
        ("fig9b.csv".into(), fig9b.render()),
        ("fig4.csv".into(), duration_table(cfg)?.render()),
        ("traj.csv".into(), traj_table(cfg)?.render()),
    ];
    let report = files
        .iter()
        .map(|(name, body)| format!("{name}: {} rows\n", body.lines().count() - 1))
        .collect();
    Ok(Output { report, files })
}
