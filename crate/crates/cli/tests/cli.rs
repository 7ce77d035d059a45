use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pitshot_cli::{cmd_figures, cmd_montecarlo, cmd_plan, cmd_simulate, parse_config};

const MARE: &str = "g=1.625\nd=5\nh=80\ntheta_deg=45\nthruster=D12\n";

fn pitshot(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pitshot"));
    cmd.args(args).env_remove("PITSHOT_OUT");
    if let Some(dir) = env_out {
        cmd.env("PITSHOT_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

fn csv_value(csv: &str, key: &str) -> String {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("no row `{key}`"))
        .split(',')
        .next()
        .unwrap()
        .to_string()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn report_value(report: &str, label: &str) -> String {
    report
        .lines()
        .find(|l| l.trim_start().starts_with(label))
        .unwrap_or_else(|| panic!("no line `{label}`"))
        .split_whitespace()
        .rev()
        .nth(1)
        .unwrap()
        .to_string()
}

#[test]
fn plan_case_study() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), MARE);
    let out_dir = dir.path().join("out");
    let run = pitshot(
        &["plan", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()],
        None,
    );
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(out_dir.join("plan.csv")).unwrap();
    assert!(csv.starts_with("field,value,unit\n"));
    assert!((num(&csv_value(&csv, "v0")) - 2.8504).abs() < 1e-4);
    assert!((num(&csv_value(&csv, "x")) - 0.0450).abs() < 1e-4);
    assert!((num(&csv_value(&csv, "phi")) - 35.0).abs() < 0.05);
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("v0") && stdout.contains("2.85043856"));
}

#[test]
fn too_deep_pit_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "h=200\nthruster=D12\n");
    let run = pitshot(&["plan", "--config", cfg.to_str().unwrap()], Some(dir.path()));
    assert_eq!(run.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&run.stderr).contains("insufficient impulse"));
}

#[test]
fn zero_depth_lands_at_range_time() {
    let out = cmd_plan(&parse_config("h=0").unwrap()).unwrap();
    let csv = out.file("plan.csv").unwrap();
    assert_eq!(csv_value(csv, "t_f"), csv_value(csv, "t_d"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "d=5\ntheta_deg=90\n");
    let run = pitshot(&["plan", "--config", cfg.to_str().unwrap()], Some(dir.path()));
    assert_eq!(run.status.code(), Some(2));
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("line 2") && err.contains("theta_deg") && err.contains("open interval"), "{err}");

    let cfg = write_config(dir.path(), "speed=3\n");
    assert_eq!(pitshot(&["plan", "--config", cfg.to_str().unwrap()], Some(dir.path())).status.code(), Some(2));
}

#[test]
fn missing_config_file_fails() {
    let run = pitshot(&["plan", "--config", "/nonexistent/run.cfg"], None);
    assert!(!run.status.success());
    assert_ne!(run.status.code(), Some(0));
}

#[test]
fn unwritable_output_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), MARE);
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let run = pitshot(&["figures", "--config", cfg.to_str().unwrap(), "--out", blocker.to_str().unwrap()], None);
    assert!(!run.status.success());
}

#[test]
fn env_var_overrides_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), MARE);
    let flag_dir = dir.path().join("flag");
    let env_dir = dir.path().join("env");
    let run = pitshot(
        &["plan", "--config", cfg.to_str().unwrap(), "--out", flag_dir.to_str().unwrap()],
        Some(&env_dir),
    );
    assert!(run.status.success());
    assert!(env_dir.join("plan.csv").exists());
    assert!(!flag_dir.exists());
}

#[test]
fn montecarlo_is_byte_stable_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{MARE}trials=200\nmc_simulate=false\n"));
    let cfg = cfg.to_str().unwrap();
    let run = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        let r = pitshot(&["montecarlo", "--config", cfg, "--seed", seed, "--out", out.to_str().unwrap()], None);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        std::fs::read(out.join("montecarlo.csv")).unwrap()
    };
    let a = run("7", "a");
    let b = run("7", "b");
    let c = run("8", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# seed=7\n"));
    assert!(text.contains("\ntrial,w_e_radps,phi_e_deg,v_i_closed_mps,v_i_sim_mps\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn zero_noise_gives_zero_closed_form_speed() {
    let cfg = parse_config(&format!("{MARE}sigma_w=0\ntrials=5\nmc_simulate=false\n")).unwrap();
    let out = cmd_montecarlo(&cfg).unwrap();
    let rows: Vec<&str> = out
        .file("montecarlo.csv")
        .unwrap()
        .lines()
        .skip_while(|l| !l.starts_with("trial,"))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert_eq!(row.split(',').nth(3), Some("0"));
    }
}

#[test]
fn figures_contain_reference_rows_and_are_stable() {
    let cfg = parse_config(MARE).unwrap();
    let a = cmd_figures(&cfg).unwrap();
    assert_eq!(a, cmd_figures(&cfg).unwrap());
    let names: Vec<&str> = a.files.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["fig8a.csv", "fig8b.csv", "fig9a.csv", "fig9b.csv", "fig4.csv", "traj.csv"]);

    let row = |file: &str, key: &str| -> Vec<f64> {
        let line = a
            .file(file)
            .unwrap()
            .lines()
            .skip(1)
            .find(|l| l.split(',').next().is_some_and(|c| num(c) == num(key)))
            .unwrap_or_else(|| panic!("{file}: no row {key}"));
        line.split(',').map(num).collect()
    };
    assert!((row("fig8a.csv", "20")[1] - 120.58).abs() < 5e-3);
    assert!((row("fig8b.csv", "80")[1] - 35.04).abs() < 5e-3);
    assert!((row("fig4.csv", "0")[1] - 6.338).abs() < 5e-4);
    assert!((row("fig9b.csv", "45")[1] - 20.42).abs() < 5e-3);
    for (name, body) in &a.files {
        let header = body.lines().next().unwrap();
        assert!(header.split(',').all(|c| c.contains('_')), "{name}: {header}");
    }
}

#[test]
fn trajectory_rows_are_ten_ms_apart() {
    let out = cmd_figures(&parse_config(MARE).unwrap()).unwrap();
    let traj = out.file("traj.csv").unwrap();
    let t: Vec<f64> = traj.lines().skip(1).map(|l| num(l.split(',').next().unwrap())).collect();
    assert_eq!(t[0], 0.0);
    assert!((t[1] - 0.01).abs() < 1e-12 && (t[100] - 1.0).abs() < 1e-9);
    let last: Vec<f64> = traj.lines().last().unwrap().split(',').map(num).collect();
    assert!((last[0] - 11.2403473).abs() < 1e-6);
    assert!((last[2] + 80.0).abs() < 1e-6);
    // v_i = v_f sqrt(2) at 90 deg pointing error
    assert!((last[6] - 16.3745229 * 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn simulate_soft_lands_and_matches_degenerate_montecarlo() {
    let cfg = parse_config(MARE).unwrap();
    let sim = cmd_simulate(&cfg).unwrap();
    let touchdown = report_value(&sim.report, "touchdown speed");
    assert!(num(&touchdown) < 0.5, "{touchdown}");
    let traj = sim.file("simulate.csv").unwrap();
    assert_eq!(traj.lines().last().unwrap().rsplit(',').next(), Some(touchdown.as_str()));

    let mc_cfg = parse_config(&format!("{MARE}sigma_w=0\ntrials=1\n")).unwrap();
    let mc = cmd_montecarlo(&mc_cfg).unwrap();
    let row = mc.file("montecarlo.csv").unwrap().lines().last().unwrap().to_string();
    assert_eq!(row.rsplit(',').next(), Some(touchdown.as_str()));
}

#[test]
fn simulate_converges_in_step_size() {
    let coarse = cmd_simulate(&parse_config(MARE).unwrap()).unwrap();
    let fine = cmd_simulate(&parse_config(&format!("{MARE}dt=0.0005\n")).unwrap()).unwrap();
    let a = num(&report_value(&coarse.report, "touchdown speed"));
    let b = num(&report_value(&fine.report, "touchdown speed"));
    assert!((a - b).abs() < 1e-4, "{a} vs {b}");
}

#[test]
fn sweep_writes_three_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), MARE);
    let run = pitshot(&["sweep", "--config", cfg.to_str().unwrap()], Some(dir.path()));
    assert!(run.status.success());
    for name in ["sweep_theta.csv", "sweep_impulse.csv", "sweep_depth.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    assert!(String::from_utf8_lossy(&run.stdout).contains("120.576923"));
}
