use std::path::Path;
use std::process::{Command, Output};

use backcast::csvio;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_backcast"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn trajectory(path: &Path) -> Vec<backcast_core::fleet::YearRecord> {
    let text = std::fs::read_to_string(path).unwrap();
    csvio::parse_trajectory(&path.display().to_string(), &text).unwrap()
}

#[test]
fn simulate_writes_a_trajectory_per_law() {
    let dir = tempfile::tempdir().unwrap();
    for law in ["i0", "ic", "ip", "bi", "ic:2.5"] {
        let out = run(dir.path(), &["simulate", "--law", law, "--output", "o"]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ic = trajectory(&dir.path().join("o/trajectory_ic.csv"));
    assert_eq!(ic.len(), 29);
    assert_eq!(ic[0].year, 2022);
    assert!(ic.iter().skip(1).all(|r| r.incentive_keur == 2.5));
}

#[test]
fn custom_zero_control_matches_i0() {
    let dir = tempfile::tempdir().unwrap();
    let mut control = String::from("year,u_keur\n");
    for y in 2023..=2050 {
        control.push_str(&format!("{y},0\n"));
    }
    std::fs::write(dir.path().join("zero.csv"), control).unwrap();
    assert_eq!(code(&run(dir.path(), &["simulate", "--law", "i0", "--output", "o"])), 0);
    assert_eq!(code(&run(dir.path(), &["simulate", "--law", "custom:zero.csv", "--output", "o"])), 0);
    let a = trajectory(&dir.path().join("o/trajectory_i0.csv"));
    let b = trajectory(&dir.path().join("o/trajectory_custom.csv"));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.emissions_mt, y.emissions_mt);
        assert_eq!(x.stock, y.stock);
    }
}

#[test]
fn one_year_horizon_has_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["--end-year", "2023", "simulate", "--law", "ic", "--output", "o"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = trajectory(&dir.path().join("o/trajectory_ic.csv"));
    assert_eq!(rows.iter().map(|r| r.year).collect::<Vec<_>>(), vec![2022, 2023]);
}

#[test]
fn compare_writes_five_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["compare", "--output", "o"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.path().join("o/comparison.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "scenario,terminal_year,terminal_emissions_mt,budget_geur");
    assert_eq!(lines.len(), 6);
    let bi = lines.iter().find(|l| l.starts_with("BI,")).unwrap();
    assert!(bi.ends_with(','), "BI budget must be empty: {bi}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("Optimal"));
}

#[test]
fn compare_subset() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["compare", "--scenarios", "i0,bi", "--output", "o"]);
    assert_eq!(code(&out), 0);
    let table = std::fs::read_to_string(dir.path().join("o/comparison.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(!dir.path().join("o/optimal_control.csv").exists());
}

#[test]
fn optimize_then_simulate_the_control() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["optimize", "--output", "o"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["optimal_control.csv", "optimizer_trace.csv", "trajectory_optimal.csv", "solution.txt"] {
        assert!(dir.path().join("o").join(f).exists(), "{f}");
    }
    let out = run(dir.path(), &["simulate", "--law", "custom:o/optimal_control.csv", "--output", "o"]);
    assert_eq!(code(&out), 0);
    let a = trajectory(&dir.path().join("o/trajectory_optimal.csv"));
    let b = trajectory(&dir.path().join("o/trajectory_custom.csv"));
    for (x, y) in a.iter().zip(&b) {
        assert!((x.emissions_mt - y.emissions_mt).abs() <= 1e-12 * x.emissions_mt);
    }
}

#[test]
fn calibrate_reproduces_the_bundled_initial_fleet() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["calibrate", "--output", "o"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let written = std::fs::read_to_string(dir.path().join("o/initial_fleet.csv")).unwrap();
    assert_eq!(written, backcast::bundled::INITIAL_FLEET);
    let report = std::fs::read_to_string(dir.path().join("o/calibration_report.txt")).unwrap();
    assert!(report.contains("1.0500 -0.0100 a"));
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = backcast::bundled::EXOGENOUS.replacen("13500", "-13500", 1);
    std::fs::write(dir.path().join("exo.csv"), bad).unwrap();
    std::fs::write(dir.path().join("run.toml"), "exogenous = \"exo.csv\"\n").unwrap();
    let out = run(dir.path(), &["--config", "run.toml", "simulate", "--law", "i0"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exo.csv"));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "no_such_key = 1\n").unwrap();
    let out = run(dir.path(), &["--config", "run.toml", "simulate"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn unknown_law_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate", "--law", "banana"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn short_custom_control_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("short.csv"), "year,u_keur\n2023,1\n2024,1\n").unwrap();
    let out = run(dir.path(), &["simulate", "--law", "custom:short.csv"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn infeasible_target_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["optimize", "--target", "1.0", "--umax", "2", "--output", "o"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn iteration_limit_exits_4_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "max_outer = 1\nmax_inner = 2\n").unwrap();
    let out = run(dir.path(), &["--config", "run.toml", "optimize", "--output", "o"]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("o/optimal_control.csv").exists());
}

#[test]
fn missing_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "survival = \"nope.csv\"\n").unwrap();
    let out = run(dir.path(), &["--config", "run.toml", "simulate"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn quiet_suppresses_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate", "--law", "i0", "--quiet", "--output", "o"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty() && out.stderr.is_empty());
}

#[test]
fn in_process_entry_point_matches_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("lib");
    let status = backcast::app::run_with_args(["backcast", "-q", "simulate", "--law", "ip", "--output", target.to_str().unwrap()]);
    assert_eq!(status, 0);
    assert_eq!(code(&run(dir.path(), &["simulate", "--law", "ip", "--output", "bin"])), 0);
    assert_eq!(
        std::fs::read(target.join("trajectory_ip.csv")).unwrap(),
        std::fs::read(dir.path().join("bin/trajectory_ip.csv")).unwrap()
    );
    assert_eq!(backcast::app::run_with_args(["backcast", "simulate", "--law", "nope", "-q"]), 2);
    assert_eq!(backcast::app::run_with_args(["backcast", "frobnicate"]), 2);
}
