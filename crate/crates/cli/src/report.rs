//! Plain-text summaries printed to the terminal and written next to the CSVs.

use std::fmt::Write as _;

use backcast_core::fleet::ScenarioResult;
use backcast_core::ocp::{OcpProblem, OcpSolution, SolveStatus};
use backcast_core::scenarios::ComparisonTable;

use crate::commands::{Calibration, SURVIVAL_FIT_AGES};

pub fn scenario_summary(label: &str, result: &ScenarioResult) -> String {
    let mut s = String::new();
    let last = result.records.last();
    let year = last.map_or(result.final_state.year, |r| r.year);
    let _ = write!(s, "{label}: emissions in {year} = {:.4} Mt", result.terminal_emissions());
    match result.budget_geur {
        Some(b) => {
            let _ = writeln!(s, ", incentive budget = {b:.2} G€");
        }
        None => s.push('\n'),
    }
    for w in &result.warnings {
        let _ = writeln!(s, "warning: new-vehicle demand clamped to zero in {} (surviving fleet exceeded need by {:.0} vehicles)", w.year, w.excess);
    }
    s
}

fn status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxIterations => "iteration limit reached",
    }
}

pub fn solution_summary(sol: &OcpSolution, prob: &OcpProblem) -> String {
    format!(
        "optimal control ({}, {} outer iterations)\n  target {:.4} Mt, achieved {:.4} Mt in {}\n  budget {:.2} G€, multiplier {:.6e}\n",
        status_name(sol.status),
        sol.iterations,
        prob.target_mt,
        sol.terminal_mt,
        prob.end_year,
        sol.budget_geur,
        sol.multiplier,
    )
}

pub fn solution_report(sol: &OcpSolution, prob: &OcpProblem) -> String {
    let mut s = solution_summary(sol, prob);
    let _ = writeln!(s, "  u_max {} k€", prob.u_max);
    let _ = writeln!(
        s,
        "  KKT residuals: stationarity {:.3e}, feasibility {:.3e} Mt, complementarity {:.3e}",
        sol.kkt.stationarity, sol.kkt.feasibility, sol.kkt.complementarity
    );
    let _ = writeln!(s, "\nyear  incentive_keur");
    for (year, u) in sol.u_star.iter() {
        let _ = writeln!(s, "{year}  {u:>10.4}");
    }
    s
}

pub fn comparison_text(table: &ComparisonTable) -> String {
    let mut s = String::new();
    let width = table.rows.iter().map(|r| r.label.to_string().len()).max().unwrap_or(0).max(8);
    let _ = writeln!(
        s,
        "{:<width$}  {:>16}  {:>12}",
        "scenario",
        format!("E({}) Mt", table.horizon_year),
        "budget G€"
    );
    for row in &table.rows {
        let budget = row.budget_geur.map_or_else(|| "-".to_string(), |b| format!("{b:.2}"));
        let _ = writeln!(s, "{:<width$}  {:>16.4}  {:>12}", row.label.to_string(), row.terminal_mt, budget);
    }
    s
}

pub fn calibration_report(cal: &Calibration) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "survival");
    let _ = writeln!(
        s,
        "  affine fit over ages {}..={}: eta(a) = min(1, {:.4} {:+.4} a)",
        SURVIVAL_FIT_AGES.start(),
        SURVIVAL_FIT_AGES.end(),
        cal.survival.intercept,
        cal.survival.slope
    );
    let _ = writeln!(s, "  mean vehicle life {:.2} years", cal.mean_life);

    let _ = writeln!(s, "emission factor of new sales");
    let _ = writeln!(
        s,
        "  table covers cohorts {}..{}",
        cal.factors.first_year(),
        cal.factors.last_year()
    );
    let q = &cal.quadratic;
    for year in [2030, 2040, 2050] {
        if let Some(v) = cal.factors.series().get(year) {
            let _ = writeln!(s, "  {year}: table {v:.1} g/km, quadratic trend {:.1} g/km", q.eval(year));
        }
    }

    let _ = writeln!(s, "mileage");
    if let (Some(first), Some(last)) = (cal.mileage.per_year.first(), cal.mileage.per_year.last()) {
        let _ = writeln!(s, "  back-calculated {}..{}", first.0, last.0);
    }
    let _ = writeln!(s, "  constant {:.0} km/year", cal.mileage.constant_km);

    let _ = writeln!(s, "adoption (Bass)");
    let _ = writeln!(
        s,
        "  p = {}, q = {}, rmse = {:.5}",
        cal.bass.params.p, cal.bass.params.q, cal.bass.rmse
    );

    let fleet = &cal.initial_fleet;
    let _ = writeln!(s, "initial fleet {}", fleet.year);
    for v in backcast_core::fleet::VehicleType::ALL {
        let ages = fleet.ages(v);
        let _ = writeln!(
            s,
            "  {v:?}: {:.0} vehicles, mean age {:.2}",
            fleet.total(v),
            backcast_core::calibration::mean_age(ages)
        );
    }
    s
}
