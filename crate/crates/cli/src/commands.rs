//! The four subcommands. Each returns the files it wrote and a short summary
//! for the terminal.

use std::borrow::Cow;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use backcast_core::calibration::{
    self, AgeProfileTarget, BassGrid, FutureTrend, HistoricalSeries, QuadraticTrend,
};
use backcast_core::choice;
use backcast_core::fleet::{EmissionFactorTable, ExogenousInputs, FleetState, ModelParams, ScenarioResult, VehicleType};
use backcast_core::ocp::{self, ControlTrajectory, OcpProblem, OcpSolution};
use backcast_core::scenarios::{self, PolicyLaw, ScenarioLabel};

use crate::bundled;
use crate::config::{AdoptionSource, LawSpec, ProfileSource, RunConfig, ScenarioChoice, TargetSpec};
use crate::csvio;
use crate::error::{CliError, Result};
use crate::report;

/// Everything a simulation needs, loaded and validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub initial: FleetState,
    pub inputs: ExogenousInputs,
    pub params: ModelParams,
    pub end_year: i32,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn read_input(path: Option<&Path>, bundled: &'static str, label: &str) -> Result<(String, Cow<'static, str>)> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            Ok((p.display().to_string(), Cow::Owned(text)))
        }
        None => Ok((format!("bundled {label}"), Cow::Borrowed(bundled))),
    }
}

pub fn load_model(cfg: &RunConfig) -> Result<Model> {
    let (name, text) = read_input(cfg.exogenous.as_deref(), bundled::EXOGENOUS, "exogenous.csv")?;
    let mut inputs = csvio::parse_exogenous(&name, &text)?;
    if inputs.first_year() > cfg.start_year || inputs.last_year() < cfg.end_year {
        return Err(CliError::validation(
            name,
            format!(
                "covers {}..{} but the horizon is {}..{}",
                inputs.first_year(),
                inputs.last_year(),
                cfg.start_year,
                cfg.end_year
            ),
        ));
    }
    if cfg.adoption == AdoptionSource::Bass {
        let bass = choice::bass_adoption(&cfg.bass, cfg.bass_epoch, inputs.last_year());
        let rows = inputs
            .rows()
            .iter()
            .map(|r| {
                let mut r = *r;
                r.adoption[1] = bass.get(r.year).unwrap_or(0.0);
                r
            })
            .collect();
        inputs = ExogenousInputs::new(rows)?;
    }

    let (name, text) = read_input(cfg.survival.as_deref(), bundled::SURVIVAL, "survival.csv")?;
    let survival = csvio::parse_survival(&name, &text)?;
    let (name, text) = read_input(cfg.emission_factors.as_deref(), bundled::EMISSION_FACTORS, "emission_factors.csv")?;
    let emission_factors = csvio::parse_emission_factors(&name, &text)?;

    let initial = match cfg.initial_profile {
        ProfileSource::File => {
            let (name, text) = read_input(cfg.initial_fleet.as_deref(), bundled::INITIAL_FLEET, "initial_fleet.csv")?;
            let fleet = csvio::parse_fleet(&name, &text, cfg.start_year)?;
            if fleet.max_age() != survival.max_age() {
                return Err(CliError::validation(
                    name,
                    format!(
                        "has ages 0..{} but the survival schedule covers 1..{}",
                        fleet.max_age(),
                        survival.max_age()
                    ),
                ));
            }
            fleet
        }
        ProfileSource::Geometric => {
            let totals = load_totals(cfg)?;
            FleetState::geometric_by_survival(cfg.start_year, totals, &survival)
        }
    };
    Ok(Model {
        initial,
        inputs,
        params: ModelParams {
            logit: cfg.logit,
            survival,
            emission_factors,
        },
        end_year: cfg.end_year,
    })
}

fn load_totals(cfg: &RunConfig) -> Result<[f64; 2]> {
    let (name, text) = read_input(cfg.initial_totals.as_deref(), bundled::INITIAL_TOTALS, "initial_totals.csv")?;
    csvio::parse_totals(&name, &text)
}

pub fn load_historical(dir: Option<&Path>) -> Result<HistoricalSeries> {
    let file = |name: &str, bundled: &'static str| -> Result<(String, Cow<'static, str>)> {
        let path = dir.map(|d| d.join(name));
        read_input(path.as_deref(), bundled, name)
    };
    let (n, t) = file(bundled::STOCKS_FILE, bundled::HISTORICAL_STOCKS)?;
    let stocks = csvio::parse_stocks(&n, &t)?;
    let (n, t) = file(bundled::NEW_SALES_CO2_FILE, bundled::HISTORICAL_NEW_SALES_CO2)?;
    let new_sales_co2 = csvio::parse_new_sales_co2(&n, &t)?;
    let (n, t) = file(bundled::THERMAL_EMISSIONS_FILE, bundled::HISTORICAL_THERMAL_EMISSIONS)?;
    let thermal_emissions = csvio::parse_thermal_emissions(&n, &t)?;
    let (n, t) = file(bundled::EV_SHARE_FILE, bundled::HISTORICAL_EV_SHARE)?;
    let ev_sales_share = csvio::parse_shares(&n, &t)?;
    Ok(HistoricalSeries {
        stocks,
        new_sales_co2,
        thermal_emissions,
        ev_sales_share,
    })
}

fn write_output(dir: &Path, name: &str, content: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| CliError::io(&path, e))?;
    files.push(path);
    Ok(())
}

fn reference_law(choice: ScenarioChoice, cfg: &RunConfig) -> PolicyLaw {
    match choice {
        ScenarioChoice::I0 => PolicyLaw::ZeroIncentive,
        ScenarioChoice::IC => PolicyLaw::ConstantIncentive(cfg.ic_level),
        ScenarioChoice::IP => PolicyLaw::FullPrice,
        ScenarioChoice::BI => PolicyLaw::BanThermal,
        ScenarioChoice::Optimal => unreachable!("the optimal scenario is solved, not simulated"),
    }
}

fn label_for(choice: ScenarioChoice) -> ScenarioLabel {
    match choice {
        ScenarioChoice::I0 => ScenarioLabel::I0,
        ScenarioChoice::IC => ScenarioLabel::IC,
        ScenarioChoice::IP => ScenarioLabel::IP,
        ScenarioChoice::BI => ScenarioLabel::BI,
        ScenarioChoice::Optimal => ScenarioLabel::Optimal,
    }
}

pub fn run_reference(model: &Model, choice: ScenarioChoice, cfg: &RunConfig) -> Result<ScenarioResult> {
    run_law(model, &reference_law(choice, cfg))
}

pub fn run_law(model: &Model, law: &PolicyLaw) -> Result<ScenarioResult> {
    Ok(scenarios::run_scenario(
        law,
        &model.initial,
        &model.inputs,
        &model.params,
        model.end_year,
    )?)
}

fn resolve_law(spec: &LawSpec, cfg: &RunConfig) -> Result<(PolicyLaw, String)> {
    Ok(match spec {
        LawSpec::ZeroIncentive => (PolicyLaw::ZeroIncentive, "i0".into()),
        LawSpec::Constant(level) => (PolicyLaw::ConstantIncentive(level.unwrap_or(cfg.ic_level)), "ic".into()),
        LawSpec::FullPrice => (PolicyLaw::FullPrice, "ip".into()),
        LawSpec::BanThermal => (PolicyLaw::BanThermal, "bi".into()),
        LawSpec::Custom(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let u = csvio::parse_control(&path.display().to_string(), &text)?;
            if !u.covers(cfg.start_year + 1, cfg.end_year) {
                return Err(CliError::validation(
                    path.display().to_string(),
                    format!(
                        "covers {}..{} but the horizon needs {}..{}",
                        u.first_year(),
                        u.last_year(),
                        cfg.start_year + 1,
                        cfg.end_year
                    ),
                ));
            }
            (PolicyLaw::Custom(u), "custom".into())
        }
    })
}

pub fn simulate(cfg: &RunConfig, law: &LawSpec) -> Result<Outcome> {
    let model = load_model(cfg)?;
    let (policy, slug) = resolve_law(law, cfg)?;
    let result = run_law(&model, &policy)?;
    let mut out = Outcome::default();
    write_output(
        &cfg.output_dir,
        &format!("trajectory_{slug}.csv"),
        &csvio::write_trajectory(&result.records),
        &mut out.files,
    )?;
    out.summary = report::scenario_summary(&slug.to_uppercase(), &result);
    Ok(out)
}

/// Resolves the terminal target, running the named scenario if needed.
pub fn resolve_target(model: &Model, target: &TargetSpec, cfg: &RunConfig) -> Result<f64> {
    match target {
        TargetSpec::Explicit(mt) => Ok(*mt),
        TargetSpec::FromScenario(choice) => Ok(run_reference(model, *choice, cfg)?.terminal_emissions()),
    }
}

pub fn build_problem(model: &Model, target_mt: f64, u_max: f64) -> OcpProblem {
    OcpProblem {
        initial: model.initial.clone(),
        inputs: model.inputs.clone(),
        params: model.params.clone(),
        end_year: model.end_year,
        target_mt,
        u_max,
    }
}

fn initial_guess(prob: &OcpProblem, cfg: &RunConfig, init: Option<&Path>) -> Result<ControlTrajectory> {
    match init {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let u = csvio::parse_control(&path.display().to_string(), &text)?;
            if u.first_year() != prob.first_control_year() || u.last_year() != prob.end_year {
                return Err(CliError::validation(
                    path.display().to_string(),
                    format!("initial guess must cover {}..{}", prob.first_control_year(), prob.end_year),
                ));
            }
            Ok(ControlTrajectory::new(
                u.first_year(),
                u.values().iter().map(|v| v.min(prob.u_max)).collect(),
            ))
        }
        None => Ok(ControlTrajectory::constant(
            prob.first_control_year(),
            prob.end_year,
            cfg.ic_level.min(prob.u_max),
        )),
    }
}

fn write_solution(dir: &Path, sol: &OcpSolution, prob: &OcpProblem, files: &mut Vec<PathBuf>) -> Result<()> {
    write_output(dir, "optimal_control.csv", &csvio::write_control(&sol.u_star), files)?;
    write_output(dir, "optimizer_trace.csv", &csvio::write_trace(&sol.trace), files)?;
    write_output(
        dir,
        "trajectory_optimal.csv",
        &csvio::write_trajectory(&sol.simulation.records),
        files,
    )?;
    write_output(dir, "solution.txt", &report::solution_report(sol, prob), files)
}

fn not_converged(sol: &OcpSolution) -> CliError {
    CliError::NotConverged {
        iterations: sol.iterations,
        stationarity: sol.kkt.stationarity,
        violation: sol.kkt.feasibility,
    }
}

pub fn optimize(cfg: &RunConfig, target: Option<&TargetSpec>, u_max: Option<f64>, init: Option<&Path>) -> Result<Outcome> {
    let model = load_model(cfg)?;
    let target_mt = resolve_target(&model, target.unwrap_or(&cfg.target), cfg)?;
    let u_max = u_max.unwrap_or(cfg.u_max);
    if !(u_max >= 0.0 && u_max.is_finite()) {
        return Err(CliError::Config(format!("u_max must be a non-negative number, got {u_max}")));
    }
    let prob = build_problem(&model, target_mt, u_max);
    let guess = initial_guess(&prob, cfg, init)?;
    let sol = ocp::solve(&prob, &guess, &cfg.solver)?;
    let mut out = Outcome::default();
    write_solution(&cfg.output_dir, &sol, &prob, &mut out.files)?;
    out.summary = report::solution_summary(&sol, &prob);
    if !sol.converged() {
        return Err(not_converged(&sol));
    }
    Ok(out)
}

pub fn compare(cfg: &RunConfig, choices: &[ScenarioChoice]) -> Result<Outcome> {
    let model = load_model(cfg)?;
    let mut wanted: Vec<ScenarioChoice> = Vec::new();
    for c in choices {
        if !wanted.contains(c) {
            wanted.push(*c);
        }
    }
    if wanted.is_empty() {
        return Err(CliError::Config("no scenarios to compare".into()));
    }
    let mut runs: Vec<(ScenarioChoice, ScenarioResult)> = Vec::new();
    for c in wanted.iter().filter(|c| **c != ScenarioChoice::Optimal) {
        runs.push((*c, run_reference(&model, *c, cfg)?));
    }
    let mut out = Outcome::default();
    let mut solution = None;
    if wanted.contains(&ScenarioChoice::Optimal) {
        let target_mt = match &cfg.target {
            TargetSpec::FromScenario(c) => match runs.iter().find(|(r, _)| r == c) {
                Some((_, r)) => r.terminal_emissions(),
                None => run_reference(&model, *c, cfg)?.terminal_emissions(),
            },
            TargetSpec::Explicit(mt) => *mt,
        };
        let prob = build_problem(&model, target_mt, cfg.u_max);
        let guess = initial_guess(&prob, cfg, None)?;
        let sol = ocp::solve(&prob, &guess, &cfg.solver)?;
        write_solution(&cfg.output_dir, &sol, &prob, &mut out.files)?;
        runs.push((ScenarioChoice::Optimal, sol.simulation.clone()));
        solution = Some(sol);
    }
    for (c, r) in &runs {
        if *c != ScenarioChoice::Optimal {
            write_output(
                &cfg.output_dir,
                &format!("trajectory_{}.csv", c.slug()),
                &csvio::write_trajectory(&r.records),
                &mut out.files,
            )?;
        }
    }
    let labelled: Vec<(ScenarioLabel, &ScenarioResult)> = runs.iter().map(|(c, r)| (label_for(*c), r)).collect();
    let table = scenarios::compare(&labelled)?;
    write_output(&cfg.output_dir, "comparison.csv", &csvio::write_comparison(&table), &mut out.files)?;
    let text = report::comparison_text(&table);
    write_output(&cfg.output_dir, "comparison.txt", &text, &mut out.files)?;
    out.summary = text;
    match solution {
        Some(sol) if !sol.converged() => Err(not_converged(&sol)),
        _ => Ok(out),
    }
}

/// Calibration products for the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub survival: calibration::SurvivalFit,
    pub mean_life: f64,
    pub factors: EmissionFactorTable,
    pub quadratic: QuadraticTrend,
    pub mileage: calibration::MileageEstimate,
    pub bass: calibration::BassFit,
    pub initial_fleet: FleetState,
}

/// Ages used by the affine survival fit.
pub const SURVIVAL_FIT_AGES: std::ops::RangeInclusive<usize> = 6..=30;

pub fn run_calibration(cfg: &RunConfig) -> Result<Calibration> {
    let hist = load_historical(cfg.historical_dir.as_deref())?;
    let model = load_model(cfg)?;
    let max_age = model.params.survival.max_age();
    let survival = calibration::fit_survival(
        &hist,
        (cfg.start_year - 1, cfg.start_year),
        max_age,
        *SURVIVAL_FIT_AGES.start()..=(*SURVIVAL_FIT_AGES.end()).min(max_age),
    )?;
    let mean_life = survival.schedule.mean_life();
    let factors = calibration::fit_emission_factor(
        &hist,
        &FutureTrend::Series(model.params.emission_factors.series().clone()),
        cfg.end_year,
    )?;
    let mileage = calibration::estimate_mileage(&hist, &factors)?;
    let bass = calibration::tune_bass(&hist, &BassGrid::default())?;
    let initial_fleet = back_out_initial_fleet(cfg, &model, &hist)?;
    Ok(Calibration {
        survival,
        mean_life,
        factors,
        quadratic: QuadraticTrend::default(),
        mileage,
        bass,
        initial_fleet,
    })
}

/// Thermal ages from the published ban-scenario trajectory; EVs spread over
/// recent ages in proportion to the observed EV sales shares.
fn back_out_initial_fleet(cfg: &RunConfig, model: &Model, hist: &HistoricalSeries) -> Result<FleetState> {
    let (name, text) = read_input(cfg.ban_reference.as_deref(), bundled::BAN_REFERENCE, "ban_reference.csv")?;
    let reference = csvio::parse_ban_reference(&name, &text)?;
    let totals = load_totals(cfg)?;
    let mut thermal_stock = Vec::new();
    for &(year, ev) in reference.ev_stock.iter().filter(|(y, _)| *y > cfg.start_year) {
        let required = model.inputs.year(year)?.required_fleet();
        thermal_stock.push((year, required - ev));
    }
    let emissions: Vec<(i32, f64)> = reference
        .emissions_mt
        .iter()
        .copied()
        .filter(|(y, _)| *y >= cfg.start_year && *y <= cfg.end_year)
        .collect();
    let thermal_stock: Vec<(i32, f64)> = thermal_stock.into_iter().filter(|(y, _)| *y <= cfg.end_year).collect();
    let thermal = calibration::back_out_age_profile(&AgeProfileTarget {
        start_year: cfg.start_year,
        total: totals[VehicleType::Thermal.index()],
        survival: &model.params.survival,
        factors: &model.params.emission_factors,
        inputs: &model.inputs,
        emissions_mt: &emissions,
        thermal_stock: &thermal_stock,
        smoothing: cfg.profile_smoothing,
    })?;
    let electric = recent_profile(
        totals[VehicleType::Electric.index()],
        &hist.ev_sales_share,
        cfg.start_year,
        model.params.survival.max_age(),
    );
    Ok(FleetState::new(cfg.start_year, thermal, electric)?)
}

/// `total` spread over ages `0..` in proportion to the share observed in
/// `year - age`.
fn recent_profile(total: f64, shares: &backcast_core::YearSeries, year: i32, max_age: usize) -> Vec<f64> {
    let weights: Vec<f64> = (0..=max_age)
        .map(|a| shares.get(year - a as i32).unwrap_or(0.0))
        .collect();
    let sum: f64 = weights.iter().sum();
    if sum == 0.0 {
        let mut v = vec![0.0; max_age + 1];
        v[0] = total;
        return v;
    }
    weights.iter().map(|w| total * w / sum).collect()
}

pub fn calibrate(cfg: &RunConfig) -> Result<Outcome> {
    let cal = run_calibration(cfg)?;
    let dir = &cfg.output_dir;
    let mut out = Outcome::default();

    let mut survival_csv = String::from("age,raw_ratio,fitted_eta\n");
    for (i, (raw, eta)) in cal.survival.raw.iter().zip(cal.survival.schedule.rates()).enumerate() {
        let _ = writeln!(survival_csv, "{},{raw},{eta}", i + 1);
    }
    write_output(dir, "survival_fit.csv", &survival_csv, &mut out.files)?;

    let mut mileage_csv = String::from("year,mileage_km\n");
    for (year, m) in &cal.mileage.per_year {
        let _ = writeln!(mileage_csv, "{year},{m}");
    }
    write_output(dir, "mileage.csv", &mileage_csv, &mut out.files)?;
    write_output(
        dir,
        "emission_factors_fitted.csv",
        &csvio::write_emission_factors(&cal.factors),
        &mut out.files,
    )?;
    write_output(dir, "initial_fleet.csv", &csvio::write_fleet(&cal.initial_fleet), &mut out.files)?;
    let text = report::calibration_report(&cal);
    write_output(dir, "calibration_report.txt", &text, &mut out.files)?;
    out.summary = text;
    Ok(out)
}
