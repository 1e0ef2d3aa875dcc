//! CSV schemas: parsing with row-level validation, and deterministic writers.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! emitted file parses back to bit-identical values.

use std::fmt::Write as _;

use backcast_core::calibration::{Ownership, StockObservation};
use backcast_core::fleet::{
    EmissionFactorTable, ExogenousInputs, FleetState, SurvivalSchedule, VehicleType, YearInputs, YearRecord,
};
use backcast_core::ocp::{ControlTrajectory, IterationTrace};
use backcast_core::scenarios::ComparisonTable;
use backcast_core::YearSeries;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{CliError, Result};

pub const EXOGENOUS_HEADER: &[&str] = &[
    "year",
    "G_Mvkm",
    "M_km",
    "CP_icev_keur",
    "CP_ev_keur",
    "CO_icev_eur",
    "CO_ev_eur",
    "cI_ev",
    "cA_ev",
];
pub const FLEET_HEADER: &[&str] = &["type", "age", "count"];
pub const CONTROL_HEADER: &[&str] = &["year", "u_keur"];
pub const EMISSION_FACTOR_HEADER: &[&str] = &["year", "g_per_km"];
pub const SURVIVAL_HEADER: &[&str] = &["age", "eta"];
pub const STOCK_HEADER: &[&str] = &["year", "type", "ownership", "age", "count"];
pub const THERMAL_EMISSIONS_HEADER: &[&str] = &["year", "emissions_mt"];
pub const SHARE_HEADER: &[&str] = &["year", "share"];
pub const BAN_REFERENCE_HEADER: &[&str] = &["year", "emissions_mt", "ev_stock_m"];
pub const TOTALS_HEADER: &[&str] = &["type", "count"];
pub const TRAJECTORY_HEADER: &[&str] = &[
    "year",
    "new_demand",
    "sales_icev",
    "sales_ev",
    "stock_icev",
    "stock_ev",
    "emissions_mt",
    "incentive_keur",
    "spend_geur",
];

/// Deserializes every row of `text`, after checking that the header holds
/// exactly the `expected` columns. Returns `(line, row)` pairs.
fn rows<T: DeserializeOwned>(name: &str, text: &str, expected: &[&str]) -> Result<Vec<(u64, T)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::validation(name, format!("unreadable header: {e}")))?
        .clone();
    let missing: Vec<&str> = expected
        .iter()
        .copied()
        .filter(|c| !headers.iter().any(|h| h == *c))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::validation(name, format!("missing columns: {}", missing.join(", "))));
    }
    if let Some(extra) = headers.iter().find(|h| !expected.contains(h)) {
        return Err(CliError::validation(name, format!("unexpected column '{extra}'")));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::validation(name, format!("row {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record.deserialize::<T>(Some(&headers)).map_err(|e| {
            let detail = match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => match err.field() {
                    Some(i) => format!("column '{}': {}", headers.get(i as usize).unwrap_or("?"), err.kind()),
                    None => err.kind().to_string(),
                },
                _ => e.to_string(),
            };
            CliError::validation(name, format!("row {line}: {detail}"))
        })?;
        out.push((line, row));
    }
    if out.is_empty() {
        return Err(CliError::validation(name, "no data rows"));
    }
    Ok(out)
}

fn require_contiguous(name: &str, years: impl Iterator<Item = (u64, i64)>, what: &str) -> Result<()> {
    let mut prev: Option<i64> = None;
    for (line, y) in years {
        if let Some(p) = prev {
            if y != p + 1 {
                return Err(CliError::validation(
                    name,
                    format!("row {line}: {what} {y} does not follow {p} (values must be contiguous and increasing)"),
                ));
            }
        }
        prev = Some(y);
    }
    Ok(())
}

fn require_non_negative(name: &str, line: u64, column: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(CliError::validation(name, format!("row {line}: {column} is not a finite number")));
    }
    if value < 0.0 {
        return Err(CliError::validation(name, format!("row {line}: negative {column} ({value})")));
    }
    Ok(())
}

fn require_positive(name: &str, line: u64, column: &str, value: f64) -> Result<()> {
    require_non_negative(name, line, column, value)?;
    if value == 0.0 {
        return Err(CliError::validation(name, format!("row {line}: {column} must be positive")));
    }
    Ok(())
}

fn require_fraction(name: &str, line: u64, column: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(CliError::validation(name, format!("row {line}: {column} must lie in [0, 1] (got {value})")));
    }
    Ok(())
}

fn vehicle_type(name: &str, line: u64, n: u8) -> Result<VehicleType> {
    VehicleType::from_number(n)
        .ok_or_else(|| CliError::validation(name, format!("row {line}: type must be 1 (thermal) or 2 (electric), got {n}")))
}

#[derive(Deserialize)]
struct ExogenousRow {
    year: i32,
    #[serde(rename = "G_Mvkm")]
    demand: f64,
    #[serde(rename = "M_km")]
    mileage: f64,
    #[serde(rename = "CP_icev_keur")]
    cp_icev: f64,
    #[serde(rename = "CP_ev_keur")]
    cp_ev: f64,
    #[serde(rename = "CO_icev_eur")]
    co_icev: f64,
    #[serde(rename = "CO_ev_eur")]
    co_ev: f64,
    #[serde(rename = "cI_ev")]
    ci_ev: f64,
    #[serde(rename = "cA_ev")]
    ca_ev: f64,
}

pub fn parse_exogenous(name: &str, text: &str) -> Result<ExogenousInputs> {
    let rows: Vec<(u64, ExogenousRow)> = rows(name, text, EXOGENOUS_HEADER)?;
    require_contiguous(name, rows.iter().map(|(l, r)| (*l, r.year as i64)), "year")?;
    let mut out = Vec::with_capacity(rows.len());
    for (line, r) in rows {
        require_positive(name, line, "G_Mvkm", r.demand)?;
        require_positive(name, line, "M_km", r.mileage)?;
        for (col, v) in [
            ("CP_icev_keur", r.cp_icev),
            ("CP_ev_keur", r.cp_ev),
            ("CO_icev_eur", r.co_icev),
            ("CO_ev_eur", r.co_ev),
        ] {
            require_non_negative(name, line, col, v)?;
        }
        require_fraction(name, line, "cI_ev", r.ci_ev)?;
        require_fraction(name, line, "cA_ev", r.ca_ev)?;
        out.push(YearInputs {
            year: r.year,
            demand_mvkm: r.demand,
            mileage_km: r.mileage,
            purchase_keur: [r.cp_icev, r.cp_ev],
            operating_eur: [r.co_icev, r.co_ev],
            infrastructure: [1.0, r.ci_ev],
            adoption: [0.0, r.ca_ev],
        });
    }
    ExogenousInputs::new(out).map_err(|e| CliError::validation(name, e.to_string()))
}

pub fn write_exogenous(inputs: &ExogenousInputs) -> String {
    let mut s = EXOGENOUS_HEADER.join(",");
    s.push('\n');
    for r in inputs.rows() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.year,
            r.demand_mvkm,
            r.mileage_km,
            r.purchase_keur[0],
            r.purchase_keur[1],
            r.operating_eur[0],
            r.operating_eur[1],
            r.infrastructure[1],
            r.adoption[1]
        );
    }
    s
}

#[derive(Deserialize)]
struct FleetRow {
    #[serde(rename = "type")]
    vehicle: u8,
    age: usize,
    count: f64,
}

/// Initial fleet by `(type, age)`; every type needs every age from 0 to the
/// oldest age present, exactly once.
pub fn parse_fleet(name: &str, text: &str, year: i32) -> Result<FleetState> {
    let rows: Vec<(u64, FleetRow)> = rows(name, text, FLEET_HEADER)?;
    let max_age = rows.iter().map(|(_, r)| r.age).max().unwrap_or(0);
    if max_age == 0 {
        return Err(CliError::validation(name, "need at least two age classes"));
    }
    let mut stock: [Vec<Option<f64>>; 2] = [vec![None; max_age + 1], vec![None; max_age + 1]];
    for (line, r) in &rows {
        let v = vehicle_type(name, *line, r.vehicle)?;
        require_non_negative(name, *line, "count", r.count)?;
        let slot = &mut stock[v.index()][r.age];
        if slot.is_some() {
            return Err(CliError::validation(name, format!("row {line}: duplicate entry for type {} age {}", r.vehicle, r.age)));
        }
        *slot = Some(r.count);
    }
    let mut columns: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for v in VehicleType::ALL {
        for (age, c) in stock[v.index()].iter().enumerate() {
            match c {
                Some(c) => columns[v.index()].push(*c),
                None => {
                    return Err(CliError::validation(
                        name,
                        format!("missing entry for type {} age {age}", v.number()),
                    ))
                }
            }
        }
    }
    let [thermal, electric] = columns;
    FleetState::new(year, thermal, electric).map_err(|e| CliError::validation(name, e.to_string()))
}

pub fn write_fleet(state: &FleetState) -> String {
    let mut s = FLEET_HEADER.join(",");
    s.push('\n');
    for v in VehicleType::ALL {
        for (age, c) in state.ages(v).iter().enumerate() {
            let _ = writeln!(s, "{},{age},{c}", v.number());
        }
    }
    s
}

#[derive(Deserialize)]
struct TotalsRow {
    #[serde(rename = "type")]
    vehicle: u8,
    count: f64,
}

/// Stock totals by type, `[thermal, electric]`.
pub fn parse_totals(name: &str, text: &str) -> Result<[f64; 2]> {
    let rows: Vec<(u64, TotalsRow)> = rows(name, text, TOTALS_HEADER)?;
    let mut out = [None, None];
    for (line, r) in rows {
        let v = vehicle_type(name, line, r.vehicle)?;
        require_non_negative(name, line, "count", r.count)?;
        out[v.index()] = Some(r.count);
    }
    match out {
        [Some(a), Some(b)] => Ok([a, b]),
        _ => Err(CliError::validation(name, "need one total per vehicle type")),
    }
}

#[derive(Deserialize)]
struct ControlRow {
    year: i32,
    u_keur: f64,
}

pub fn parse_control(name: &str, text: &str) -> Result<ControlTrajectory> {
    let rows: Vec<(u64, ControlRow)> = rows(name, text, CONTROL_HEADER)?;
    require_contiguous(name, rows.iter().map(|(l, r)| (*l, r.year as i64)), "year")?;
    for (line, r) in &rows {
        require_non_negative(name, *line, "u_keur", r.u_keur)?;
    }
    Ok(ControlTrajectory::new(rows[0].1.year, rows.iter().map(|(_, r)| r.u_keur).collect()))
}

pub fn write_control(u: &ControlTrajectory) -> String {
    let mut s = CONTROL_HEADER.join(",");
    s.push('\n');
    for (year, v) in u.iter() {
        let _ = writeln!(s, "{year},{v}");
    }
    s
}

/// Two-column `year,<value>` series.
fn parse_year_series(name: &str, text: &str, header: &[&str], fraction: bool) -> Result<YearSeries> {
    #[derive(Deserialize)]
    struct Raw {
        year: i32,
        #[serde(alias = "g_per_km", alias = "emissions_mt", alias = "share")]
        value: f64,
    }
    let rows: Vec<(u64, Raw)> = rows(name, text, header)?;
    require_contiguous(name, rows.iter().map(|(l, r)| (*l, r.year as i64)), "year")?;
    let mut values = Vec::with_capacity(rows.len());
    for (line, r) in &rows {
        require_non_negative(name, *line, header[1], r.value)?;
        if fraction {
            require_fraction(name, *line, header[1], r.value)?;
        }
        values.push(r.value);
    }
    Ok(YearSeries::new(rows[0].1.year, values))
}

/// New-car emission factors by sale year; cohorts older than the first year
/// take the first value.
pub fn parse_emission_factors(name: &str, text: &str) -> Result<EmissionFactorTable> {
    let series = parse_year_series(name, text, EMISSION_FACTOR_HEADER, false)?;
    Ok(EmissionFactorTable::new(series)
        .map_err(|e| CliError::validation(name, e.to_string()))?
        .holding_before_first())
}

pub fn write_emission_factors(table: &EmissionFactorTable) -> String {
    let mut s = EMISSION_FACTOR_HEADER.join(",");
    s.push('\n');
    for (year, v) in table.series().iter() {
        let _ = writeln!(s, "{year},{v}");
    }
    s
}

pub fn parse_new_sales_co2(name: &str, text: &str) -> Result<YearSeries> {
    parse_year_series(name, text, EMISSION_FACTOR_HEADER, false)
}

pub fn parse_thermal_emissions(name: &str, text: &str) -> Result<YearSeries> {
    parse_year_series(name, text, THERMAL_EMISSIONS_HEADER, false)
}

pub fn parse_shares(name: &str, text: &str) -> Result<YearSeries> {
    parse_year_series(name, text, SHARE_HEADER, true)
}

#[derive(Deserialize)]
struct SurvivalRow {
    age: usize,
    eta: f64,
}

pub fn parse_survival(name: &str, text: &str) -> Result<SurvivalSchedule> {
    let rows: Vec<(u64, SurvivalRow)> = rows(name, text, SURVIVAL_HEADER)?;
    require_contiguous(name, rows.iter().map(|(l, r)| (*l, r.age as i64)), "age")?;
    if rows[0].1.age != 1 {
        return Err(CliError::validation(name, "ages must start at 1"));
    }
    for (line, r) in &rows {
        require_fraction(name, *line, "eta", r.eta)?;
    }
    SurvivalSchedule::new(rows.iter().map(|(_, r)| r.eta).collect()).map_err(|e| CliError::validation(name, e.to_string()))
}

pub fn write_survival(schedule: &SurvivalSchedule) -> String {
    let mut s = SURVIVAL_HEADER.join(",");
    s.push('\n');
    for (i, eta) in schedule.rates().iter().enumerate() {
        let _ = writeln!(s, "{},{eta}", i + 1);
    }
    s
}

#[derive(Deserialize)]
struct StockRow {
    year: i32,
    #[serde(rename = "type")]
    vehicle: u8,
    ownership: String,
    age: usize,
    count: f64,
}

pub fn parse_stocks(name: &str, text: &str) -> Result<Vec<StockObservation>> {
    let rows: Vec<(u64, StockRow)> = rows(name, text, STOCK_HEADER)?;
    let mut out = Vec::with_capacity(rows.len());
    for (line, r) in rows {
        let vehicle = vehicle_type(name, line, r.vehicle)?;
        require_non_negative(name, line, "count", r.count)?;
        let ownership = match r.ownership.as_str() {
            "private" => Ownership::Private,
            "professional" => Ownership::Professional,
            other => {
                return Err(CliError::validation(
                    name,
                    format!("row {line}: ownership must be 'private' or 'professional', got '{other}'"),
                ))
            }
        };
        out.push(StockObservation {
            year: r.year,
            vehicle,
            ownership,
            age: r.age,
            count: r.count,
        });
    }
    Ok(out)
}

/// Published ban-scenario trajectory used to back out the initial age profile.
#[derive(Debug, Clone, PartialEq)]
pub struct BanReference {
    pub emissions_mt: Vec<(i32, f64)>,
    /// EV stock in vehicles.
    pub ev_stock: Vec<(i32, f64)>,
}

#[derive(Deserialize)]
struct BanRow {
    year: i32,
    emissions_mt: f64,
    ev_stock_m: f64,
}

pub fn parse_ban_reference(name: &str, text: &str) -> Result<BanReference> {
    let rows: Vec<(u64, BanRow)> = rows(name, text, BAN_REFERENCE_HEADER)?;
    require_contiguous(name, rows.iter().map(|(l, r)| (*l, r.year as i64)), "year")?;
    for (line, r) in &rows {
        require_positive(name, *line, "emissions_mt", r.emissions_mt)?;
        require_non_negative(name, *line, "ev_stock_m", r.ev_stock_m)?;
    }
    Ok(BanReference {
        emissions_mt: rows.iter().map(|(_, r)| (r.year, r.emissions_mt)).collect(),
        ev_stock: rows.iter().map(|(_, r)| (r.year, r.ev_stock_m * 1e6)).collect(),
    })
}

pub fn write_trajectory(records: &[YearRecord]) -> String {
    let mut s = TRAJECTORY_HEADER.join(",");
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.year,
            r.new_demand,
            r.sales[0],
            r.sales[1],
            r.stock[0],
            r.stock[1],
            r.emissions_mt,
            r.incentive_keur,
            r.spend_geur
        );
    }
    s
}

#[derive(Deserialize)]
struct TrajectoryRow {
    year: i32,
    new_demand: f64,
    sales_icev: f64,
    sales_ev: f64,
    stock_icev: f64,
    stock_ev: f64,
    emissions_mt: f64,
    incentive_keur: f64,
    spend_geur: f64,
}

pub fn parse_trajectory(name: &str, text: &str) -> Result<Vec<YearRecord>> {
    let rows: Vec<(u64, TrajectoryRow)> = rows(name, text, TRAJECTORY_HEADER)?;
    require_contiguous(name, rows.iter().map(|(l, r)| (*l, r.year as i64)), "year")?;
    Ok(rows
        .into_iter()
        .map(|(_, r)| YearRecord {
            year: r.year,
            new_demand: r.new_demand,
            sales: [r.sales_icev, r.sales_ev],
            stock: [r.stock_icev, r.stock_ev],
            emissions_mt: r.emissions_mt,
            incentive_keur: r.incentive_keur,
            spend_geur: r.spend_geur,
        })
        .collect())
}

pub fn write_trace(trace: &[IterationTrace]) -> String {
    let mut s = String::from(
        "iteration,budget_geur,terminal_mt,violation_mt,step_norm,multiplier,penalty,inner_iterations\n",
    );
    for t in trace {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            t.iteration, t.budget_geur, t.terminal_mt, t.violation_mt, t.step_norm, t.multiplier, t.penalty, t.inner_iterations
        );
    }
    s
}

/// Comparison table; an undefined budget is left empty.
pub fn write_comparison(table: &ComparisonTable) -> String {
    let mut s = String::from("scenario,terminal_year,terminal_emissions_mt,budget_geur\n");
    for r in &table.rows {
        let budget = r.budget_geur.map(|b| b.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{budget}", r.label, table.horizon_year, r.terminal_mt);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EXO: &str = "year,G_Mvkm,M_km,CP_icev_keur,CP_ev_keur,CO_icev_eur,CO_ev_eur,cI_ev,cA_ev\n\
        2022,483619.8,13500,27.8,32.44,556,648.8,0.2,0.06369\n\
        2023,486997.5,13500,27.95,31.66,559,633.2,0.25,0.07946\n";

    fn message(e: CliError) -> String {
        e.to_string()
    }

    #[test]
    fn exogenous_parses() {
        let inputs = parse_exogenous("exo.csv", EXO).unwrap();
        assert_eq!(inputs.first_year(), 2022);
        let y = inputs.year(2023).unwrap();
        assert_eq!(y.purchase_keur, [27.95, 31.66]);
        assert_eq!(y.infrastructure, [1.0, 0.25]);
        assert_eq!(y.adoption, [0.0, 0.07946]);
    }

    #[test]
    fn empty_file_names_missing_columns() {
        let m = message(parse_exogenous("exo.csv", "").unwrap_err());
        assert!(m.starts_with("exo.csv: missing columns: year, G_Mvkm"), "{m}");
    }

    #[test]
    fn missing_column_is_named() {
        let text = EXO.replace("cA_ev", "adoption");
        let m = message(parse_exogenous("exo.csv", &text).unwrap_err());
        assert!(m.contains("missing columns: cA_ev"), "{m}");
    }

    #[test]
    fn gap_in_years_is_rejected() {
        let text = EXO.replace("2023,", "2024,");
        let m = message(parse_exogenous("exo.csv", &text).unwrap_err());
        assert!(m.contains("row 3") && m.contains("contiguous"), "{m}");
    }

    #[test]
    fn negative_cost_is_rejected_with_row() {
        let text = EXO.replace("559,", "-559,");
        let m = message(parse_exogenous("exo.csv", &text).unwrap_err());
        assert!(m.contains("row 3: negative CO_icev_eur"), "{m}");
    }

    #[test]
    fn unparsable_value_cites_row_and_column() {
        let text = EXO.replace("27.95", "abc");
        let m = message(parse_exogenous("exo.csv", &text).unwrap_err());
        assert!(m.contains("row 3") && m.contains("CP_icev_keur"), "{m}");
    }

    #[test]
    fn messages_are_distinct() {
        let a = message(parse_exogenous("x", "").unwrap_err());
        let b = message(parse_exogenous("x", &EXO.replace("2023,", "2025,")).unwrap_err());
        let c = message(parse_exogenous("x", &EXO.replace("559,", "-559,")).unwrap_err());
        assert!(a != b && b != c && a != c);
    }

    #[test]
    fn negative_stock_is_rejected() {
        let text = "type,age,count\n1,0,10\n1,1,-5\n2,0,1\n2,1,1\n";
        let m = message(parse_fleet("fleet.csv", text, 2022).unwrap_err());
        assert_eq!(m, "fleet.csv: row 3: negative count (-5)");
    }

    #[test]
    fn fleet_coverage_is_checked() {
        let dup = "type,age,count\n1,0,10\n1,0,5\n1,1,1\n2,0,1\n2,1,1\n";
        assert!(message(parse_fleet("f", dup, 2022).unwrap_err()).contains("duplicate"));
        let gap = "type,age,count\n1,0,10\n1,1,5\n2,0,1\n";
        assert!(message(parse_fleet("f", gap, 2022).unwrap_err()).contains("missing entry for type 2 age 1"));
        let bad = "type,age,count\n3,0,10\n3,1,1\n";
        assert!(message(parse_fleet("f", bad, 2022).unwrap_err()).contains("type must be 1"));
    }

    #[test]
    fn fleet_round_trips() {
        let state = FleetState::new(2022, vec![1.5, 2.25, 1e-7], vec![0.1, 0.0, 3.0]).unwrap();
        assert_eq!(parse_fleet("f", &write_fleet(&state), 2022).unwrap(), state);
    }

    #[test]
    fn control_round_trips() {
        let u = ControlTrajectory::new(2023, vec![0.0, 1.0 / 3.0, 16.027071352215, 9.859974642e-11]);
        assert_eq!(parse_control("u", &write_control(&u)).unwrap(), u);
    }

    #[test]
    fn exogenous_round_trips() {
        let inputs = parse_exogenous("exo.csv", EXO).unwrap();
        assert_eq!(parse_exogenous("again", &write_exogenous(&inputs)).unwrap(), inputs);
    }

    #[test]
    fn shares_must_be_fractions() {
        let m = message(parse_shares("s", "year,share\n2018,0.1\n2019,1.2\n").unwrap_err());
        assert!(m.contains("row 3: share must lie in [0, 1]"), "{m}");
    }

    #[test]
    fn survival_must_start_at_one() {
        assert!(parse_survival("s", "age,eta\n0,1\n1,1\n").is_err());
        let s = parse_survival("s", "age,eta\n1,1\n2,0.9\n").unwrap();
        assert_eq!(s.rates(), &[1.0, 0.9]);
    }

    #[test]
    fn unexpected_column_is_rejected() {
        let m = message(parse_control("u", "year,u_keur,note\n2023,1,x\n").unwrap_err());
        assert!(m.contains("unexpected column 'note'"), "{m}");
    }

    proptest! {
        #[test]
        fn trajectory_round_trips(
            first in 1990i32..2100,
            values in prop::collection::vec(prop::array::uniform8(0.0f64..1e9), 1..40),
        ) {
            let records: Vec<YearRecord> = values
                .iter()
                .enumerate()
                .map(|(i, v)| YearRecord {
                    year: first + i as i32,
                    new_demand: v[0],
                    sales: [v[1], v[2]],
                    stock: [v[3], v[4]],
                    emissions_mt: v[5],
                    incentive_keur: v[6],
                    spend_geur: v[7],
                })
                .collect();
            prop_assert_eq!(parse_trajectory("t", &write_trajectory(&records)).unwrap(), records);
        }

        #[test]
        fn control_values_survive_text(values in prop::collection::vec(0.0f64..100.0, 1..40)) {
            let u = ControlTrajectory::new(2023, values);
            prop_assert_eq!(parse_control("u", &write_control(&u)).unwrap(), u);
        }
    }
}
