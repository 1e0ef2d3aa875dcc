//! Canned policy laws and the scenario comparison table.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::fleet::{self, ExogenousInputs, FleetState, ModelParams, SalesRule, ScenarioResult, YearInputs, YearlyPolicy};
use crate::ocp::ControlTrajectory;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum PolicyLaw {
    /// No incentive (I0).
    ZeroIncentive,
    /// The same incentive every year, in k€ (IC uses 5).
    ConstantIncentive(f64),
    /// Incentive equal to that year's EV purchase price (IP).
    FullPrice,
    /// Every new vehicle is electric (BI); no incentive is paid.
    BanThermal,
    Custom(ControlTrajectory),
}

impl PolicyLaw {
    pub fn label(&self) -> ScenarioLabel {
        match self {
            PolicyLaw::ZeroIncentive => ScenarioLabel::I0,
            PolicyLaw::ConstantIncentive(_) => ScenarioLabel::IC,
            PolicyLaw::FullPrice => ScenarioLabel::IP,
            PolicyLaw::BanThermal => ScenarioLabel::BI,
            PolicyLaw::Custom(_) => ScenarioLabel::Custom(String::from("custom")),
        }
    }
}

impl YearlyPolicy for PolicyLaw {
    fn rule(&self, year: &YearInputs) -> SalesRule {
        match self {
            PolicyLaw::ZeroIncentive => SalesRule::Incentive(0.0),
            PolicyLaw::ConstantIncentive(level) => SalesRule::Incentive(*level),
            PolicyLaw::FullPrice => SalesRule::Incentive(year.purchase_keur[1]),
            PolicyLaw::BanThermal => SalesRule::FixedShares([0.0, 1.0]),
            PolicyLaw::Custom(u) => u.rule(year),
        }
    }
}

/// Scenario names, ordered as they appear in the comparison table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScenarioLabel {
    I0,
    IC,
    IP,
    BI,
    Optimal,
    Custom(String),
}

impl fmt::Display for ScenarioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioLabel::I0 => f.write_str("I0"),
            ScenarioLabel::IC => f.write_str("IC"),
            ScenarioLabel::IP => f.write_str("IP"),
            ScenarioLabel::BI => f.write_str("BI"),
            ScenarioLabel::Optimal => f.write_str("Optimal"),
            ScenarioLabel::Custom(name) => f.write_str(name),
        }
    }
}

/// Simulates `law` from `initial` to `end_year`.
pub fn run_scenario(
    law: &PolicyLaw,
    initial: &FleetState,
    inputs: &ExogenousInputs,
    params: &ModelParams,
    end_year: i32,
) -> Result<ScenarioResult> {
    match law {
        PolicyLaw::ConstantIncentive(level) if !(*level >= 0.0 && level.is_finite()) => {
            return Err(Error::InvalidInput(format!("constant incentive must be non-negative, got {level}")));
        }
        PolicyLaw::Custom(u) if !u.covers(initial.year + 1, end_year) => {
            return Err(Error::InvalidInput(format!(
                "custom trajectory covers {}..={} but the horizon is {}..={end_year}",
                u.first_year(),
                u.last_year(),
                initial.year + 1
            )));
        }
        PolicyLaw::Custom(u) if u.values().iter().any(|v| !(*v >= 0.0 && v.is_finite())) => {
            return Err(Error::InvalidInput("custom trajectory has a negative or non-finite incentive".into()));
        }
        _ => {}
    }
    fleet::simulate(initial, law, inputs, params, end_year)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: ScenarioLabel,
    /// E(T) in Mt.
    pub terminal_mt: f64,
    /// I(T) in G€; `None` when the scenario pays no incentive by construction.
    pub budget_geur: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub horizon_year: i32,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn row(&self, label: &ScenarioLabel) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| &r.label == label)
    }
}

/// Builds the comparison table, ordered I0, IC, IP, BI, Optimal, then custom
/// scenarios in the order given.
pub fn compare(results: &[(ScenarioLabel, &ScenarioResult)]) -> Result<ComparisonTable> {
    let horizon_year = match results.first() {
        Some((_, r)) => r.records[r.records.len() - 1].year,
        None => return Err(Error::InvalidInput("nothing to compare".into())),
    };
    let mut rows: Vec<ComparisonRow> = results
        .iter()
        .map(|(label, r)| ComparisonRow {
            label: label.clone(),
            terminal_mt: r.terminal_emissions(),
            budget_geur: r.budget_geur,
        })
        .collect();
    rows.sort_by_key(|r| rank(&r.label));
    Ok(ComparisonTable { horizon_year, rows })
}

fn rank(label: &ScenarioLabel) -> u8 {
    match label {
        ScenarioLabel::I0 => 0,
        ScenarioLabel::IC => 1,
        ScenarioLabel::IP => 2,
        ScenarioLabel::BI => 3,
        ScenarioLabel::Optimal => 4,
        ScenarioLabel::Custom(_) => 5,
    }
}
