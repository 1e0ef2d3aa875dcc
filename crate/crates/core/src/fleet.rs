//! Age-structured stock dynamics, sales and tailpipe emissions.
//!
//! The fleet is a `[vehicle type × age class 0..=A]` matrix of vehicle counts.
//! One yearly step ages every cohort through the survival schedule (the last
//! class accumulates and decays), fills the gap between transport demand and
//! the surviving fleet with new vehicles, and splits those across types.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::choice::{self, LogitParams};
use crate::units;
use crate::{Error, Result, YearSeries};

/// Default oldest age class.
pub const DEFAULT_MAX_AGE: usize = 30;

/// Relative slack (w.r.t. the demand-implied fleet size) below which a
/// negative new-vehicle demand is treated as rounding noise.
const NEGATIVE_DEMAND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VehicleType {
    Thermal,
    Electric,
}

impl VehicleType {
    pub const ALL: [VehicleType; 2] = [VehicleType::Thermal, VehicleType::Electric];

    /// Zero-based storage index.
    pub fn index(self) -> usize {
        match self {
            VehicleType::Thermal => 0,
            VehicleType::Electric => 1,
        }
    }

    /// Conventional one-based type number (thermal = 1, electric = 2).
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(VehicleType::Thermal),
            2 => Some(VehicleType::Electric),
            _ => None,
        }
    }
}

/// Stock counts by vehicle type and age class at one calendar year.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetState {
    pub year: i32,
    stock: [Vec<f64>; 2],
}

impl FleetState {
    pub fn zeros(year: i32, max_age: usize) -> Self {
        Self {
            year,
            stock: [vec![0.0; max_age + 1], vec![0.0; max_age + 1]],
        }
    }

    pub fn new(year: i32, thermal: Vec<f64>, electric: Vec<f64>) -> Result<Self> {
        if thermal.len() != electric.len() || thermal.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "age profiles must have equal length >= 2 (got {} and {})",
                thermal.len(),
                electric.len()
            )));
        }
        for (v, row) in [&thermal, &electric].into_iter().enumerate() {
            if let Some(a) = row.iter().position(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "stock of type {} at age {a} is negative or not finite",
                    v + 1
                )));
            }
        }
        Ok(Self {
            year,
            stock: [thermal, electric],
        })
    }

    /// Distributes each type's total over ages so that every older class is the
    /// previous one times its survival rate, normalized to the given totals.
    pub fn geometric_by_survival(year: i32, totals: [f64; 2], survival: &SurvivalSchedule) -> Self {
        let mut weights = Vec::with_capacity(survival.max_age() + 1);
        let mut w = 1.0;
        weights.push(w);
        for a in 1..=survival.max_age() {
            w *= survival.eta(a);
            weights.push(w);
        }
        let norm: f64 = weights.iter().sum();
        let row = |total: f64| weights.iter().map(|w| total * w / norm).collect::<Vec<_>>();
        Self {
            year,
            stock: [row(totals[0]), row(totals[1])],
        }
    }

    /// Oldest age class `A`.
    pub fn max_age(&self) -> usize {
        self.stock[0].len() - 1
    }

    pub fn ages(&self, v: VehicleType) -> &[f64] {
        &self.stock[v.index()]
    }

    pub fn ages_mut(&mut self, v: VehicleType) -> &mut [f64] {
        &mut self.stock[v.index()]
    }

    pub fn get(&self, v: VehicleType, age: usize) -> f64 {
        self.stock[v.index()][age]
    }

    pub fn set(&mut self, v: VehicleType, age: usize, count: f64) {
        self.stock[v.index()][age] = count;
    }

    pub fn total(&self, v: VehicleType) -> f64 {
        self.stock[v.index()].iter().sum()
    }

    pub fn grand_total(&self) -> f64 {
        self.total(VehicleType::Thermal) + self.total(VehicleType::Electric)
    }

    /// Same stock with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for row in out.stock.iter_mut() {
            row.iter_mut().for_each(|x| *x *= factor);
        }
        out
    }
}

/// Survival fractions for age classes `1..=A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSchedule {
    eta: Vec<f64>,
}

impl SurvivalSchedule {
    /// `eta[k]` is the survival rate into age class `k + 1`.
    pub fn new(eta: Vec<f64>) -> Result<Self> {
        if eta.is_empty() {
            return Err(Error::InvalidInput("empty survival schedule".into()));
        }
        if let Some(k) = eta.iter().position(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::InvalidInput(format!(
                "survival rate for age {} is {} (must lie in [0, 1])",
                k + 1,
                eta[k]
            )));
        }
        Ok(Self { eta })
    }

    /// `min(1, intercept + slope * a)` for `a = 1..=max_age`, floored at zero.
    pub fn from_affine(intercept: f64, slope: f64, max_age: usize) -> Self {
        let eta = (1..=max_age)
            .map(|a| (intercept + slope * a as f64).clamp(0.0, 1.0))
            .collect();
        Self { eta }
    }

    pub fn max_age(&self) -> usize {
        self.eta.len()
    }

    /// Survival rate into age class `age` (`1..=A`).
    pub fn eta(&self, age: usize) -> f64 {
        self.eta[age - 1]
    }

    pub fn rates(&self) -> &[f64] {
        &self.eta
    }

    /// Expected number of years in the fleet, `sum_a prod_{k<=a} eta_k` over
    /// `a = 0..=A` (the empty product for `a = 0` is one).
    pub fn mean_life(&self) -> f64 {
        let mut cum = 1.0;
        let mut sum = 1.0;
        for e in &self.eta {
            cum *= e;
            sum += cum;
        }
        sum
    }
}

/// Tailpipe emission factor (g/km) of newly sold thermal vehicles by sale
/// year. Electric vehicles are zero-emission at every age.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionFactorTable {
    series: YearSeries,
    hold_before_first: bool,
}

impl EmissionFactorTable {
    pub fn new(series: YearSeries) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::InvalidInput("empty emission factor table".into()));
        }
        if let Some((year, v)) = series.iter().find(|(_, v)| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(format!(
                "emission factor for {year} is {v} (must be >= 0)"
            )));
        }
        Ok(Self {
            series,
            hold_before_first: false,
        })
    }

    /// Cohorts older than the first year take the first year's factor.
    pub fn holding_before_first(mut self) -> Self {
        self.hold_before_first = true;
        self
    }

    pub fn series(&self) -> &YearSeries {
        &self.series
    }

    pub fn first_year(&self) -> i32 {
        self.series.first_year()
    }

    pub fn last_year(&self) -> i32 {
        self.series.last_year()
    }

    /// Factor of a vehicle type sold in `cohort_year`.
    pub fn factor(&self, v: VehicleType, cohort_year: i32) -> Result<f64> {
        match v {
            VehicleType::Electric => Ok(0.0),
            VehicleType::Thermal => self.new_vehicle_factor(cohort_year),
        }
    }

    pub fn new_vehicle_factor(&self, cohort_year: i32) -> Result<f64> {
        if self.hold_before_first && cohort_year < self.series.first_year() {
            return Ok(self.series.values()[0]);
        }
        self.series
            .get(cohort_year)
            .ok_or(Error::MissingCohortFactor { cohort_year })
    }
}

/// Exogenous inputs for one calendar year. Index 0 of each pair is thermal,
/// index 1 electric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YearInputs {
    pub year: i32,
    /// Transport demand G (Mvkm).
    pub demand_mvkm: f64,
    /// Annual mileage M (km per vehicle).
    pub mileage_km: f64,
    /// Purchase price C^P (k€).
    pub purchase_keur: [f64; 2],
    /// Operating cost C^O (€/year).
    pub operating_eur: [f64; 2],
    /// Refilling infrastructure development rate c^I (thermal is 1).
    pub infrastructure: [f64; 2],
    /// Adoption coefficient c^A (thermal is 0).
    pub adoption: [f64; 2],
}

impl YearInputs {
    /// Mean un-incentivized purchase price over both types.
    pub fn mean_purchase(&self) -> f64 {
        0.5 * (self.purchase_keur[0] + self.purchase_keur[1])
    }

    pub fn mean_operating(&self) -> f64 {
        0.5 * (self.operating_eur[0] + self.operating_eur[1])
    }

    /// Fleet size needed to cover demand, `G / M`.
    pub fn required_fleet(&self) -> f64 {
        units::vehicles_for_demand(self.demand_mvkm, self.mileage_km)
    }

    fn validate(&self) -> Result<()> {
        let y = self.year;
        let bad = |what: &str| Err(Error::InvalidInput(format!("{what} in {y}")));
        if !(self.demand_mvkm > 0.0 && self.demand_mvkm.is_finite()) {
            return bad("demand must be positive");
        }
        if !(self.mileage_km > 0.0 && self.mileage_km.is_finite()) {
            return bad("mileage must be positive");
        }
        if self
            .purchase_keur
            .iter()
            .chain(&self.operating_eur)
            .any(|c| !(c.is_finite() && *c >= 0.0))
        {
            return bad("costs must be non-negative");
        }
        if !(self.mean_purchase() > 0.0 && self.mean_operating() > 0.0) {
            return bad("mean costs must be positive");
        }
        if self
            .infrastructure
            .iter()
            .chain(&self.adoption)
            .any(|c| !(0.0..=1.0).contains(c))
        {
            return bad("infrastructure and adoption coefficients must lie in [0, 1]");
        }
        if self.infrastructure[0] != 1.0 || self.adoption[0] != 0.0 {
            return bad("thermal infrastructure must be 1 and thermal adoption 0");
        }
        Ok(())
    }
}

/// Per-year exogenous trajectories on a contiguous run of years.
#[derive(Debug, Clone, PartialEq)]
pub struct ExogenousInputs {
    rows: Vec<YearInputs>,
}

impl ExogenousInputs {
    pub fn new(rows: Vec<YearInputs>) -> Result<Self> {
        let Some(first) = rows.first().map(|r| r.year) else {
            return Err(Error::InvalidInput("no exogenous input rows".into()));
        };
        for (i, r) in rows.iter().enumerate() {
            if r.year != first + i as i32 {
                return Err(Error::InvalidInput(format!(
                    "exogenous years must be contiguous: expected {} but found {}",
                    first + i as i32,
                    r.year
                )));
            }
            r.validate()?;
        }
        Ok(Self { rows })
    }

    pub fn first_year(&self) -> i32 {
        self.rows[0].year
    }

    pub fn last_year(&self) -> i32 {
        self.rows[self.rows.len() - 1].year
    }

    pub fn year(&self, year: i32) -> Result<&YearInputs> {
        let idx = year - self.first_year();
        if idx < 0 {
            return Err(Error::MissingYear { year });
        }
        self.rows.get(idx as usize).ok_or(Error::MissingYear { year })
    }

    pub fn rows(&self) -> &[YearInputs] {
        &self.rows
    }
}

/// Parameters shared by every simulated year.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub logit: LogitParams,
    pub survival: SurvivalSchedule,
    pub emission_factors: EmissionFactorTable,
}

/// Surviving vehicles `O_va` entering year `state.year + 1`. Row 0 (age 0) is
/// left at zero for the new sales.
pub fn survivors(state: &FleetState, survival: &SurvivalSchedule) -> FleetState {
    let max_age = state.max_age();
    debug_assert_eq!(max_age, survival.max_age());
    let mut out = FleetState::zeros(state.year + 1, max_age);
    for v in VehicleType::ALL {
        let prev = state.ages(v);
        let next = out.ages_mut(v);
        for a in 1..max_age {
            next[a] = survival.eta(a) * prev[a - 1];
        }
        next[max_age] = survival.eta(max_age) * (prev[max_age - 1] + prev[max_age]);
    }
    out
}

/// New-vehicle demand `N = G/M - sum O_va` in vehicles.
///
/// Small negative values from rounding are returned as zero; anything below
/// the tolerance is an error.
pub fn new_vehicle_demand(inputs: &YearInputs, survivors: &FleetState) -> Result<f64> {
    let required = inputs.required_fleet();
    let n = required - survivors.grand_total();
    if n >= 0.0 {
        Ok(n)
    } else if n >= -NEGATIVE_DEMAND_TOLERANCE * required {
        Ok(0.0)
    } else {
        Err(Error::NegativeDemand {
            year: inputs.year,
            excess: -n,
        })
    }
}

/// Advances the fleet by one year: ages the stock and places `shares[v] * N`
/// new vehicles in age class 0.
pub fn step(
    state: &FleetState,
    shares: [f64; 2],
    inputs: &ExogenousInputs,
    survival: &SurvivalSchedule,
) -> Result<FleetState> {
    check_shares(shares)?;
    let year_inputs = inputs.year(state.year + 1)?;
    let mut next = survivors(state, survival);
    let n = new_vehicle_demand(year_inputs, &next)?;
    for v in VehicleType::ALL {
        next.set(v, 0, shares[v.index()] * n);
    }
    Ok(next)
}

fn check_shares(shares: [f64; 2]) -> Result<()> {
    if shares.iter().any(|s| !(0.0..=1.0).contains(s)) || (shares[0] + shares[1] - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "sales shares must lie in [0, 1] and sum to 1 (got {:?})",
            shares
        )));
    }
    Ok(())
}

/// Fleet tailpipe emissions `E = sum_va eps_va M S_va` in Mt/year, where a
/// thermal vehicle of age `a` carries the factor of cohort `year - a`.
pub fn emissions(state: &FleetState, factors: &EmissionFactorTable, mileage_km: f64) -> Result<f64> {
    let mut weighted = 0.0;
    for (a, s) in state.ages(VehicleType::Thermal).iter().enumerate() {
        if *s != 0.0 {
            weighted += factors.new_vehicle_factor(state.year - a as i32)? * s;
        }
    }
    Ok(units::emissions_mt(weighted, mileage_km))
}

/// How the new-vehicle demand of one year is split across types.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SalesRule {
    /// Logit split with a purchase incentive (k€) on electric vehicles.
    Incentive(f64),
    /// Shares imposed directly, bypassing the logit (no incentive paid).
    FixedShares([f64; 2]),
}

/// A yearly control law.
pub trait YearlyPolicy {
    fn rule(&self, year: &YearInputs) -> SalesRule;
}

impl<F: Fn(&YearInputs) -> SalesRule> YearlyPolicy for F {
    fn rule(&self, year: &YearInputs) -> SalesRule {
        self(year)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YearRecord {
    pub year: i32,
    /// Total new-vehicle demand N (vehicles); zero in the initial year.
    pub new_demand: f64,
    /// New sales by type (vehicles).
    pub sales: [f64; 2],
    /// Stock by type (vehicles).
    pub stock: [f64; 2],
    /// Tailpipe emissions (Mt).
    pub emissions_mt: f64,
    /// Incentive per EV purchase (k€).
    pub incentive_keur: f64,
    /// Incentive spend in this year (G€).
    pub spend_geur: f64,
}

/// A year in which the surviving fleet exceeded demand and sales were clamped to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandWarning {
    pub year: i32,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    /// One record per year from the initial year to the horizon.
    pub records: Vec<YearRecord>,
    pub final_state: FleetState,
    /// Cumulative incentive budget I(T) in G€, `None` when no year used an incentive rule.
    pub budget_geur: Option<f64>,
    pub warnings: Vec<DemandWarning>,
}

impl ScenarioResult {
    pub fn terminal_emissions(&self) -> f64 {
        self.records[self.records.len() - 1].emissions_mt
    }

    pub fn record(&self, year: i32) -> Option<&YearRecord> {
        self.records.iter().find(|r| r.year == year)
    }
}

/// Simulates from `initial` to `end_year` under `policy`.
pub fn simulate<P: YearlyPolicy + ?Sized>(
    initial: &FleetState,
    policy: &P,
    inputs: &ExogenousInputs,
    params: &ModelParams,
    end_year: i32,
) -> Result<ScenarioResult> {
    if end_year < initial.year {
        return Err(Error::InvalidInput(format!(
            "horizon end {end_year} precedes the initial year {}",
            initial.year
        )));
    }
    if initial.max_age() != params.survival.max_age() {
        return Err(Error::InvalidInput(format!(
            "fleet has {} age classes but the survival schedule covers {}",
            initial.max_age() + 1,
            params.survival.max_age() + 1
        )));
    }
    let first = inputs.year(initial.year)?;
    let mut records = Vec::with_capacity((end_year - initial.year + 1) as usize);
    records.push(YearRecord {
        year: initial.year,
        new_demand: 0.0,
        sales: [0.0; 2],
        stock: [initial.total(VehicleType::Thermal), initial.total(VehicleType::Electric)],
        emissions_mt: emissions(initial, &params.emission_factors, first.mileage_km)?,
        incentive_keur: 0.0,
        spend_geur: 0.0,
    });
    let mut warnings = Vec::new();
    let mut budget: Option<f64> = None;
    let mut state = initial.clone();
    for year in initial.year + 1..=end_year {
        let yi = inputs.year(year)?;
        let mut next = survivors(&state, &params.survival);
        let n = match new_vehicle_demand(yi, &next) {
            Ok(n) => n,
            Err(Error::NegativeDemand { year, excess }) => {
                warnings.push(DemandWarning { year, excess });
                0.0
            }
            Err(e) => return Err(e),
        };
        let (shares, incentive) = match policy.rule(yi) {
            SalesRule::Incentive(u) => {
                let shares = choice::sales_shares(yi, &params.logit, u);
                (shares, Some(u))
            }
            SalesRule::FixedShares(shares) => {
                check_shares(shares)?;
                (shares, None)
            }
        };
        let sales = [shares[0] * n, shares[1] * n];
        next.set(VehicleType::Thermal, 0, sales[0]);
        next.set(VehicleType::Electric, 0, sales[1]);
        let u = incentive.unwrap_or(0.0);
        let spend = units::spend_geur(u, sales[1]);
        if incentive.is_some() {
            *budget.get_or_insert(0.0) += spend;
        }
        records.push(YearRecord {
            year,
            new_demand: n,
            sales,
            stock: [next.total(VehicleType::Thermal), next.total(VehicleType::Electric)],
            emissions_mt: emissions(&next, &params.emission_factors, yi.mileage_km)?,
            incentive_keur: u,
            spend_geur: spend,
        });
        state = next;
    }
    Ok(ScenarioResult {
        records,
        final_state: state,
        budget_geur: budget,
        warnings,
    })
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use approx::assert_relative_eq;

    const A: usize = DEFAULT_MAX_AGE;

    fn unit_survival() -> SurvivalSchedule {
        SurvivalSchedule::new(vec![1.0; A]).unwrap()
    }

    #[test]
    fn unit_survival_moves_cohort_one_class() {
        let mut s = FleetState::zeros(2022, A);
        s.set(VehicleType::Thermal, 0, 100.0);
        let o = survivors(&s, &unit_survival());
        assert_eq!(o.get(VehicleType::Thermal, 1), 100.0);
        assert_eq!(o.get(VehicleType::Thermal, 0), 0.0);
        assert_eq!(o.grand_total(), 100.0);
    }

    #[test]
    fn terminal_class_absorbs_and_decays() {
        let mut eta = vec![1.0; A];
        eta[A - 1] = 0.74382108;
        let survival = SurvivalSchedule::new(eta).unwrap();
        let mut s = FleetState::zeros(2022, A);
        s.set(VehicleType::Thermal, A - 1, 50.0);
        s.set(VehicleType::Thermal, A, 50.0);
        let o = survivors(&s, &survival);
        assert_relative_eq!(o.get(VehicleType::Thermal, A), 74.382108, epsilon = 1e-9);
    }

    #[test]
    fn zero_state_has_zero_survivors() {
        let o = survivors(&FleetState::zeros(2022, A), &unit_survival());
        assert_eq!(o.grand_total(), 0.0);
    }

    #[test]
    fn demand_of_empty_fleet() {
        let inputs = flat_inputs(2022, 2023, 483_619.836858635);
        let n = new_vehicle_demand(inputs.year(2022).unwrap(), &FleetState::zeros(2022, A)).unwrap();
        assert_relative_eq!(n, 483_619.836858635e6 / 13_500.0, max_relative = 1e-15);
        assert_relative_eq!(n / 1e6, 35.8237, epsilon = 1e-4);
    }

    #[test]
    fn demand_exactly_covered_is_zero() {
        let inputs = flat_inputs(2022, 2023, 13.5);
        let mut o = FleetState::zeros(2022, A);
        o.set(VehicleType::Thermal, 3, 1000.0);
        assert_eq!(new_vehicle_demand(inputs.year(2022).unwrap(), &o).unwrap(), 0.0);
    }

    #[test]
    fn oversized_fleet_is_negative_demand() {
        let inputs = flat_inputs(2022, 2023, 13.5);
        let mut o = FleetState::zeros(2022, A);
        o.set(VehicleType::Thermal, 3, 2000.0);
        let err = new_vehicle_demand(inputs.year(2022).unwrap(), &o).unwrap_err();
        assert_eq!(err, Error::NegativeDemand { year: 2022, excess: 1000.0 });
    }

    #[test]
    fn degenerate_share_sends_all_sales_to_one_type() {
        // G/M = 10 vehicles, empty fleet
        let inputs = flat_inputs(2022, 2023, 10.0 * 13_500.0 / 1e6);
        let next = step(&FleetState::zeros(2022, A), [1.0, 0.0], &inputs, &unit_survival()).unwrap();
        assert_relative_eq!(next.get(VehicleType::Thermal, 0), 10.0, max_relative = 1e-12);
        assert_eq!(next.get(VehicleType::Electric, 0), 0.0);
        assert_eq!(next.year, 2023);
    }

    #[test]
    fn step_rejects_bad_shares() {
        let inputs = flat_inputs(2022, 2023, 100.0);
        let s = FleetState::zeros(2022, A);
        assert!(step(&s, [0.7, 0.7], &inputs, &unit_survival()).is_err());
        assert!(step(&s, [1.2, -0.2], &inputs, &unit_survival()).is_err());
    }

    #[test]
    fn single_cohort_emissions() {
        let table = EmissionFactorTable::new(YearSeries::new(2020, vec![108.3])).unwrap();
        let mut s = FleetState::zeros(2022, A);
        s.set(VehicleType::Thermal, 2, 1.0e6);
        let e = emissions(&s, &table, 13_500.0).unwrap();
        assert_relative_eq!(e, 1.0e6 * 13_500.0 * 108.3 / 1e12, max_relative = 1e-15);
        assert_relative_eq!(e, 1.462, epsilon = 1e-3);
    }

    #[test]
    fn electric_fleet_emits_nothing() {
        let table = EmissionFactorTable::new(YearSeries::new(2020, vec![108.3])).unwrap();
        let mut s = FleetState::zeros(2022, A);
        s.ages_mut(VehicleType::Electric).iter_mut().for_each(|x| *x = 1e5);
        assert_eq!(emissions(&s, &table, 13_500.0).unwrap(), 0.0);
    }

    #[test]
    fn missing_cohort_factor_is_reported() {
        let table = EmissionFactorTable::new(YearSeries::new(2020, vec![108.3])).unwrap();
        let mut s = FleetState::zeros(2022, A);
        s.set(VehicleType::Thermal, 5, 1.0);
        assert_eq!(
            emissions(&s, &table, 13_500.0),
            Err(Error::MissingCohortFactor { cohort_year: 2017 })
        );
        let held = table.holding_before_first();
        assert!(emissions(&s, &held, 13_500.0).is_ok());
    }

    #[test]
    fn simulate_clamps_negative_demand_with_warning() {
        // demand collapses in 2024
        let mut rows = flat_inputs(2022, 2024, 1000.0).rows().to_vec();
        rows[2].demand_mvkm = 1.0;
        let inputs = ExogenousInputs::new(rows).unwrap();
        let params = params(A);
        let initial = FleetState::geometric_by_survival(2022, [70_000.0, 4_000.0], &params.survival);
        let res = simulate(&initial, &|_: &YearInputs| SalesRule::Incentive(0.0), &inputs, &params, 2024).unwrap();
        assert_eq!(res.warnings.len(), 1);
        assert_eq!(res.warnings[0].year, 2024);
        assert_eq!(res.records[2].new_demand, 0.0);
        assert_eq!(res.records.len(), 3);
    }

    #[test]
    fn fixed_shares_pay_no_budget() {
        let inputs = flat_inputs(2022, 2025, 1000.0);
        let params = params(A);
        let initial = FleetState::geometric_by_survival(2022, [70_000.0, 0.0], &params.survival);
        let res = simulate(
            &initial,
            &|_: &YearInputs| SalesRule::FixedShares([0.0, 1.0]),
            &inputs,
            &params,
            2025,
        )
        .unwrap();
        assert_eq!(res.budget_geur, None);
        assert!(res.records[1..].iter().all(|r| r.sales[0] == 0.0));
    }

    #[test]
    fn geometric_distribution_hits_totals() {
        let survival = SurvivalSchedule::from_affine(1.05, -0.01, A);
        let s = FleetState::geometric_by_survival(2022, [35.5e6, 0.27e6], &survival);
        assert_relative_eq!(s.total(VehicleType::Thermal), 35.5e6, max_relative = 1e-12);
        assert_relative_eq!(s.total(VehicleType::Electric), 0.27e6, max_relative = 1e-12);
        assert_relative_eq!(s.get(VehicleType::Thermal, 7) / s.get(VehicleType::Thermal, 6), 0.98, max_relative = 1e-12);
    }

    #[test]
    fn affine_survival_saturates() {
        let s = SurvivalSchedule::from_affine(1.05, -0.01, A);
        for a in 1..=5 {
            assert_eq!(s.eta(a), 1.0);
        }
        assert_relative_eq!(s.eta(10), 0.95, epsilon = 1e-12);
        assert_relative_eq!(s.eta(30), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn fleet_state_validation() {
        assert!(FleetState::new(2022, vec![1.0, -1.0], vec![0.0, 0.0]).is_err());
        assert!(FleetState::new(2022, vec![1.0, 1.0], vec![0.0]).is_err());
        assert!(SurvivalSchedule::new(vec![1.1]).is_err());
    }
}
