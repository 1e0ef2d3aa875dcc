//! Parameter identification from historical series: affine survival law,
//! emission factor trajectory, constant annual mileage, Bass coefficients and
//! the initial fleet's age profile.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::choice::{bass_adoption, BassParams};
use crate::fleet::{EmissionFactorTable, ExogenousInputs, SurvivalSchedule, VehicleType};
use crate::linalg::{nnls, Matrix};
use crate::units;
use crate::{Error, Result, YearSeries};

/// Mileage estimates are rounded to this step (km).
pub const MILEAGE_ROUNDING_KM: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ownership {
    Private,
    Professional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StockObservation {
    pub year: i32,
    pub vehicle: VehicleType,
    pub ownership: Ownership,
    pub age: usize,
    pub count: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoricalSeries {
    /// Registered stock by year, type, ownership and age.
    pub stocks: Vec<StockObservation>,
    /// Sales-weighted CO2 factor of new thermal cars (g/km).
    pub new_sales_co2: YearSeries,
    /// Annual tailpipe emissions of the thermal fleet (Mt); electric is zero.
    pub thermal_emissions: YearSeries,
    /// Yearly EV share of new sales.
    pub ev_sales_share: YearSeries,
}

impl HistoricalSeries {
    /// Stock summed over ownership (and over types when `vehicle` is `None`),
    /// indexed by age. Ages with no observation are `None`.
    pub fn stock_by_age(&self, year: i32, vehicle: Option<VehicleType>) -> Vec<Option<f64>> {
        let mut out: Vec<Option<f64>> = Vec::new();
        for obs in self
            .stocks
            .iter()
            .filter(|o| o.year == year && vehicle.is_none_or(|v| v == o.vehicle))
        {
            if out.len() <= obs.age {
                out.resize(obs.age + 1, None);
            }
            *out[obs.age].get_or_insert(0.0) += obs.count;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalFit {
    /// Observed year-on-year ratios for ages `1..=A`; NaN where the previous
    /// class was empty.
    pub raw: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Affine law saturated at one.
    pub schedule: SurvivalSchedule,
}

/// Ratio of each age class in `years.1` to the previous class in `years.0`,
/// summed over types and ownership, then an OLS line over `fit_ages` and
/// saturation at one.
pub fn fit_survival(
    hist: &HistoricalSeries,
    years: (i32, i32),
    max_age: usize,
    fit_ages: RangeInclusive<usize>,
) -> Result<SurvivalFit> {
    let before = hist.stock_by_age(years.0, None);
    let after = hist.stock_by_age(years.1, None);
    let mut raw = Vec::with_capacity(max_age);
    for a in 1..=max_age {
        let prev = before.get(a - 1).copied().flatten();
        let cur = after.get(a).copied().flatten();
        match (prev, cur) {
            (Some(p), Some(c)) if p > 0.0 => raw.push(c / p),
            (Some(_), Some(_)) => raw.push(f64::NAN),
            (None, _) => {
                return Err(Error::InsufficientData(format!(
                    "age class {} missing in {}",
                    a - 1,
                    years.0
                )))
            }
            (_, None) => {
                return Err(Error::InsufficientData(format!("age class {a} missing in {}", years.1)))
            }
        }
    }
    let points: Vec<(f64, f64)> = fit_ages
        .filter(|a| *a >= 1 && *a <= max_age)
        .map(|a| (a as f64, raw[a - 1]))
        .filter(|(_, r)| r.is_finite())
        .collect();
    let (slope, intercept) = ordinary_least_squares(&points)
        .ok_or_else(|| Error::InsufficientData("need at least two distinct ages for the affine fit".into()))?;
    Ok(SurvivalFit {
        raw,
        slope,
        intercept,
        schedule: SurvivalSchedule::from_affine(intercept, slope, max_age),
    })
}

/// `(slope, intercept)` of the least-squares line through `points`.
pub fn ordinary_least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Quadratic trend `a2 (t - origin)^2 + a1 (t - origin) + a0` for new-car
/// emission factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticTrend {
    pub origin: i32,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl Default for QuadraticTrend {
    fn default() -> Self {
        Self {
            origin: 2020,
            a2: 0.01,
            a1: -1.27,
            a0: 108.2,
        }
    }
}

impl QuadraticTrend {
    pub fn eval(&self, year: i32) -> f64 {
        let d = (year - self.origin) as f64;
        self.a2 * d * d + self.a1 * d + self.a0
    }
}

/// Source of emission factors after the last historical year.
#[derive(Debug, Clone, PartialEq)]
pub enum FutureTrend {
    Quadratic(QuadraticTrend),
    Series(YearSeries),
}

/// Historical factors up to their last year, the future trend up to
/// `last_year`, and the first historical value held for older cohorts.
pub fn fit_emission_factor(hist: &HistoricalSeries, future: &FutureTrend, last_year: i32) -> Result<EmissionFactorTable> {
    let past = &hist.new_sales_co2;
    if past.is_empty() {
        return Err(Error::InsufficientData("no historical new-car emission factors".into()));
    }
    let mut values = past.values().to_vec();
    for year in past.last_year() + 1..=last_year {
        let v = match future {
            FutureTrend::Quadratic(q) => q.eval(year),
            FutureTrend::Series(s) => s
                .get(year)
                .ok_or_else(|| Error::InsufficientData(format!("future emission factor series lacks {year}")))?,
        };
        values.push(v.max(0.0));
    }
    Ok(EmissionFactorTable::new(YearSeries::new(past.first_year(), values))?.holding_before_first())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MileageEstimate {
    /// Back-calculated annual mileage per year (km).
    pub per_year: Vec<(i32, f64)>,
    /// Median of the yearly values rounded to [`MILEAGE_ROUNDING_KM`].
    pub constant_km: f64,
}

/// Mileage that reproduces the thermal fleet's emission inventory,
/// `M = e_1 / sum_a s_1a eps(year - a)`, for every year with both emissions
/// and stock data.
pub fn estimate_mileage(hist: &HistoricalSeries, factors: &EmissionFactorTable) -> Result<MileageEstimate> {
    let mut per_year = Vec::new();
    for (year, e1) in hist.thermal_emissions.iter() {
        let stock = hist.stock_by_age(year, Some(VehicleType::Thermal));
        if stock.is_empty() {
            continue;
        }
        let mut weighted = 0.0;
        for (a, s) in stock.iter().enumerate() {
            if let Some(s) = s {
                weighted += s * factors.new_vehicle_factor(year - a as i32)?;
            }
        }
        if weighted == 0.0 {
            return Err(Error::DivisionByZero(format!("no emitting thermal stock in {year}")));
        }
        per_year.push((year, e1 * units::GRAMS_PER_MT / weighted));
    }
    if per_year.is_empty() {
        return Err(Error::InsufficientData(
            "emission inventory and stock series do not overlap".into(),
        ));
    }
    let mut sorted: Vec<f64> = per_year.iter().map(|p| p.1).collect();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    Ok(MileageEstimate {
        per_year,
        constant_km: libm::round(median / MILEAGE_ROUNDING_KM) * MILEAGE_ROUNDING_KM,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridAxis {
    pub fn points(&self) -> Vec<f64> {
        if !(self.step > 0.0) || self.stop < self.start {
            return Vec::new();
        }
        let n = libm::floor((self.stop - self.start) / self.step + 1e-9) as usize + 1;
        (0..n).map(|i| self.start + self.step * i as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BassGrid {
    pub p: GridAxis,
    pub q: GridAxis,
}

impl Default for BassGrid {
    fn default() -> Self {
        Self {
            p: GridAxis {
                start: 0.005,
                stop: 0.05,
                step: 0.005,
            },
            q: GridAxis {
                start: 0.1,
                stop: 0.8,
                step: 0.05,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BassFit {
    pub params: BassParams,
    pub rmse: f64,
}

/// RMSE between the Euler-integrated adoption rate and the observed EV sales
/// share, with the Bass epoch at the first observed year.
pub fn bass_rmse(params: &BassParams, observed: &YearSeries) -> f64 {
    let model = bass_adoption(params, observed.first_year(), observed.last_year());
    let sse: f64 = model
        .values()
        .iter()
        .zip(observed.values())
        .map(|(m, o)| (m - o) * (m - o))
        .sum();
    libm::sqrt(sse / observed.len() as f64)
}

/// Exhaustive grid search over `(p, q)`. Ties go to the smaller `p`, then the
/// smaller `q`.
pub fn tune_bass(hist: &HistoricalSeries, grid: &BassGrid) -> Result<BassFit> {
    let observed = &hist.ev_sales_share;
    if observed.is_empty() {
        return Err(Error::InsufficientData("no EV sales share observations".into()));
    }
    let (ps, qs) = (grid.p.points(), grid.q.points());
    let mut best: Option<BassFit> = None;
    for &p in &ps {
        for &q in &qs {
            let params = BassParams { p, q, chi0: 0.0 };
            let rmse = bass_rmse(&params, observed);
            if best.is_none_or(|b| rmse < b.rmse) {
                best = Some(BassFit { params, rmse });
            }
        }
    }
    best.ok_or(Error::EmptyGrid)
}

/// Observations of a trajectory in which no thermal vehicle is sold after the
/// start year, used to recover the start year's thermal age profile.
#[derive(Debug, Clone, Copy)]
pub struct AgeProfileTarget<'a> {
    pub start_year: i32,
    /// Thermal stock at the start year (vehicles).
    pub total: f64,
    pub survival: &'a SurvivalSchedule,
    pub factors: &'a EmissionFactorTable,
    /// Supplies the mileage of every observed year.
    pub inputs: &'a ExogenousInputs,
    /// Fleet emissions (Mt) by year.
    pub emissions_mt: &'a [(i32, f64)],
    /// Thermal stock (vehicles) by year.
    pub thermal_stock: &'a [(i32, f64)],
    /// Weight of the second-difference roughness penalty.
    pub smoothing: f64,
}

/// Non-negative thermal age profile at the start year whose survivors best
/// reproduce the observed emissions and stock, in relative terms, with a
/// roughness penalty on interior age classes.
pub fn back_out_age_profile(target: &AgeProfileTarget<'_>) -> Result<Vec<f64>> {
    let max_age = target.survival.max_age();
    let n = max_age + 1;
    if !(target.total > 0.0) {
        return Err(Error::InvalidInput("age profile total must be positive".into()));
    }
    let last = target
        .emissions_mt
        .iter()
        .chain(target.thermal_stock)
        .map(|o| o.0)
        .max()
        .unwrap_or(target.start_year);
    if let Some((y, _)) = target
        .emissions_mt
        .iter()
        .chain(target.thermal_stock)
        .find(|o| o.0 < target.start_year || !(o.1 > 0.0))
    {
        return Err(Error::InvalidInput(format!("observation for {y} is before the start year or not positive")));
    }

    // propagation[t][a][j]: vehicles of age a in year start+t per vehicle of age j at the start
    let mut propagation: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut current: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..n).map(|j| if a == j { 1.0 } else { 0.0 }).collect())
        .collect();
    propagation.push(current.clone());
    for _ in target.start_year + 1..=last {
        let mut next = vec![vec![0.0; n]; n];
        for j in 0..n {
            for a in 1..max_age {
                next[a][j] = target.survival.eta(a) * current[a - 1][j];
            }
            next[max_age][j] = target.survival.eta(max_age) * (current[max_age - 1][j] + current[max_age][j]);
        }
        propagation.push(next.clone());
        current = next;
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for &(year, e) in target.emissions_mt {
        let p = &propagation[(year - target.start_year) as usize];
        let mileage = target.inputs.year(year)?.mileage_km;
        let mut row = vec![0.0; n];
        for (a, pa) in p.iter().enumerate() {
            let eps = target.factors.new_vehicle_factor(year - a as i32)?;
            for j in 0..n {
                row[j] += units::emissions_mt(eps * pa[j], mileage) / e;
            }
        }
        rows.push(row);
        rhs.push(1.0);
    }
    for &(year, s) in target.thermal_stock {
        let p = &propagation[(year - target.start_year) as usize];
        let row = (0..n).map(|j| p.iter().map(|pa| pa[j]).sum::<f64>() / s).collect();
        rows.push(row);
        rhs.push(1.0);
    }
    const TOTAL_WEIGHT: f64 = 100.0;
    rows.push(vec![TOTAL_WEIGHT / target.total; n]);
    rhs.push(TOTAL_WEIGHT);
    let class_scale = target.total / n as f64;
    for a in 1..n.saturating_sub(2) {
        let mut row = vec![0.0; n];
        row[a - 1] = target.smoothing / class_scale;
        row[a] = -2.0 * target.smoothing / class_scale;
        row[a + 1] = target.smoothing / class_scale;
        rows.push(row);
        rhs.push(0.0);
    }
    nnls(&Matrix::from_rows(&rows), &rhs)
        .ok_or_else(|| Error::InsufficientData("age profile observations do not determine the profile".into()))
}

/// Count-weighted mean age of an age profile.
pub fn mean_age(profile: &[f64]) -> f64 {
    let total: f64 = profile.iter().sum();
    profile.iter().enumerate().map(|(a, s)| a as f64 * s).sum::<f64>() / total
}
