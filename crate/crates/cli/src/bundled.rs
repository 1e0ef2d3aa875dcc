//! The French passenger-car case study shipped with the binary. See
//! `data/README.md` for provenance.

pub const EXOGENOUS: &str = include_str!("../data/exogenous.csv");
pub const EMISSION_FACTORS: &str = include_str!("../data/emission_factors.csv");
pub const SURVIVAL: &str = include_str!("../data/survival.csv");
pub const INITIAL_FLEET: &str = include_str!("../data/initial_fleet.csv");
pub const INITIAL_TOTALS: &str = include_str!("../data/initial_totals.csv");
pub const BAN_REFERENCE: &str = include_str!("../data/ban_reference.csv");

pub const HISTORICAL_STOCKS: &str = include_str!("../data/historical/stocks.csv");
pub const HISTORICAL_NEW_SALES_CO2: &str = include_str!("../data/historical/co2_new_sales.csv");
pub const HISTORICAL_THERMAL_EMISSIONS: &str = include_str!("../data/historical/thermal_emissions.csv");
pub const HISTORICAL_EV_SHARE: &str = include_str!("../data/historical/ev_sales_share.csv");

/// File names inside a historical data directory.
pub const STOCKS_FILE: &str = "stocks.csv";
pub const NEW_SALES_CO2_FILE: &str = "co2_new_sales.csv";
pub const THERMAL_EMISSIONS_FILE: &str = "thermal_emissions.csv";
pub const EV_SHARE_FILE: &str = "ev_sales_share.csv";
