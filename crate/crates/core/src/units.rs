//! Unit conversions at the model boundary.
//!
//! Demand is carried in Mvkm, mileage in km/year, stocks in vehicles, emission
//! factors in g/km, emissions in Mt, incentives and prices in k€ and budgets
//! in G€.

/// vkm per Mvkm.
pub const VKM_PER_MVKM: f64 = 1.0e6;
/// grams per megatonne.
pub const GRAMS_PER_MT: f64 = 1.0e12;
/// k€ per G€.
pub const KEUR_PER_GEUR: f64 = 1.0e6;

/// Fleet size (vehicles) needed to cover `demand_mvkm` at `mileage_km` per vehicle.
pub fn vehicles_for_demand(demand_mvkm: f64, mileage_km: f64) -> f64 {
    demand_mvkm * VKM_PER_MVKM / mileage_km
}

/// Tailpipe emissions in Mt from a g/km-weighted vehicle count.
pub fn emissions_mt(gram_per_km_vehicles: f64, mileage_km: f64) -> f64 {
    gram_per_km_vehicles * mileage_km / GRAMS_PER_MT
}

/// Spend in G€ from an incentive in k€ paid on `vehicles` purchases.
pub fn spend_geur(incentive_keur: f64, vehicles: f64) -> f64 {
    incentive_keur * vehicles / KEUR_PER_GEUR
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        // 1 M vehicles at 108.3 g/km, 13 500 km/y
        let e = emissions_mt(1.0e6 * 108.3, 13_500.0);
        assert!((e - 1.46205).abs() < 1e-9);
        assert!((vehicles_for_demand(483_619.836858635, 13_500.0) - 35.823691619e6).abs() < 1.0);
        assert_eq!(spend_geur(5.0, 1.0e6), 5.0);
    }
}
