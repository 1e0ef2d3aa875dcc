//! Purchase split between thermal and electric vehicles: cost-based utility,
//! binary logit and Bass adoption dynamics.

use alloc::vec::Vec;

use crate::fleet::{VehicleType, YearInputs};
use crate::YearSeries;

/// Logit weights and scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogitParams {
    /// Purchase-cost weight.
    pub purchase: f64,
    /// Operating-cost weight.
    pub operating: f64,
    /// Infrastructure weight.
    pub infrastructure: f64,
    /// Logit scale μ.
    pub mu: f64,
}

impl Default for LogitParams {
    fn default() -> Self {
        Self {
            purchase: -0.3,
            operating: -0.15,
            infrastructure: -0.3,
            mu: 6.75,
        }
    }
}

impl LogitParams {
    pub fn is_valid(&self) -> bool {
        self.purchase <= 0.0
            && self.operating <= 0.0
            && self.infrastructure <= 0.0
            && self.mu > 0.0
            && self.mu.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BassParams {
    /// Innovation coefficient (1/year).
    pub p: f64,
    /// Imitation coefficient (1/year).
    pub q: f64,
    /// Cumulative adoption fraction at the epoch year.
    pub chi0: f64,
}

impl Default for BassParams {
    fn default() -> Self {
        Self {
            p: 0.02,
            q: 0.4,
            chi0: 0.0,
        }
    }
}

/// Utility of buying a vehicle of type `v` with an incentive `incentive_keur`
/// on electric vehicles. Thermal vehicles never receive the incentive.
pub fn utility(v: VehicleType, year: &YearInputs, params: &LogitParams, incentive_keur: f64) -> f64 {
    let i = v.index();
    let u = match v {
        VehicleType::Thermal => 0.0,
        VehicleType::Electric => incentive_keur,
    };
    let cost = params.purchase * (year.purchase_keur[i] - u) / year.mean_purchase()
        + params.operating * year.operating_eur[i] / year.mean_operating()
        + params.infrastructure * (1.0 - year.infrastructure[i]);
    (1.0 - year.adoption[i]) * cost
}

/// `dU_2/du`, the sensitivity of the electric utility to the incentive.
pub fn incentive_utility_slope(year: &YearInputs, params: &LogitParams) -> f64 {
    -(1.0 - year.adoption[1]) * params.purchase / year.mean_purchase()
}

/// Binary logit shares `(P_1, P_2)`, evaluated without overflow for any finite
/// utilities.
pub fn logit_split(u1: f64, u2: f64, mu: f64) -> (f64, f64) {
    // e = exp(-mu |u1 - u2|) <= 1
    let d = mu * (u1 - u2);
    let e = libm::exp(-libm::fabs(d));
    let high = 1.0 / (1.0 + e);
    let low = e / (1.0 + e);
    if d >= 0.0 {
        (high, low)
    } else {
        (low, high)
    }
}

/// `dP_1/du = -mu P_1 P_2 dU_2/du`.
pub fn logit_split_gradient(u1: f64, u2: f64, mu: f64, du2_du: f64) -> f64 {
    let (p1, p2) = logit_split(u1, u2, mu);
    -mu * p1 * p2 * du2_du
}

/// Sales shares for one year under an EV incentive.
pub fn sales_shares(year: &YearInputs, params: &LogitParams, incentive_keur: f64) -> [f64; 2] {
    let (p1, p2) = logit_split(
        utility(VehicleType::Thermal, year, params, incentive_keur),
        utility(VehicleType::Electric, year, params, incentive_keur),
        params.mu,
    );
    [p1, p2]
}

/// Shares together with `dP_1/du` at the given incentive.
pub fn sales_shares_with_gradient(year: &YearInputs, params: &LogitParams, incentive_keur: f64) -> ([f64; 2], f64) {
    let u1 = utility(VehicleType::Thermal, year, params, incentive_keur);
    let u2 = utility(VehicleType::Electric, year, params, incentive_keur);
    let (p1, p2) = logit_split(u1, u2, params.mu);
    let dp1 = -params.mu * p1 * p2 * incentive_utility_slope(year, params);
    ([p1, p2], dp1)
}

/// Adoption coefficients `c^A` from a one-year explicit Euler integration of
/// the Bass equation, starting at `first_year` with `chi = params.chi0`.
///
/// `c^A(t) = (p + q chi(t)) (1 - chi(t))` and `chi(t + 1) = chi(t) + c^A(t)`.
pub fn bass_adoption(params: &BassParams, first_year: i32, last_year: i32) -> YearSeries {
    let len = (last_year - first_year + 1).max(0) as usize;
    let mut values = Vec::with_capacity(len);
    let mut chi = params.chi0;
    for _ in 0..len {
        let rate = ((params.p + params.q * chi) * (1.0 - chi)).clamp(0.0, 1.0 - chi);
        values.push(rate);
        chi += rate;
    }
    YearSeries::new(first_year, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn year_2022(adoption: f64, infrastructure: f64) -> YearInputs {
        YearInputs {
            year: 2022,
            demand_mvkm: 483_619.836858635,
            mileage_km: 13_500.0,
            purchase_keur: [27.8, 32.44],
            operating_eur: [556.0, 648.8],
            infrastructure: [1.0, infrastructure],
            adoption: [0.0, adoption],
        }
    }

    #[test]
    fn thermal_utility_2022() {
        let u = utility(VehicleType::Thermal, &year_2022(0.06369, 0.2), &LogitParams::default(), 0.0);
        // -0.3*27.8/30.12 - 0.15*556/602.4
        assert_relative_eq!(u, -0.3 * 27.8 / 30.12 - 0.15 * 556.0 / 602.4, max_relative = 1e-14);
        assert_relative_eq!(u, -0.4153, epsilon = 5e-5);
    }

    #[test]
    fn electric_utility_2022() {
        let u = utility(VehicleType::Electric, &year_2022(0.06369, 0.2), &LogitParams::default(), 0.0);
        assert_relative_eq!(u, -0.6785, epsilon = 5e-5);
    }

    #[test]
    fn thermal_ignores_incentive() {
        let y = year_2022(0.06369, 0.2);
        let p = LogitParams::default();
        assert_eq!(utility(VehicleType::Thermal, &y, &p, 0.0), utility(VehicleType::Thermal, &y, &p, 12.0));
    }

    #[test]
    fn full_price_incentive_leaves_operating_term() {
        let y = year_2022(0.0, 1.0);
        let p = LogitParams::default();
        let u = utility(VehicleType::Electric, &y, &p, y.purchase_keur[1]);
        assert_relative_eq!(u, p.operating * 648.8 / 602.4, max_relative = 1e-15);
    }

    #[test]
    fn symmetric_utilities_split_evenly() {
        assert_eq!(logit_split(-0.3, -0.3, 6.75), (0.5, 0.5));
    }

    #[test]
    fn published_2022_split() {
        let (p1, p2) = logit_split(-0.4153, -0.6785, 6.75);
        let oracle = 1.0 / (1.0 + libm::exp(6.75 * (-0.4153 + 0.6785)));
        assert_relative_eq!(p2, oracle, max_relative = 1e-14);
        assert_relative_eq!(p2, 0.145, epsilon = 5e-4);
        assert!((p1 + p2 - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn extreme_gap_does_not_overflow() {
        let (p1, p2) = logit_split(0.0, 10.0, 6.75);
        assert!(p1 > 0.0 && p1 < 1e-25);
        assert!(p2 >= 1.0 - 1e-25);
        assert!((p1 + p2 - 1.0).abs() <= 1e-15);
        let (p1, p2) = logit_split(1e6, -1e6, 6.75);
        assert_eq!((p1, p2), (1.0, 0.0));
    }

    #[test]
    fn gradient_closed_form() {
        let g = logit_split_gradient(0.0, 0.0, 6.75, 0.00996);
        assert_relative_eq!(g, -0.01681, epsilon = 5e-6);
        // with the 2022 adoption factor in the slope
        let g = logit_split_gradient(0.0, 0.0, 6.75, 0.93631 * 0.3 / 30.12);
        assert_relative_eq!(g, -6.75 * 0.25 * 0.93631 * 0.3 / 30.12, max_relative = 1e-14);
        assert_relative_eq!(g, -0.01574, epsilon = 5e-6);
        assert_eq!(logit_split_gradient(-0.4, -0.7, 6.75, 0.0), 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let y = year_2022(0.06369, 0.2);
        let p = LogitParams::default();
        let h = 1e-4;
        for u in [0.0, 1.0, 5.0, 15.0] {
            let (_, analytic) = sales_shares_with_gradient(&y, &p, u);
            let fd = (sales_shares(&y, &p, u + h)[0] - sales_shares(&y, &p, u - h)[0]) / (2.0 * h);
            assert!(((analytic - fd) / fd).abs() < 1e-6, "u={u}: {analytic} vs {fd}");
        }
    }

    #[test]
    fn bass_euler_series() {
        let s = bass_adoption(&BassParams::default(), 2018, 2050);
        assert_eq!(s.get(2018), Some(0.02));
        assert_relative_eq!(s.get(2019).unwrap(), 0.02744, epsilon = 1e-12);
        assert_relative_eq!(s.get(2022).unwrap(), 0.06369, epsilon = 5e-6);
        assert!(s.get(2050).unwrap() < 1e-5);
    }

    #[test]
    fn pure_innovation_decays() {
        let s = bass_adoption(&BassParams { p: 0.02, q: 0.0, chi0: 0.0 }, 2018, 2040);
        let mut chi = 0.0;
        for (year, c) in s.iter() {
            assert_relative_eq!(c, 0.02 * (1.0 - chi), max_relative = 1e-14);
            if year > 2018 {
                assert!(c < s.get(year - 1).unwrap());
            }
            chi += c;
        }
    }

    proptest! {
        #[test]
        fn simplex_holds(u1 in -50.0f64..50.0, u2 in -50.0f64..50.0, mu in 0.01f64..20.0) {
            let (p1, p2) = logit_split(u1, u2, mu);
            prop_assert!((p1 + p2 - 1.0).abs() <= 1e-15);
            prop_assert!((0.0..=1.0).contains(&p1) && (0.0..=1.0).contains(&p2));
        }

        #[test]
        fn translation_invariant(u1 in -5.0f64..5.0, u2 in -5.0f64..5.0, shift in -100.0f64..100.0) {
            let (a1, a2) = logit_split(u1, u2, 6.75);
            let (b1, b2) = logit_split(u1 + shift, u2 + shift, 6.75);
            prop_assert!((a1 - b1).abs() < 1e-12 && (a2 - b2).abs() < 1e-12);
        }

        #[test]
        fn incentive_raises_ev_share(u in 0.0f64..40.0, du in 0.01f64..5.0, ca in 0.0f64..0.9) {
            let y = year_2022(ca, 0.2);
            let p = LogitParams::default();
            prop_assert!(sales_shares(&y, &p, u + du)[1] > sales_shares(&y, &p, u)[1]);
        }

        #[test]
        fn bass_stays_in_unit_interval(p in 0.001f64..0.2, q in 0.0f64..1.0) {
            let s = bass_adoption(&BassParams { p, q, chi0: 0.0 }, 2018, 2060);
            let chi: f64 = s.values().iter().sum();
            prop_assert!(chi <= 1.0 + 1e-12);
            prop_assert!(s.values().iter().all(|c| *c >= 0.0));
        }
    }
}
