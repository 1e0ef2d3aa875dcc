use alloc::vec;
use alloc::vec::Vec;

use super::{ControlTrajectory, OcpProblem};
use crate::choice;
use crate::fleet::{self, FleetState, VehicleType};
use crate::units::{GRAMS_PER_MT, KEUR_PER_GEUR};
use crate::Result;

/// Costate of every partial stock at one year, indexed `[type][age]`.
///
/// Units follow the pass that produced it: G€ per vehicle for the budget,
/// Mt per vehicle for the terminal emissions.
#[derive(Debug, Clone, PartialEq)]
pub struct Costate {
    pub year: i32,
    pub values: [Vec<f64>; 2],
}

impl Costate {
    pub fn zeros(year: i32, max_age: usize) -> Self {
        Self {
            year,
            values: [vec![0.0; max_age + 1], vec![0.0; max_age + 1]],
        }
    }

    pub fn filled(year: i32, max_age: usize, value: f64) -> Self {
        Self {
            year,
            values: [vec![value; max_age + 1], vec![value; max_age + 1]],
        }
    }

    pub fn get(&self, v: VehicleType, age: usize) -> f64 {
        self.values[v.index()][age]
    }

    pub fn max_age(&self) -> usize {
        self.values[0].len() - 1
    }
}

/// Costates for every year from the initial year to the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointState {
    pub costates: Vec<Costate>,
}

impl AdjointState {
    pub fn at(&self, year: i32) -> Option<&Costate> {
        self.costates.iter().find(|c| c.year == year)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjointGradients {
    /// I(T) in G€.
    pub budget_geur: f64,
    /// dI/du(t) in G€ per k€.
    pub budget_gradient: Vec<f64>,
    pub budget_adjoint: AdjointState,
    /// E(T) in Mt.
    pub terminal_mt: f64,
    /// dE(T)/du(t) in Mt per k€.
    pub terminal_gradient: Vec<f64>,
    pub terminal_adjoint: AdjointState,
}

#[derive(Debug, Clone, Copy)]
struct StepData {
    n: f64,
    shares: [f64; 2],
    dp1_du: f64,
    clamped: bool,
}

pub(crate) struct Forward {
    states: Vec<FleetState>,
    steps: Vec<StepData>,
    pub budget_geur: f64,
    pub terminal_mt: f64,
}

pub(crate) fn forward(u: &[f64], prob: &OcpProblem) -> Result<Forward> {
    let params = &prob.params;
    let mut states = Vec::with_capacity(u.len() + 1);
    let mut steps = Vec::with_capacity(u.len());
    states.push(prob.initial.clone());
    let mut budget = 0.0;
    for (k, &ut) in u.iter().enumerate() {
        let prev = &states[k];
        let yi = prob.inputs.year(prev.year + 1)?;
        let mut next = fleet::survivors(prev, &params.survival);
        let raw = yi.required_fleet() - next.grand_total();
        let (n, clamped) = if raw >= 0.0 { (raw, false) } else { (0.0, true) };
        let (shares, dp1_du) = choice::sales_shares_with_gradient(yi, &params.logit, ut);
        next.set(VehicleType::Thermal, 0, shares[0] * n);
        next.set(VehicleType::Electric, 0, shares[1] * n);
        budget += ut * shares[1] * n / KEUR_PER_GEUR;
        steps.push(StepData {
            n,
            shares,
            dp1_du,
            clamped,
        });
        states.push(next);
    }
    let last = &states[states.len() - 1];
    let mileage = prob.inputs.year(last.year)?.mileage_km;
    let terminal_mt = fleet::emissions(last, &params.emission_factors, mileage)?;
    Ok(Forward {
        states,
        steps,
        budget_geur: budget,
        terminal_mt,
    })
}

/// Backward sweep. `weight` converts the running cost `u P_2 N` into the
/// units of the pass (zero for the emission pass).
fn backward(fwd: &Forward, u: &[f64], prob: &OcpProblem, seed: Costate, weight: f64) -> (Vec<f64>, AdjointState) {
    let max_age = seed.max_age();
    let survival = &prob.params.survival;
    let mut grad = vec![0.0; u.len()];
    let mut costates = Vec::with_capacity(u.len() + 1);
    let mut lam = seed;
    for k in (0..u.len()).rev() {
        let s = fwd.steps[k];
        let (l10, l20) = (lam.values[0][0], lam.values[1][0]);
        grad[k] = s.n * (weight * s.shares[1] + s.dp1_du * (l10 - l20 - weight * u[k]));
        let c = if s.clamped {
            0.0
        } else {
            weight * u[k] * s.shares[1] + l10 * s.shares[0] + l20 * s.shares[1]
        };
        let mut prev = Costate::zeros(lam.year - 1, max_age);
        for v in 0..2 {
            for b in 0..=max_age {
                let d = (b + 1).min(max_age);
                prev.values[v][b] = survival.eta(d) * (lam.values[v][d] - c);
            }
        }
        costates.push(lam);
        lam = prev;
    }
    costates.push(lam);
    costates.reverse();
    (grad, AdjointState { costates })
}

fn emission_seed(fwd: &Forward, prob: &OcpProblem) -> Result<Costate> {
    let last = &fwd.states[fwd.states.len() - 1];
    let mileage = prob.inputs.year(last.year)?.mileage_km;
    let mut seed = Costate::zeros(last.year, last.max_age());
    for a in 0..=last.max_age() {
        let eps = prob.params.emission_factors.new_vehicle_factor(last.year - a as i32)?;
        seed.values[0][a] = eps * mileage / GRAMS_PER_MT;
    }
    Ok(seed)
}

/// Exact gradients of the budget and of the terminal emissions with respect
/// to every yearly incentive, from one forward and two backward sweeps.
pub fn adjoint_gradient(u: &ControlTrajectory, prob: &OcpProblem) -> Result<AdjointGradients> {
    prob.check_control(u)?;
    evaluate(u.values(), prob)
}

pub(crate) fn evaluate(u: &[f64], prob: &OcpProblem) -> Result<AdjointGradients> {
    let fwd = forward(u, prob)?;
    let max_age = prob.initial.max_age();
    let (budget_gradient, budget_adjoint) =
        backward(&fwd, u, prob, Costate::zeros(prob.end_year, max_age), 1.0 / KEUR_PER_GEUR);
    let (terminal_gradient, terminal_adjoint) = backward(&fwd, u, prob, emission_seed(&fwd, prob)?, 0.0);
    Ok(AdjointGradients {
        budget_geur: fwd.budget_geur,
        budget_gradient,
        budget_adjoint,
        terminal_mt: fwd.terminal_mt,
        terminal_gradient,
        terminal_adjoint,
    })
}

/// Hamiltonian of year `year` given the fleet `state` of the previous year
/// and the costate `lambda` of `year`:
///
/// `H = u P_2 N + sum_v lambda_v0 P_v N + sum_v sum_{a=1}^{A-1} lambda_va eta_a S_v,a-1
///      + sum_v lambda_vA eta_A (S_v,A-1 + S_vA)`
///
/// with the running cost in G€.
pub fn hamiltonian(year: i32, u: f64, state: &FleetState, lambda: &Costate, prob: &OcpProblem) -> Result<f64> {
    let yi = prob.inputs.year(year)?;
    let survival = &prob.params.survival;
    let survived = fleet::survivors(state, survival);
    let n = (yi.required_fleet() - survived.grand_total()).max(0.0);
    let p = choice::sales_shares(yi, &prob.params.logit, u);
    let max_age = state.max_age();
    let mut h = u * p[1] * n / KEUR_PER_GEUR;
    for v in VehicleType::ALL {
        let i = v.index();
        let s = state.ages(v);
        let lam = &lambda.values[i];
        h += lam[0] * p[i] * n;
        for a in 1..max_age {
            h += lam[a] * survival.eta(a) * s[a - 1];
        }
        h += lam[max_age] * survival.eta(max_age) * (s[max_age - 1] + s[max_age]);
    }
    Ok(h)
}
