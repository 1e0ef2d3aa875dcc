//! Backcasting optimal control: the cheapest yearly EV incentive trajectory
//! whose terminal fleet emissions stay below a target.
//!
//! The control is one incentive per year after the initial year (direct single
//! shooting). Gradients of both the budget and the terminal emissions come
//! from a discrete adjoint sweep over the fleet recursion; [`solve`] wraps them
//! in an augmented Lagrangian with a bound-constrained quasi-Newton inner loop.

mod adjoint;
mod solver;

use alloc::format;
use alloc::vec::Vec;

use crate::fleet::{self, ExogenousInputs, FleetState, ModelParams, SalesRule, ScenarioResult, YearInputs, YearlyPolicy};
use crate::{Error, Result};

pub use adjoint::{adjoint_gradient, hamiltonian, AdjointGradients, AdjointState, Costate};
pub use solver::{solve, IterationTrace, KktResiduals, OcpSolution, SolveStatus, SolverOptions};

/// Default upper bound on the incentive (k€).
pub const DEFAULT_U_MAX: f64 = 50.0;

/// Incentive (k€ per EV) for each year `first_year..`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlTrajectory {
    first_year: i32,
    values: Vec<f64>,
}

impl ControlTrajectory {
    pub fn new(first_year: i32, values: Vec<f64>) -> Self {
        Self { first_year, values }
    }

    pub fn constant(first_year: i32, last_year: i32, level: f64) -> Self {
        let len = (last_year - first_year + 1).max(0) as usize;
        Self::new(first_year, alloc::vec![level; len])
    }

    pub fn first_year(&self) -> i32 {
        self.first_year
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.values.len() as i32 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        if year < self.first_year {
            return None;
        }
        self.values.get((year - self.first_year) as usize).copied()
    }

    pub fn covers(&self, first: i32, last: i32) -> bool {
        !self.values.is_empty() && self.first_year <= first && self.last_year() >= last
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, u)| (self.first_year + i as i32, *u))
    }
}

impl YearlyPolicy for ControlTrajectory {
    /// Years outside the trajectory get no incentive.
    fn rule(&self, year: &YearInputs) -> SalesRule {
        SalesRule::Incentive(self.get(year.year).unwrap_or(0.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OcpProblem {
    pub initial: FleetState,
    pub inputs: ExogenousInputs,
    pub params: ModelParams,
    /// Horizon year T.
    pub end_year: i32,
    /// Terminal emission target (Mt).
    pub target_mt: f64,
    /// Upper bound on the incentive (k€).
    pub u_max: f64,
}

impl OcpProblem {
    pub fn first_control_year(&self) -> i32 {
        self.initial.year + 1
    }

    /// Number of controlled years, `T - t0`.
    pub fn horizon_len(&self) -> usize {
        (self.end_year - self.initial.year).max(0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_mt > 0.0 && self.target_mt.is_finite()) {
            return Err(Error::InvalidInput(format!("emission target must be positive, got {}", self.target_mt)));
        }
        if !(self.u_max >= 0.0 && self.u_max.is_finite()) {
            return Err(Error::InvalidInput(format!("incentive bound must be non-negative, got {}", self.u_max)));
        }
        if self.end_year <= self.initial.year {
            return Err(Error::InvalidInput("horizon must contain at least one controlled year".into()));
        }
        if self.initial.max_age() != self.params.survival.max_age() {
            return Err(Error::InvalidInput("fleet age classes do not match the survival schedule".into()));
        }
        for year in self.initial.year..=self.end_year {
            self.inputs.year(year)?;
        }
        Ok(())
    }

    pub(crate) fn check_control(&self, u: &ControlTrajectory) -> Result<()> {
        if u.first_year() != self.first_control_year() || u.values().len() != self.horizon_len() {
            return Err(Error::InvalidInput(format!(
                "control must cover {}..={} (got {}..={})",
                self.first_control_year(),
                self.end_year,
                u.first_year(),
                u.last_year()
            )));
        }
        if let Some((year, v)) = u.iter().find(|(_, v)| !(*v >= 0.0 && *v <= self.u_max)) {
            return Err(Error::InvalidInput(format!(
                "incentive {v} in {year} outside [0, {}]",
                self.u_max
            )));
        }
        Ok(())
    }

    /// Forward simulation of a control trajectory.
    pub fn simulate(&self, u: &ControlTrajectory) -> Result<ScenarioResult> {
        fleet::simulate(&self.initial, u, &self.inputs, &self.params, self.end_year)
    }
}

/// Total incentive budget I(T) in G€.
pub fn objective(u: &ControlTrajectory, prob: &OcpProblem) -> Result<f64> {
    prob.check_control(u)?;
    Ok(adjoint::forward(u.values(), prob)?.budget_geur)
}

/// Fleet emissions in the horizon year (Mt).
pub fn terminal_emission(u: &ControlTrajectory, prob: &OcpProblem) -> Result<f64> {
    prob.check_control(u)?;
    Ok(adjoint::forward(u.values(), prob)?.terminal_mt)
}
