use alloc::vec;
use alloc::vec::Vec;

use super::adjoint::{self, AdjointGradients};
use super::{ControlTrajectory, OcpProblem};
use crate::fleet::ScenarioResult;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Multiplier updates before giving up.
    pub max_outer: usize,
    /// Quasi-Newton iterations per multiplier update.
    pub max_inner: usize,
    /// Scaled projected-gradient tolerance on the Lagrangian.
    pub stationarity_tol: f64,
    /// Allowed terminal constraint violation (Mt).
    pub feasibility_tol: f64,
    /// Multiplier below which the constraint counts as inactive.
    pub multiplier_tol: f64,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub max_penalty: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_outer: 500,
            max_inner: 400,
            stationarity_tol: 1e-6,
            feasibility_tol: 1e-3,
            multiplier_tol: 1e-6,
            initial_penalty: 10.0,
            penalty_growth: 10.0,
            max_penalty: 1e10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    /// The iteration budget ran out; the solution holds the last iterate.
    MaxIterations,
}

/// First-order optimality residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    /// `|u - P(u - (dI/du + nu dE/du))|_inf / max(1, |dI/du|_inf)`.
    pub stationarity: f64,
    /// `max(0, E(T) - target)` in Mt.
    pub feasibility: f64,
    /// `|nu (E(T) - target)|` in G€.
    pub complementarity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationTrace {
    pub iteration: usize,
    pub budget_geur: f64,
    pub terminal_mt: f64,
    /// `E(T) - target`; negative when the constraint is slack.
    pub violation_mt: f64,
    /// Infinity norm of the change in u over this iteration.
    pub step_norm: f64,
    pub multiplier: f64,
    pub penalty: f64,
    pub inner_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OcpSolution {
    pub u_star: ControlTrajectory,
    /// I(T) of `u_star` recomputed by forward simulation (G€).
    pub budget_geur: f64,
    /// E(T) of `u_star` (Mt).
    pub terminal_mt: f64,
    /// Multiplier of the terminal constraint (G€ per Mt).
    pub multiplier: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub kkt: KktResiduals,
    pub trace: Vec<IterationTrace>,
    pub simulation: ScenarioResult,
}

impl OcpSolution {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
}

fn projected_step(u: &[f64], g: &[f64], upper: f64) -> f64 {
    u.iter()
        .zip(g)
        .fold(0.0, |m, (ui, gi)| m.max(libm::fabs(ui - (ui - gi).clamp(0.0, upper))))
}

/// Augmented Lagrangian of the terminal constraint at one point.
struct Merit {
    value: f64,
    gradient: Vec<f64>,
    eval: AdjointGradients,
}

fn merit(u: &[f64], prob: &OcpProblem, nu: f64, rho: f64) -> Result<Merit> {
    let eval = adjoint::evaluate(u, prob)?;
    let c = eval.terminal_mt - prob.target_mt;
    let shifted = (nu + rho * c).max(0.0);
    let value = eval.budget_geur + (shifted * shifted - nu * nu) / (2.0 * rho);
    let gradient = eval
        .budget_gradient
        .iter()
        .zip(&eval.terminal_gradient)
        .map(|(gi, ge)| gi + shifted * ge)
        .collect();
    Ok(Merit { value, gradient, eval })
}

/// Projected BFGS on the box `[0, upper]`: the inverse Hessian acts on the
/// variables not held at a bound, and an Armijo search runs along the
/// projected path.
fn minimize_box(u0: Vec<f64>, prob: &OcpProblem, nu: f64, rho: f64, opts: &SolverOptions) -> Result<(Vec<f64>, Merit, usize)> {
    let n = u0.len();
    let upper = prob.u_max;
    let mut u = u0;
    let mut m = merit(&u, prob, nu, rho)?;
    let mut hinv = identity(n);
    let mut scaled = false;
    let mut iterations = 0;
    while iterations < opts.max_inner {
        let scale = norm_inf(&m.eval.budget_gradient).max(1.0);
        if projected_step(&u, &m.gradient, upper) / scale <= 0.5 * opts.stationarity_tol {
            break;
        }
        iterations += 1;
        let free: Vec<bool> = (0..n)
            .map(|i| !((u[i] <= 0.0 && m.gradient[i] > 0.0) || (u[i] >= upper && m.gradient[i] < 0.0)))
            .collect();
        let mut d = vec![0.0; n];
        for i in (0..n).filter(|&i| free[i]) {
            d[i] = -(0..n).filter(|&j| free[j]).map(|j| hinv[i][j] * m.gradient[j]).sum::<f64>();
        }
        let mut accepted = line_search(&u, &d, &m, prob, nu, rho)?;
        if accepted.is_none() {
            // fall back to steepest descent with a fresh metric
            hinv = identity(n);
            scaled = false;
            let sd: Vec<f64> = m.gradient.iter().map(|g| -g).collect();
            accepted = line_search(&u, &sd, &m, prob, nu, rho)?;
        }
        let Some((u_new, m_new)) = accepted else { break };
        let s: Vec<f64> = u_new.iter().zip(&u).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = m_new.gradient.iter().zip(&m.gradient).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        let ss: f64 = s.iter().map(|v| v * v).sum();
        if sy > 1e-12 * libm::sqrt(ss * yy) {
            if !scaled {
                let gamma = sy / yy;
                hinv = identity(n);
                hinv.iter_mut().enumerate().for_each(|(i, row)| row[i] = gamma);
                scaled = true;
            }
            bfgs_update(&mut hinv, &s, &y, sy);
        }
        u = u_new;
        m = m_new;
    }
    Ok((u, m, iterations))
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect()
}

/// `H <- (I - r s y') H (I - r y s') + r s s'` with `r = 1 / s'y`.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let r = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i][j] * y[j]).sum()).collect();
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -r * (s[i] * hy[j] + hy[i] * s[j]) + (r * r * yhy + r) * s[i] * s[j];
        }
    }
}

fn line_search(u: &[f64], d: &[f64], m: &Merit, prob: &OcpProblem, nu: f64, rho: f64) -> Result<Option<(Vec<f64>, Merit)>> {
    const ARMIJO: f64 = 1e-4;
    let upper = prob.u_max;
    let slack = 1e-14 * (1.0 + libm::fabs(m.value));
    let mut alpha = 1.0;
    for _ in 0..60 {
        let trial: Vec<f64> = u.iter().zip(d).map(|(ui, di)| (ui + alpha * di).clamp(0.0, upper)).collect();
        let decrease: f64 = trial.iter().zip(u).zip(&m.gradient).map(|((t, ui), g)| g * (t - ui)).sum();
        if decrease >= 0.0 {
            if trial == u {
                return Ok(None);
            }
            alpha *= 0.5;
            continue;
        }
        let mt = merit(&trial, prob, nu, rho)?;
        if mt.value <= m.value + ARMIJO * decrease + slack {
            return Ok(Some((trial, mt)));
        }
        alpha *= 0.5;
    }
    Ok(None)
}

/// Minimizes the total incentive budget subject to `E(T) <= target` and
/// `0 <= u <= u_max`, starting from `init`.
///
/// Returns [`Error::Infeasible`] when even the maximal incentive every year
/// misses the target.
pub fn solve(prob: &OcpProblem, init: &ControlTrajectory, opts: &SolverOptions) -> Result<OcpSolution> {
    prob.validate()?;
    prob.check_control(init)?;
    let n = prob.horizon_len();
    let reachable = adjoint::forward(&vec![prob.u_max; n], prob)?.terminal_mt;
    if reachable > prob.target_mt + opts.feasibility_tol {
        return Err(Error::Infeasible {
            target: prob.target_mt,
            reachable,
        });
    }

    let mut u = init.values().to_vec();
    let mut nu = 0.0;
    let mut rho = opts.initial_penalty;
    let mut trace = Vec::new();
    let mut prev_residual = f64::INFINITY;
    let mut status = SolveStatus::MaxIterations;
    let mut kkt = KktResiduals {
        stationarity: f64::INFINITY,
        feasibility: f64::INFINITY,
        complementarity: f64::INFINITY,
    };
    for outer in 1..=opts.max_outer {
        let (u_new, m, inner) = minimize_box(u.clone(), prob, nu, rho, opts)?;
        let step_norm = u_new.iter().zip(&u).fold(0.0, |acc: f64, (a, b)| acc.max(libm::fabs(a - b)));
        u = u_new;
        let c = m.eval.terminal_mt - prob.target_mt;
        let nu_new = (nu + rho * c).max(0.0);
        let lagrangian_gradient: Vec<f64> = m
            .eval
            .budget_gradient
            .iter()
            .zip(&m.eval.terminal_gradient)
            .map(|(gi, ge)| gi + nu_new * ge)
            .collect();
        kkt = KktResiduals {
            stationarity: projected_step(&u, &lagrangian_gradient, prob.u_max) / norm_inf(&m.eval.budget_gradient).max(1.0),
            feasibility: c.max(0.0),
            complementarity: libm::fabs(nu_new * c),
        };
        trace.push(IterationTrace {
            iteration: outer,
            budget_geur: m.eval.budget_geur,
            terminal_mt: m.eval.terminal_mt,
            violation_mt: c,
            step_norm,
            multiplier: nu_new,
            penalty: rho,
            inner_iterations: inner,
        });
        let active_or_inactive = libm::fabs(c) <= opts.feasibility_tol || nu_new <= opts.multiplier_tol;
        nu = nu_new;
        if kkt.stationarity <= opts.stationarity_tol && kkt.feasibility <= opts.feasibility_tol && active_or_inactive {
            status = SolveStatus::Converged;
            break;
        }
        let residual = libm::fabs(c.max(-nu / rho));
        if residual > 0.25 * prev_residual {
            rho = (rho * opts.penalty_growth).min(opts.max_penalty);
        }
        prev_residual = residual;
    }

    let u_star = ControlTrajectory::new(prob.first_control_year(), u);
    let simulation = prob.simulate(&u_star)?;
    Ok(OcpSolution {
        budget_geur: simulation.budget_geur.unwrap_or(0.0),
        terminal_mt: simulation.terminal_emissions(),
        u_star,
        multiplier: nu,
        iterations: trace.len(),
        status,
        kkt,
        trace,
        simulation,
    })
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::super::{objective, terminal_emission};
    use super::*;

    fn solved(target: f64) -> (OcpProblem, OcpSolution) {
        let mut prob = small_problem();
        prob.target_mt = target;
        let init = controls(&prob, 5.0);
        let sol = solve(&prob, &init, &SolverOptions::default()).unwrap();
        (prob, sol)
    }

    #[test]
    fn matches_constant_policy_emissions_more_cheaply() {
        let prob = small_problem();
        let ic = controls(&prob, 5.0);
        let e_ic = terminal_emission(&ic, &prob).unwrap();
        let (prob, sol) = solved(e_ic);
        assert!(sol.converged(), "{:?}", sol.kkt);
        assert!(sol.terminal_mt <= e_ic + 1e-3);
        assert!(sol.budget_geur <= objective(&ic, &prob).unwrap());
        assert!(sol.kkt.stationarity < 1e-6);
        assert!((sol.terminal_mt - e_ic).abs() <= 1e-3 || sol.multiplier < 1e-6);
        assert!(sol.multiplier > 0.0);
    }

    #[test]
    fn loose_target_needs_no_incentive() {
        let prob = small_problem();
        let e0 = terminal_emission(&controls(&prob, 0.0), &prob).unwrap();
        let (_, sol) = solved(e0 + 1.0);
        assert!(sol.converged());
        assert!(sol.u_star.values().iter().all(|u| *u == 0.0), "{:?}", sol.u_star);
        assert_eq!(sol.budget_geur, 0.0);
        assert_eq!(sol.multiplier, 0.0);
    }

    #[test]
    fn unreachable_target_is_infeasible() {
        let mut prob = small_problem();
        prob.target_mt = 0.01;
        let err = solve(&prob, &controls(&prob, 5.0), &SolverOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
    }

    #[test]
    fn iteration_cap_is_reported() {
        let prob = small_problem();
        let e_ic = terminal_emission(&controls(&prob, 5.0), &prob).unwrap();
        let mut prob = prob;
        prob.target_mt = e_ic - 0.5;
        let opts = SolverOptions {
            max_outer: 1,
            max_inner: 2,
            ..SolverOptions::default()
        };
        let sol = solve(&prob, &controls(&prob, 5.0), &opts).unwrap();
        assert_eq!(sol.status, SolveStatus::MaxIterations);
        assert_eq!(sol.iterations, 1);
        assert_eq!(sol.trace.len(), 1);
    }

    #[test]
    fn repeated_solves_are_bitwise_identical() {
        let (_, a) = solved(8.5);
        let (_, b) = solved(8.5);
        assert_eq!(a.u_star, b.u_star);
        assert_eq!(a.budget_geur.to_bits(), b.budget_geur.to_bits());
    }

    #[test]
    fn solution_fields_come_from_resimulation() {
        let (prob, sol) = solved(8.5);
        assert_eq!(sol.budget_geur, objective(&sol.u_star, &prob).unwrap());
        assert_eq!(sol.terminal_mt, terminal_emission(&sol.u_star, &prob).unwrap());
    }
}
