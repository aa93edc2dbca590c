//! Sweeps over the regularization index and mesh refinement studies.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{integrate_space, integrate_spacetime, lq_norm};
use crate::error::{invalid, Error, Result};
use crate::estimates::{dx_field, estimate_report, mixed_convergence_functional, EstimateReport};
use crate::field::SpaceTimeField;
use crate::grid::{SpatialGrid, TimeGrid};
use crate::kinetic::ProblemData;
use crate::presets::Preset;
use crate::request::FunctionalRequest;
use crate::solver::{solve_sn_cancellable, tilde_shift, RegularizationFamily, SolveReport, SolverConfig};
use crate::testfn::TestFunctionSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    /// Strictly increasing regularization indices; the last one is the reference.
    pub n_values: Vec<u32>,
    /// `(nx, nt)` meshes for refinement studies.
    pub grids: Vec<(usize, usize)>,
    pub request: FunctionalRequest,
    /// Indices `l` for the `L^{2l}` gradient bounds.
    pub l_values: Vec<u32>,
    pub psi: TestFunctionSpec,
    pub etas: Vec<TestFunctionSpec>,
}

impl SweepPlan {
    pub fn new(n_values: Vec<u32>) -> Self {
        Self {
            n_values,
            grids: Vec::new(),
            request: FunctionalRequest::default(),
            l_values: vec![1, 2, 4],
            psi: TestFunctionSpec::CompactBump,
            etas: TestFunctionSpec::eta_library(),
        }
    }

    /// `4, 8, …, 512`.
    pub fn doubling(from: u32, to: u32) -> Self {
        let mut n = Vec::new();
        let mut k = from;
        while k <= to {
            n.push(k);
            k *= 2;
        }
        Self::new(n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.len() < 2 {
            return Err(invalid("a sweep needs at least two values of n"));
        }
        if self.n_values[0] == 0 || self.n_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("n values must be positive and strictly increasing"));
        }
        if self.l_values.contains(&0) {
            return Err(invalid("l values must be positive"));
        }
        self.request.validate()
    }
}

/// Diagnostics for one member of a sweep. Distances are measured against the
/// next member (`pairwise_l2`) or against the reference run (the rest); the
/// reference row carries `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub max_principle_ok: bool,
    pub max_principle_violation: f64,
    pub coercivity_min: f64,
    pub coercivity_bound: f64,
    pub pairwise_l2: Option<f64>,
    pub grad_sigma: Option<f64>,
    pub mixed: Option<f64>,
    pub ae_proxy: Option<f64>,
    /// Largest weak-form residual of this run over the test-function library.
    pub weak_residual: f64,
    pub estimates: EstimateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<SweepRow>,
    pub sigma: f64,
    pub s: f64,
    pub alpha: f64,
    pub reference_n: u32,
    /// Weak-form residual of the reference run against each test function.
    pub weak_residuals: BTreeMap<String, f64>,
    /// Every run satisfied both maximum-principle bounds and the coercivity bound.
    pub all_valid: bool,
}

impl ConvergenceReport {
    pub fn estimates(&self) -> Vec<EstimateReport> {
        self.rows.iter().map(|r| r.estimates.clone()).collect()
    }

    pub fn column(&self, pick: impl Fn(&SweepRow) -> Option<f64>) -> Vec<f64> {
        self.rows.iter().filter_map(pick).collect()
    }
}

/// `‖∂_x ũ_a² − ∂_x ũ_b²‖_{L^σ(Q_T)}`; for `σ < 1` this is the quasi-norm.
pub fn grad_square_distance(u_tilde_a: &SpaceTimeField, u_tilde_b: &SpaceTimeField, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 2.0) {
        return Err(invalid(format!("sigma must lie in (0, 2), got {sigma}")));
    }
    let da = dx_field(&u_tilde_a.map(|_, _, v| v * v)?)?;
    let db = dx_field(&u_tilde_b.map(|_, _, v| v * v)?)?;
    let powered = da.zip_with(&db, |a, b| (a - b).abs().powf(sigma))?;
    Ok(integrate_spacetime(&powered).max(0.0).powf(1.0 / sigma))
}

/// `∫∫ |∂_x u_n − ∂_x u|^α ψ`.
pub fn ae_gradient_proxy(
    u_n: &SpaceTimeField,
    u_ref: &SpaceTimeField,
    alpha: f64,
    psi: &TestFunctionSpec,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let (grid, tgrid) = (u_n.grid(), u_n.tgrid());
    let weight = psi.sample(grid, tgrid)?;
    if weight.min() < 0.0 {
        return Err(invalid("proxy weight must be nonnegative"));
    }
    let diff = dx_field(&u_n.zip_with(u_ref, |a, b| a - b)?)?;
    let integrand = diff.zip_with(&weight, |d, w| d.abs().powf(alpha) * w)?;
    Ok(integrate_spacetime(&integrand))
}

/// Terms of the weak formulation tested against `η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakForm {
    /// `−(u, ∂_t η) + ((x²/2) ∂_x u², ∂_x η)`.
    pub lhs: f64,
    /// `(−x² (∂_x u)², η) + (−x ∂_x u², η) + (g₀ u, η) + (φ₀, η(·,0))`.
    pub rhs: f64,
}

impl WeakForm {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub fn weak_form(u: &SpaceTimeField, problem: &ProblemData, eta: &TestFunctionSpec) -> Result<WeakForm> {
    let (grid, tgrid) = (u.grid(), u.tgrid());
    crate::field::ensure_same_grid(grid, problem.grid())?;
    eta.check_eta(grid, tgrid)?;
    let value = eta.sample(grid, tgrid)?;
    let dx_eta = eta.sample_dx(grid, tgrid)?;
    let dt_eta = eta.sample_dt(grid, tgrid)?;
    let du = dx_field(u)?;
    let du2 = dx_field(&u.map(|_, _, v| v * v)?)?;
    let g0 = problem.g0().values();
    let nx = grid.nx();

    let n = u.values().len();
    let mut lhs_integrand = Vec::with_capacity(n);
    let mut rhs_integrand = Vec::with_capacity(n);
    for k in 0..n {
        let x = grid.x(k % nx);
        let (uk, eta_k) = (u.values()[k], value.values()[k]);
        lhs_integrand.push(-uk * dt_eta.values()[k] + 0.5 * x * x * du2.values()[k] * dx_eta.values()[k]);
        let d = du.values()[k];
        rhs_integrand.push((-x * x * d * d - x * du2.values()[k] + g0[k % nx] * uk) * eta_k);
    }
    let lhs = integrate_spacetime(&SpaceTimeField::new(*grid, *tgrid, lhs_integrand)?);
    let initial = problem.phi0().zip_with(&value.level_field(0), |p, e| p * e)?;
    let rhs = integrate_spacetime(&SpaceTimeField::new(*grid, *tgrid, rhs_integrand)?) + integrate_space(&initial);
    Ok(WeakForm { lhs, rhs })
}

/// `|LHS − RHS|` of the weak identity.
pub fn weak_residual(u: &SpaceTimeField, problem: &ProblemData, eta: &TestFunctionSpec) -> Result<f64> {
    Ok(weak_form(u, problem, eta)?.residual())
}

/// Solves every member of `plan` on the mesh of `problem` (in parallel) and
/// assembles the diagnostics.
pub fn run_sweep(problem: &ProblemData, plan: &SweepPlan, config: &SolverConfig) -> Result<ConvergenceReport> {
    run_sweep_cancellable(problem, plan, config, None)
}

pub fn run_sweep_cancellable(
    problem: &ProblemData,
    plan: &SweepPlan,
    config: &SolverConfig,
    cancel: Option<&AtomicBool>,
) -> Result<ConvergenceReport> {
    plan.validate()?;
    plan.psi.check_psi(problem.grid(), problem.tgrid())?;
    let solves: Vec<SolveReport> = plan
        .n_values
        .par_iter()
        .map(|&n| {
            let reg = RegularizationFamily::new(n)?;
            solve_sn_cancellable(problem, reg, config, cancel).map_err(|e| match e {
                Error::Cancelled => Error::Cancelled,
                other => Error::Numerical(format!("solve failed for n = {n}: {other}")),
            })
        })
        .collect::<Result<_>>()?;
    if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
        return Err(Error::Cancelled);
    }

    let req = plan.request;
    let reference = solves.last().unwrap();
    let ref_tilde = tilde_shift(&reference.solution, reference.n)?;
    let last = solves.len() - 1;
    let rows = solves
        .par_iter()
        .enumerate()
        .map(|(i, run)| {
            let estimates = estimate_report(run, &plan.l_values, req.theta, &plan.psi)?;
            let (pairwise_l2, grad_sigma, mixed, ae_proxy) = if i < last {
                let diff = run.solution.zip_with(&solves[i + 1].solution, |a, b| a - b)?;
                let tilde = tilde_shift(&run.solution, run.n)?;
                (
                    Some(lq_norm(&diff, 2.0)?),
                    Some(grad_square_distance(&tilde, &ref_tilde, req.sigma)?),
                    Some(mixed_convergence_functional(&tilde, &reference.solution, req.s)?),
                    Some(ae_gradient_proxy(&run.solution, &reference.solution, req.alpha, &plan.psi)?),
                )
            } else {
                (None, None, None, None)
            };
            let weak = plan
                .etas
                .iter()
                .map(|eta| weak_residual(&run.solution, problem, eta))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok(SweepRow {
                n: run.n,
                max_principle_ok: run.max_principle_ok,
                max_principle_violation: run.max_principle_violation,
                coercivity_min: run.coercivity_min,
                coercivity_bound: run.coercivity_bound,
                pairwise_l2,
                grad_sigma,
                mixed,
                ae_proxy,
                weak_residual: weak,
                estimates,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let weak_residuals = plan
        .etas
        .iter()
        .map(|eta| Ok((eta.name(), weak_residual(&reference.solution, problem, eta)?)))
        .collect::<Result<_>>()?;
    let all_valid = solves.iter().all(SolveReport::is_valid);
    Ok(ConvergenceReport {
        rows,
        sigma: req.sigma,
        s: req.s,
        alpha: req.alpha,
        reference_n: reference.n,
        weak_residuals,
        all_valid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementRow {
    pub nx: usize,
    pub nt: usize,
    pub h: f64,
    pub dt: f64,
    pub residuals: BTreeMap<String, f64>,
}

/// Weak-form residuals of the regularized solution for a fixed `n` on a
/// sequence of meshes over the same domain and horizon.
pub fn refinement_study(
    preset: &Preset,
    domain: (f64, f64),
    horizon: f64,
    n: u32,
    grids: &[(usize, usize)],
    etas: &[TestFunctionSpec],
    config: &SolverConfig,
) -> Result<Vec<RefinementRow>> {
    grids
        .par_iter()
        .map(|&(nx, nt)| {
            let grid = SpatialGrid::new(domain.0, domain.1, nx)?;
            let tgrid = TimeGrid::new(horizon, nt)?;
            let problem = preset.problem(&grid, tgrid)?;
            let run = crate::solver::solve_sn(&problem, RegularizationFamily::new(n)?, config)?;
            let residuals = etas
                .iter()
                .map(|eta| Ok((eta.name(), weak_residual(&run.solution, &problem, eta)?)))
                .collect::<Result<_>>()?;
            Ok(RefinementRow { nx, nt, h: grid.h(), dt: tgrid.dt(), residuals })
        })
        .collect()
}

/// `true` when every entry is below the previous one, or when the whole
/// sequence is at round-off level (`≤ floor`).
pub fn strictly_decreasing(values: &[f64], floor: f64) -> bool {
    values.iter().all(|v| v.abs() <= floor) || values.windows(2).all(|w| w[1] < w[0])
}
