//! Desk-scale validation suite run by `qlt-pme validate`.
//!
//! Every threshold below is fixed; `tolerance_scale` multiplies the
//! quadrature- and round-off-limited ones so their sensitivity can be probed.

use serde::{Deserialize, Serialize};

use crate::convergence::{run_sweep, strictly_decreasing, weak_residual, SweepPlan};
use crate::equilibrium::{equilibrium_m, stationarity_residual};
use crate::error::Result;
use crate::estimates::{cutoff_t, primitive_j, regularization_residual, spread, time_regularize};
use crate::field::{ScalarField, SpaceTimeField};
use crate::grid::{SpatialGrid, TimeGrid};
use crate::kinetic::{build_g0, reconstruct_f, KineticData};
use crate::presets::{cubic_bump, BumpOnTail, Preset};
use crate::solver::{mass_history, solve_coupled, SolverConfig};
use crate::testfn::TestFunctionSpec;

pub const MAX_PRINCIPLE_LOWER_TOL: f64 = 1e-10;
pub const MAX_PRINCIPLE_UPPER_TOL: f64 = 1e-8;
pub const UNIFORMITY_FACTOR: f64 = 10.0;
/// Values at or below this are treated as identically zero in monotonicity checks.
pub const ZERO_FLOOR: f64 = 1e-14;
pub const WEAK_RESIDUAL_TOL: f64 = 1e-4;
pub const WEAK_RESIDUAL_MIN_RATIO: f64 = 3.0;
pub const EQUILIBRIUM_TOL: f64 = 1e-12;
pub const STATIONARITY_TOL: f64 = 1e-10;
pub const COUPLED_TOL: f64 = 5e-2;
/// Refinement ratio band for the coupled/reduced discrepancy: halving ±20%.
pub const COUPLED_RATIO_BAND: (f64, f64) = (1.6, 2.4);
pub const MASS_DRIFT_TOL: f64 = 1e-6;
pub const PRIMITIVE_FD_STEP: f64 = 1e-4;
pub const PRIMITIVE_FD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSettings {
    pub x_a: f64,
    pub x_b: f64,
    pub nx: usize,
    pub nt: usize,
    pub horizon: f64,
    pub preset: Preset,
    /// Regularization indices of the sweep; the last one is the reference.
    pub n_values: Vec<u32>,
    pub tolerance_scale: f64,
    pub uniformity_factor: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub nu: f64,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self {
            x_a: 1.0,
            x_b: 2.0,
            nx: 201,
            nt: 2000,
            horizon: 0.5,
            preset: Preset::BumpOnTail(BumpOnTail::default()),
            n_values: vec![4, 8, 16, 32, 64, 128, 256, 512],
            tolerance_scale: 1.0,
            uniformity_factor: UNIFORMITY_FACTOR,
            sigma: 1.5,
            alpha: 0.5,
            theta: 0.25,
            epsilon: 0.5,
            nu: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(id: u8, name: &'static str, passed: bool, detail: String) -> CriterionOutcome {
    CriterionOutcome { id, name, passed, detail }
}

/// Runs criteria 1–8 and returns one outcome per criterion.
pub fn run_all(settings: &ValidationSettings) -> Result<Vec<CriterionOutcome>> {
    let scale = settings.tolerance_scale;
    let grid = SpatialGrid::new(settings.x_a, settings.x_b, settings.nx)?;
    let tgrid = TimeGrid::new(settings.horizon, settings.nt)?;
    let mut out = Vec::with_capacity(8);

    // 1–4 share one sweep
    let problem = settings.preset.problem(&grid, tgrid)?;
    let config = SolverConfig {
        max_principle_tol: MAX_PRINCIPLE_LOWER_TOL * scale,
        upper_bound_tol: MAX_PRINCIPLE_UPPER_TOL * scale,
        ..SolverConfig::default()
    };
    let mut plan = SweepPlan::new(settings.n_values.clone());
    plan.request.sigma = settings.sigma;
    plan.request.alpha = settings.alpha;
    plan.request.theta = settings.theta;
    plan.request.delta = 2.0 * settings.theta;
    let sweep = run_sweep(&problem, &plan, &config)?;

    let worst = sweep.rows.iter().map(|r| r.max_principle_violation).fold(0.0, f64::max);
    out.push(outcome(
        1,
        "maximum principle",
        sweep.rows.iter().all(|r| r.max_principle_ok),
        format!("{} runs, worst violation beyond tolerance {worst:.3e}", sweep.rows.len()),
    ));

    let coercive = sweep.rows.iter().all(|r| r.coercivity_min >= r.coercivity_bound);
    let margin = sweep.rows.iter().map(|r| r.coercivity_min / r.coercivity_bound).fold(f64::INFINITY, f64::min);
    out.push(outcome(2, "coercivity", coercive, format!("min x²P_n(u_n) / (x_a²/2n) = {margin:.4}")));

    let spreads = spread(&sweep.estimates());
    let worst_spread = spreads.values().copied().fold(1.0, f64::max);
    out.push(outcome(
        3,
        "uniform estimates",
        worst_spread <= settings.uniformity_factor,
        format!(
            "max/min across n: {}",
            spreads.iter().map(|(k, v)| format!("{k}={v:.3}")).collect::<Vec<_>>().join(", ")
        ),
    ));

    let l2 = sweep.column(|r| r.pairwise_l2);
    let gs = sweep.column(|r| r.grad_sigma);
    let ae = sweep.column(|r| r.ae_proxy);
    let floor = ZERO_FLOOR * scale;
    out.push(outcome(
        4,
        "n-convergence",
        strictly_decreasing(&l2, floor) && strictly_decreasing(&gs, floor) && strictly_decreasing(&ae, floor),
        format!(
            "L2 {:.3e} -> {:.3e}, grad-sq L^{} {:.3e} -> {:.3e}, proxy(α={}) {:.3e} -> {:.3e}",
            l2[0],
            l2[l2.len() - 1],
            settings.sigma,
            gs[0],
            gs[gs.len() - 1],
            settings.alpha,
            ae[0],
            ae[ae.len() - 1]
        ),
    ));

    out.push(weak_identity(&grid, &tgrid, scale)?);
    out.push(equilibrium_formula(&grid, scale)?);
    out.push(coupled_equivalence(settings, &grid, &tgrid, scale)?);

    let reference = &sweep_reference(&problem, settings, &config)?;
    out.push(auxiliary(settings, problem.phi0(), reference, scale)?);
    Ok(out)
}

fn sweep_reference(
    problem: &crate::kinetic::ProblemData,
    settings: &ValidationSettings,
    config: &SolverConfig,
) -> Result<SpaceTimeField> {
    let n_ref = settings.n_values.last().copied().unwrap_or(1);
    let reg = crate::solver::RegularizationFamily::new(n_ref)?;
    Ok(crate::solver::solve_sn(problem, reg, config)?.solution)
}

/// Positive equilibrium `M = (x − x_a)(x_b − x)/2` held fixed in time.
fn weak_identity(grid: &SpatialGrid, tgrid: &TimeGrid, scale: f64) -> Result<CriterionOutcome> {
    let residuals = |g: &SpatialGrid, t: &TimeGrid| -> Result<Vec<f64>> {
        let problem = Preset::LinearEquilibrium.problem(g, *t)?;
        let m = problem.phi0().clone();
        let frozen = SpaceTimeField::from_levels(*t, &vec![m; t.levels()])?;
        TestFunctionSpec::eta_library().iter().map(|eta| weak_residual(&frozen, &problem, eta)).collect()
    };
    let coarse = residuals(grid, tgrid)?;
    let fine = residuals(&grid.refined(), &tgrid.refined())?;
    let worst = coarse.iter().copied().fold(0.0, f64::max);
    let min_ratio = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| if *f == 0.0 { f64::INFINITY } else { c / f })
        .fold(f64::INFINITY, f64::min);
    Ok(outcome(
        5,
        "weak-form identity",
        worst <= WEAK_RESIDUAL_TOL * scale && min_ratio >= WEAK_RESIDUAL_MIN_RATIO,
        format!("max residual {worst:.3e}, min refinement ratio {min_ratio:.2}"),
    ))
}

fn equilibrium_formula(grid: &SpatialGrid, scale: f64) -> Result<CriterionOutcome> {
    let (a, b) = (grid.x_a(), grid.x_b());
    let zero = ScalarField::zeros(*grid);
    let linear = ScalarField::from_fn(*grid, |s| s)?;
    let m = equilibrium_m(&zero, &linear)?;
    let exact = ScalarField::from_fn(*grid, |x| (x - a) * (b - x) / 2.0)?;
    let err_quadratic = m.max_abs_diff(&exact)?;
    let u0 = cubic_bump(grid, 1.0)?;
    let err_constant = equilibrium_m(&u0, &ScalarField::constant(*grid, 1.7)?)?.max_abs_diff(&u0)?;
    let residual = stationarity_residual(&m, &build_g0(&linear, &zero)?)?;
    let tol = EQUILIBRIUM_TOL * scale;
    Ok(outcome(
        6,
        "equilibrium formula",
        err_quadratic <= tol && err_constant <= tol && residual <= STATIONARITY_TOL * scale,
        format!("quadratic {err_quadratic:.2e}, constant f0 {err_constant:.2e}, stationarity {residual:.2e}"),
    ))
}

fn coupled_equivalence(
    settings: &ValidationSettings,
    grid: &SpatialGrid,
    tgrid: &TimeGrid,
    scale: f64,
) -> Result<CriterionOutcome> {
    let run = |g: &SpatialGrid, t: &TimeGrid| -> Result<(f64, f64)> {
        let (w0, f0) = settings.preset.kinetic_pair(g)?;
        let kin = KineticData::from_w0(f0, w0)?;
        let sol = solve_coupled(&kin, *t, &SolverConfig::default())?;
        let recon = reconstruct_f(&sol.w, kin.w0(), kin.f0())?;
        let mass = mass_history(&sol.f);
        let m0 = mass[0].abs().max(f64::MIN_POSITIVE);
        let drift = mass.iter().map(|m| (m - mass[0]).abs()).fold(0.0, f64::max) / m0 / t.horizon();
        Ok((recon.max_abs_diff(&sol.f)?, drift))
    };
    let (coarse, drift) = run(grid, tgrid)?;
    let (fine, _) = run(&grid.refined(), &tgrid.refined())?;
    let floor = ZERO_FLOOR * scale;
    let ratio = if fine <= floor { f64::INFINITY } else { coarse / fine };
    let ratio_ok =
        (coarse <= floor && fine <= floor) || (ratio >= COUPLED_RATIO_BAND.0 && ratio <= COUPLED_RATIO_BAND.1);
    Ok(outcome(
        7,
        "coupled/reduced equivalence",
        coarse <= COUPLED_TOL * scale && ratio_ok && drift <= MASS_DRIFT_TOL * scale,
        format!("discrepancy {coarse:.3e} -> {fine:.3e} (ratio {ratio:.2}), mass drift {drift:.2e}/unit time"),
    ))
}

fn auxiliary(
    settings: &ValidationSettings,
    phi0: &ScalarField,
    u: &SpaceTimeField,
    scale: f64,
) -> Result<CriterionOutcome> {
    let eps = settings.epsilon;
    let samples = 10_000;
    let ys: Vec<f64> = (0..samples).map(|i| -3.0 + 6.0 * i as f64 / (samples - 1) as f64).collect();
    let step = PRIMITIVE_FD_STEP;
    let fd_err = ys
        .iter()
        .filter(|y| (y.abs() - eps).abs() > 2.0 * step)
        .map(|&y| {
            let d = (primitive_j(y + step, eps) - primitive_j(y - step, eps)) / (2.0 * step);
            (d - cutoff_t(y, eps)).abs()
        })
        .fold(0.0, f64::max);
    let cutoff_ok = ys.iter().all(|&y| {
        let t = cutoff_t(y, eps);
        t.abs() <= eps && y * t >= 0.0
    });
    let nu = settings.nu;
    let u_nu = time_regularize(u, phi0, nu)?;
    let residual = regularization_residual(&u_nu, u, nu)?;
    let gap = u_nu.max_abs_diff(u)?;
    let bound = nu * gap * u.tgrid().dt();
    let initial_exact = u_nu.level(0) == phi0.values();
    Ok(outcome(
        8,
        "auxiliary identities",
        fd_err <= PRIMITIVE_FD_TOL * scale && cutoff_ok && residual <= bound * scale && initial_exact,
        format!(
            "J' - T error {fd_err:.2e}, cutoff bounds {cutoff_ok}, u_nu residual {residual:.2e} <= {bound:.2e}, u_nu(0)=phi0 {initial_exact}"
        ),
    ))
}
