//! Time stepping for the regularized problem and for the coupled kinetic system.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::calculus::{derivative_values, trapezoid};
use crate::error::{invalid, numerical, Error, Result};
use crate::field::{ScalarField, SpaceTimeField};
use crate::grid::TimeGrid;
use crate::kinetic::{KineticData, ProblemData};
use crate::tridiag::Tridiagonal;

/// Coefficient family `P_n(y) = max(y, 0) + 1/n`.
///
/// Bounded below by `1/n`, affine with slope one on `y ≥ 0`, nondecreasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularizationFamily {
    n: u32,
}

impl RegularizationFamily {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(invalid("regularization index n must be positive"));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn shift(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn evaluate(&self, y: f64) -> f64 {
        y.max(0.0) + self.shift()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Diffusion coefficient lagged, diffusion implicit, reaction explicit.
    #[default]
    SemiImplicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub scheme: Scheme,
    /// `dt` may not exceed `dt_safety / max(1, max|g₀|)`.
    pub dt_safety: f64,
    /// Slack below zero tolerated by the nonnegativity check.
    pub max_principle_tol: f64,
    /// Slack above `max φ₀ · exp(max|g₀| t)` tolerated by the upper bound check.
    pub upper_bound_tol: f64,
    /// Relative residual accepted from each tridiagonal solve.
    pub linear_solver_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::SemiImplicit,
            dt_safety: 1.0,
            max_principle_tol: 1e-10,
            upper_bound_tol: 1e-8,
            linear_solver_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(invalid(format!("dt_safety must lie in (0, 1], got {}", self.dt_safety)));
        }
        for (name, v) in [
            ("max_principle_tol", self.max_principle_tol),
            ("upper_bound_tol", self.upper_bound_tol),
            ("linear_solver_tol", self.linear_solver_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Largest admissible step for a source coefficient of sup-norm `g_max`.
    pub fn dt_limit(&self, g_max: f64) -> f64 {
        self.dt_safety / g_max.max(1.0)
    }
}

/// Trajectory of `u_n` together with the monitors collected along the way.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub n: u32,
    pub solution: SpaceTimeField,
    /// Both bounds `0 ≤ u_n ≤ max φ₀ · exp(max|g₀| t)` held at every node and level.
    pub max_principle_ok: bool,
    /// Largest violation of either bound (zero when none).
    pub max_principle_violation: f64,
    /// `min x² P_n(u_n)` over the trajectory.
    pub coercivity_min: f64,
    /// Lower bound `x_a² / (2n)` that the coercivity monitor is checked against.
    pub coercivity_bound: f64,
    pub wallclock: f64,
}

impl SolveReport {
    pub fn coercive(&self) -> bool {
        self.coercivity_min >= self.coercivity_bound
    }

    pub fn is_valid(&self) -> bool {
        self.max_principle_ok && self.coercive()
    }
}

fn check_nonnegative(values: &[f64], tol: f64, what: &str) -> Result<()> {
    match values.iter().enumerate().find(|(_, &v)| v < -tol) {
        Some((i, v)) => Err(numerical(format!("{what}: negative value {v:e} at node {i}"))),
        None => Ok(()),
    }
}

/// One step of the linearly implicit scheme
/// `(u⁺ − u)/dt = x² P_n(u) D²u⁺ + g₀ u` with homogeneous Dirichlet data.
pub fn step_sn(
    u_m: &ScalarField,
    problem: &ProblemData,
    reg: RegularizationFamily,
    dt: f64,
    config: &SolverConfig,
) -> Result<ScalarField> {
    let grid = problem.grid();
    crate::field::ensure_same_grid(u_m.grid(), grid)?;
    let u = u_m.values();
    let nx = grid.nx();
    let tol = config.max_principle_tol;
    check_nonnegative(u, tol, "step input")?;
    if u[0].abs() > tol || u[nx - 1].abs() > tol {
        return Err(invalid("step input must vanish on the boundary"));
    }
    let g0 = problem.g0().values();
    let g_neg = g0.iter().fold(0.0f64, |m, &g| m.max(-g));
    if dt * g_neg > 1.0 {
        return Err(invalid(format!("dt = {dt} too large for the reaction term (dt·max g₀⁻ > 1)")));
    }
    let h2 = grid.h() * grid.h();
    let interior = nx - 2;
    let mut a = Tridiagonal::with_size(interior);
    let mut rhs = vec![0.0; interior];
    for j in 0..interior {
        let i = j + 1;
        let x = grid.x(i);
        let r = dt * x * x * reg.evaluate(u[i]) / h2;
        a.lower[j] = -r;
        a.diag[j] = 1.0 + 2.0 * r;
        a.upper[j] = -r;
        rhs[j] = u[i] * (1.0 + dt * g0[i]);
    }
    let sol = a.solve_checked(&rhs, config.linear_solver_tol)?;
    let mut next = Vec::with_capacity(nx);
    next.push(0.0);
    next.extend(sol);
    next.push(0.0);
    check_nonnegative(&next, tol, "step output")?;
    ScalarField::new(*grid, next)
}

/// Solves the regularized problem on the whole time grid of `problem`.
pub fn solve_sn(problem: &ProblemData, reg: RegularizationFamily, config: &SolverConfig) -> Result<SolveReport> {
    solve_sn_cancellable(problem, reg, config, None)
}

pub fn solve_sn_cancellable(
    problem: &ProblemData,
    reg: RegularizationFamily,
    config: &SolverConfig,
    cancel: Option<&AtomicBool>,
) -> Result<SolveReport> {
    config.validate()?;
    let start = Instant::now();
    let grid = *problem.grid();
    let tgrid = *problem.tgrid();
    let g_max = problem.g0().max_abs();
    let dt = tgrid.dt();
    if dt > config.dt_limit(g_max) * (1.0 + 1e-12) {
        return Err(invalid(format!(
            "time step {dt} exceeds the guard {} (dt_safety / max(1, max|g0|)); increase nt",
            config.dt_limit(g_max)
        )));
    }
    let phi_max = problem.phi0().max().max(0.0);
    let mut violation = 0.0f64;
    let mut coercivity_min = f64::INFINITY;
    let mut monitor = |m: usize, u: &[f64]| {
        let upper = phi_max * (g_max * tgrid.t(m)).exp();
        for (i, &v) in u.iter().enumerate() {
            if v < 0.0 {
                violation = violation.max(-v - config.max_principle_tol);
            }
            if v > upper {
                violation = violation.max(v - upper - config.upper_bound_tol);
            }
            let x = grid.x(i);
            coercivity_min = coercivity_min.min(x * x * reg.evaluate(v));
        }
    };
    let mut levels = Vec::with_capacity(tgrid.levels());
    monitor(0, problem.phi0().values());
    levels.push(problem.phi0().clone());
    for m in 1..tgrid.levels() {
        if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            return Err(Error::Cancelled);
        }
        let next = step_sn(&levels[m - 1], problem, reg, dt, config)
            .map_err(|e| numerical(format!("n = {}, step {m}: {e}", reg.n())))?;
        monitor(m, next.values());
        levels.push(next);
    }
    let solution = SpaceTimeField::from_levels(tgrid, &levels)?.with_boundary(0.0)?;
    let x_a = grid.x_a();
    Ok(SolveReport {
        n: reg.n(),
        solution,
        max_principle_ok: violation <= 0.0,
        max_principle_violation: violation.max(0.0),
        coercivity_min,
        coercivity_bound: x_a * x_a / (2.0 * reg.n() as f64),
        wallclock: start.elapsed().as_secs_f64(),
    })
}

/// `ũ_n = u_n + 1/n`; the boundary value becomes exactly `1/n`.
pub fn tilde_shift(u_n: &SpaceTimeField, n: u32) -> Result<SpaceTimeField> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    check_nonnegative(u_n.values(), 1e-10, "tilde_shift input")?;
    let shift = 1.0 / n as f64;
    let nx = u_n.grid().nx();
    let shifted = u_n.map(|_, _, v| v + shift)?;
    // pin the boundary columns so the declared trace is exact
    let mut values = shifted.values().to_vec();
    for m in 0..u_n.tgrid().levels() {
        values[m * nx] = shift;
        values[m * nx + nx - 1] = shift;
    }
    SpaceTimeField::new(*u_n.grid(), *u_n.tgrid(), values)?.with_boundary(shift)
}

/// Values of `w` between this and zero are rounded to zero; anything more
/// negative aborts the coupled solve.
pub const W_CLIP: f64 = 1e-14;

/// Trajectories of the coupled particle-wave system.
#[derive(Debug, Clone)]
pub struct CoupledSolution {
    pub f: SpaceTimeField,
    pub w: SpaceTimeField,
}

/// Steps `∂_t f = ∂_p(p² w ∂_p f)`, `∂_t w = p² w ∂_p f`.
///
/// `f` is advanced implicitly in conservative flux form on the dual cells
/// (half cells at the two ends), with the diffusivity `p² w` frozen at the
/// old level. The flux vanishes at both ends because `w` does. `w` is then
/// updated multiplicatively with the new `∂_p f`.
pub fn solve_coupled(kin: &KineticData, tgrid: TimeGrid, config: &SolverConfig) -> Result<CoupledSolution> {
    config.validate()?;
    let grid = *kin.pgrid();
    let nx = grid.nx();
    let h = grid.h();
    let dt = tgrid.dt();
    let volumes: Vec<f64> = (0..nx).map(|i| if i == 0 || i == nx - 1 { 0.5 * h } else { h }).collect();

    let mut f_levels = vec![kin.f0().clone()];
    let mut w_levels = vec![kin.w0().clone()];
    let mut f = kin.f0().values().to_vec();
    let mut w = kin.w0().values().to_vec();
    for m in 1..tgrid.levels() {
        // interface diffusivities p²w at i+1/2
        let face: Vec<f64> = (0..nx - 1)
            .map(|i| {
                let p = 0.5 * (grid.x(i) + grid.x(i + 1));
                p * p * 0.5 * (w[i] + w[i + 1])
            })
            .collect();
        let mut a = Tridiagonal::with_size(nx);
        for i in 0..nx {
            let left = if i > 0 { face[i - 1] } else { 0.0 };
            let right = if i + 1 < nx { face[i] } else { 0.0 };
            let c = dt / (volumes[i] * h);
            a.lower[i] = -c * left;
            a.upper[i] = -c * right;
            a.diag[i] = 1.0 + c * (left + right);
        }
        f = a.solve_checked(&f, config.linear_solver_tol)?;
        let df = derivative_values(&f, h);
        for i in 0..nx {
            let p = grid.x(i);
            let next = w[i] * (1.0 + dt * p * p * df[i]);
            w[i] = if next >= 0.0 {
                next
            } else if next >= -W_CLIP {
                0.0
            } else {
                return Err(numerical(format!("wave energy turned negative ({next:e}) at node {i}, step {m}")));
            };
        }
        f_levels.push(ScalarField::new(grid, f.clone())?);
        w_levels.push(ScalarField::new(grid, w.clone())?);
    }
    Ok(CoupledSolution {
        f: SpaceTimeField::from_levels(tgrid, &f_levels)?,
        w: SpaceTimeField::from_levels(tgrid, &w_levels)?,
    })
}

/// `∫_Ω f dp` per level (trapezoid, which is also the conserved dual-cell sum).
pub fn mass_history(f: &SpaceTimeField) -> Vec<f64> {
    let h = f.grid().h();
    f.levels().map(|row| trapezoid(row, h)).collect()
}
