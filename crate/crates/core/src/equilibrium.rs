//! Stationary states of the reduced problem.
//!
//! Integrating `x² ∂²M + g₀ = 0` twice with `g₀ = x² ∂_x(f₀ − ∂_x u₀)` and
//! imposing `M − u₀ = 0` at both endpoints gives
//!
//! ```text
//! M(x) = u₀(x) + [ F(x_b)·(x − x_a) − F(x)·(x_b − x_a) ] / (x_b − x_a),
//! F(x) = ∫_{x_a}^{x} f₀.
//! ```

use serde::Serialize;

use crate::calculus::{cumulative_trapezoid, second_derivative_values};
use crate::error::{invalid, Result};
use crate::field::{ensure_same_grid, ScalarField};
use crate::kinetic::build_g0;

pub fn equilibrium_m(u0: &ScalarField, f0: &ScalarField) -> Result<ScalarField> {
    ensure_same_grid(u0.grid(), f0.grid())?;
    let grid = u0.grid();
    let len = grid.length();
    let running = cumulative_trapezoid(f0.values(), grid.h());
    let total = *running.last().unwrap();
    let values = u0
        .values()
        .iter()
        .zip(&running)
        .enumerate()
        .map(|(i, (u, partial))| u + (total * (grid.x(i) - grid.x_a()) - partial * len) / len)
        .collect();
    ScalarField::new(*grid, values)
}

pub fn positive_part(m: &ScalarField) -> ScalarField {
    m.map(|_, v| v.max(0.0)).expect("clipping keeps values finite")
}

/// `x² u D²u + g₀ u` at every node; endpoints report zero.
pub fn pointwise_stationarity(u_inf: &ScalarField, g0: &ScalarField) -> Result<Vec<f64>> {
    ensure_same_grid(u_inf.grid(), g0.grid())?;
    let grid = u_inf.grid();
    let u = u_inf.values();
    let n = u.len();
    let scale = u_inf.max_abs().max(1.0);
    if u[0].abs() > 1e-12 * scale || u[n - 1].abs() > 1e-12 * scale {
        return Err(invalid("stationary profile must vanish at both endpoints"));
    }
    let d2 = second_derivative_values(u, grid.h());
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let x = grid.x(i);
        out[i] = x * x * u[i] * d2[i] + g0.values()[i] * u[i];
    }
    Ok(out)
}

/// `max_interior |x² u D²u + g₀ u|`.
pub fn stationarity_residual(u_inf: &ScalarField, g0: &ScalarField) -> Result<f64> {
    Ok(pointwise_stationarity(u_inf, g0)?.iter().fold(0.0, |m, v| m.max(v.abs())))
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumResult {
    #[serde(skip)]
    pub m: ScalarField,
    #[serde(skip)]
    pub m_plus: ScalarField,
    /// `M > 0` at every interior node.
    pub positive_everywhere: bool,
    /// Residual of `M⁺` over all interior nodes.
    pub residual_inf: f64,
    /// Residual of `M⁺` restricted to nodes whose whole stencil lies in `{M > 0}`.
    pub residual_on_support: f64,
    /// Interior nodes where `M ≤ 0`.
    pub nonpositive_nodes: usize,
}

/// Equilibrium for kinetic data `(u₀, f₀)`, with `g₀` built from the same pair.
pub fn compute(u0: &ScalarField, f0: &ScalarField) -> Result<EquilibriumResult> {
    let m = equilibrium_m(u0, f0)?;
    let m_plus = positive_part(&m);
    let g0 = build_g0(f0, u0)?;
    let pointwise = pointwise_stationarity(&m_plus, &g0)?;
    let v = m.values();
    let n = v.len();
    let nonpositive_nodes = v[1..n - 1].iter().filter(|&&x| x <= 0.0).count();
    let residual_inf = pointwise.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    let residual_on_support = (1..n - 1)
        .filter(|&i| v[i] > 0.0 && (i == 1 || v[i - 1] > 0.0) && (i == n - 2 || v[i + 1] > 0.0))
        .fold(0.0f64, |a, i| a.max(pointwise[i].abs()));
    Ok(EquilibriumResult {
        m,
        m_plus,
        positive_everywhere: nonpositive_nodes == 0,
        residual_inf,
        residual_on_support,
        nonpositive_nodes,
    })
}
