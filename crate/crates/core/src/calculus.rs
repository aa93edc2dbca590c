//! Finite differences, trapezoid quadrature and the norms built on them.

use crate::error::{invalid, Result};
use crate::field::{ScalarField, SpaceTimeField};

/// First derivative on a uniform mesh.
///
/// Central differences inside, second-order one-sided stencils at the two
/// endpoints. All three stencils are exact on quadratics.
pub fn derivative_values(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    debug_assert!(n >= 3);
    let mut out = vec![0.0; n];
    let c = 0.5 / h;
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) * c;
    }
    // differences first, so constants give exactly zero
    out[0] = (4.0 * (values[1] - values[0]) - (values[2] - values[0])) * c;
    out[n - 1] = (4.0 * (values[n - 1] - values[n - 2]) - (values[n - 1] - values[n - 3])) * c;
    out
}

pub fn derivative(field: &ScalarField) -> Result<ScalarField> {
    if field.len() < 3 {
        return Err(invalid("derivative needs at least 3 nodes"));
    }
    ScalarField::new(*field.grid(), derivative_values(field.values(), field.grid().h()))
}

/// Second derivative. Three-point at interior nodes; at the endpoints the
/// four-point one-sided stencil `(2f0 - 5f1 + 4f2 - f3)/h²`, which is exact on
/// cubics. Grids with fewer than four nodes get the interior stencil copied out.
pub fn second_derivative_values(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let h2 = h * h;
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / h2;
    }
    if n >= 4 {
        out[0] = (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / h2;
        out[n - 1] = (2.0 * values[n - 1] - 5.0 * values[n - 2] + 4.0 * values[n - 3] - values[n - 4]) / h2;
    } else {
        out[0] = out[1];
        out[n - 1] = out[n - 2];
    }
    out
}

pub fn second_derivative(field: &ScalarField) -> Result<ScalarField> {
    if field.len() < 3 {
        return Err(invalid("second derivative needs at least 3 nodes"));
    }
    ScalarField::new(*field.grid(), second_derivative_values(field.values(), field.grid().h()))
}

/// Composite trapezoid rule for uniformly spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// Running trapezoid sums: `out[i] = ∫_{x_0}^{x_i}`.
pub fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

pub fn integrate_space(field: &ScalarField) -> f64 {
    trapezoid(field.values(), field.grid().h())
}

/// Trapezoid in space, then trapezoid over the time levels.
pub fn integrate_spacetime(field: &SpaceTimeField) -> f64 {
    let h = field.grid().h();
    let per_level: Vec<f64> = field.levels().map(|row| trapezoid(row, h)).collect();
    trapezoid(&per_level, field.tgrid().dt())
}

/// `(∫∫ |u|^q)^{1/q}` over `Q_T`.
pub fn lq_norm(field: &SpaceTimeField, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(invalid(format!("Lebesgue exponent must be >= 1, got {q}")));
    }
    let powered = field.map(|_, _, v| v.abs().powf(q))?;
    Ok(integrate_spacetime(&powered).max(0.0).powf(1.0 / q))
}

/// Spatial `L^q(Ω)` norm of one level. Exponents below 1 give the usual
/// quasi-norm.
pub fn spatial_lq_norm(values: &[f64], h: f64, q: f64) -> f64 {
    let powered: Vec<f64> = values.iter().map(|v| v.abs().powf(q)).collect();
    trapezoid(&powered, h).max(0.0).powf(1.0 / q)
}

/// Tolerance for the zero-trace requirement of [`bochner_norm`].
pub const TRACE_TOL: f64 = 1e-10;

/// Norm of `L^{2l}(0,T; W_0^{1,2l}(Ω))`:
/// `(∫_0^T ‖u‖^{2l}_{L^{2l}} + ‖∂_x u‖^{2l}_{L^{2l}} dt)^{1/(2l)}`.
pub fn bochner_norm(field: &SpaceTimeField, l: u32) -> Result<f64> {
    if l == 0 {
        return Err(invalid("Sobolev exponent index l must be positive"));
    }
    let nx = field.grid().nx();
    let scale = field.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for (m, row) in field.levels().enumerate() {
        if row[0].abs() > TRACE_TOL * scale || row[nx - 1].abs() > TRACE_TOL * scale {
            return Err(invalid(format!("field does not vanish on the boundary at level {m}")));
        }
    }
    let p = 2 * l as i32;
    let h = field.grid().h();
    let per_level: Vec<f64> = field
        .levels()
        .map(|row| {
            let du = derivative_values(row, h);
            let integrand: Vec<f64> = row.iter().zip(&du).map(|(u, d)| u.powi(p) + d.powi(p)).collect();
            trapezoid(&integrand, h)
        })
        .collect();
    Ok(trapezoid(&per_level, field.tgrid().dt()).max(0.0).powf(1.0 / p as f64))
}
