//! Functionals whose boundedness (uniformly in `n`) the existence theory
//! relies on, plus the cut-off `T_ε`, its primitive `J_ε` and the exponential
//! time regularization `u_ν`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calculus::{derivative_values, integrate_spacetime, lq_norm, spatial_lq_norm, trapezoid};
use crate::error::{invalid, Error, Result};
use crate::field::{ScalarField, SpaceTimeField};
use crate::solver::{tilde_shift, SolveReport};
use crate::testfn::TestFunctionSpec;

/// Applies the spatial derivative level by level.
pub fn dx_field(u: &SpaceTimeField) -> Result<SpaceTimeField> {
    let h = u.grid().h();
    u.map_levels(|level| ScalarField::new(*level.grid(), derivative_values(level.values(), h)))
}

/// `‖x ∂_x(ũ²)‖_{L²(Q_T)}`.
pub fn energy_functional(u_tilde: &SpaceTimeField) -> Result<f64> {
    let sq = u_tilde.map(|_, _, v| v * v)?;
    let weighted = dx_field(&sq)?.map(|x, _, d| x * d)?;
    lq_norm(&weighted, 2.0)
}

/// `max_t ‖∂_x u(·,t)‖_{L^{2l}(Ω)}`.
pub fn sup_grad_norm(u: &SpaceTimeField, l: u32) -> Result<f64> {
    if l == 0 {
        return Err(invalid("l must be positive"));
    }
    let h = u.grid().h();
    let q = 2.0 * l as f64;
    Ok(u.levels().map(|row| spatial_lq_norm(&derivative_values(row, h), h, q)).fold(0.0, f64::max))
}

/// `‖∂_t(ũ²)‖_{L²(Q_T)}` with forward differences in time.
///
/// Each difference quotient is taken as constant on its step, so the time
/// integral is the rectangle sum over the `nt` intervals.
pub fn time_deriv_sq_norm(u_tilde: &SpaceTimeField) -> Result<f64> {
    let tgrid = u_tilde.tgrid();
    if tgrid.nt() < 2 {
        return Err(invalid("time derivative norm needs at least two steps"));
    }
    let h = u_tilde.grid().h();
    let dt = tgrid.dt();
    let rows: Vec<&[f64]> = u_tilde.levels().collect();
    let total: f64 = rows
        .windows(2)
        .map(|pair| {
            let sq: Vec<f64> = pair[0]
                .iter()
                .zip(pair[1])
                .map(|(a, b)| {
                    let d = (b * b - a * a) / dt;
                    d * d
                })
                .collect();
            dt * trapezoid(&sq, h)
        })
        .sum();
    Ok(total.sqrt())
}

/// `∫∫ x² ψ ũ^{-θ} |∂_x ũ|`.
pub fn weighted_power_functional(u_tilde: &SpaceTimeField, psi: &TestFunctionSpec, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(invalid(format!("theta must lie in (0, 1/2), got {theta}")));
    }
    if u_tilde.min() <= 0.0 {
        return Err(Error::Domain("weighted functional needs a strictly positive field".into()));
    }
    let (grid, tgrid) = (u_tilde.grid(), u_tilde.tgrid());
    psi.check_psi(grid, tgrid)?;
    let weight = psi.sample(grid, tgrid)?;
    let du = dx_field(u_tilde)?;
    let nx = grid.nx();
    let values: Vec<f64> = u_tilde
        .values()
        .iter()
        .zip(du.values())
        .zip(weight.values())
        .enumerate()
        .map(|(k, ((u, d), w))| {
            let x = grid.x(k % nx);
            x * x * w * u.powf(-theta) * d.abs()
        })
        .collect();
    Ok(integrate_spacetime(&SpaceTimeField::new(*grid, *tgrid, values)?))
}

/// Truncation `T_ε(y) = y` for `|y| < ε`, `sign(y) ε` otherwise.
pub fn cutoff_t(y: f64, epsilon: f64) -> f64 {
    if y.abs() < epsilon {
        y
    } else {
        epsilon.copysign(y)
    }
}

/// Nonnegative primitive of [`cutoff_t`] with `J_ε(0) = 0`.
pub fn primitive_j(y: f64, epsilon: f64) -> f64 {
    if y < -epsilon {
        -epsilon * y - 0.5 * epsilon * epsilon
    } else if y > epsilon {
        epsilon * y - 0.5 * epsilon * epsilon
    } else {
        0.5 * y * y
    }
}

/// `u_ν(t) = e^{-νt} φ₀ + ν ∫_0^t e^{-ν(t-s)} u(s) ds`, i.e. the solution of
/// `(1/ν) ∂_t u_ν + u_ν = u`, `u_ν(0) = φ₀`, integrated exactly with `u`
/// frozen at its left value on each step.
pub fn time_regularize(u: &SpaceTimeField, phi0: &ScalarField, nu: f64) -> Result<SpaceTimeField> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(invalid(format!("nu must be positive, got {nu}")));
    }
    crate::field::ensure_same_grid(u.grid(), phi0.grid())?;
    let tgrid = *u.tgrid();
    let decay = (-nu * tgrid.dt()).exp();
    let gain = -(-nu * tgrid.dt()).exp_m1();
    let mut values = Vec::with_capacity(u.values().len());
    values.extend_from_slice(phi0.values());
    let nx = u.grid().nx();
    for m in 0..tgrid.nt() {
        let prev = values[m * nx..(m + 1) * nx].to_vec();
        values.extend(prev.iter().zip(u.level(m)).map(|(r, s)| decay * r + gain * s));
    }
    SpaceTimeField::new(*u.grid(), tgrid, values)
}

/// `max |(1/ν)(u_ν^{m+1} − u_ν^m)/dt + u_ν^m − u^m|` over all nodes and steps.
pub fn regularization_residual(u_nu: &SpaceTimeField, u: &SpaceTimeField, nu: f64) -> Result<f64> {
    u_nu.ensure_same_mesh(u)?;
    let dt = u.tgrid().dt();
    let mut worst = 0.0f64;
    for m in 0..u.tgrid().nt() {
        for ((a, b), s) in u_nu.level(m).iter().zip(u_nu.level(m + 1)).zip(u.level(m)) {
            worst = worst.max(((b - a) / (nu * dt) + a - s).abs());
        }
    }
    Ok(worst)
}

/// `∫∫ [x² ũ_n (∂_x(ũ_n − u))²]^s`.
pub fn mixed_convergence_functional(u_tilde_n: &SpaceTimeField, u_ref: &SpaceTimeField, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid(format!("s must lie in (0, 1), got {s}")));
    }
    if u_tilde_n.min() <= 0.0 {
        return Err(Error::Domain("mixed functional needs a strictly positive shifted field".into()));
    }
    let diff = dx_field(&u_tilde_n.zip_with(u_ref, |a, b| a - b)?)?;
    let nx = u_tilde_n.grid().nx();
    let grid = *u_tilde_n.grid();
    let values: Vec<f64> = u_tilde_n
        .values()
        .iter()
        .zip(diff.values())
        .enumerate()
        .map(|(k, (u, d))| {
            let x = grid.x(k % nx);
            (x * x * u * d * d).powf(s)
        })
        .collect();
    Ok(integrate_spacetime(&SpaceTimeField::new(grid, *u_tilde_n.tgrid(), values)?))
}

/// Values of the monitored functionals for one regularization index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub n: u32,
    pub energy: f64,
    /// `l ↦ sup_t ‖∂_x u_n‖_{L^{2l}}`.
    pub grad_norms: BTreeMap<u32, f64>,
    pub time_deriv_sq: f64,
    pub weighted_power: f64,
}

impl EstimateReport {
    /// Every scalar the report carries, with a stable label.
    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut out = vec![("energy".to_string(), self.energy)];
        out.extend(self.grad_norms.iter().map(|(l, v)| (format!("grad_l{l}"), *v)));
        out.push(("time_deriv_sq".into(), self.time_deriv_sq));
        out.push(("weighted_power".into(), self.weighted_power));
        out
    }
}

pub fn estimate_report(
    report: &SolveReport,
    l_values: &[u32],
    theta: f64,
    psi: &TestFunctionSpec,
) -> Result<EstimateReport> {
    let u_tilde = tilde_shift(&report.solution, report.n)?;
    let grad_norms = l_values.iter().map(|&l| Ok((l, sup_grad_norm(&report.solution, l)?))).collect::<Result<_>>()?;
    Ok(EstimateReport {
        n: report.n,
        energy: energy_functional(&u_tilde)?,
        grad_norms,
        time_deriv_sq: time_deriv_sq_norm(&u_tilde)?,
        weighted_power: weighted_power_functional(&u_tilde, psi, theta)?,
    })
}

/// Ratio `max / min` of each functional across a sweep (`1` when all vanish,
/// infinite when only some do).
pub fn spread(reports: &[EstimateReport]) -> BTreeMap<String, f64> {
    let mut by_name: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in reports {
        for (k, v) in r.entries() {
            by_name.entry(k).or_default().push(v);
        }
    }
    by_name
        .into_iter()
        .map(|(k, vs)| {
            let hi = vs.iter().copied().fold(0.0, f64::max);
            let lo = vs.iter().copied().fold(f64::INFINITY, f64::min);
            let ratio = if hi == 0.0 {
                1.0
            } else if lo == 0.0 {
                f64::INFINITY
            } else {
                hi / lo
            };
            (k, ratio)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{SpatialGrid, TimeGrid};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn mesh(nx: usize, nt: usize) -> (SpatialGrid, TimeGrid) {
        (SpatialGrid::new(1.0, 2.0, nx).unwrap(), TimeGrid::new(1.0, nt).unwrap())
    }

    #[test]
    fn energy_examples() {
        let (g, t) = mesh(41, 10);
        let c = SpaceTimeField::from_fn(g, t, |_, _| 0.7).unwrap();
        assert_eq!(energy_functional(&c).unwrap(), 0.0);
        let root = SpaceTimeField::from_fn(g, t, |x, _| x.sqrt()).unwrap();
        // x · ∂_x(x) = x; ∫_1^2 x² = 7/3, trapezoid error h²/6 · [2x]_1^2
        assert_abs_diff_eq!(energy_functional(&root).unwrap(), (7.0f64 / 3.0).sqrt(), epsilon = 1e-4);
    }

    #[test]
    fn sup_grad_examples() {
        let (g, t) = mesh(41, 10);
        let lin = SpaceTimeField::from_fn(g, t, |x, _| x - 1.0).unwrap();
        for l in [1, 2, 4] {
            assert_abs_diff_eq!(sup_grad_norm(&lin, l).unwrap(), 1.0, epsilon = 1e-12);
        }
        let g3 = SpatialGrid::new(1.0, 4.0, 31).unwrap();
        let lin3 = SpaceTimeField::from_fn(g3, t, |x, _| x).unwrap();
        assert_abs_diff_eq!(sup_grad_norm(&lin3, 2).unwrap(), 3f64.powf(0.25), epsilon = 1e-12);
        let zero = SpaceTimeField::from_fn(g, t, |_, _| 0.0).unwrap();
        assert_eq!(sup_grad_norm(&zero, 1).unwrap(), 0.0);
    }

    #[test]
    fn time_derivative_examples() {
        let (g, t) = mesh(11, 10);
        let c = SpaceTimeField::from_fn(g, t, |x, _| x).unwrap();
        assert_eq!(time_deriv_sq_norm(&c).unwrap(), 0.0);
        let root = SpaceTimeField::from_fn(g, t, |_, t| t.sqrt()).unwrap();
        assert_abs_diff_eq!(time_deriv_sq_norm(&root).unwrap(), 1.0, epsilon = 1e-12);
        let (g, t1) = mesh(11, 1);
        let short = SpaceTimeField::from_fn(g, t1, |_, t| t).unwrap();
        assert!(time_deriv_sq_norm(&short).is_err());
    }

    #[test]
    fn weighted_power_examples() {
        let (g, t) = mesh(41, 20);
        let psi = TestFunctionSpec::CompactBump;
        let c = SpaceTimeField::from_fn(g, t, |_, _| 0.3).unwrap();
        assert_eq!(weighted_power_functional(&c, &psi, 0.25).unwrap(), 0.0);
        let u = SpaceTimeField::from_fn(g, t, |x, _| 0.1 + (x - 1.0) * (2.0 - x)).unwrap();
        assert!(weighted_power_functional(&u, &psi, 0.25).unwrap() > 0.0);
        assert!(weighted_power_functional(&u, &psi, 0.5).is_err());
        assert!(weighted_power_functional(&u, &TestFunctionSpec::PolyBump, 0.25).is_err());
        let z = SpaceTimeField::from_fn(g, t, |x, _| (x - 1.0) * (2.0 - x)).unwrap();
        assert!(matches!(weighted_power_functional(&z, &psi, 0.25), Err(Error::Domain(_))));
    }

    #[test]
    fn cutoff_and_primitive_examples() {
        assert_eq!(cutoff_t(0.3, 0.5), 0.3);
        assert_eq!(cutoff_t(2.0, 0.5), 0.5);
        assert_eq!(cutoff_t(-2.0, 0.5), -0.5);
        assert_abs_diff_eq!(primitive_j(0.3, 0.5), 0.045, epsilon = 1e-15);
        assert_abs_diff_eq!(primitive_j(2.0, 0.5), 0.875, epsilon = 1e-15);
        for y in -3..=3 {
            assert!(primitive_j(y as f64, 0.5) >= 0.0);
        }
    }

    #[test]
    fn time_regularization_examples() {
        let (g, t) = mesh(11, 50);
        let phi0 = ScalarField::constant(g, 0.4).unwrap();
        let c = SpaceTimeField::from_fn(g, t, |_, _| 0.4).unwrap();
        let r = time_regularize(&c, &phi0, 3.0).unwrap();
        assert!(r.max_abs_diff(&c).unwrap() < 1e-15);

        let one = SpaceTimeField::from_fn(g, t, |_, _| 1.0).unwrap();
        let r = time_regularize(&one, &ScalarField::zeros(g), 3.0).unwrap();
        for m in 0..t.levels() {
            let expected = 1.0 - (-3.0 * t.t(m)).exp();
            assert!((r.level(m)[4] - expected).abs() < 1e-13);
        }
        assert_eq!(r.level(0), ScalarField::zeros(g).values());
    }

    #[test]
    fn time_regularization_residual_is_first_order() {
        let g = SpatialGrid::new(1.0, 2.0, 11).unwrap();
        let res = |nt| {
            let t = TimeGrid::new(1.0, nt).unwrap();
            let u = SpaceTimeField::from_fn(g, t, |x, t| (3.0 * t).sin() * x).unwrap();
            let phi0 = ScalarField::zeros(g);
            let r = time_regularize(&u, &phi0, 5.0).unwrap();
            regularization_residual(&r, &u, 5.0).unwrap()
        };
        let (a, b) = (res(100), res(200));
        assert!((a / b - 2.0).abs() < 0.2, "{a} {b}");
    }

    #[test]
    fn mixed_functional_examples() {
        let (g, t) = mesh(41, 10);
        let u = SpaceTimeField::from_fn(g, t, |x, _| 0.5 + (x - 1.0) * (2.0 - x)).unwrap();
        assert_eq!(mixed_convergence_functional(&u, &u, 0.5).unwrap(), 0.0);
        let v = SpaceTimeField::from_fn(g, t, |x, _| 0.5 + 0.9 * (x - 1.0) * (2.0 - x)).unwrap();
        for s in [0.25, 0.5, 0.75] {
            let val = mixed_convergence_functional(&u, &v, s).unwrap();
            assert!(val.is_finite() && val > 0.0);
        }
        assert!(mixed_convergence_functional(&u, &v, 1.0).is_err());
    }

    #[test]
    fn spread_handles_zero_rows() {
        let r = |e: f64| EstimateReport {
            n: 1,
            energy: e,
            grad_norms: BTreeMap::new(),
            time_deriv_sq: 0.0,
            weighted_power: 1.0,
        };
        let s = spread(&[r(1.0), r(4.0)]);
        assert_eq!(s["energy"], 4.0);
        assert_eq!(s["time_deriv_sq"], 1.0);
        assert_eq!(s["weighted_power"], 1.0);
    }

    proptest! {
        #[test]
        fn cutoff_properties(y in -100.0f64..100.0, eps in 1e-3f64..10.0) {
            let t = cutoff_t(y, eps);
            prop_assert!(t.abs() <= eps);
            prop_assert!(y * t >= 0.0);
        }

        #[test]
        fn primitive_derivative_is_cutoff(y in -5.0f64..5.0, eps in 0.05f64..2.0) {
            let step = 1e-4;
            prop_assume!((y.abs() - eps).abs() > 2.0 * step);
            let d = (primitive_j(y + step, eps) - primitive_j(y - step, eps)) / (2.0 * step);
            prop_assert!((d - cutoff_t(y, eps)).abs() <= 1e-6);
        }

        #[test]
        fn homogeneity(c in 0.2f64..5.0) {
            let (g, t) = mesh(31, 12);
            let u = SpaceTimeField::from_fn(g, t, |x, t| 0.2 + (x - 1.0) * (2.0 - x) * (1.0 + t)).unwrap();
            let cu = u.map(|_, _, v| c * v).unwrap();
            let psi = TestFunctionSpec::CompactBump;
            let rel = |a: f64, b: f64| (a - b).abs() <= 1e-10 * b.abs().max(1e-300);
            prop_assert!(rel(energy_functional(&cu).unwrap(), c * c * energy_functional(&u).unwrap()));
            prop_assert!(rel(sup_grad_norm(&cu, 2).unwrap(), c * sup_grad_norm(&u, 2).unwrap()));
            prop_assert!(rel(time_deriv_sq_norm(&cu).unwrap(), c * c * time_deriv_sq_norm(&u).unwrap()));
            let theta = 0.25;
            prop_assert!(rel(
                weighted_power_functional(&cu, &psi, theta).unwrap(),
                c.powf(1.0 - theta) * weighted_power_functional(&u, &psi, theta).unwrap()
            ));
        }
    }
}
