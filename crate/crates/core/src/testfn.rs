//! Analytic test functions on `Q_T`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::SpaceTimeField;
use crate::grid::{SpatialGrid, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TestFunctionSpec {
    /// `(x − x_a)² (x_b − x)² (T − t)`.
    PolyBump,
    /// `sin(k π (x − x_a)/(x_b − x_a)) · (T − t)`. Integer modes vanish on `∂Ω`.
    SineBump { mode: f64 },
    /// `((x − x_a)(x_b − x))² (t (T − t))²`, normalized to unit maximum.
    /// Nonnegative and vanishing on the whole boundary of `Q_T`.
    CompactBump,
}

/// Value and first partial derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub dx: f64,
    pub dt: f64,
}

impl TestFunctionSpec {
    /// Weak-form test functions used by default: the polynomial bump and the
    /// first three sine modes.
    pub fn eta_library() -> Vec<Self> {
        vec![Self::PolyBump, Self::SineBump { mode: 1.0 }, Self::SineBump { mode: 2.0 }, Self::SineBump { mode: 3.0 }]
    }

    pub fn name(&self) -> String {
        match self {
            Self::PolyBump => "poly_bump".into(),
            Self::SineBump { mode } => format!("sine_bump_k{mode}"),
            Self::CompactBump => "compact_bump".into(),
        }
    }

    pub fn jet(&self, x: f64, t: f64, grid: &SpatialGrid, horizon: f64) -> Jet {
        let (a, b) = (grid.x_a(), grid.x_b());
        match *self {
            Self::PolyBump => {
                let p = (x - a) * (x - a) * (b - x) * (b - x);
                let dp = 2.0 * (x - a) * (b - x) * ((b - x) - (x - a));
                Jet { value: p * (horizon - t), dx: dp * (horizon - t), dt: -p }
            }
            Self::SineBump { mode } => {
                let w = mode * PI / (b - a);
                let s = (w * (x - a)).sin();
                let c = (w * (x - a)).cos();
                Jet { value: s * (horizon - t), dx: w * c * (horizon - t), dt: -s }
            }
            Self::CompactBump => {
                let half = 0.5 * (b - a);
                let norm = half.powi(4) * (0.5 * horizon).powi(4);
                let sx = (x - a) * (b - x);
                let st = t * (horizon - t);
                let dsx = (b - x) - (x - a);
                let dst = horizon - 2.0 * t;
                Jet {
                    value: sx * sx * st * st / norm,
                    dx: 2.0 * sx * dsx * st * st / norm,
                    dt: 2.0 * st * dst * sx * sx / norm,
                }
            }
        }
    }

    fn sample_with(&self, grid: &SpatialGrid, tgrid: &TimeGrid, pick: impl Fn(Jet) -> f64) -> Result<SpaceTimeField> {
        let horizon = tgrid.horizon();
        SpaceTimeField::from_fn(*grid, *tgrid, |x, t| pick(self.jet(x, t, grid, horizon)))
    }

    pub fn sample(&self, grid: &SpatialGrid, tgrid: &TimeGrid) -> Result<SpaceTimeField> {
        self.sample_with(grid, tgrid, |j| j.value)
    }

    pub fn sample_dx(&self, grid: &SpatialGrid, tgrid: &TimeGrid) -> Result<SpaceTimeField> {
        self.sample_with(grid, tgrid, |j| j.dx)
    }

    pub fn sample_dt(&self, grid: &SpatialGrid, tgrid: &TimeGrid) -> Result<SpaceTimeField> {
        self.sample_with(grid, tgrid, |j| j.dt)
    }

    /// Checks the weak-form contract: zero on `∂Ω × [0,T]` and at `t = T`.
    pub fn check_eta(&self, grid: &SpatialGrid, tgrid: &TimeGrid) -> Result<()> {
        let field = self.sample(grid, tgrid)?;
        let scale = field.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-12 * scale;
        let nx = grid.nx();
        for (m, row) in field.levels().enumerate() {
            if row[0].abs() > tol || row[nx - 1].abs() > tol {
                return Err(invalid(format!("{} does not vanish on the boundary (level {m})", self.name())));
            }
        }
        if field.level(tgrid.nt()).iter().any(|v| v.abs() > tol) {
            return Err(invalid(format!("{} does not vanish at the final time", self.name())));
        }
        Ok(())
    }

    /// Checks a weight: nonnegative, vanishing on the whole parabolic boundary
    /// including `t = 0` and `t = T`.
    pub fn check_psi(&self, grid: &SpatialGrid, tgrid: &TimeGrid) -> Result<()> {
        self.check_eta(grid, tgrid)?;
        let field = self.sample(grid, tgrid)?;
        if field.min() < 0.0 {
            return Err(invalid(format!("{} takes negative values", self.name())));
        }
        let scale = field.max().max(1.0);
        if field.level(0).iter().any(|v| v.abs() > 1e-12 * scale) {
            return Err(invalid(format!("{} is not compactly supported in time", self.name())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mesh() -> (SpatialGrid, TimeGrid) {
        (SpatialGrid::new(1.0, 2.0, 41).unwrap(), TimeGrid::new(0.5, 20).unwrap())
    }

    #[test]
    fn library_satisfies_weak_form_contract() {
        let (g, t) = mesh();
        for eta in TestFunctionSpec::eta_library() {
            eta.check_eta(&g, &t).unwrap();
        }
        assert!(TestFunctionSpec::SineBump { mode: 1.5 }.check_eta(&g, &t).is_err());
    }

    #[test]
    fn compact_bump_is_a_weight() {
        let (g, t) = mesh();
        let psi = TestFunctionSpec::CompactBump;
        psi.check_psi(&g, &t).unwrap();
        let s = psi.sample(&g, &t).unwrap();
        assert!((s.max() - 1.0).abs() < 1e-12);
        assert!(TestFunctionSpec::PolyBump.check_psi(&g, &t).is_err());
        assert!(TestFunctionSpec::SineBump { mode: 2.0 }.check_psi(&g, &t).is_err());
    }

    #[test]
    fn jets_match_finite_differences() {
        let (g, _) = mesh();
        let eps = 1e-6;
        for spec in
            [TestFunctionSpec::PolyBump, TestFunctionSpec::SineBump { mode: 3.0 }, TestFunctionSpec::CompactBump]
        {
            for &(x, t) in &[(1.2, 0.1), (1.7, 0.33)] {
                let j = spec.jet(x, t, &g, 0.5);
                let fx = (spec.jet(x + eps, t, &g, 0.5).value - spec.jet(x - eps, t, &g, 0.5).value) / (2.0 * eps);
                let ft = (spec.jet(x, t + eps, &g, 0.5).value - spec.jet(x, t - eps, &g, 0.5).value) / (2.0 * eps);
                assert!((j.dx - fx).abs() < 1e-6, "{spec:?}");
                assert!((j.dt - ft).abs() < 1e-6, "{spec:?}");
            }
        }
    }
}
