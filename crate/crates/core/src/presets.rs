//! Ready-made data sets on arbitrary grids.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::ScalarField;
use crate::grid::{SpatialGrid, TimeGrid};
use crate::kinetic::{build_g0, KineticData, ProblemData};

/// `A · ((x − x_a)(x_b − x))³`, scaled so its maximum is `A`. Value, slope and
/// curvature all vanish at both ends.
pub fn cubic_bump(grid: &SpatialGrid, amplitude: f64) -> Result<ScalarField> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(invalid(format!("amplitude must be nonnegative, got {amplitude}")));
    }
    let (a, b) = (grid.x_a(), grid.x_b());
    let peak = (0.25 * (b - a) * (b - a)).powi(3);
    ScalarField::from_fn(*grid, |x| {
        let s = ((x - a) * (b - x)).max(0.0);
        amplitude * s * s * s / peak
    })
}

/// Maxwellian tail plus a drifting Gaussian beam, in normalized momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpOnTail {
    /// Peak of the initial wave profile `w₀ = φ₀`.
    pub amplitude: f64,
    /// Beam drift momentum.
    pub center: f64,
    /// Beam thermal spread.
    pub width: f64,
    /// Fraction of the density carried by the beam.
    pub bump_density: f64,
}

impl Default for BumpOnTail {
    fn default() -> Self {
        Self { amplitude: 1.0, center: 1.5, width: 0.1, bump_density: 0.1 }
    }
}

impl BumpOnTail {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) {
            return Err(invalid("bump width must be positive"));
        }
        if !(0.0..=1.0).contains(&self.bump_density) {
            return Err(invalid("bump_density must lie in [0, 1]"));
        }
        if !self.center.is_finite() {
            return Err(invalid("bump center must be finite"));
        }
        Ok(())
    }

    pub fn f0(&self, grid: &SpatialGrid) -> Result<ScalarField> {
        self.validate()?;
        let norm = (2.0 * std::f64::consts::PI).sqrt();
        let beta = self.bump_density;
        ScalarField::from_fn(*grid, |p| {
            let core = (-0.5 * p * p).exp() / norm;
            let z = (p - self.center) / self.width;
            let beam = (-0.5 * z * z).exp() / (norm * self.width);
            (1.0 - beta) * core + beta * beam
        })
    }

    pub fn kinetic(&self, grid: &SpatialGrid) -> Result<KineticData> {
        KineticData::from_w0(self.f0(grid)?, cubic_bump(grid, self.amplitude)?)
    }
}

/// Named data sets understood by the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "preset")]
pub enum Preset {
    /// `φ₀ = 0`, `g₀ = 0`.
    Zero,
    BumpOnTail(BumpOnTail),
    /// `f₀(s) = s`, `u₀ = 0`: positive equilibrium `(x − x_a)(x_b − x)/2`, used as `φ₀`.
    LinearEquilibrium,
}

impl Preset {
    /// `(u₀, f₀)` in the sense of the equilibrium formula (`u₀` is the wave profile `w₀`).
    pub fn kinetic_pair(&self, grid: &SpatialGrid) -> Result<(ScalarField, ScalarField)> {
        match self {
            Preset::Zero => Ok((ScalarField::zeros(*grid), ScalarField::zeros(*grid))),
            Preset::BumpOnTail(b) => Ok((cubic_bump(grid, b.amplitude)?, b.f0(grid)?)),
            Preset::LinearEquilibrium => Ok((ScalarField::zeros(*grid), ScalarField::from_fn(*grid, |s| s)?)),
        }
    }

    pub fn problem(&self, grid: &SpatialGrid, tgrid: TimeGrid) -> Result<ProblemData> {
        let (u0, f0) = self.kinetic_pair(grid)?;
        let g0 = build_g0(&f0, &u0)?;
        match self {
            Preset::LinearEquilibrium => {
                let m = crate::equilibrium::equilibrium_m(&u0, &f0)?;
                ProblemData::new_relaxed(tgrid, m, g0)
            }
            _ => ProblemData::new(tgrid, u0, g0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Zero => "zero",
            Preset::BumpOnTail(_) => "bump_on_tail",
            Preset::LinearEquilibrium => "linear_equilibrium",
        }
    }
}
