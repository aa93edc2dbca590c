//! Passage between the kinetic pair `(f, W)` and the reduced unknown `w`.
//!
//! Under the resonance `p = 1/k`, the wave energy `W(k)` is carried on the
//! momentum axis by `w(p) = p⁻³ W(1/p)`. The particle density is recovered from
//! `w` through `f = ∂_p(w − w₀) + f₀`, and the reduced equation carries the
//! source coefficient `g₀ = p² ∂_p(f₀ − ∂_p w₀)`.

use crate::calculus::{derivative, derivative_values, second_derivative_values};
use crate::error::{invalid, Error, Result};
use crate::field::{ensure_same_grid, ScalarField, SpaceTimeField};
use crate::grid::{SpatialGrid, TimeGrid};
use crate::interp::MonotoneCubic;

/// Relative tolerance used to decide that a wavenumber node sits exactly on a
/// resonant image `1/p_i`.
const NODE_MATCH_TOL: f64 = 1e-13;

/// Samples of the wave spectral energy density on an increasing wavenumber axis.
///
/// The axis need not be uniform: the natural choice is the image `{1/p_i}` of
/// the momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    k: Vec<f64>,
    energy: Vec<f64>,
}

impl Spectrum {
    pub fn new(k: Vec<f64>, energy: Vec<f64>) -> Result<Self> {
        if k.len() != energy.len() || k.len() < 2 {
            return Err(invalid("spectrum needs at least two (k, W) samples"));
        }
        if k[0] <= 0.0 || k.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("wavenumbers must be positive and strictly increasing"));
        }
        if let Some(i) = energy.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite spectral energy at index {i}")));
        }
        if let Some(i) = energy.iter().position(|&v| v < 0.0) {
            return Err(Error::Domain(format!("spectral energy must be nonnegative, W[{i}] = {}", energy[i])));
        }
        Ok(Self { k, energy })
    }

    /// Spectrum sampled on a uniform wavenumber grid.
    pub fn from_field(field: &ScalarField) -> Result<Self> {
        Self::new(field.grid().nodes(), field.values().to_vec())
    }

    /// Samples `W` on the resonant images `1/p_i` of a momentum grid.
    pub fn resonant(pgrid: &SpatialGrid, energy: impl Fn(f64) -> f64) -> Result<Self> {
        let k = resonant_wavenumbers(pgrid);
        let e = k.iter().map(|&k| energy(k)).collect();
        Self::new(k, e)
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn energy(&self) -> &[f64] {
        &self.energy
    }
}

/// `{1/p_i}` in increasing order.
pub fn resonant_wavenumbers(pgrid: &SpatialGrid) -> Vec<f64> {
    (0..pgrid.nx()).rev().map(|i| 1.0 / pgrid.x(i)).collect()
}

fn lookup(nodes: &[f64], values: &[f64], at: f64, interp: &mut Option<MonotoneCubic>) -> Result<f64> {
    let idx = nodes.partition_point(|&k| k < at);
    for j in [idx.wrapping_sub(1), idx] {
        if let Some(&kj) = nodes.get(j) {
            if (kj - at).abs() <= NODE_MATCH_TOL * at.abs() {
                return Ok(values[j]);
            }
        }
    }
    if interp.is_none() {
        *interp = Some(MonotoneCubic::new(nodes.to_vec(), values.to_vec())?);
    }
    interp.as_ref().unwrap().eval(at)
}

/// `w₀(p) = p⁻³ W₀(1/p)` on the momentum grid.
///
/// Spectrum nodes that coincide with `1/p_i` are used directly; other
/// wavenumbers go through monotone cubic interpolation, which keeps `w₀ ≥ 0`.
pub fn build_w0(spectrum: &Spectrum, pgrid: &SpatialGrid) -> Result<ScalarField> {
    let (k_lo, k_hi) = (spectrum.k[0], *spectrum.k.last().unwrap());
    let (need_lo, need_hi) = (1.0 / pgrid.x_b(), 1.0 / pgrid.x_a());
    let slack = NODE_MATCH_TOL * need_hi;
    if k_lo > need_lo + slack || k_hi < need_hi - slack {
        return Err(Error::Domain(format!("wavenumber grid [{k_lo}, {k_hi}] does not cover [{need_lo}, {need_hi}]")));
    }
    let mut interp = None;
    let values = (0..pgrid.nx())
        .map(|i| {
            let p = pgrid.x(i);
            let energy = lookup(&spectrum.k, &spectrum.energy, 1.0 / p, &mut interp)?;
            Ok(energy.max(0.0) / (p * p * p))
        })
        .collect::<Result<Vec<_>>>()?;
    ScalarField::new(*pgrid, values)
}

/// Inverse map on the resonant wavenumbers: `W(k) = k⁻³ w(1/k)`.
#[allow(non_snake_case)]
pub fn reconstruct_W(w: &ScalarField) -> Result<Spectrum> {
    let grid = w.grid();
    let k = resonant_wavenumbers(grid);
    let energy = k.iter().zip((0..grid.nx()).rev()).map(|(&k, i)| w.values()[i] / (k * k * k)).collect();
    Spectrum::new(k, energy)
}

/// Inverse map onto a user-chosen uniform wavenumber grid, interpolating `w`
/// in momentum.
#[allow(non_snake_case)]
pub fn reconstruct_W_on(w: &ScalarField, kgrid: &SpatialGrid) -> Result<ScalarField> {
    let interp = MonotoneCubic::new(w.grid().nodes(), w.values().to_vec())?;
    let values = (0..kgrid.nx())
        .map(|j| {
            let k = kgrid.x(j);
            Ok(interp.eval(1.0 / k)? / (k * k * k))
        })
        .collect::<Result<Vec<_>>>()?;
    ScalarField::new(*kgrid, values)
}

/// `g₀ = p² ∂_p(f₀ − ∂_p w₀)`.
pub fn build_g0(f0: &ScalarField, w0: &ScalarField) -> Result<ScalarField> {
    let dw0 = derivative(w0)?;
    let inner = f0.zip_with(&dw0, |f, dw| f - dw)?;
    derivative(&inner)?.map(|p, v| p * p * v)
}

/// `f(·,t) = ∂_p(w(·,t) − w₀) + f₀` at every level.
pub fn reconstruct_f(w: &SpaceTimeField, w0: &ScalarField, f0: &ScalarField) -> Result<SpaceTimeField> {
    ensure_same_grid(w.grid(), w0.grid())?;
    ensure_same_grid(w.grid(), f0.grid())?;
    let h = w.grid().h();
    w.map_levels(|level| {
        let diff: Vec<f64> = level.values().iter().zip(w0.values()).map(|(a, b)| a - b).collect();
        let d = derivative_values(&diff, h);
        ScalarField::new(*level.grid(), d.iter().zip(f0.values()).map(|(a, b)| a + b).collect())
    })
}

/// Vanishing tolerance for `w₀` and `φ₀` at the endpoints, relative to their maximum.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Allowed endpoint curvature of `φ₀`, relative to its interior maximum.
///
/// The one-sided stencil carries an `O(h²) ∂⁴φ₀` error, so this is a coarse
/// screen: it separates profiles flat to second order (ratio → 0 under
/// refinement) from ones with genuine boundary curvature (ratio ≈ 1).
pub const COMPAT_TOL: f64 = 0.5;

fn vanishes_at_ends(field: &ScalarField) -> bool {
    let v = field.values();
    let scale = field.max_abs().max(1.0);
    v[0].abs() <= SUPPORT_TOL * scale && v[v.len() - 1].abs() <= SUPPORT_TOL * scale
}

/// Kinetic data `(f₀, W₀)` together with the derived `w₀` and `g₀`.
#[derive(Debug, Clone)]
pub struct KineticData {
    f0: ScalarField,
    spectrum: Spectrum,
    w0: ScalarField,
    g0: ScalarField,
}

impl KineticData {
    pub fn new(f0: ScalarField, spectrum: Spectrum) -> Result<Self> {
        let w0 = build_w0(&spectrum, f0.grid())?;
        Self::assemble(f0, spectrum, w0)
    }

    /// Builds from a momentum-space wave profile `w₀`; `W₀` is recovered on
    /// the resonant wavenumbers.
    pub fn from_w0(f0: ScalarField, w0: ScalarField) -> Result<Self> {
        ensure_same_grid(f0.grid(), w0.grid())?;
        if w0.min() < 0.0 {
            return Err(Error::Domain("w0 must be nonnegative".into()));
        }
        let spectrum = reconstruct_W(&w0)?;
        Self::assemble(f0, spectrum, w0)
    }

    fn assemble(f0: ScalarField, spectrum: Spectrum, w0: ScalarField) -> Result<Self> {
        if !vanishes_at_ends(&w0) {
            return Err(invalid("w0 must vanish at both ends of the momentum interval"));
        }
        let g0 = build_g0(&f0, &w0)?;
        Ok(Self { f0, spectrum, w0, g0 })
    }

    pub fn pgrid(&self) -> &SpatialGrid {
        self.f0.grid()
    }

    pub fn f0(&self) -> &ScalarField {
        &self.f0
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn w0(&self) -> &ScalarField {
        &self.w0
    }

    pub fn g0(&self) -> &ScalarField {
        &self.g0
    }

    /// Reduced problem with `φ₀ = w₀`.
    pub fn reduced_problem(&self, tgrid: TimeGrid) -> Result<ProblemData> {
        ProblemData::new(tgrid, self.w0.clone(), self.g0.clone())
    }
}

/// Data of the reduced initial-boundary value problem on `Q_T`.
#[derive(Debug, Clone)]
pub struct ProblemData {
    grid: SpatialGrid,
    tgrid: TimeGrid,
    phi0: ScalarField,
    g0: ScalarField,
}

impl ProblemData {
    /// Validates `φ₀ ≥ 0`, `φ₀ = 0` and `∂²φ₀ ≈ 0` at both endpoints.
    pub fn new(tgrid: TimeGrid, phi0: ScalarField, g0: ScalarField) -> Result<Self> {
        let data = Self::new_relaxed(tgrid, phi0, g0)?;
        let (left, right, scale) = data.endpoint_curvature();
        if left.abs() > COMPAT_TOL * scale || right.abs() > COMPAT_TOL * scale {
            return Err(invalid(format!(
                "phi0 must have vanishing curvature at the endpoints (got {left:.3e}, {right:.3e})"
            )));
        }
        Ok(data)
    }

    /// As [`ProblemData::new`] but without the endpoint-curvature condition.
    /// Needed for stationary profiles such as positive equilibria, whose
    /// curvature does not vanish at the boundary.
    pub fn new_relaxed(tgrid: TimeGrid, phi0: ScalarField, g0: ScalarField) -> Result<Self> {
        ensure_same_grid(phi0.grid(), g0.grid())?;
        if phi0.min() < 0.0 {
            return Err(Error::Domain(format!("phi0 must be nonnegative, min is {}", phi0.min())));
        }
        if !vanishes_at_ends(&phi0) {
            return Err(invalid("phi0 must vanish at both endpoints"));
        }
        Ok(Self { grid: *phi0.grid(), tgrid, phi0, g0 })
    }

    /// Endpoint second derivatives of `φ₀` and the interior curvature scale.
    pub fn endpoint_curvature(&self) -> (f64, f64, f64) {
        let d2 = second_derivative_values(self.phi0.values(), self.grid.h());
        let n = d2.len();
        let scale = d2[1..n - 1].iter().fold(1.0f64, |m, v| m.max(v.abs()));
        (d2[0], d2[n - 1], scale)
    }

    pub fn is_compatible(&self) -> bool {
        let (l, r, s) = self.endpoint_curvature();
        l.abs() <= COMPAT_TOL * s && r.abs() <= COMPAT_TOL * s
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn tgrid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn phi0(&self) -> &ScalarField {
        &self.phi0
    }

    pub fn g0(&self) -> &ScalarField {
        &self.g0
    }

    pub fn with_tgrid(&self, tgrid: TimeGrid) -> Self {
        Self { tgrid, ..self.clone() }
    }
}
