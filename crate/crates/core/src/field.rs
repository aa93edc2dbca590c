//! Nodal fields on a [`SpatialGrid`] and on the space-time cylinder.

use crate::error::{invalid, numerical, Error, Result};
use crate::grid::{SpatialGrid, TimeGrid};

/// Tolerance for the declared boundary value of a [`SpaceTimeField`].
pub const BOUNDARY_TOL: f64 = 1e-12;

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(numerical(format!("{what}: non-finite value at index {i}"))),
        None => Ok(()),
    }
}

/// Values sampled at the nodes of a spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: SpatialGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: SpatialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nx() {
            return Err(invalid(format!("field has {} values but grid has {} nodes", values.len(), grid.nx())));
        }
        check_finite(&values, "scalar field")?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn constant(grid: SpatialGrid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.nx()])
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self { grid, values: vec![0.0; grid.nx()] }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Applies `f(x, value)` node by node.
    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self.values.iter().enumerate().map(|(i, &v)| f(self.grid.x(i), v)).collect();
        Self::new(self.grid, values)
    }

    /// Combines two fields on the same grid node by node.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.grid, values)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|_, v| c * v)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        ensure_same_grid(&self.grid, &other.grid)?;
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

pub(crate) fn ensure_same_grid(a: &SpatialGrid, b: &SpatialGrid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!("{a:?} vs {b:?}")))
    }
}

/// Node-by-level array on `Ω × [0, T]`, stored level-major.
///
/// When a boundary value is declared, both boundary columns must equal it at
/// every level.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: SpatialGrid,
    tgrid: TimeGrid,
    values: Vec<f64>,
    boundary: Option<f64>,
}

impl SpaceTimeField {
    pub fn new(grid: SpatialGrid, tgrid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        let expected = grid.nx() * tgrid.levels();
        if values.len() != expected {
            return Err(invalid(format!("space-time field has {} values, expected {expected}", values.len())));
        }
        check_finite(&values, "space-time field")?;
        Ok(Self { grid, tgrid, values, boundary: None })
    }

    pub fn from_fn(grid: SpatialGrid, tgrid: TimeGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.nx() * tgrid.levels());
        for m in 0..tgrid.levels() {
            let t = tgrid.t(m);
            values.extend((0..grid.nx()).map(|i| f(grid.x(i), t)));
        }
        Self::new(grid, tgrid, values)
    }

    /// Stacks per-level spatial fields (`nt + 1` of them).
    pub fn from_levels(tgrid: TimeGrid, levels: &[ScalarField]) -> Result<Self> {
        let first = levels.first().ok_or_else(|| invalid("no time levels"))?;
        let grid = *first.grid();
        if levels.len() != tgrid.levels() {
            return Err(invalid(format!("{} levels supplied, time grid has {}", levels.len(), tgrid.levels())));
        }
        let mut values = Vec::with_capacity(grid.nx() * levels.len());
        for level in levels {
            ensure_same_grid(&grid, level.grid())?;
            values.extend_from_slice(level.values());
        }
        Self::new(grid, tgrid, values)
    }

    /// Declares and checks the Dirichlet value carried by both boundary columns.
    pub fn with_boundary(mut self, value: f64) -> Result<Self> {
        let nx = self.grid.nx();
        for m in 0..self.tgrid.levels() {
            let row = self.level(m);
            for (side, v) in [("left", row[0]), ("right", row[nx - 1])] {
                if (v - value).abs() > BOUNDARY_TOL * value.abs().max(1.0) {
                    return Err(invalid(format!(
                        "{side} boundary value {v} at level {m} differs from declared {value}"
                    )));
                }
            }
        }
        self.boundary = Some(value);
        Ok(self)
    }

    pub fn boundary(&self) -> Option<f64> {
        self.boundary
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn tgrid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn level(&self, m: usize) -> &[f64] {
        let nx = self.grid.nx();
        &self.values[m * nx..(m + 1) * nx]
    }

    pub fn level_field(&self, m: usize) -> ScalarField {
        ScalarField { grid: self.grid, values: self.level(m).to_vec() }
    }

    pub fn levels(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.grid.nx())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Applies `f(x, t, value)` pointwise. The boundary declaration is dropped.
    pub fn map(&self, f: impl Fn(f64, f64, f64) -> f64) -> Result<Self> {
        let nx = self.grid.nx();
        let values =
            self.values.iter().enumerate().map(|(k, &v)| f(self.grid.x(k % nx), self.tgrid.t(k / nx), v)).collect();
        Self::new(self.grid, self.tgrid, values)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same_mesh(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.grid, self.tgrid, values)
    }

    /// Applies a per-level spatial operator.
    pub fn map_levels(&self, f: impl Fn(&ScalarField) -> Result<ScalarField>) -> Result<Self> {
        let levels = (0..self.tgrid.levels()).map(|m| f(&self.level_field(m))).collect::<Result<Vec<_>>>()?;
        Self::from_levels(self.tgrid, &levels)
    }

    pub fn ensure_same_mesh(&self, other: &Self) -> Result<()> {
        ensure_same_grid(&self.grid, &other.grid)?;
        if self.tgrid != other.tgrid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.tgrid, other.tgrid)));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.ensure_same_mesh(other)?;
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}
