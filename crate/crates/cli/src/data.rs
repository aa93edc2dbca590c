//! Initial data from a preset, optionally overridden by sampled CSV files.

use std::path::Path;

use qlt_core::equilibrium::equilibrium_m;
use qlt_core::interp::MonotoneCubic;
use qlt_core::kinetic::{build_g0, build_w0};
use qlt_core::presets::Preset;
use qlt_core::{ProblemData, ScalarField, SpatialGrid, Spectrum, TimeGrid};

use crate::config::RunConfig;
use crate::error::CliError;

/// Coordinates closer than this (relative to `h`) to the grid nodes are used as is.
const NODE_TOL: f64 = 1e-9;

pub struct ResolvedData {
    pub preset: Preset,
    pub from_files: bool,
    pub u0: ScalarField,
    pub f0: ScalarField,
    pub g0: ScalarField,
}

pub fn read_samples(path: &Path, key: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let bad = |msg: String| CliError::Config(format!("data.{key} ({}): {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != 2 {
            return Err(bad(format!("row {} has {} columns, expected 2", line + 2, record.len())));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("row {}: {s:?} is not a number", line + 2)));
        xs.push(parse(&record[0])?);
        ys.push(parse(&record[1])?);
    }
    if xs.len() < 2 {
        return Err(bad("needs at least two rows".into()));
    }
    Ok((xs, ys))
}

/// Samples `(xs, ys)` onto the grid: directly when the abscissae are the nodes,
/// by monotone cubic interpolation otherwise.
pub fn onto_grid(grid: &SpatialGrid, xs: Vec<f64>, ys: Vec<f64>, key: &str) -> Result<ScalarField, CliError> {
    let on_nodes =
        xs.len() == grid.nx() && xs.iter().zip(grid.nodes()).all(|(a, b)| (a - b).abs() <= NODE_TOL * grid.h());
    let values = if on_nodes {
        ys
    } else {
        let interp = MonotoneCubic::new(xs, ys).map_err(|e| CliError::Config(format!("data.{key}: {e}")))?;
        grid.nodes()
            .into_iter()
            .map(|x| interp.eval(x))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Config(format!("data.{key}: samples do not cover the grid ({e})")))?
    };
    ScalarField::new(*grid, values).map_err(|e| CliError::Config(format!("data.{key}: {e}")))
}

fn load(grid: &SpatialGrid, path: &Path, key: &str) -> Result<ScalarField, CliError> {
    let (xs, ys) = read_samples(path, key)?;
    onto_grid(grid, xs, ys, key)
}

pub fn resolve(config: &RunConfig, grid: &SpatialGrid) -> Result<ResolvedData, CliError> {
    let preset = config.preset()?;
    let (mut u0, mut f0) = preset.kinetic_pair(grid)?;
    let data = &config.data;
    if let Some(path) = &data.spectrum {
        let (k, w) = read_samples(path, "W0")?;
        let spectrum = Spectrum::new(k, w).map_err(|e| CliError::Config(format!("data.W0: {e}")))?;
        u0 = build_w0(&spectrum, grid).map_err(|e| CliError::Config(format!("data.W0: {e}")))?;
    }
    if let Some(path) = &data.phi0 {
        u0 = load(grid, path, "phi0")?;
    }
    if let Some(path) = &data.f0 {
        f0 = load(grid, path, "f0")?;
    }
    let g0 = match &data.g0 {
        Some(path) => load(grid, path, "g0")?,
        None => build_g0(&f0, &u0)?,
    };
    Ok(ResolvedData { preset, from_files: data.has_files(), u0, f0, g0 })
}

impl ResolvedData {
    /// The linear-equilibrium preset starts from its equilibrium, which is not
    /// flat at the ends and so is admitted without the compatibility screen.
    pub fn problem(&self, tgrid: TimeGrid) -> Result<ProblemData, CliError> {
        if matches!(self.preset, Preset::LinearEquilibrium) && !self.from_files {
            let m = equilibrium_m(&self.u0, &self.f0)?;
            return Ok(ProblemData::new_relaxed(tgrid, m, self.g0.clone())?);
        }
        ProblemData::new(tgrid, self.u0.clone(), self.g0.clone()).map_err(|e| CliError::Config(format!("data: {e}")))
    }
}
