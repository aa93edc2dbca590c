//! TOML run configuration. Every section is optional; unknown keys are errors.

use std::path::{Path, PathBuf};

use qlt_core::presets::{BumpOnTail, Preset};
use qlt_core::{FunctionalRequest, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const OUT_ENV: &str = "QLT_PME_OUT";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub domain: DomainSection,
    pub grid: GridSection,
    pub data: DataSection,
    pub regularization: RegularizationSection,
    pub functionals: FunctionalSection,
    pub refinement: RefinementSection,
    pub output: OutputSection,
    pub tolerances: ToleranceSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainSection {
    pub x_a: f64,
    pub x_b: f64,
}

impl Default for DomainSection {
    fn default() -> Self {
        Self { x_a: 1.0, x_b: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub nx: usize,
    pub nt: usize,
    pub horizon: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { nx: 201, nt: 2000, horizon: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    /// `zero`, `bump_on_tail` or `linear_equilibrium`.
    pub preset: String,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub bump_density: f64,
    /// Initial datum (`x,value`); `u0` and `w0` are accepted as aliases.
    #[serde(alias = "u0", alias = "w0", skip_serializing_if = "Option::is_none")]
    pub phi0: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0: Option<PathBuf>,
    /// Spectrum samples `k,W` from which the initial wave profile is built.
    #[serde(rename = "W0", skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g0: Option<PathBuf>,
}

impl Default for DataSection {
    fn default() -> Self {
        let b = BumpOnTail::default();
        Self {
            preset: "bump_on_tail".into(),
            amplitude: b.amplitude,
            center: b.center,
            width: b.width,
            bump_density: b.bump_density,
            phi0: None,
            f0: None,
            spectrum: None,
            g0: None,
        }
    }
}

impl DataSection {
    pub fn has_files(&self) -> bool {
        self.phi0.is_some() || self.f0.is_some() || self.spectrum.is_some() || self.g0.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegularizationSection {
    /// Index used by `solve`.
    pub n: u32,
    /// Indices used by `sweep` and `validate`.
    pub n_list: Vec<u32>,
}

impl Default for RegularizationSection {
    fn default() -> Self {
        Self { n: 64, n_list: vec![4, 8, 16, 32, 64, 128, 256, 512] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FunctionalSection {
    pub l_list: Vec<u32>,
    pub s: f64,
    pub sigma: f64,
    /// `(0, 1/2)`; the companion exponent is `2θ`.
    pub theta: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub nu: f64,
}

impl Default for FunctionalSection {
    fn default() -> Self {
        let r = FunctionalRequest::default();
        Self {
            l_list: vec![1, 2, 4],
            s: r.s,
            sigma: r.sigma,
            theta: r.theta,
            alpha: r.alpha,
            epsilon: r.epsilon,
            nu: r.nu,
        }
    }
}

impl FunctionalSection {
    pub fn request(&self) -> FunctionalRequest {
        FunctionalRequest {
            l: self.l_list.first().copied().unwrap_or(1),
            s: self.s,
            sigma: self.sigma,
            theta: self.theta,
            delta: 2.0 * self.theta,
            alpha: self.alpha,
            epsilon: self.epsilon,
            nu: self.nu,
        }
    }
}

/// Optional mesh refinement study run by `sweep` at a fixed large `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RefinementSection {
    pub n: u32,
    /// `[nx, nt]` pairs; empty disables the study.
    pub grids: Vec<[usize; 2]>,
}

impl Default for RefinementSection {
    fn default() -> Self {
        Self { n: 100_000, grids: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("qlt-out"), svg: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSection {
    pub max_principle: f64,
    pub upper_bound: f64,
    pub linear_solver: f64,
    pub dt_safety: f64,
    /// Multiplies every tolerance of the `validate` suite.
    pub scale: f64,
    pub uniformity_factor: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        let c = SolverConfig::default();
        Self {
            max_principle: c.max_principle_tol,
            upper_bound: c.upper_bound_tol,
            linear_solver: c.linear_solver_tol,
            dt_safety: c.dt_safety,
            scale: 1.0,
            uniformity_factor: qlt_core::validation::UNIFORMITY_FACTOR,
        }
    }
}

fn config_error(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {msg}"))
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_error(key, format!("must be positive, got {v}")))
    }
}

fn open_unit(key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(config_error(key, format!("must lie in (0, 1), got {v}")))
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut config: RunConfig = match path {
            None => RunConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
        };
        if let Some(dir) = std::env::var_os(OUT_ENV) {
            config.output.dir = PathBuf::from(dir);
        }
        if let Some(base) = path.and_then(Path::parent) {
            config.data.rebase(base);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        positive("domain.x_a", self.domain.x_a)?;
        if !(self.domain.x_b > self.domain.x_a && self.domain.x_b.is_finite()) {
            return Err(config_error("domain.x_b", format!("must exceed domain.x_a, got {}", self.domain.x_b)));
        }
        if self.grid.nx < 3 {
            return Err(config_error("grid.nx", format!("must be at least 3, got {}", self.grid.nx)));
        }
        if self.grid.nt < 2 {
            return Err(config_error("grid.nt", format!("must be at least 2, got {}", self.grid.nt)));
        }
        positive("grid.horizon", self.grid.horizon)?;
        self.preset()?;
        positive("data.width", self.data.width)?;
        if !(self.data.amplitude >= 0.0 && self.data.amplitude.is_finite()) {
            return Err(config_error("data.amplitude", "must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.data.bump_density) {
            return Err(config_error("data.bump_density", "must lie in [0, 1]"));
        }
        if self.regularization.n == 0 {
            return Err(config_error("regularization.n", "must be positive"));
        }
        let list = &self.regularization.n_list;
        if list.len() < 2 || list[0] == 0 || list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_error(
                "regularization.n_list",
                "needs at least two positive, strictly increasing entries",
            ));
        }
        let f = &self.functionals;
        if f.l_list.is_empty() || f.l_list.contains(&0) {
            return Err(config_error("functionals.l_list", "entries must be positive"));
        }
        open_unit("functionals.s", f.s)?;
        if !(f.sigma > 0.0 && f.sigma < 2.0) {
            return Err(config_error("functionals.sigma", format!("must lie in (0, 2), got {}", f.sigma)));
        }
        if !(f.theta > 0.0 && f.theta < 0.5) {
            return Err(config_error("functionals.theta", format!("must lie in (0, 0.5), got {}", f.theta)));
        }
        open_unit("functionals.alpha", f.alpha)?;
        positive("functionals.epsilon", f.epsilon)?;
        positive("functionals.nu", f.nu)?;
        if self.refinement.n == 0 {
            return Err(config_error("refinement.n", "must be positive"));
        }
        for [nx, nt] in &self.refinement.grids {
            if *nx < 3 || *nt < 2 {
                return Err(config_error("refinement.grids", format!("[{nx}, {nt}] is too coarse")));
            }
        }
        let t = &self.tolerances;
        positive("tolerances.max_principle", t.max_principle)?;
        positive("tolerances.upper_bound", t.upper_bound)?;
        positive("tolerances.linear_solver", t.linear_solver)?;
        positive("tolerances.dt_safety", t.dt_safety)?;
        positive("tolerances.scale", t.scale)?;
        if !(t.uniformity_factor >= 1.0) {
            return Err(config_error("tolerances.uniformity_factor", "must be at least 1"));
        }
        if self.output.dir.as_os_str().is_empty() {
            return Err(config_error("output.dir", "must not be empty"));
        }
        Ok(())
    }

    pub fn preset(&self) -> Result<Preset, CliError> {
        match self.data.preset.as_str() {
            "zero" => Ok(Preset::Zero),
            "linear_equilibrium" => Ok(Preset::LinearEquilibrium),
            "bump_on_tail" => Ok(Preset::BumpOnTail(BumpOnTail {
                amplitude: self.data.amplitude,
                center: self.data.center,
                width: self.data.width,
                bump_density: self.data.bump_density,
            })),
            other => Err(config_error(
                "data.preset",
                format!("unknown preset {other:?} (expected zero, bump_on_tail or linear_equilibrium)"),
            )),
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        let t = &self.tolerances;
        SolverConfig {
            dt_safety: t.dt_safety,
            max_principle_tol: t.max_principle,
            upper_bound_tol: t.upper_bound,
            linear_solver_tol: t.linear_solver,
            ..SolverConfig::default()
        }
    }
}

impl DataSection {
    /// Resolves relative data paths against the directory of the config file.
    fn rebase(&mut self, base: &Path) {
        for p in [&mut self.phi0, &mut self.f0, &mut self.spectrum, &mut self.g0].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_desk_preset() {
        let c = RunConfig::default();
        assert_eq!((c.domain.x_a, c.domain.x_b), (1.0, 2.0));
        assert_eq!((c.grid.nx, c.grid.nt, c.grid.horizon), (201, 2000, 0.5));
        assert_eq!(c.data.amplitude, 1.0);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("[tolerances]\nmax_principal = 1e-3\n").is_err());
        assert!(toml::from_str::<RunConfig>("[bogus]\n").is_err());
    }

    #[test]
    fn u0_alias_reads_into_phi0() {
        let c: RunConfig = toml::from_str("[data]\nu0 = \"a.csv\"\n").unwrap();
        assert_eq!(c.data.phi0.as_deref(), Some(Path::new("a.csv")));
    }

    #[test]
    fn errors_name_the_key() {
        let mut c = RunConfig::default();
        c.domain.x_a = 0.0;
        assert!(c.validate().unwrap_err().to_string().contains("domain.x_a"));
        let mut c = RunConfig::default();
        c.functionals.alpha = 1.0;
        assert!(c.validate().unwrap_err().to_string().contains("functionals.alpha"));
        let mut c = RunConfig::default();
        c.data.preset = "gaussian".into();
        assert!(c.validate().unwrap_err().to_string().contains("data.preset"));
    }
}
