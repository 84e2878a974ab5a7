//! TOML run configuration.
//!
//! Only `[solver]` with `n`, `alpha` and `t_final` is required; every other
//! key has a default:
//!
//! ```toml
//! output_dir = "out"
//! snapshot_every = 0          # samples between snapshots, 0 = final only
//!
//! [solver]
//! n = 8
//! alpha = 0.3
//! t_final = 0.5
//! # dt = 1e-3               # default: min(0.5 / (1 + n^2/(1+α^2 n^2)), 1e-2)
//! sample_every = 1
//!
//! [initial]
//! kind = "random"             # or "taylor_green"
//! amplitude = 1.0             # taylor_green only
//! seed = 0
//! spectrum = { k0 = 2.0, energy = 1.0, shape = 4.0 }
//!
//! [diagnostics]
//! energy = true
//! weighted = true
//! pressure = true
//! energy_tolerance = 1e-8
//!
//! [sweep]
//! alphas = [0.4, 0.2, 0.1, 0.05]
//! max_ratio = 2.0
//!
//! [suitability]
//! # t0, t1 default to 0.2 and 0.8 of t_final
//! m = 2
//! amplitude = 1.0
//! sharpness = 1.0
//! residual_tolerance = 1e-6
//! coupling = { n_list = [8, 12, 16, 24], gamma = 0.25, c = 0.5 }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{default_dt, SolverConfig};
use crate::error::{Error, Result};
use crate::initial::{random_solenoidal, taylor_green, SpectrumSpec};
use crate::spectral::SpectralVelocity;
use crate::suitability::{CouplingSpec, TestFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub n: usize,
    pub alpha: f64,
    pub t_final: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "one")]
    pub sample_every: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    TaylorGreen,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub seed: u64,
    pub spectrum: SpectrumSpec,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            kind: InitialKind::Random,
            amplitude: 1.0,
            seed: 0,
            spectrum: SpectrumSpec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsSection {
    pub energy: bool,
    pub weighted: bool,
    pub pressure: bool,
    /// Largest accepted relative energy-identity residual.
    pub energy_tolerance: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            energy: true,
            weighted: true,
            pressure: true,
            energy_tolerance: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub alphas: Vec<f64>,
    /// Largest accepted running-maximum ratio of each weighted quantity.
    pub max_ratio: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            alphas: vec![0.4, 0.2, 0.1, 0.05],
            max_ratio: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuitabilitySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    pub m: u32,
    pub amplitude: f64,
    pub sharpness: f64,
    /// Largest accepted local-energy residual in units of `T_grad`.
    pub residual_tolerance: f64,
    pub coupling: CouplingSpec,
}

impl Default for SuitabilitySection {
    fn default() -> Self {
        Self {
            t0: None,
            t1: None,
            m: 2,
            amplitude: 1.0,
            sharpness: 1.0,
            residual_tolerance: 1e-6,
            coupling: CouplingSpec {
                n_list: vec![8, 12, 16, 24],
                gamma: 0.25,
                c: 0.5,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub snapshot_every: usize,
    pub solver: SolverSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub suitability: SuitabilitySection,
}

fn one() -> usize {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn range_error(field: &str, requirement: &str, value: impl std::fmt::Display) -> Error {
    Error::Configuration(format!("{field} {requirement}, got {value}"))
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(range_error(field, "must be finite and > 0", v))
    }
}

impl RunConfig {
    /// Minimal config with defaults everywhere else.
    pub fn new(n: usize, alpha: f64, t_final: f64) -> Self {
        Self {
            output_dir: default_output_dir(),
            snapshot_every: 0,
            solver: SolverSection {
                n,
                alpha,
                t_final,
                dt: None,
                sample_every: 1,
            },
            initial: InitialSection::default(),
            diagnostics: DiagnosticsSection::default(),
            sweep: SweepSection::default(),
            suitability: SuitabilitySection::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| Error::Configuration(format!("parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Configuration(format!("serialize error: {e}")))
    }

    /// Checks every numeric field against its documented range; the error
    /// message names the offending field.
    pub fn validate(&self) -> Result<()> {
        let s = &self.solver;
        if s.n == 0 {
            return Err(range_error("solver.n", "must be >= 1", s.n));
        }
        if !(s.alpha >= 0.0) || !s.alpha.is_finite() {
            return Err(range_error(
                "solver.alpha",
                "must be finite and >= 0",
                s.alpha,
            ));
        }
        positive("solver.t_final", s.t_final)?;
        if let Some(dt) = s.dt {
            positive("solver.dt", dt)?;
        }
        if s.sample_every == 0 {
            return Err(range_error("solver.sample_every", "must be >= 1", 0));
        }
        let i = &self.initial;
        if i.kind == InitialKind::TaylorGreen && s.n < 2 {
            return Err(range_error(
                "solver.n",
                "must be >= 2 for taylor_green",
                s.n,
            ));
        }
        if !i.amplitude.is_finite() {
            return Err(range_error(
                "initial.amplitude",
                "must be finite",
                i.amplitude,
            ));
        }
        i.spectrum.validate()?;
        positive(
            "diagnostics.energy_tolerance",
            self.diagnostics.energy_tolerance,
        )?;
        if self
            .sweep
            .alphas
            .iter()
            .any(|a| !(*a > 0.0) || !a.is_finite())
        {
            return Err(range_error(
                "sweep.alphas",
                "must all be finite and > 0",
                format!("{:?}", self.sweep.alphas),
            ));
        }
        positive("sweep.max_ratio", self.sweep.max_ratio)?;
        let q = &self.suitability;
        if q.m == 0 {
            return Err(range_error("suitability.m", "must be >= 1", 0));
        }
        if !(q.amplitude >= 0.0) || !q.amplitude.is_finite() {
            return Err(range_error(
                "suitability.amplitude",
                "must be finite and >= 0",
                q.amplitude,
            ));
        }
        positive("suitability.sharpness", q.sharpness)?;
        positive("suitability.residual_tolerance", q.residual_tolerance)?;
        self.test_function()
            .map_err(|e| Error::Configuration(format!("suitability.t0/t1: {e}")))?;
        q.coupling
            .validate()
            .map_err(|e| Error::Configuration(format!("suitability.coupling: {e}")))?;
        Ok(())
    }

    /// Solver settings with the default step filled in.
    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            n: s.n,
            alpha: s.alpha,
            dt: s.dt.unwrap_or_else(|| default_dt(s.n, s.alpha)),
            t_final: s.t_final,
            sample_every: s.sample_every,
            store_pressure: true,
        }
    }

    pub fn initial_velocity(&self) -> Result<SpectralVelocity> {
        let i = &self.initial;
        match i.kind {
            InitialKind::TaylorGreen => taylor_green(i.amplitude, self.solver.n),
            InitialKind::Random => random_solenoidal(&i.spectrum, i.seed, self.solver.n),
        }
    }

    pub fn test_function(&self) -> Result<TestFunction> {
        let q = &self.suitability;
        let t = self.solver.t_final;
        let t0 = q.t0.unwrap_or(0.2 * t);
        let t1 = q.t1.unwrap_or(0.8 * t);
        Ok(TestFunction::new(t0, t1, q.m, q.amplitude, t)?.with_sharpness(q.sharpness))
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Configuration(format!("cannot read config {}: {e}", path.display())))?;
    RunConfig::from_toml_str(&text)
}

pub fn save_config(cfg: &RunConfig, path: &Path) -> Result<()> {
    fs::write(path, cfg.to_toml_string()?)?;
    Ok(())
}
