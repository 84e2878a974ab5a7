//! Sweep over cutoffs with the regularization tied to the cutoff,
//! `α_n = C n^{-γ}`, measuring the Galerkin remainder against the bound
//! `c / (n^2 α_n^6)`.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tail::{fitted_tail_constant, remainder_term, tail_functional};
use super::test_function::TestFunction;
use crate::diagnostics::{sample_spacing, weighted_bounds};
use crate::dynamics::{default_dt, integrate, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::quadrature::simpson;
use crate::spectral::SpectralVelocity;

/// Since `|k| >= n/2` implies `|k|^4 >= n^4 / 16`, the tail sum obeys
/// `n^2 Σ_{|k|≥n/2} |d_k|^2 <= 16 ‖Δu‖^2 / n^2`.
const TAIL_TO_H2: f64 = 16.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingRow {
    pub n: usize,
    pub alpha_n: f64,
    /// `|∫((u·∇)u, Q_n(uφ))|`
    pub remainder: f64,
    /// `c / (n^2 α_n^6)` with `c` fitted once over the sweep.
    pub bound: f64,
    /// `∫ n^2 Σ_{|k|≥n/2} |d_k|^2 dt`
    pub tail: f64,
    /// Largest `g^2 / (n^2 tail + total / n)` over the samples.
    pub ratio: f64,
    /// `α_n^6 ∫‖Δu‖^2`, the quantity that makes `tail <= bound`.
    pub w_h2: f64,
    /// Set when the row's integration failed; numeric fields are then zero.
    pub failed: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub n_list: Vec<usize>,
    pub gamma: f64,
    pub c: f64,
}

impl CouplingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "n_list must be nonempty and strictly increasing".into(),
            ));
        }
        if self.n_list[0] == 0 {
            return Err(Error::InvalidArgument("n_list entries must be >= 1".into()));
        }
        if !(0.0..0.5).contains(&self.gamma) {
            return Err(Error::InvalidArgument(format!(
                "gamma must lie in [0, 1/2), got {}",
                self.gamma
            )));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "C must be > 0, got {}",
                self.c
            )));
        }
        Ok(())
    }

    pub fn alpha_for(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(-self.gamma)
    }
}

fn measure(traj: &Trajectory, phi: &TestFunction) -> Result<CouplingRow> {
    let n = traj.n();
    let h = sample_spacing(traj)?;
    let nf = n as f64;
    let samples = tail_functional(traj, phi, n)?;
    let tail_series: Vec<f64> = samples.iter().map(|s| nf * nf * s.tail_energy).collect();
    let rem = remainder_term(traj, phi)?;
    Ok(CouplingRow {
        n,
        alpha_n: traj.alpha(),
        remainder: rem.integral.abs(),
        bound: 0.0,
        tail: simpson(h, &tail_series),
        ratio: fitted_tail_constant(&samples),
        w_h2: weighted_bounds(traj)?.w_h2,
        failed: None,
    })
}

/// One row per cutoff in `spec.n_list`, each integrating `u0` with
/// `α_n = C n^{-γ}` and the default step for that pair. `base` supplies
/// `t_final` and the sampling cadence. A row whose integration fails is kept
/// with `failed` set; the fitted constant uses the successful rows only.
pub fn coupling_sweep(
    base: &SolverConfig,
    spec: &CouplingSpec,
    u0: &SpectralVelocity,
    phi: &TestFunction,
) -> Result<Vec<CouplingRow>> {
    spec.validate()?;
    let mut rows: Vec<CouplingRow> = spec
        .n_list
        .par_iter()
        .map(|&n| {
            let alpha_n = spec.alpha_for(n);
            let cfg = SolverConfig {
                n,
                alpha: alpha_n,
                dt: base.dt.min(default_dt(n, alpha_n)),
                store_pressure: false,
                ..base.clone()
            };
            let run = integrate(&cfg, u0).and_then(|traj| measure(&traj, phi));
            match run {
                Ok(row) => Ok(row),
                Err(e @ (Error::BlowUp { .. } | Error::Configuration(_))) => {
                    warn!("coupling row n={n} failed: {e}");
                    Ok(CouplingRow {
                        n,
                        alpha_n,
                        remainder: 0.0,
                        bound: 0.0,
                        tail: 0.0,
                        ratio: 0.0,
                        w_h2: 0.0,
                        failed: Some(e.to_string()),
                    })
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let c_fit = rows
        .iter()
        .filter(|r| r.failed.is_none())
        .map(|r| TAIL_TO_H2 * r.w_h2)
        .fold(0.0, f64::max);
    for r in rows.iter_mut() {
        let nf = r.n as f64;
        r.bound = c_fit / (nf * nf * r.alpha_n.powi(6));
    }
    Ok(rows)
}
