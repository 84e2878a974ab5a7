//! Galerkin Navier-Stokes-Voigt dynamics: right-hand side, pressure
//! reconstruction, and RK4 time integration of the coefficient system.

mod integrate;
mod rhs;

pub use integrate::{integrate, integrate_with, step, StepPlan};
pub use rhs::{convective_full, galerkin_nse_rhs, nonlinear_term, nsv_rhs, pressure_poisson};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{SpectralScalar, SpectralVelocity};

/// One point `(t, u, α)` of a Galerkin trajectory; the cutoff is the
/// velocity's lattice cutoff.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub t: f64,
    pub u: SpectralVelocity,
    pub alpha: f64,
}

impl SolverState {
    pub fn new(t: f64, u: SpectralVelocity, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "alpha must be finite and nonnegative, got {alpha}"
            )));
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "t must be nonnegative, got {t}"
            )));
        }
        Ok(Self { t, u, alpha })
    }

    pub fn n(&self) -> usize {
        self.u.cutoff()
    }
}

/// Default step `min(0.5 / (1 + n^2 / (1 + α^2 n^2)), 1e-2)`: the stiffest
/// Voigt-damped linear rate times `dt` stays below 0.5.
pub fn default_dt(n: usize, alpha: f64) -> f64 {
    let n2 = (n * n) as f64;
    let rate = n2 / (1.0 + alpha * alpha * n2);
    (0.5 / (1.0 + rate)).min(1e-2)
}

/// Largest linear decay rate `max_k |k|^2 / (1 + α^2 |k|^2)` on cutoff `n`.
pub fn stiffest_rate(n: usize, alpha: f64) -> f64 {
    let n2 = (n * n) as f64;
    n2 / (1.0 + alpha * alpha * n2)
}

/// Unit viscosity and zero forcing are fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n: usize,
    pub alpha: f64,
    pub dt: f64,
    pub t_final: f64,
    pub sample_every: usize,
    /// Reconstruct and store the pressure at every sample.
    pub store_pressure: bool,
}

impl SolverConfig {
    /// Config with the default step and every step sampled.
    pub fn new(n: usize, alpha: f64, t_final: f64) -> Self {
        Self {
            n,
            alpha,
            dt: default_dt(n, alpha),
            t_final,
            sample_every: 1,
            store_pressure: true,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_sample_every(mut self, s: usize) -> Self {
        self.sample_every = s;
        self
    }

    pub fn with_pressure(mut self, store: bool) -> Self {
        self.store_pressure = store;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Configuration("n must be at least 1".into()));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::Configuration(format!(
                "alpha must be finite and >= 0, got {}",
                self.alpha
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Configuration(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::Configuration(format!(
                "t_final must be > 0, got {}",
                self.t_final
            )));
        }
        if self.sample_every == 0 {
            return Err(Error::Configuration("sample_every must be >= 1".into()));
        }
        Ok(())
    }
}

/// A stored sample: state, exact right-hand side `u_t`, and (optionally) the
/// reconstructed pressure.
#[derive(Clone, Debug)]
pub struct Sample {
    pub state: SolverState,
    pub rhs: SpectralVelocity,
    pub pressure: Option<SpectralScalar>,
}

impl Sample {
    pub fn t(&self) -> f64 {
        self.state.t
    }

    pub fn u(&self) -> &SpectralVelocity {
        &self.state.u
    }
}

/// Time-sampled Galerkin trajectory with per-sample `u_t` and pressure.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub config: SolverConfig,
    /// Step actually used (`t_final` divided by the step count).
    pub dt: f64,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn alpha(&self) -> f64 {
        self.config.alpha
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(Sample::t).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has samples")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_dt_rule() {
        assert_eq!(default_dt(1, 0.0), 1e-2);
        let dt = default_dt(8, 0.0);
        assert!((dt - 0.5 / 65.0).abs() < 1e-15);
        let dt = default_dt(8, 0.3);
        let rate: f64 = 64.0 / (1.0 + 0.09 * 64.0);
        assert!((dt - (0.5 / (1.0 + rate)).min(1e-2)).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(4, 0.1, 1.0).validate().is_ok());
        assert!(SolverConfig::new(4, -0.1, 1.0).validate().is_err());
        assert!(SolverConfig::new(4, 0.1, 0.0).validate().is_err());
        assert!(SolverConfig::new(4, 0.1, 1.0)
            .with_dt(0.0)
            .validate()
            .is_err());
        assert!(SolverConfig::new(4, 0.1, 1.0)
            .with_sample_every(0)
            .validate()
            .is_err());
    }
}
