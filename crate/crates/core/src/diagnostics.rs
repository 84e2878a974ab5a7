//! Energy equality, α-weighted integral bounds, and the pressure norm,
//! evaluated along stored trajectories.
//!
//! Instantaneous norms are exact spectral sums; time integrals use composite
//! Simpson over the samples. `u_t` is always the stored right-hand side.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::quadrature::{cumulative_simpson, simpson, uniform_spacing};
use crate::spectral::{Grid, Lattice, SpectralScalar, SpectralVelocity};

pub(crate) fn sample_spacing(traj: &Trajectory) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "trajectory needs at least 2 samples, has {}",
            traj.len()
        )));
    }
    uniform_spacing(&traj.times())
        .ok_or_else(|| Error::InvalidArgument("trajectory samples are not uniformly spaced".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    /// `‖u‖^2`
    pub energy: f64,
    /// `‖∇u‖^2`
    pub grad: f64,
    /// `‖Δu‖^2`
    pub lap: f64,
    /// `‖u_t‖^2`
    pub ut: f64,
    /// `‖∇u_t‖^2`
    pub grad_ut: f64,
    /// `‖u‖^2 + α^2‖∇u‖^2 + 2∫_0^t ‖∇u‖^2`
    pub lhs: f64,
    /// `|lhs - rhs0| / rhs0`
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub alpha: f64,
    /// `‖P_n u0‖^2 + α^2 ‖∇P_n u0‖^2`
    pub rhs0: f64,
    pub samples: Vec<EnergySample>,
}

impl EnergyReport {
    pub fn max_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.residual).fold(0.0, f64::max)
    }
}

/// Evaluates the energy equality
/// `‖u(t)‖^2 + α^2‖∇u(t)‖^2 + 2∫_0^t‖∇u‖^2 = ‖P_n u0‖^2 + α^2‖∇P_n u0‖^2`
/// at every sample.
pub fn energy_report(traj: &Trajectory) -> Result<EnergyReport> {
    let h = sample_spacing(traj)?;
    let a2 = traj.alpha() * traj.alpha();
    let norms: Vec<[f64; 5]> = traj
        .samples
        .iter()
        .map(|s| {
            [
                s.u().energy(),
                s.u().grad_sqnorm(),
                s.u().lap_sqnorm(),
                s.rhs.energy(),
                s.rhs.grad_sqnorm(),
            ]
        })
        .collect();
    let grads: Vec<f64> = norms.iter().map(|v| v[1]).collect();
    let dissipated = cumulative_simpson(h, &grads);
    let rhs0 = norms[0][0] + a2 * norms[0][1];
    let samples = traj
        .samples
        .iter()
        .zip(&norms)
        .zip(&dissipated)
        .map(|((s, v), diss)| {
            let lhs = v[0] + a2 * v[1] + 2.0 * diss;
            let residual = if rhs0 > 0.0 {
                (lhs - rhs0).abs() / rhs0
            } else {
                0.0
            };
            EnergySample {
                t: s.t(),
                energy: v[0],
                grad: v[1],
                lap: v[2],
                ut: v[3],
                grad_ut: v[4],
                lhs,
                residual,
            }
        })
        .collect();
    Ok(EnergyReport {
        alpha: traj.alpha(),
        rhs0,
        samples,
    })
}

/// Relative defect of the differential energy balance
/// `<(I - α^2 Δ) u_t, u> = -‖∇u‖^2`.
pub fn energy_balance_defect(u: &SpectralVelocity, ut: &SpectralVelocity, alpha: f64) -> f64 {
    let mut voigt = ut.laplacian();
    voigt.scale(-alpha * alpha);
    voigt.axpy(1.0, ut);
    let g = u.grad_sqnorm();
    let lhs = voigt.inner(u);
    if g > 0.0 {
        (lhs + g).abs() / g
    } else {
        lhs.abs()
    }
}

/// The α-weighted integrals controlled uniformly in `α` and `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedBounds {
    pub alpha: f64,
    /// `α^6 ∫_0^T ‖Δu‖^2`
    pub w_h2: f64,
    /// `α^3 ∫_0^T ‖u_t‖^2`
    pub w_ut: f64,
    /// `α^5 ∫_0^T ‖∇u_t‖^2`
    pub w_gut: f64,
    /// `α^3 sup_t ‖∇u‖^2`
    pub w_gu_sup: f64,
}

pub fn weighted_bounds(traj: &Trajectory) -> Result<WeightedBounds> {
    let h = sample_spacing(traj)?;
    let alpha = traj.alpha();
    let lap: Vec<f64> = traj.samples.iter().map(|s| s.u().lap_sqnorm()).collect();
    let ut: Vec<f64> = traj.samples.iter().map(|s| s.rhs.energy()).collect();
    let gut: Vec<f64> = traj.samples.iter().map(|s| s.rhs.grad_sqnorm()).collect();
    let gsup = traj
        .samples
        .iter()
        .map(|s| s.u().grad_sqnorm())
        .fold(0.0, f64::max);
    Ok(WeightedBounds {
        alpha,
        w_h2: alpha.powi(6) * simpson(h, &lap),
        w_ut: alpha.powi(3) * simpson(h, &ut),
        w_gut: alpha.powi(5) * simpson(h, &gut),
        w_gu_sup: alpha.powi(3) * gsup,
    })
}

/// Normalized `(2π)^{-3} ∫ |p|^r` by the trapezoidal rule on an `m^3` grid.
pub fn lp_norm_pow(p: &SpectralScalar, r: f64, m: usize) -> f64 {
    let grid = Grid::shared(m);
    let vals = p.to_physical(&grid);
    vals.iter().map(|v| v.abs().powf(r)).sum::<f64>() / vals.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureReport {
    /// `(t, (2π)^{-3} ∫|p(t)|^{5/3})`
    pub samples: Vec<(f64, f64)>,
    /// `∫_0^T (2π)^{-3} ∫|p|^{5/3}`
    pub integral: f64,
}

/// `L^{5/3}` pressure norms on the dealiasing grid of the velocity lattice.
pub fn pressure_norm_series(traj: &Trajectory) -> Result<PressureReport> {
    let m = Lattice::shared(traj.n())?.grid_size();
    pressure_norm_series_on(traj, m)
}

/// As [`pressure_norm_series`] with an explicit quadrature grid.
pub fn pressure_norm_series_on(traj: &Trajectory, m: usize) -> Result<PressureReport> {
    let h = sample_spacing(traj)?;
    let samples = traj
        .samples
        .par_iter()
        .map(|s| {
            let p = s.pressure.as_ref().ok_or_else(|| {
                Error::InvalidArgument("trajectory was integrated without pressure".into())
            })?;
            Ok((s.t(), lp_norm_pow(p, 5.0 / 3.0, m)))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(PressureReport {
        integral: simpson(h, &values),
        samples,
    })
}

/// One row of an α-sweep at fixed cutoff and initial datum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaSweepRow {
    pub alpha: f64,
    pub w_h2: f64,
    pub w_ut: f64,
    pub w_gut: f64,
    pub w_gu_sup: f64,
    pub pressure_integral: f64,
    pub energy_residual: f64,
}

/// Runs `base` once per `alpha` (rows in input order) with the same `u0`.
pub fn alpha_sweep(
    base: &SolverConfig,
    alphas: &[f64],
    u0: &SpectralVelocity,
) -> Result<Vec<AlphaSweepRow>> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let mut cfg = base.clone();
            cfg.alpha = alpha;
            cfg.store_pressure = true;
            let traj = integrate(&cfg, u0)?;
            let w = weighted_bounds(&traj)?;
            let p = pressure_norm_series(&traj)?;
            let e = energy_report(&traj)?;
            Ok(AlphaSweepRow {
                alpha,
                w_h2: w.w_h2,
                w_ut: w.w_ut,
                w_gut: w.w_gut,
                w_gu_sup: w.w_gu_sup,
                pressure_integral: p.integral,
                energy_residual: e.max_residual(),
            })
        })
        .collect()
}

/// `max/min` of the running maximum of `values`: 1 when the first value
/// dominates, growing as later entries exceed it.
pub fn running_max_ratio(values: &[f64]) -> f64 {
    let Some(&first) = values.first() else {
        return 1.0;
    };
    let max = values.iter().copied().fold(first, f64::max);
    if max == 0.0 {
        1.0
    } else if first <= 0.0 {
        f64::INFINITY
    } else {
        max / first
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::{random_solenoidal, taylor_green, SpectrumSpec};

    #[test]
    fn taylor_green_energy_identity_is_tight() {
        let alpha = 0.25;
        let u0 = taylor_green(1.0, 2).unwrap();
        let cfg = SolverConfig::new(2, alpha, 0.5).with_dt(1e-3);
        let traj = integrate(&cfg, &u0).unwrap();
        let rep = energy_report(&traj).unwrap();
        let e0 = 0.5;
        assert!((rep.rhs0 - e0 * (1.0 + 2.0 * alpha * alpha)).abs() < 1e-15);
        assert!(rep.max_residual() < 1e-10, "{}", rep.max_residual());
        for s in &rep.samples {
            let decay = (-4.0 * s.t / (1.0 + 2.0 * alpha * alpha)).exp();
            assert!((s.energy - e0 * decay).abs() < 1e-12);
            assert!((s.grad - 2.0 * s.energy).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_data_reports_zero() {
        let u0 = crate::spectral::SpectralVector::zeros(Lattice::shared(2).unwrap());
        let cfg = SolverConfig::new(2, 0.3, 0.1).with_dt(0.01);
        let traj = integrate(&cfg, &u0).unwrap();
        let rep = energy_report(&traj).unwrap();
        assert_eq!(rep.max_residual(), 0.0);
        assert_eq!(pressure_norm_series(&traj).unwrap().integral, 0.0);
        let w = weighted_bounds(&traj).unwrap();
        assert_eq!(w.w_h2 + w.w_ut + w.w_gut + w.w_gu_sup, 0.0);
    }

    #[test]
    fn single_sample_is_rejected() {
        let u0 = taylor_green(1.0, 2).unwrap();
        let cfg = SolverConfig::new(2, 0.3, 0.02).with_dt(0.01);
        let mut traj = integrate(&cfg, &u0).unwrap();
        traj.samples.truncate(1);
        assert!(matches!(
            energy_report(&traj),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn weighted_bounds_vanish_without_voigt() {
        let u0 = random_solenoidal(&SpectrumSpec::default(), 2, 3).unwrap();
        let cfg = SolverConfig::new(3, 0.0, 0.1).with_dt(0.01);
        let traj = integrate(&cfg, &u0).unwrap();
        let w = weighted_bounds(&traj).unwrap();
        assert_eq!((w.w_h2, w.w_ut, w.w_gut, w.w_gu_sup), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn taylor_green_weighted_ut_closed_form() {
        let alpha: f64 = 0.4;
        let t_final = 0.6;
        let u0 = taylor_green(1.0, 2).unwrap();
        let cfg = SolverConfig::new(2, alpha, t_final).with_dt(1e-3);
        let traj = integrate(&cfg, &u0).unwrap();
        let w = weighted_bounds(&traj).unwrap();
        let s = 1.0 + 2.0 * alpha * alpha;
        let expected = alpha.powi(3) * 0.5 * (1.0 - (-4.0 * t_final / s).exp()) / s;
        assert!(
            (w.w_ut - expected).abs() < 1e-10 * expected,
            "{} vs {expected}",
            w.w_ut
        );
    }

    #[test]
    fn differential_balance_holds_for_random_fields() {
        for seed in 0..5 {
            let u = random_solenoidal(&SpectrumSpec::default(), seed, 5).unwrap();
            let alpha = 0.1 * seed as f64;
            let ut = crate::dynamics::nsv_rhs(&u, alpha);
            assert!(energy_balance_defect(&u, &ut, alpha) < 1e-11);
        }
    }

    #[test]
    fn running_max_ratio_cases() {
        assert_eq!(running_max_ratio(&[2.0, 1.0, 0.5]), 1.0);
        assert_eq!(running_max_ratio(&[1.0, 3.0, 2.0]), 3.0);
        assert_eq!(running_max_ratio(&[0.0, 0.0]), 1.0);
        assert_eq!(running_max_ratio(&[]), 1.0);
    }
}
