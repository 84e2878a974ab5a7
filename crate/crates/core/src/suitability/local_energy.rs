//! Term-by-term evaluation of the local energy identity obtained by testing
//! the Galerkin NSV system, rewritten with pressure and the high-mode
//! remainder `Q_n((u·∇)u)`, against `uφ`:
//!
//! ```text
//! ∫(|∇u|², φ) = ∫(|u|²/2, φ_t + Δφ) + ∫(u|u|²/2, ∇φ) + ∫(u p, ∇φ)
//!             + α² ∫(Δu_t, uφ) + ∫((u·∇)u, Q_n(uφ))
//! ```
//!
//! Spatial integrals are trapezoidal sums on a grid fine enough to integrate
//! every integrand (a trigonometric polynomial) exactly; time integrals are
//! composite Simpson over the stored samples.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::test_function::{ProfileOnGrid, TestFunction};
use crate::diagnostics::sample_spacing;
use crate::dynamics::{Sample, Trajectory};
use crate::error::{Error, Result};
use crate::quadrature::simpson;
use crate::spectral::{next_smooth, Grid, Lattice, SpectralVector, SpectralVelocity};

/// Minimum number of samples strictly inside the test-function window.
pub const MIN_WINDOW_SAMPLES: usize = 9;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LocalEnergyReport {
    /// `∫(|∇u|², φ)`
    pub t_grad: f64,
    /// `∫(|u|²/2, φ_t + Δφ)`
    pub t_parab: f64,
    /// `∫(u|u|²/2, ∇φ)`
    pub t_conv: f64,
    /// `∫(u p, ∇φ)`
    pub t_press: f64,
    /// `α² ∫(Δu_t, uφ)`
    pub t_voigt: f64,
    /// `∫((u·∇)u, Q_n(uφ))`
    pub t_remainder: f64,
    /// `t_grad - (t_parab + t_conv + t_press + t_voigt + t_remainder)`
    pub residual: f64,
}

impl LocalEnergyReport {
    /// `|residual|` in units of `t_grad`.
    pub fn relative_residual(&self) -> f64 {
        if self.t_grad != 0.0 {
            self.residual.abs() / self.t_grad.abs()
        } else {
            self.residual.abs()
        }
    }

    /// Right-hand side without the remainder: the quantity that bounds
    /// `t_grad` in the limiting local energy inequality.
    pub fn flux_terms(&self) -> f64 {
        self.t_parab + self.t_conv + self.t_press + self.t_voigt
    }
}

/// Grid values of `∂_j u_i`, indexed `[i][j]`.
pub(crate) fn gradient_tensor(u: &SpectralVelocity, grid: &Grid) -> [[Vec<f64>; 3]; 3] {
    let i = Complex64::i();
    let dj: Vec<[Vec<f64>; 3]> = (0..3)
        .map(|j| {
            let lattice = u.lattice();
            let d = SpectralVector::from_fn(Arc::clone(lattice), |k| {
                let c = u.coeffs()[lattice.index_of(k).unwrap()];
                let f = i * k[j] as f64;
                [c[0] * f, c[1] * f, c[2] * f]
            });
            d.to_physical(grid)
        })
        .collect();
    let mut out: [[Vec<f64>; 3]; 3] = Default::default();
    for (j, comps) in dj.into_iter().enumerate() {
        for (ii, v) in comps.into_iter().enumerate() {
            out[ii][j] = v;
        }
    }
    out
}

/// Cutoff of the extended lattice that holds `u ψ` exactly.
pub fn extended_cutoff(n: usize, phi: &TestFunction) -> usize {
    n + 3 * phi.spatial_degree()
}

/// Grid that integrates the cubic velocity terms against `∇φ` exactly and
/// analyzes `uφ` onto the extended lattice without aliasing.
pub(crate) fn quadrature_grid_size(n: usize, degree: usize) -> usize {
    next_smooth((3 * n + degree + 1).max(product_grid_size(n, degree)))
}

/// Smallest grid on which `uψ` (per-axis degree `n + degree`) is recovered
/// alias-free on the extended lattice (per-axis reach `n + 3 degree`).
pub(crate) fn product_grid_size(n: usize, degree: usize) -> usize {
    next_smooth(2 * n + 4 * degree + 1)
}

/// `Q_n(w u)` on the extended lattice, where `w` holds grid values of a
/// trigonometric polynomial of per-axis degree `degree` and `u_grid` the
/// grid values of `u`. The grid needs at least `2 n_u + 4 degree + 1` points
/// per axis.
pub(crate) fn tail_of_weighted(
    u_cutoff: usize,
    u_grid: &[Vec<f64>; 3],
    weight: &[f64],
    degree: usize,
    n: usize,
    grid: &Grid,
) -> Result<Option<SpectralVector>> {
    let ext_cutoff = u_cutoff + 3 * degree;
    if ext_cutoff <= n {
        // the product already lies in V_n
        return Ok(None);
    }
    let ext = Lattice::shared(ext_cutoff)?;
    let prod: Vec<Vec<f64>> = (0..3)
        .map(|c| u_grid[c].iter().zip(weight).map(|(a, w)| a * w).collect())
        .collect();
    let wu = SpectralVector::from_physical(ext, grid, [&prod[0], &prod[1], &prod[2]]);
    Ok(Some(wu.tail_project(n)?))
}

#[derive(Default, Clone, Copy)]
struct Integrands {
    grad: f64,
    parab: f64,
    conv: f64,
    press: f64,
    voigt: f64,
    remainder: f64,
}

fn sample_integrands(
    s: &Sample,
    alpha: f64,
    n: usize,
    phi: &TestFunction,
    grid: &Grid,
    profile: &ProfileOnGrid,
) -> Result<Integrands> {
    let t = s.t();
    let eta = phi.eta(t);
    let eta_t = phi.eta_t(t);
    if eta == 0.0 && eta_t == 0.0 {
        return Ok(Integrands::default());
    }
    let pressure = s.pressure.as_ref().ok_or_else(|| {
        Error::InvalidArgument("local energy terms need a trajectory with stored pressure".into())
    })?;
    let u = s.u();
    let ug = u.to_physical(grid);
    let du = gradient_tensor(u, grid);
    let lap_ut = s.rhs.laplacian().to_physical(grid);
    let p = pressure.to_physical(grid);
    let weight: Vec<f64> = profile.psi.iter().map(|v| v * eta).collect();
    let degree = phi.spatial_degree();
    let tail =
        tail_of_weighted(u.cutoff(), &ug, &weight, degree, n, grid)?.map(|q| q.to_physical(grid));

    let np = grid.num_points();
    let mut acc = Integrands::default();
    for x in 0..np {
        let u3 = [ug[0][x], ug[1][x], ug[2][x]];
        let usq = u3[0] * u3[0] + u3[1] * u3[1] + u3[2] * u3[2];
        let mut gsq = 0.0;
        for row in &du {
            for d in row {
                gsq += d[x] * d[x];
            }
        }
        let phi_x = eta * profile.psi[x];
        let u_dot_gradphi = eta
            * (u3[0] * profile.grad[0][x]
                + u3[1] * profile.grad[1][x]
                + u3[2] * profile.grad[2][x]);
        acc.grad += gsq * phi_x;
        acc.parab += 0.5 * usq * (eta_t * profile.psi[x] + eta * profile.lap[x]);
        acc.conv += 0.5 * usq * u_dot_gradphi;
        acc.press += p[x] * u_dot_gradphi;
        acc.voigt += (lap_ut[0][x] * u3[0] + lap_ut[1][x] * u3[1] + lap_ut[2][x] * u3[2]) * phi_x;
        if let Some(q) = &tail {
            for i in 0..3 {
                let adv = u3[0] * du[i][0][x] + u3[1] * du[i][1][x] + u3[2] * du[i][2][x];
                acc.remainder += adv * q[i][x];
            }
        }
    }
    let inv = 1.0 / np as f64;
    Ok(Integrands {
        grad: acc.grad * inv,
        parab: acc.parab * inv,
        conv: acc.conv * inv,
        press: acc.press * inv,
        voigt: alpha * alpha * acc.voigt * inv,
        remainder: acc.remainder * inv,
    })
}

pub(crate) fn check_window(traj: &Trajectory, phi: &TestFunction) -> Result<f64> {
    let h = sample_spacing(traj)?;
    let inside = traj.samples.iter().filter(|s| phi.is_active(s.t())).count();
    if inside < MIN_WINDOW_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "test-function window [{}, {}] holds {inside} samples, need {MIN_WINDOW_SAMPLES}",
            phi.t0, phi.t1
        )));
    }
    Ok(h)
}

/// All terms of the local energy identity for `φ` along `traj`.
pub fn local_energy_terms(traj: &Trajectory, phi: &TestFunction) -> Result<LocalEnergyReport> {
    let h = check_window(traj, phi)?;
    let n = traj.n();
    let grid = Grid::shared(quadrature_grid_size(n, phi.spatial_degree()));
    let profile = phi.profile_on_grid(&grid);
    let alpha = traj.alpha();
    let per_sample = traj
        .samples
        .par_iter()
        .map(|s| sample_integrands(s, alpha, n, phi, &grid, &profile))
        .collect::<Result<Vec<_>>>()?;
    let integrate = |f: fn(&Integrands) -> f64| {
        let v: Vec<f64> = per_sample.iter().map(f).collect();
        simpson(h, &v)
    };
    let mut rep = LocalEnergyReport {
        t_grad: integrate(|i| i.grad),
        t_parab: integrate(|i| i.parab),
        t_conv: integrate(|i| i.conv),
        t_press: integrate(|i| i.press),
        t_voigt: integrate(|i| i.voigt),
        t_remainder: integrate(|i| i.remainder),
        residual: 0.0,
    };
    rep.residual = rep.t_grad - (rep.flux_terms() + rep.t_remainder);
    Ok(rep)
}
