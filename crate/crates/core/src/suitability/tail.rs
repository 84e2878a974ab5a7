//! The tail functional `g(t) = ‖Q_n(φu)‖_{L∞}`, its bound in terms of the
//! high-mode energy, and the remainder integral `∫((u·∇)u, Q_n(uφ))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::local_energy::{check_window, gradient_tensor, quadrature_grid_size, tail_of_weighted};
use super::test_function::TestFunction;
use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::quadrature::simpson;
use crate::spectral::{next_smooth, Grid, SpectralVelocity};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailSample {
    pub t: f64,
    /// `max_x |Q_n(φu)(t, x)|` on the oversampled grid.
    pub g: f64,
    /// `n^2 Σ_{|k|≥n/2} |d_k|^2 + Σ |d_k|^2 / n`
    pub bound: f64,
    /// `Σ_{|k|≥n/2} |d_k|^2`
    pub tail_energy: f64,
    /// `Σ |d_k|^2`
    pub total: f64,
}

impl TailSample {
    /// `g^2 / bound`, zero when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.bound > 0.0 {
            self.g * self.g / self.bound
        } else if self.g == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Smallest `c` with `g^2 <= c · bound` at every sample.
pub fn fitted_tail_constant(samples: &[TailSample]) -> f64 {
    samples.iter().map(TailSample::ratio).fold(0.0, f64::max)
}

/// Grid for the sup of `Q_n(φu)`: twice the smallest grid that resolves the
/// product's per-axis degree `n_u + degree`.
pub(crate) fn sup_grid_size(n_u: usize, degree: usize) -> usize {
    next_smooth(2 * (2 * (n_u + degree) + 1))
}

/// Energy of `u` on `|k| >= n/2` and in total.
pub fn tail_energy(u: &SpectralVelocity, n: usize) -> (f64, f64) {
    let half = 0.25 * (n * n) as f64;
    let lattice = u.lattice();
    let mut tail = 0.0;
    let mut total = 0.0;
    for (i, d) in u.coeffs().iter().enumerate() {
        let e: f64 = d.iter().map(|z| z.norm_sqr()).sum();
        total += e;
        if lattice.norm_sq(i) >= half {
            tail += e;
        }
    }
    (tail, total)
}

pub(super) struct Pointwise {
    pub(super) g: f64,
    pub(super) remainder: f64,
}

pub(super) fn evaluate(
    u: &SpectralVelocity,
    t: f64,
    phi: &TestFunction,
    n: usize,
) -> Result<Pointwise> {
    let eta = phi.eta(t);
    if eta == 0.0 {
        return Ok(Pointwise {
            g: 0.0,
            remainder: 0.0,
        });
    }
    let degree = phi.spatial_degree();
    let n_u = u.cutoff();
    let grid = Grid::shared(quadrature_grid_size(n_u, degree));
    let ug = u.to_physical(&grid);
    let weight: Vec<f64> = phi
        .profile_on_grid(&grid)
        .psi
        .into_iter()
        .map(|v| v * eta)
        .collect();
    let Some(q) = tail_of_weighted(n_u, &ug, &weight, degree, n, &grid)? else {
        return Ok(Pointwise {
            g: 0.0,
            remainder: 0.0,
        });
    };

    let du = gradient_tensor(u, &grid);
    let qg = q.to_physical(&grid);
    let mut acc = 0.0;
    for x in 0..grid.num_points() {
        for i in 0..3 {
            let adv = ug[0][x] * du[i][0][x] + ug[1][x] * du[i][1][x] + ug[2][x] * du[i][2][x];
            acc += adv * qg[i][x];
        }
    }
    let remainder = acc / grid.num_points() as f64;

    let fine = Grid::shared(sup_grid_size(n_u, degree));
    let qf = q.to_physical(&fine);
    let g = (0..fine.num_points())
        .map(|x| (qf[0][x] * qf[0][x] + qf[1][x] * qf[1][x] + qf[2][x] * qf[2][x]).sqrt())
        .fold(0.0, f64::max);
    Ok(Pointwise { g, remainder })
}

/// `g(t)` and its high-mode bound at every sample, for the split at `n`.
pub fn tail_functional(traj: &Trajectory, phi: &TestFunction, n: usize) -> Result<Vec<TailSample>> {
    check_window(traj, phi)?;
    traj.samples
        .par_iter()
        .map(|s| {
            let u = s.u();
            let (tail, total) = tail_energy(u, n);
            let nf = n as f64;
            Ok(TailSample {
                t: s.t(),
                g: evaluate(u, s.t(), phi, n)?.g,
                bound: nf * nf * tail + total / nf,
                tail_energy: tail,
                total,
            })
        })
        .collect()
}

/// Signed remainder integral with its Hölder-chain upper bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderReport {
    /// `∫((u·∇)u, Q_n(uφ))`
    pub integral: f64,
    /// `sup_t ‖u‖ · (∫‖∇u‖^2)^{1/2} · (∫g^2)^{1/2}`
    pub holder_bound: f64,
    /// `∫ g^2`
    pub g_sq_integral: f64,
}

/// Remainder integral with `n` taken as the trajectory cutoff.
pub fn remainder_term(traj: &Trajectory, phi: &TestFunction) -> Result<RemainderReport> {
    let h = check_window(traj, phi)?;
    let n = traj.n();
    let pointwise = traj
        .samples
        .par_iter()
        .map(|s| evaluate(s.u(), s.t(), phi, n))
        .collect::<Result<Vec<_>>>()?;
    let rem: Vec<f64> = pointwise.iter().map(|p| p.remainder).collect();
    let g2: Vec<f64> = pointwise.iter().map(|p| p.g * p.g).collect();
    let grad: Vec<f64> = traj.samples.iter().map(|s| s.u().grad_sqnorm()).collect();
    let sup_u = traj
        .samples
        .iter()
        .map(|s| s.u().energy())
        .fold(0.0, f64::max)
        .sqrt();
    let g_sq_integral = simpson(h, &g2);
    Ok(RemainderReport {
        integral: simpson(h, &rem),
        holder_bound: sup_u * simpson(h, &grad).max(0.0).sqrt() * g_sq_integral.max(0.0).sqrt(),
        g_sq_integral,
    })
}
