use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Grid;

/// Separable nonnegative test function
/// `φ(t, x) = A η(t) Π_i ((1 + cos x_i) / 2)^m`.
///
/// `η(t) = exp(β - β / (1 - s^2))` with `s = (2t - t0 - t1) / (t1 - t0)` is a
/// smooth bump supported on `[t0, t1]` with peak value one. The spatial
/// profile is a trigonometric polynomial of degree `m` per axis, so products
/// with band-limited velocities stay band-limited.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub t0: f64,
    pub t1: f64,
    /// Bump sharpness `β > 0`.
    pub sharpness: f64,
    pub m: u32,
    pub amplitude: f64,
    /// When false the spatial profile is replaced by the constant one.
    pub spatial: bool,
}

/// Spatial profile and its derivatives sampled on a grid.
pub struct ProfileOnGrid {
    pub psi: Vec<f64>,
    pub grad: [Vec<f64>; 3],
    pub lap: Vec<f64>,
}

impl TestFunction {
    /// Requires `0 < t0 < t1 < horizon` and `m >= 1`.
    pub fn new(t0: f64, t1: f64, m: u32, amplitude: f64, horizon: f64) -> Result<Self> {
        if !(0.0 < t0 && t0 < t1 && t1 < horizon) {
            return Err(Error::InvalidArgument(format!(
                "test-function window [{t0}, {t1}] must lie inside (0, {horizon})"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidArgument(
                "spatial profile exponent m must be >= 1".into(),
            ));
        }
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "amplitude must be finite and >= 0, got {amplitude}"
            )));
        }
        Ok(Self {
            t0,
            t1,
            sharpness: 1.0,
            m,
            amplitude,
            spatial: true,
        })
    }

    pub fn with_sharpness(mut self, beta: f64) -> Self {
        self.sharpness = beta;
        self
    }

    /// Same time bump with the spatial profile replaced by one.
    pub fn space_independent(mut self) -> Self {
        self.spatial = false;
        self
    }

    /// Per-axis trigonometric degree of the spatial profile.
    pub fn spatial_degree(&self) -> usize {
        if self.spatial {
            self.m as usize
        } else {
            0
        }
    }

    fn s_of(&self, t: f64) -> f64 {
        (2.0 * t - self.t0 - self.t1) / (self.t1 - self.t0)
    }

    pub fn is_active(&self, t: f64) -> bool {
        t > self.t0 && t < self.t1
    }

    /// `A η(t)`.
    pub fn eta(&self, t: f64) -> f64 {
        if !self.is_active(t) {
            return 0.0;
        }
        let s = self.s_of(t);
        let b = self.sharpness;
        self.amplitude * (b - b / (1.0 - s * s)).exp()
    }

    /// `A η'(t)`.
    pub fn eta_t(&self, t: f64) -> f64 {
        if !self.is_active(t) {
            return 0.0;
        }
        let s = self.s_of(t);
        let w = 1.0 - s * s;
        let ds_dt = 2.0 / (self.t1 - self.t0);
        self.eta(t) * (-self.sharpness * 2.0 * s / (w * w)) * ds_dt
    }

    fn axis(&self, x: f64) -> (f64, f64, f64) {
        let m = self.m as i32;
        let mf = self.m as f64;
        let c = 0.5 * (1.0 + x.cos());
        let f = c.powi(m);
        let d1 = -0.5 * mf * x.sin() * c.powi(m - 1);
        let mut d2 = -0.5 * mf * x.cos() * c.powi(m - 1);
        if m >= 2 {
            d2 += 0.25 * mf * (mf - 1.0) * x.sin().powi(2) * c.powi(m - 2);
        }
        (f, d1, d2)
    }

    /// Spatial profile `ψ(x)` with gradient and Laplacian.
    pub fn profile(&self, x: [f64; 3]) -> (f64, [f64; 3], f64) {
        if !self.spatial {
            return (1.0, [0.0; 3], 0.0);
        }
        let a = [self.axis(x[0]), self.axis(x[1]), self.axis(x[2])];
        let psi = a[0].0 * a[1].0 * a[2].0;
        let grad = [
            a[0].1 * a[1].0 * a[2].0,
            a[0].0 * a[1].1 * a[2].0,
            a[0].0 * a[1].0 * a[2].1,
        ];
        let lap = a[0].2 * a[1].0 * a[2].0 + a[0].0 * a[1].2 * a[2].0 + a[0].0 * a[1].0 * a[2].2;
        (psi, grad, lap)
    }

    pub fn value(&self, t: f64, x: [f64; 3]) -> f64 {
        self.eta(t) * self.profile(x).0
    }

    pub fn time_derivative(&self, t: f64, x: [f64; 3]) -> f64 {
        self.eta_t(t) * self.profile(x).0
    }

    pub fn gradient(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        let e = self.eta(t);
        self.profile(x).1.map(|g| e * g)
    }

    pub fn laplacian(&self, t: f64, x: [f64; 3]) -> f64 {
        self.eta(t) * self.profile(x).2
    }

    pub fn gradient_time_derivative(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        let e = self.eta_t(t);
        self.profile(x).1.map(|g| e * g)
    }

    /// Profile, gradient, and Laplacian at every point of `grid`.
    pub fn profile_on_grid(&self, grid: &Grid) -> ProfileOnGrid {
        let m = grid.size();
        let axis: Vec<(f64, f64, f64)> = (0..m)
            .map(|j| {
                if self.spatial {
                    self.axis(grid.coordinate(j))
                } else {
                    (1.0, 0.0, 0.0)
                }
            })
            .collect();
        let np = grid.num_points();
        let mut psi = vec![0.0; np];
        let mut grad = [vec![0.0; np], vec![0.0; np], vec![0.0; np]];
        let mut lap = vec![0.0; np];
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let p = (a * m + b) * m + c;
                    let (fa, ga, ha) = axis[a];
                    let (fb, gb, hb) = axis[b];
                    let (fc, gc, hc) = axis[c];
                    psi[p] = fa * fb * fc;
                    grad[0][p] = ga * fb * fc;
                    grad[1][p] = fa * gb * fc;
                    grad[2][p] = fa * fb * gc;
                    lap[p] = ha * fb * fc + fa * hb * fc + fa * fb * hc;
                }
            }
        }
        ProfileOnGrid { psi, grad, lap }
    }
}
