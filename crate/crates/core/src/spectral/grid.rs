//! Uniform physical grids on the torus and the 3D FFTs between grid values
//! and Fourier coefficients.
//!
//! Synthesis scatters each coefficient into the bin `k mod M` before an
//! inverse transform, so grid values of any trigonometric polynomial are
//! exact regardless of `M`. Analysis is exact for modes whose components are
//! unique modulo `M` within the support of the sampled polynomial.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::lattice::Mode;

pub struct Grid {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid").field("m", &self.m).finish()
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

impl Grid {
    /// Cached grid with `m` points per dimension.
    pub fn shared(m: usize) -> Arc<Grid> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Grid>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        Arc::clone(guard.entry(m).or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Grid {
                m,
                forward: planner.plan_fft_forward(m),
                inverse: planner.plan_fft_inverse(m),
            })
        }))
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn num_points(&self) -> usize {
        self.m * self.m * self.m
    }

    /// Coordinate `2πj/M` of the `j`-th point along one axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.m as f64
    }

    /// Coordinates of the flat point index `p`.
    pub fn point(&self, p: usize) -> [f64; 3] {
        let m = self.m;
        [
            self.coordinate(p / (m * m)),
            self.coordinate((p / m) % m),
            self.coordinate(p % m),
        ]
    }

    #[inline]
    fn bin(&self, k: &Mode) -> usize {
        let m = self.m as i64;
        let w = |c: i32| (c as i64).rem_euclid(m) as usize;
        (w(k[0]) * self.m + w(k[1])) * self.m + w(k[2])
    }

    fn transform(&self, data: &mut [Complex64], dir: Direction) {
        let m = self.m;
        let fft = match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        // innermost axis is contiguous
        fft.process_with_scratch(data, &mut scratch);
        let mut lines = vec![Complex64::default(); data.len()];
        // middle axis
        for a in 0..m {
            for c in 0..m {
                for b in 0..m {
                    lines[(a * m + c) * m + b] = data[(a * m + b) * m + c];
                }
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        for a in 0..m {
            for c in 0..m {
                for b in 0..m {
                    data[(a * m + b) * m + c] = lines[(a * m + c) * m + b];
                }
            }
        }
        // outermost axis
        for b in 0..m {
            for c in 0..m {
                for a in 0..m {
                    lines[(b * m + c) * m + a] = data[(a * m + b) * m + c];
                }
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        for b in 0..m {
            for c in 0..m {
                for a in 0..m {
                    data[(a * m + b) * m + c] = lines[(b * m + c) * m + a];
                }
            }
        }
    }

    /// Grid values `f(x) = Σ c_k e^{ik·x}` of a complex-coefficient series.
    pub fn synthesize_complex(&self, modes: &[Mode], coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut data = vec![Complex64::default(); self.num_points()];
        for (k, c) in modes.iter().zip(coeffs) {
            data[self.bin(k)] += *c;
        }
        self.transform(&mut data, Direction::Inverse);
        data
    }

    /// Grid values of a real field given Hermitian coefficients.
    pub fn synthesize(&self, modes: &[Mode], coeffs: &[Complex64]) -> Vec<f64> {
        self.synthesize_complex(modes, coeffs)
            .into_iter()
            .map(|z| z.re)
            .collect()
    }

    /// Two real fields from one complex transform: `a + i b`.
    pub fn synthesize_pair(
        &self,
        modes: &[Mode],
        a: &[Complex64],
        b: &[Complex64],
    ) -> (Vec<f64>, Vec<f64>) {
        let mut data = vec![Complex64::default(); self.num_points()];
        let i = Complex64::i();
        for ((k, ca), cb) in modes.iter().zip(a).zip(b) {
            data[self.bin(k)] += *ca + i * *cb;
        }
        self.transform(&mut data, Direction::Inverse);
        data.into_iter().map(|z| (z.re, z.im)).unzip()
    }

    /// Forward transform, normalized so that the result at bin `k` is the
    /// Fourier coefficient `c_k = M^{-3} Σ_x f(x) e^{-ik·x}`.
    pub fn analyze_full(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.num_points());
        let mut data = values.to_vec();
        self.transform(&mut data, Direction::Forward);
        let scale = 1.0 / self.num_points() as f64;
        for z in &mut data {
            *z *= scale;
        }
        data
    }

    /// Coefficients of a real grid function at the requested modes,
    /// symmetrized so that the result is exactly Hermitian.
    pub fn analyze(&self, values: &[f64], modes: &[Mode]) -> Vec<Complex64> {
        let data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let full = self.analyze_full(&data);
        modes
            .iter()
            .map(|k| {
                let c = full[self.bin(k)];
                let cm = full[self.bin(&[-k[0], -k[1], -k[2]])].conj();
                (c + cm) * 0.5
            })
            .collect()
    }

    /// Coefficients of two real grid functions from one complex transform.
    pub fn analyze_pair(
        &self,
        a: &[f64],
        b: &[f64],
        modes: &[Mode],
    ) -> (Vec<Complex64>, Vec<Complex64>) {
        let data: Vec<Complex64> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect();
        let full = self.analyze_full(&data);
        let half = Complex64::new(0.5, 0.0);
        let minus_half_i = Complex64::new(0.0, -0.5);
        modes
            .iter()
            .map(|k| {
                let c = full[self.bin(k)];
                let cm = full[self.bin(&[-k[0], -k[1], -k[2]])].conj();
                ((c + cm) * half, (c - cm) * minus_half_i)
            })
            .unzip()
    }
}

/// Normalized mean `(2π)^{-3} ∫ f` of grid values (trapezoidal rule).
pub fn grid_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthesize_matches_direct_evaluation() {
        let grid = Grid::shared(7);
        let modes = vec![[1, 0, 0], [-1, 0, 0], [0, 2, -1], [0, -2, 1]];
        let c = Complex64::new(0.3, -0.2);
        let d = Complex64::new(-0.1, 0.5);
        let coeffs = vec![c, c.conj(), d, d.conj()];
        let vals = grid.synthesize(&modes, &coeffs);
        for p in [0, 5, 17, 200, 342] {
            let x = grid.point(p);
            let mut direct = 0.0;
            for (k, ck) in modes.iter().zip(&coeffs) {
                let phase = k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2];
                direct += (ck * Complex64::from_polar(1.0, phase)).re;
            }
            assert!((vals[p] - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn pair_round_trip() {
        let grid = Grid::shared(9);
        let modes = vec![[1, 2, 0], [-1, -2, 0], [0, 0, 3], [0, 0, -3]];
        let a = vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(1.0, -2.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(0.0, -0.5),
        ];
        let b = vec![
            Complex64::new(-0.5, 0.25),
            Complex64::new(-0.5, -0.25),
            Complex64::new(2.0, 0.0),
            Complex64::new(2.0, 0.0),
        ];
        let (fa, fb) = grid.synthesize_pair(&modes, &a, &b);
        let (ra, rb) = grid.analyze_pair(&fa, &fb, &modes);
        for i in 0..modes.len() {
            assert!((ra[i] - a[i]).norm() < 1e-14);
            assert!((rb[i] - b[i]).norm() < 1e-14);
        }
        let single = grid.analyze(&fa, &modes);
        for i in 0..modes.len() {
            assert!((single[i] - a[i]).norm() < 1e-14);
        }
    }
}
