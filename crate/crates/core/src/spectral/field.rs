//! Spectral fields on a [`Lattice`]: vector fields (velocities, gradients,
//! convective terms) and mean-free scalar fields (pressure).
//!
//! Coefficients are indexed like the lattice modes. All square norms use the
//! normalized inner product `(2π)^{-3} ∫`, i.e. `Σ_k |f_k|^2`.

use std::sync::Arc;

use num_complex::Complex64;

use super::grid::Grid;
use super::lattice::{mode_norm_sq, Lattice, Mode};
use crate::error::{Error, Result};

pub type Vec3c = [Complex64; 3];

const ZERO3: Vec3c = [Complex64 { re: 0.0, im: 0.0 }; 3];

#[inline]
fn dot_k(k: &Mode, v: &Vec3c) -> Complex64 {
    v[0] * k[0] as f64 + v[1] * k[1] as f64 + v[2] * k[2] as f64
}

#[inline]
fn norm_sq3(v: &Vec3c) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()
}

/// Complex conjugate with the imaginary part negated as `0 - im`, so a zero
/// imaginary part stays `+0` and an all-zero field is its own canonical form.
#[inline]
pub fn canonical_conj(z: Complex64) -> Complex64 {
    Complex64::new(z.re, 0.0 - z.im)
}

/// Leray projection of a single coefficient: `g - (g·k) k / |k|^2`.
#[inline]
pub fn project_mode(k: &Mode, g: &Vec3c) -> Vec3c {
    let q = mode_norm_sq(k) as f64;
    let s = dot_k(k, g) / q;
    [
        g[0] - s * k[0] as f64,
        g[1] - s * k[1] as f64,
        g[2] - s * k[2] as f64,
    ]
}

fn check_same_lattice(a: &Lattice, b: &Lattice) -> Result<()> {
    if a != b {
        return Err(Error::InvalidArgument(format!(
            "lattice mismatch: cutoff {} vs {}",
            a.cutoff(),
            b.cutoff()
        )));
    }
    Ok(())
}

/// Three-component spectral field. Velocities are the solenoidal members.
#[derive(Clone, Debug)]
pub struct SpectralVector {
    lattice: Arc<Lattice>,
    coeffs: Vec<Vec3c>,
}

/// A solenoidal, Hermitian [`SpectralVector`] (the Galerkin unknowns `d_k`).
pub type SpectralVelocity = SpectralVector;

impl SpectralVector {
    pub fn zeros(lattice: Arc<Lattice>) -> Self {
        let coeffs = vec![ZERO3; lattice.len()];
        Self { lattice, coeffs }
    }

    pub fn from_coeffs(lattice: Arc<Lattice>, coeffs: Vec<Vec3c>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::InvalidField(format!(
                "expected {} coefficients for cutoff {}, got {}",
                lattice.len(),
                lattice.cutoff(),
                coeffs.len()
            )));
        }
        Ok(Self { lattice, coeffs })
    }

    pub fn from_fn(lattice: Arc<Lattice>, f: impl Fn(&Mode) -> Vec3c) -> Self {
        let coeffs = lattice.modes().iter().map(f).collect();
        Self { lattice, coeffs }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn cutoff(&self) -> usize {
        self.lattice.cutoff()
    }

    pub fn coeffs(&self) -> &[Vec3c] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Vec3c] {
        &mut self.coeffs
    }

    pub fn get(&self, k: &Mode) -> Option<Vec3c> {
        self.lattice.index_of(k).map(|i| self.coeffs[i])
    }

    /// Largest `|d_{-k} - conj(d_k)|` over the lattice.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.coeffs.len() {
            let j = self.lattice.conj_index(i);
            for c in 0..3 {
                worst = worst.max((self.coeffs[j][c] - self.coeffs[i][c].conj()).norm());
            }
        }
        worst
    }

    /// Overwrites the lower half-lattice with [`canonical_conj`] of the upper
    /// half, so the symmetry holds bitwise.
    pub fn symmetrize(&mut self) {
        for i in self.lattice.half_range() {
            let j = self.lattice.conj_index(i);
            self.coeffs[j] = self.coeffs[i].map(canonical_conj);
        }
    }

    /// Largest `|k·d_k| / (|k| |d_k|)` over nonzero coefficients.
    pub fn divergence_defect(&self) -> f64 {
        self.lattice
            .modes()
            .iter()
            .zip(&self.coeffs)
            .filter_map(|(k, d)| {
                let mag = norm_sq3(d).sqrt();
                (mag > 0.0).then(|| dot_k(k, d).norm() / ((mode_norm_sq(k) as f64).sqrt() * mag))
            })
            .fold(0.0, f64::max)
    }

    /// Checks Hermitian symmetry to a relative tolerance.
    pub fn validate(&self) -> Result<()> {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let defect = self.hermitian_defect();
        if defect > 1e-12 * scale {
            return Err(Error::InvalidField(format!(
                "Hermitian symmetry violated (defect {defect:e})"
            )));
        }
        if self.coeffs.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::InvalidField("non-finite coefficient".into()));
        }
        Ok(())
    }

    /// Validates Hermitian symmetry and solenoidality, as required of a velocity.
    pub fn validate_velocity(&self) -> Result<()> {
        self.validate()?;
        let defect = self.divergence_defect();
        if defect > 1e-12 {
            return Err(Error::InvalidField(format!(
                "velocity is not divergence-free (defect {defect:e})"
            )));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest component-wise coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(*self.lattice, *other.lattice);
        self.coeffs
            .iter()
            .flatten()
            .zip(other.coeffs.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Leray projector `g_k - (g_k·k) k / |k|^2`.
    pub fn leray_project(&self) -> Self {
        Self::from_fn(Arc::clone(&self.lattice), |k| {
            project_mode(k, &self.coeffs[self.lattice.index_of(k).unwrap()])
        })
    }

    /// `P_m`: Leray projection followed by zeroing every mode with `|k| > m`.
    pub fn truncate(&self, m: usize) -> Self {
        let m_sq = (m * m) as i64;
        let coeffs = self
            .lattice
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(k, g)| {
                if mode_norm_sq(k) <= m_sq {
                    project_mode(k, g)
                } else {
                    ZERO3
                }
            })
            .collect();
        Self {
            lattice: Arc::clone(&self.lattice),
            coeffs,
        }
    }

    /// `Q_n = P - P_n`: the solenoidal part supported on `n < |k| <= N`.
    pub fn tail_project(&self, n: usize) -> Result<Self> {
        if n >= self.cutoff() {
            return Err(Error::InvalidArgument(format!(
                "tail cutoff {n} must be below the lattice cutoff {}",
                self.cutoff()
            )));
        }
        let n_sq = (n * n) as i64;
        let coeffs = self
            .lattice
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(k, g)| {
                if mode_norm_sq(k) > n_sq {
                    project_mode(k, g)
                } else {
                    ZERO3
                }
            })
            .collect();
        Ok(Self {
            lattice: Arc::clone(&self.lattice),
            coeffs,
        })
    }

    /// Copies coefficients onto another lattice: modes absent from the target
    /// are dropped, new modes are zero.
    pub fn resample(&self, target: Arc<Lattice>) -> Self {
        if *target == *self.lattice {
            return self.clone();
        }
        let coeffs = target
            .modes()
            .iter()
            .map(|k| self.get(k).unwrap_or(ZERO3))
            .collect();
        Self {
            lattice: target,
            coeffs,
        }
    }

    pub fn component(&self, c: usize) -> SpectralScalar {
        SpectralScalar {
            lattice: Arc::clone(&self.lattice),
            coeffs: self.coeffs.iter().map(|v| v[c]).collect(),
        }
    }

    pub fn from_components(components: [&SpectralScalar; 3]) -> Result<Self> {
        let lattice = Arc::clone(&components[0].lattice);
        check_same_lattice(&lattice, &components[1].lattice)?;
        check_same_lattice(&lattice, &components[2].lattice)?;
        let coeffs = (0..lattice.len())
            .map(|i| {
                [
                    components[0].coeffs[i],
                    components[1].coeffs[i],
                    components[2].coeffs[i],
                ]
            })
            .collect();
        Ok(Self { lattice, coeffs })
    }

    /// `div u`: multiplier `i k·d_k`.
    pub fn divergence(&self) -> SpectralScalar {
        let i = Complex64::i();
        SpectralScalar {
            lattice: Arc::clone(&self.lattice),
            coeffs: self
                .lattice
                .modes()
                .iter()
                .zip(&self.coeffs)
                .map(|(k, d)| i * dot_k(k, d))
                .collect(),
        }
    }

    /// `curl u`: multiplier `i k × d_k`.
    pub fn curl(&self) -> Self {
        let i = Complex64::i();
        let coeffs = self
            .lattice
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(k, d)| {
                let (kx, ky, kz) = (k[0] as f64, k[1] as f64, k[2] as f64);
                [
                    i * (d[2] * ky - d[1] * kz),
                    i * (d[0] * kz - d[2] * kx),
                    i * (d[1] * kx - d[0] * ky),
                ]
            })
            .collect();
        Self {
            lattice: Arc::clone(&self.lattice),
            coeffs,
        }
    }

    /// `Δu`: multiplier `-|k|^2`.
    pub fn laplacian(&self) -> Self {
        let mut out = self.clone();
        for (k, d) in self.lattice.modes().iter().zip(out.coeffs.iter_mut()) {
            let q = -(mode_norm_sq(k) as f64);
            for c in d.iter_mut() {
                *c *= q;
            }
        }
        out
    }

    /// `Σ_k (1 + |k|^2)^s |d_k|^2`.
    pub fn sobolev_sqnorm(&self, s: f64) -> f64 {
        self.weighted_sqnorm(|q| (1.0 + q).powf(s))
    }

    /// `‖u‖^2 = Σ |d_k|^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(norm_sq3).sum()
    }

    /// `‖∇u‖^2 = Σ |k|^2 |d_k|^2`.
    pub fn grad_sqnorm(&self) -> f64 {
        self.weighted_sqnorm(|q| q)
    }

    /// `‖Δu‖^2 = Σ |k|^4 |d_k|^2`.
    pub fn lap_sqnorm(&self) -> f64 {
        self.weighted_sqnorm(|q| q * q)
    }

    /// `Σ_k w(|k|^2) |d_k|^2`.
    pub fn weighted_sqnorm(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.lattice
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(k, d)| w(mode_norm_sq(k) as f64) * norm_sq3(d))
            .sum()
    }

    /// Normalized `L^2` inner product `(2π)^{-3} ∫ u·v = Re Σ_k u_k · conj(v_k)`.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(*self.lattice, *other.lattice);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (0..3).map(|c| (a[c] * b[c].conj()).re).sum::<f64>())
            .sum()
    }

    pub fn scale(&mut self, a: f64) {
        for z in self.coeffs.iter_mut().flatten() {
            *z *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &Self) {
        assert_eq!(*self.lattice, *x.lattice);
        for (y, xv) in self.coeffs.iter_mut().zip(&x.coeffs) {
            for c in 0..3 {
                y[c] += xv[c] * a;
            }
        }
    }

    /// Grid values of the three components on `grid`.
    pub fn to_physical(&self, grid: &Grid) -> [Vec<f64>; 3] {
        let c0 = self.component(0).coeffs;
        let c1 = self.component(1).coeffs;
        let c2 = self.component(2).coeffs;
        let modes = self.lattice.modes();
        let (a, b) = grid.synthesize_pair(modes, &c0, &c1);
        let c = grid.synthesize(modes, &c2);
        [a, b, c]
    }

    /// Coefficients on `lattice` of three real grid functions.
    pub fn from_physical(lattice: Arc<Lattice>, grid: &Grid, values: [&[f64]; 3]) -> Self {
        let modes = lattice.modes();
        let (a, b) = grid.analyze_pair(values[0], values[1], modes);
        let c = grid.analyze(values[2], modes);
        let coeffs = (0..lattice.len()).map(|i| [a[i], b[i], c[i]]).collect();
        Self { lattice, coeffs }
    }
}

/// Mean-free scalar spectral field (pressure, divergences, components).
#[derive(Clone, Debug)]
pub struct SpectralScalar {
    lattice: Arc<Lattice>,
    coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(lattice: Arc<Lattice>) -> Self {
        let coeffs = vec![Complex64::default(); lattice.len()];
        Self { lattice, coeffs }
    }

    pub fn from_coeffs(lattice: Arc<Lattice>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::InvalidField(format!(
                "expected {} coefficients for cutoff {}, got {}",
                lattice.len(),
                lattice.cutoff(),
                coeffs.len()
            )));
        }
        Ok(Self { lattice, coeffs })
    }

    pub fn from_fn(lattice: Arc<Lattice>, f: impl Fn(&Mode) -> Complex64) -> Self {
        let coeffs = lattice.modes().iter().map(f).collect();
        Self { lattice, coeffs }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn cutoff(&self) -> usize {
        self.lattice.cutoff()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn get(&self, k: &Mode) -> Option<Complex64> {
        self.lattice.index_of(k).map(|i| self.coeffs[i])
    }

    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| {
                let j = self.lattice.conj_index(i);
                (self.coeffs[j] - self.coeffs[i].conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(*self.lattice, *other.lattice);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Zeroes every mode with `|k| > m`.
    pub fn truncate(&self, m: usize) -> Self {
        let m_sq = (m * m) as i64;
        Self::from_fn(Arc::clone(&self.lattice), |k| {
            if mode_norm_sq(k) <= m_sq {
                self.coeffs[self.lattice.index_of(k).unwrap()]
            } else {
                Complex64::default()
            }
        })
    }

    pub fn resample(&self, target: Arc<Lattice>) -> Self {
        if *target == *self.lattice {
            return self.clone();
        }
        let coeffs = target
            .modes()
            .iter()
            .map(|k| self.get(k).unwrap_or_default())
            .collect();
        Self {
            lattice: target,
            coeffs,
        }
    }

    /// `∇p`: multiplier `i k p_k`.
    pub fn gradient(&self) -> SpectralVector {
        let i = Complex64::i();
        SpectralVector::from_fn(Arc::clone(&self.lattice), |k| {
            let p = self.coeffs[self.lattice.index_of(k).unwrap()];
            [
                i * p * k[0] as f64,
                i * p * k[1] as f64,
                i * p * k[2] as f64,
            ]
        })
    }

    pub fn laplacian(&self) -> Self {
        Self::from_fn(Arc::clone(&self.lattice), |k| {
            self.coeffs[self.lattice.index_of(k).unwrap()] * -(mode_norm_sq(k) as f64)
        })
    }

    pub fn sobolev_sqnorm(&self, s: f64) -> f64 {
        self.lattice
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(k, p)| (1.0 + mode_norm_sq(k) as f64).powf(s) * p.norm_sqr())
            .sum()
    }

    pub fn to_physical(&self, grid: &Grid) -> Vec<f64> {
        grid.synthesize(self.lattice.modes(), &self.coeffs)
    }

    pub fn from_physical(lattice: Arc<Lattice>, grid: &Grid, values: &[f64]) -> Self {
        let coeffs = grid.analyze(values, lattice.modes());
        Self { lattice, coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::grid_mean;

    fn lat(n: usize) -> Arc<Lattice> {
        Lattice::shared(n).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Real field with `g_k` at `k` and its conjugate at `-k`.
    fn single_pair(n: usize, k: Mode, g: Vec3c) -> SpectralVector {
        let l = lat(n);
        let mut f = SpectralVector::zeros(Arc::clone(&l));
        let i = l.index_of(&k).unwrap();
        f.coeffs_mut()[i] = g;
        f.coeffs_mut()[l.conj_index(i)] = [g[0].conj(), g[1].conj(), g[2].conj()];
        f
    }

    #[test]
    fn leray_single_mode_example() {
        let l = lat(1);
        let mut g = SpectralVector::zeros(Arc::clone(&l));
        let i = l.index_of(&[1, 0, 0]).unwrap();
        g.coeffs_mut()[i] = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let p = g.leray_project();
        assert_eq!(p.coeffs()[i], [c(0.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn leray_annihilates_pure_gradient() {
        let l = lat(3);
        let g = SpectralVector::from_fn(Arc::clone(&l), |k| {
            let a = c(k[0] as f64 - 0.5, k[1] as f64);
            [a * k[0] as f64, a * k[1] as f64, a * k[2] as f64]
        });
        assert!(g.leray_project().max_abs() < 1e-14);
    }

    #[test]
    fn truncate_outside_cutoff_is_zero() {
        let f = single_pair(4, [3, 0, 0], [c(0.0, 0.0), c(1.0, 0.5), c(0.0, -1.0)]);
        assert!(f.truncate(2).max_abs() == 0.0);
        assert!(f.truncate(3).max_abs_diff(&f) == 0.0);
    }

    #[test]
    fn tail_project_rejects_cutoff_at_or_above_lattice() {
        let f = SpectralVector::zeros(lat(4));
        assert!(matches!(f.tail_project(4), Err(Error::InvalidArgument(_))));
        assert!(f.tail_project(3).is_ok());
    }

    #[test]
    fn divergence_of_sin_x() {
        // u = (sin x, 0, 0) has coefficients -i/2 at (1,0,0) and i/2 at (-1,0,0)
        let f = single_pair(1, [1, 0, 0], [c(0.0, -0.5), c(0.0, 0.0), c(0.0, 0.0)]);
        let div = f.divergence();
        assert!((div.get(&[1, 0, 0]).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        assert!((div.get(&[-1, 0, 0]).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn laplacian_multiplier() {
        let f = single_pair(3, [1, 2, -1], [c(0.1, 0.2), c(0.3, 0.0), c(0.0, 1.0)]);
        let lap = f.laplacian();
        let i = f.lattice().index_of(&[1, 2, -1]).unwrap();
        for comp in 0..3 {
            assert_eq!(lap.coeffs()[i][comp], f.coeffs()[i][comp] * -6.0);
        }
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let l = lat(3);
        let p = SpectralScalar::from_fn(Arc::clone(&l), |k| c(k[0] as f64, k[2] as f64 * 0.5));
        assert!(p.gradient().curl().max_abs() < 1e-13);
    }

    #[test]
    fn sobolev_single_pair() {
        let a = c(0.3, -0.4);
        let f = single_pair(1, [0, 0, 1], [a, c(0.0, 0.0), c(0.0, 0.0)]);
        for s in [0.0, 0.5, 1.0, 2.0, -1.0] {
            let expected = 2.0 * 2f64.powf(s) * a.norm_sqr();
            assert!((f.sobolev_sqnorm(s) - expected).abs() < 1e-15);
        }
        assert_eq!(SpectralVector::zeros(lat(2)).sobolev_sqnorm(1.5), 0.0);
    }

    #[test]
    fn parseval_against_grid_mean_square() {
        let f = single_pair(2, [1, 1, 0], [c(0.2, 0.1), c(-0.2, -0.1), c(0.3, 0.0)]);
        let grid = Grid::shared(f.lattice().grid_size());
        let [a, b, cc] = f.to_physical(&grid);
        let ms: Vec<f64> = (0..a.len())
            .map(|p| a[p] * a[p] + b[p] * b[p] + cc[p] * cc[p])
            .collect();
        assert!((grid_mean(&ms) - f.energy()).abs() < 1e-14);
    }

    #[test]
    fn resample_embeds_and_restricts() {
        let f = single_pair(2, [1, 1, 0], [c(0.2, 0.1), c(-0.2, -0.1), c(0.3, 0.0)]);
        let up = f.resample(lat(5));
        assert_eq!(up.energy(), f.energy());
        let back = up.resample(lat(2));
        assert_eq!(back.max_abs_diff(&f), 0.0);
        assert_eq!(up.resample(lat(1)).energy(), 0.0);
    }

    #[test]
    fn validate_flags_broken_symmetry() {
        let l = lat(1);
        let mut f = SpectralVector::zeros(Arc::clone(&l));
        f.coeffs_mut()[0][0] = c(1.0, 0.0);
        assert!(matches!(f.validate(), Err(Error::InvalidField(_))));
    }
}
