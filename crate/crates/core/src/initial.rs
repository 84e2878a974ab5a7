//! Admissible solenoidal initial data.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{mode_norm_sq, Lattice, Mode, SpectralVector, SpectralVelocity};

/// Shell spectrum `E(|k|) ∝ |k|^shape exp(-(|k|/k0)^2)` rescaled to total
/// energy `‖u‖^2 = energy`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectrumSpec {
    pub k0: f64,
    pub energy: f64,
    pub shape: f64,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        Self {
            k0: 2.0,
            energy: 1.0,
            shape: 4.0,
        }
    }
}

impl SpectrumSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.k0 >= 1.0) || !self.k0.is_finite() {
            return Err(Error::Configuration(format!(
                "spectrum k0 must be >= 1, got {}",
                self.k0
            )));
        }
        if !(self.energy > 0.0) || !self.energy.is_finite() {
            return Err(Error::Configuration(format!(
                "spectrum energy must be > 0, got {}",
                self.energy
            )));
        }
        if !self.shape.is_finite() {
            return Err(Error::Configuration("spectrum shape must be finite".into()));
        }
        Ok(())
    }
}

/// `amplitude * (sin x cos y, -cos x sin y, 0)` on the lattice of cutoff `n`
/// (needs `n >= 2` to hold the `|k|^2 = 2` shell).
pub fn taylor_green(amplitude: f64, n: usize) -> Result<SpectralVelocity> {
    if !amplitude.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "amplitude must be finite, got {amplitude}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(
            "Taylor-Green modes have |k|^2 = 2 and need cutoff n >= 2".into(),
        ));
    }
    let lattice = Lattice::shared(n)?;
    let q = amplitude / 4.0;
    Ok(SpectralVector::from_fn(lattice, |k| {
        if k[2] == 0 && k[0].abs() == 1 && k[1].abs() == 1 {
            // sin(sx x) cos y -> -i sx / 4 at (sx, sy); -cos x sin(sy y) -> i sy / 4
            [
                Complex64::new(0.0, -q * k[0] as f64),
                Complex64::new(0.0, q * k[1] as f64),
                Complex64::default(),
            ]
        } else {
            [Complex64::default(); 3]
        }
    }))
}

/// Stream key for the per-mode generator; components fit in 21 bits.
fn mode_stream(k: &Mode) -> u64 {
    let enc = |c: i32| ((c as i64 + (1 << 20)) as u64) & 0x1f_ffff;
    (enc(k[0]) << 42) | (enc(k[1]) << 21) | enc(k[2])
}

/// Leray-projected complex Gaussian field with the requested shell spectrum.
///
/// Each half-lattice mode draws from a ChaCha stream keyed by `(seed, k)`, so
/// the raw draw at a given `k` does not depend on `n` or evaluation order.
pub fn random_solenoidal(spec: &SpectrumSpec, seed: u64, n: usize) -> Result<SpectralVelocity> {
    spec.validate()?;
    let lattice = Lattice::shared(n)?;
    let mut u = SpectralVector::zeros(std::sync::Arc::clone(&lattice));
    for i in lattice.half_range() {
        let k = lattice.mode(i);
        let kmag = (mode_norm_sq(&k) as f64).sqrt();
        // shell energy spread over ~4π|k|^2 modes
        let variance = kmag.powf(spec.shape - 2.0) * (-(kmag / spec.k0).powi(2)).exp();
        let sigma = variance.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(mode_stream(&k));
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let mut g = [Complex64::default(); 3];
        for c in g.iter_mut() {
            *c = Complex64::new(draw(), draw()) * sigma;
        }
        let j = lattice.conj_index(i);
        u.coeffs_mut()[i] = g;
        u.coeffs_mut()[j] = [g[0].conj(), g[1].conj(), g[2].conj()];
    }
    let mut u = u.leray_project();
    let e = u.energy();
    if e > 0.0 {
        u.scale((spec.energy / e).sqrt());
    }
    u.symmetrize();
    Ok(u)
}

/// `P_n u0` on the lattice of cutoff `n`.
pub fn project_initial(u0: &SpectralVelocity, n: usize) -> Result<SpectralVelocity> {
    let target = Lattice::shared(n)?;
    Ok(u0.truncate(n).resample(target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn taylor_green_energy_by_quadrature() {
        // (2π)^{-3} ∫ sin²x cos²y + cos²x sin²y on a fine grid
        let m = 32;
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                let (x, y) = (
                    2.0 * PI * i as f64 / m as f64,
                    2.0 * PI * j as f64 / m as f64,
                );
                let a = x.sin() * y.cos();
                let b = x.cos() * y.sin();
                acc += a * a + b * b;
            }
        }
        let quad = acc / (m * m) as f64;
        let u = taylor_green(1.0, 2).unwrap();
        assert!((u.sobolev_sqnorm(0.0) - quad).abs() < 1e-14);
        assert!((u.sobolev_sqnorm(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn taylor_green_grid_values() {
        let u = taylor_green(1.3, 3).unwrap();
        let grid = Grid::shared(10);
        let [a, b, c] = u.to_physical(&grid);
        for p in [0, 7, 123, 999] {
            let x = grid.point(p);
            assert!((a[p] - 1.3 * x[0].sin() * x[1].cos()).abs() < 1e-14);
            assert!((b[p] + 1.3 * x[0].cos() * x[1].sin()).abs() < 1e-14);
            assert!(c[p].abs() < 1e-15);
        }
    }

    #[test]
    fn taylor_green_invariants() {
        let u = taylor_green(1.0, 4).unwrap();
        assert_eq!(u.divergence_defect(), 0.0);
        assert_eq!(u.hermitian_defect(), 0.0);
        assert!((u.grad_sqnorm() - 2.0 * u.energy()).abs() < 1e-15);
        assert!(taylor_green(1.0, 1).is_err());
        assert!(taylor_green(f64::NAN, 4).is_err());
    }

    #[test]
    fn random_field_properties() {
        let spec = SpectrumSpec {
            energy: 0.7,
            ..SpectrumSpec::default()
        };
        let a = random_solenoidal(&spec, 42, 5).unwrap();
        let b = random_solenoidal(&spec, 42, 5).unwrap();
        assert_eq!(a.coeffs(), b.coeffs());
        assert!((a.energy() - 0.7).abs() < 1e-12 * 0.7);
        assert!(a.divergence_defect() < 1e-15);
        assert_eq!(a.hermitian_defect(), 0.0);
        let c = random_solenoidal(&spec, 43, 5).unwrap();
        assert!(a.max_abs_diff(&c) > 1e-3);
    }

    #[test]
    fn random_field_rejects_bad_spectrum() {
        let spec = SpectrumSpec {
            k0: 0.5,
            ..SpectrumSpec::default()
        };
        assert!(random_solenoidal(&spec, 1, 4).is_err());
    }

    #[test]
    fn projection_shrinks_and_converges() {
        let u0 = random_solenoidal(&SpectrumSpec::default(), 7, 10).unwrap();
        let mut prev = f64::INFINITY;
        for n in [2, 4, 6, 8, 10] {
            let p = project_initial(&u0, n).unwrap();
            assert!(p.energy() <= u0.energy() * (1.0 + 1e-14));
            let residual = u0.energy() - p.energy();
            assert!(residual <= prev);
            prev = residual;
        }
        assert!(prev.abs() < 1e-14);
        let same = project_initial(&u0, 10).unwrap();
        assert!(same.max_abs_diff(&u0) < 1e-16);
    }
}
