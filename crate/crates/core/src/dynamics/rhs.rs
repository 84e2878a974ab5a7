use std::sync::Arc;

use num_complex::Complex64;

use crate::spectral::product::{sym_index, velocity_products};
use crate::spectral::{mode_norm_sq, project_mode, Lattice, SpectralScalar, SpectralVector};

/// `∂_j(u_i u_j)` on `out` from the six product coefficients. Equal to
/// `(u·∇)u` for solenoidal `u`.
fn divergence_form(products: &[SpectralScalar; 6], out: &Arc<Lattice>) -> SpectralVector {
    let i = Complex64::i();
    SpectralVector::from_fn(Arc::clone(out), |k| {
        let idx = out.index_of(k).unwrap();
        let mut v = [Complex64::default(); 3];
        for (a, slot) in v.iter_mut().enumerate() {
            let mut s = Complex64::default();
            for b in 0..3 {
                s += products[sym_index(a, b)].coeffs()[idx] * k[b] as f64;
            }
            *slot = i * s;
        }
        v
    })
}

/// `P_n((u·∇)u)` on the lattice of `u`, evaluated pseudo-spectrally on the
/// dealiasing grid.
pub fn nonlinear_term(u: &SpectralVector) -> SpectralVector {
    let lattice = u.lattice();
    let products = velocity_products(u, lattice);
    let conv = divergence_form(&products, lattice);
    SpectralVector::from_fn(Arc::clone(lattice), |k| {
        project_mode(k, &conv.coeffs()[lattice.index_of(k).unwrap()])
    })
}

/// The unprojected convective term `(u·∇)u` on the lattice of cutoff `2n`,
/// which holds it exactly.
pub fn convective_full(u: &SpectralVector) -> SpectralVector {
    let out = Lattice::shared(2 * u.cutoff()).expect("cutoff is positive");
    let products = velocity_products(u, &out);
    divergence_form(&products, &out)
}

/// Mean-free solution of `-Δp = ∂_i∂_j(u_i u_j)`,
/// `p_k = -(k_i k_j / |k|^2) (u_i u_j)_k`.
///
/// The pressure of a field with cutoff `n` is a trigonometric polynomial of
/// degree `2n`; it is returned exactly on the lattice of cutoff `2n`.
pub fn pressure_poisson(u: &SpectralVector) -> SpectralScalar {
    let out = Lattice::shared(2 * u.cutoff()).expect("cutoff is positive");
    let products = velocity_products(u, &out);
    SpectralScalar::from_fn(Arc::clone(&out), |k| {
        let idx = out.index_of(k).unwrap();
        let mut s = Complex64::default();
        for a in 0..3 {
            for b in 0..3 {
                s += products[sym_index(a, b)].coeffs()[idx] * (k[a] as f64 * k[b] as f64);
            }
        }
        -s / mode_norm_sq(k) as f64
    })
}

fn rhs_with_divisor(u: &SpectralVector, divisor: impl Fn(f64) -> f64) -> SpectralVector {
    let nl = nonlinear_term(u);
    let lattice = u.lattice();
    let coeffs = lattice
        .modes()
        .iter()
        .zip(u.coeffs().iter().zip(nl.coeffs()))
        .map(|(k, (d, nk))| {
            let q = mode_norm_sq(k) as f64;
            let w = divisor(q);
            [
                (d[0] * -q - nk[0]) / w,
                (d[1] * -q - nk[1]) / w,
                (d[2] * -q - nk[2]) / w,
            ]
        })
        .collect();
    SpectralVector::from_coeffs(Arc::clone(lattice), coeffs).expect("sized to lattice")
}

/// Time derivative of the Galerkin NSV system: mode-wise
/// `d_k' = (-|k|^2 d_k - N_k) / (1 + α^2 |k|^2)`, where `N = P_n((u·∇)u)`.
pub fn nsv_rhs(u: &SpectralVector, alpha: f64) -> SpectralVector {
    let a2 = alpha * alpha;
    rhs_with_divisor(u, |q| 1.0 + a2 * q)
}

/// Galerkin Navier-Stokes right-hand side `Δu - P_n((u·∇)u)`, with the Voigt
/// factor fixed at one.
pub fn galerkin_nse_rhs(u: &SpectralVector) -> SpectralVector {
    rhs_with_divisor(u, |_| 1.0)
}
