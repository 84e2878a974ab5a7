//! Brute-force reference computations by direct convolution over mode pairs.
//!
//! Nothing here touches the FFT path: products are summed as
//! `Σ_{p+q=k} f_p g_q` over every pair of lattice modes, O(len^2). These are
//! the independent references the verification suite compares the
//! pseudo-spectral operators against.

use std::sync::Arc;

use num_complex::Complex64;

use crate::spectral::{mode_norm_sq, project_mode, Lattice, SpectralScalar, SpectralVector};

/// `(f g)_k` for every `k` in `out`.
pub fn dense_product(f: &SpectralScalar, g: &SpectralScalar, out: &Arc<Lattice>) -> SpectralScalar {
    let mut acc = vec![Complex64::default(); out.len()];
    for (p, fp) in f.lattice().modes().iter().zip(f.coeffs()) {
        for (q, gq) in g.lattice().modes().iter().zip(g.coeffs()) {
            let k = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
            if let Some(i) = out.index_of(&k) {
                acc[i] += fp * gq;
            }
        }
    }
    SpectralScalar::from_coeffs(Arc::clone(out), acc).expect("sized to lattice")
}

/// Unprojected convective term `((u·∇)u)_k = Σ_{p+q=k} (u_p · i q) u_q` on `out`.
pub fn dense_convective(u: &SpectralVector, out: &Arc<Lattice>) -> SpectralVector {
    let i = Complex64::i();
    let mut acc = vec![[Complex64::default(); 3]; out.len()];
    let modes = u.lattice().modes();
    for (p, up) in modes.iter().zip(u.coeffs()) {
        for (q, uq) in modes.iter().zip(u.coeffs()) {
            let k = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
            if let Some(idx) = out.index_of(&k) {
                let adv = i * (up[0] * q[0] as f64 + up[1] * q[1] as f64 + up[2] * q[2] as f64);
                for c in 0..3 {
                    acc[idx][c] += adv * uq[c];
                }
            }
        }
    }
    SpectralVector::from_coeffs(Arc::clone(out), acc).expect("sized to lattice")
}

/// `P_n((u·∇)u)` on the lattice of `u`.
pub fn dense_nonlinear_term(u: &SpectralVector) -> SpectralVector {
    let n = u.lattice();
    let conv = dense_convective(u, n);
    SpectralVector::from_fn(Arc::clone(n), |k| {
        project_mode(k, &conv.coeffs()[n.index_of(k).unwrap()])
    })
}

/// Pressure `p_k = -(k_i k_j / |k|^2) (u_i u_j)_k` on `out`.
pub fn dense_pressure(u: &SpectralVector, out: &Arc<Lattice>) -> SpectralScalar {
    let mut acc = vec![Complex64::default(); out.len()];
    let modes = u.lattice().modes();
    for (p, up) in modes.iter().zip(u.coeffs()) {
        for (q, uq) in modes.iter().zip(u.coeffs()) {
            let k = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
            if let Some(idx) = out.index_of(&k) {
                let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
                let ku = up[0] * kf[0] + up[1] * kf[1] + up[2] * kf[2];
                let kv = uq[0] * kf[0] + uq[1] * kf[1] + uq[2] * kf[2];
                acc[idx] -= ku * kv / mode_norm_sq(&k) as f64;
            }
        }
    }
    SpectralScalar::from_coeffs(Arc::clone(out), acc).expect("sized to lattice")
}
