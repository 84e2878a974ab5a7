//! Fast invariant suite on small lattices, run by `nsv verify`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::energy_report;
use crate::dynamics::{integrate, nonlinear_term, pressure_poisson, SolverConfig};
use crate::error::Result;
use crate::initial::{random_solenoidal, taylor_green, SpectrumSpec};
use crate::io::{decode_snapshot, encode_snapshot};
use crate::oracle::{dense_nonlinear_term, dense_pressure};
use crate::spectral::{Lattice, SpectralScalar, SpectralVector};
use crate::suitability::{local_energy_terms, TestFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Measured defect (relative unless the name says otherwise).
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

/// Hermitian field with independent Gaussian-like entries, not projected.
pub fn random_field(rng: &mut impl Rng, lattice: &Arc<Lattice>) -> SpectralVector {
    let mut f = SpectralVector::zeros(Arc::clone(lattice));
    for i in lattice.half_range() {
        let g: [Complex64; 3] = std::array::from_fn(|_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        f.coeffs_mut()[i] = g;
    }
    f.symmetrize();
    f
}

fn rel(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn projector_checks(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let lattice = Lattice::shared(6)?;
    let (mut idem, mut split, mut grad) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let f = random_field(rng, &lattice);
        let p = f.leray_project();
        idem = idem.max(rel(p.leray_project().max_abs_diff(&p), p.max_abs()));
        let mut sum = f.truncate(3);
        sum.axpy(1.0, &f.tail_project(3)?);
        split = split.max(rel(sum.max_abs_diff(&p), p.max_abs()));
        let mut phi = SpectralScalar::from_fn(Arc::clone(&lattice), |k| {
            let s = (k[0] * 7 + k[1] * 3 - k[2]) as f64;
            Complex64::new((s * 0.37).cos(), (s * 0.11).sin())
        });
        // make the potential real: c_{-k} = conj(c_k)
        for i in lattice.half_range() {
            let j = lattice.conj_index(i);
            phi.coeffs_mut()[j] = phi.coeffs()[i].conj();
        }
        let g = phi.gradient();
        grad = grad.max(rel(g.leray_project().max_abs(), g.max_abs()));
    }
    Ok(vec![
        Check::new("leray idempotence", idem, 1e-12),
        Check::new("P = P_n + Q_n", split, 1e-12),
        Check::new("leray annihilates gradients", grad, 1e-12),
    ])
}

fn oracle_checks(seed: u64) -> Result<Vec<Check>> {
    let (mut nl, mut pr) = (0.0f64, 0.0f64);
    for s in 0..3 {
        let u = random_solenoidal(&SpectrumSpec::default(), seed.wrapping_add(s), 3)?;
        let fast = nonlinear_term(&u);
        let dense = dense_nonlinear_term(&u);
        nl = nl.max(rel(fast.max_abs_diff(&dense), dense.max_abs()));
        let p = pressure_poisson(&u);
        let dp = dense_pressure(&u, p.lattice());
        pr = pr.max(rel(p.max_abs_diff(&dp), dp.max_abs()));
    }
    Ok(vec![
        Check::new("nonlinear term vs dense oracle", nl, 1e-12),
        Check::new("pressure vs dense oracle", pr, 1e-12),
    ])
}

fn dynamics_checks(seed: u64) -> Result<Vec<Check>> {
    let alpha = 0.25;
    let t_final = 0.2;
    let u0 = taylor_green(1.0, 2)?;
    let traj = integrate(&SolverConfig::new(2, alpha, t_final).with_dt(1e-3), &u0)?;
    let mut expected = u0.clone();
    expected.scale((-2.0 * t_final / (1.0 + 2.0 * alpha * alpha)).exp());
    let tg = rel(traj.last().u().max_abs_diff(&expected), expected.max_abs());

    let u0 = random_solenoidal(&SpectrumSpec::default(), seed, 4)?;
    let traj = integrate(&SolverConfig::new(4, 0.3, 0.2).with_dt(1e-3), &u0)?;
    let energy = energy_report(&traj)?.max_residual();
    let phi = TestFunction::new(0.04, 0.16, 1, 1.0, 0.2)?;
    let local = local_energy_terms(&traj, &phi)?.relative_residual();
    let state = &traj.last().state;
    let back = decode_snapshot(&encode_snapshot(state)?)?;
    let bitwise = back.t.to_bits() == state.t.to_bits()
        && back.alpha.to_bits() == state.alpha.to_bits()
        && back
            .u
            .coeffs()
            .iter()
            .flatten()
            .zip(state.u.coeffs().iter().flatten())
            .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    Ok(vec![
        Check::new("taylor-green decay", tg, 1e-8),
        Check::new("energy identity", energy, 1e-8),
        Check::new("local energy identity", local, 1e-5),
        Check::new(
            "snapshot round trip (mismatch flag)",
            if bitwise { 0.0 } else { 1.0 },
            0.0,
        ),
    ])
}

/// Runs every check; `seed` selects the random fields.
pub fn run_suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = projector_checks(&mut rng)?;
    checks.extend(oracle_checks(seed)?);
    checks.extend(dynamics_checks(seed)?);
    Ok(checks)
}
