//! Binary velocity snapshots.
//!
//! Layout, all little-endian:
//!
//! | bytes | content                                        |
//! |-------|------------------------------------------------|
//! | 8     | magic `NSVSNAP\0`                              |
//! | 4     | format version (`u32`, currently 1)            |
//! | 4     | lattice tag (`u32`, 1 = Euclidean ball, lexicographic half-lattice) |
//! | 8     | cutoff `n` (`u64`)                             |
//! | 8     | `α` (`f64`)                                    |
//! | 8     | `t` (`f64`)                                    |
//! | 48 per mode | `re, im` of the three components, `f64` |
//!
//! The payload covers the half-lattice `k_x > 0`, or `k_x = 0 and k_y > 0`,
//! or `k_x = k_y = 0 and k_z > 0`, in lexicographic order; the other half is
//! restored by conjugation.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::dynamics::SolverState;
use crate::error::{Error, Result};
use crate::spectral::{canonical_conj, Lattice, SpectralVector};

pub const MAGIC: [u8; 8] = *b"NSVSNAP\0";
pub const VERSION: u32 = 1;
pub const LATTICE_TAG: u32 = 1;
const HEADER_LEN: usize = 40;
const MODE_LEN: usize = 48;

/// Encodes `state`. Fails unless the lower half-lattice is bitwise the
/// canonical conjugate of the upper half (as after [`SpectralVector::symmetrize`]),
/// since only the upper half is written.
pub fn encode_snapshot(state: &SolverState) -> Result<Vec<u8>> {
    let u = &state.u;
    let lattice = u.lattice();
    for i in lattice.half_range() {
        let a = u.coeffs()[i];
        let b = u.coeffs()[lattice.conj_index(i)];
        if (0..3).any(|c| {
            let z = canonical_conj(a[c]);
            z.re.to_bits() != b[c].re.to_bits() || z.im.to_bits() != b[c].im.to_bits()
        }) {
            return Err(Error::InvalidField(format!(
                "coefficients at mode {:?} are not bitwise Hermitian; symmetrize first",
                lattice.mode(i)
            )));
        }
    }
    let half = lattice.half_range();
    let mut out = Vec::with_capacity(HEADER_LEN + half.len() * MODE_LEN);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&LATTICE_TAG.to_le_bytes());
    out.extend_from_slice(&(u.cutoff() as u64).to_le_bytes());
    out.extend_from_slice(&state.alpha.to_le_bytes());
    out.extend_from_slice(&state.t.to_le_bytes());
    for i in half {
        for z in &u.coeffs()[i] {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    Ok(out)
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn read_u64(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

fn read_f64(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<SolverState> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "snapshot has {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if bytes[..8] != MAGIC {
        return Err(Error::Format("bad snapshot magic".into()));
    }
    let version = read_u32(bytes, 8);
    if version != VERSION {
        return Err(Error::Format(format!(
            "unsupported snapshot version {version}"
        )));
    }
    let tag = read_u32(bytes, 12);
    if tag != LATTICE_TAG {
        return Err(Error::Format(format!("unknown lattice tag {tag}")));
    }
    let n = usize::try_from(read_u64(bytes, 16))
        .ok()
        .filter(|&n| (1..=1024).contains(&n))
        .ok_or_else(|| Error::Format("snapshot cutoff out of range".into()))?;
    let alpha = read_f64(bytes, 24);
    let t = read_f64(bytes, 32);
    let lattice = Lattice::shared(n)?;
    let half = lattice.half_range();
    let expected = HEADER_LEN + half.len() * MODE_LEN;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "snapshot payload for n = {n} needs {expected} bytes, file has {}",
            bytes.len()
        )));
    }
    let mut coeffs = vec![[Complex64::default(); 3]; lattice.len()];
    let mut at = HEADER_LEN;
    for i in half {
        let mut g = [Complex64::default(); 3];
        for z in g.iter_mut() {
            *z = Complex64::new(read_f64(bytes, at), read_f64(bytes, at + 8));
            at += 16;
        }
        coeffs[lattice.conj_index(i)] = g.map(canonical_conj);
        coeffs[i] = g;
    }
    let u = SpectralVector::from_coeffs(lattice, coeffs)?;
    SolverState::new(t, u, alpha).map_err(|e| Error::Format(e.to_string()))
}

pub fn save_snapshot(state: &SolverState, path: &Path) -> Result<()> {
    fs::write(path, encode_snapshot(state)?)?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<SolverState> {
    decode_snapshot(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, SolverConfig};
    use crate::initial::{random_solenoidal, SpectrumSpec};

    fn bits(s: &SolverState) -> Vec<u64> {
        let mut v = vec![s.t.to_bits(), s.alpha.to_bits(), s.u.cutoff() as u64];
        for d in s.u.coeffs() {
            for z in d {
                v.push(z.re.to_bits());
                v.push(z.im.to_bits());
            }
        }
        v
    }

    #[test]
    fn integrated_state_round_trips_bitwise() {
        let u0 = random_solenoidal(&SpectrumSpec::default(), 4, 5).unwrap();
        let traj = integrate(&SolverConfig::new(5, 0.3, 0.1).with_dt(0.01), &u0).unwrap();
        let state = &traj.last().state;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        save_snapshot(state, &path).unwrap();
        let back = load_snapshot(&path).unwrap();
        assert_eq!(bits(state), bits(&back));
    }

    #[test]
    fn zero_field_snapshot() {
        let state =
            SolverState::new(0.0, SpectralVector::zeros(Lattice::shared(3).unwrap()), 0.1).unwrap();
        let bytes = encode_snapshot(&state).unwrap();
        let half = Lattice::shared(3).unwrap().len() / 2;
        assert_eq!(bytes.len(), HEADER_LEN + half * MODE_LEN);
        assert!(bytes[HEADER_LEN..].iter().all(|&b| b == 0));
        let back = decode_snapshot(&bytes).unwrap();
        assert_eq!(back.u.max_abs(), 0.0);
    }

    #[test]
    fn truncated_and_corrupt_inputs_fail() {
        let u = random_solenoidal(&SpectrumSpec::default(), 1, 3).unwrap();
        let bytes = encode_snapshot(&SolverState::new(0.5, u, 0.2).unwrap()).unwrap();
        for len in [0, 10, HEADER_LEN, bytes.len() - 1] {
            assert!(
                matches!(decode_snapshot(&bytes[..len]), Err(Error::Format(_))),
                "len {len}"
            );
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_snapshot(&bad), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[8] = 9;
        assert!(matches!(decode_snapshot(&bad), Err(Error::Format(_))));
        let mut long = bytes;
        long.push(0);
        assert!(matches!(decode_snapshot(&long), Err(Error::Format(_))));
    }

    #[test]
    fn non_hermitian_state_is_refused() {
        let l = Lattice::shared(2).unwrap();
        let mut u = SpectralVector::zeros(std::sync::Arc::clone(&l));
        let i = l.half_range().start;
        u.coeffs_mut()[i][0] = Complex64::new(1.0, 0.0);
        let s = SolverState::new(0.0, u, 0.0).unwrap();
        assert!(encode_snapshot(&s).is_err());
    }
}
