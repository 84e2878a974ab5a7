use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Integer wavevector on the torus `(R / 2πZ)^3`.
pub type Mode = [i32; 3];

#[inline]
pub fn mode_norm_sq(k: &Mode) -> i64 {
    k.iter().map(|&c| (c as i64) * (c as i64)).sum()
}

/// Smallest integer `>= lower` whose prime factors are all `<= 7`.
pub fn next_smooth(lower: usize) -> usize {
    let mut m = lower.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// The Galerkin index set `{k in Z^3 : 0 < |k| <= n}` (Euclidean ball).
///
/// Modes are stored in lexicographic order over `(k_x, k_y, k_z)`. Because the
/// set is symmetric under negation and negation reverses lexicographic order,
/// the partner `-k` of the mode at index `i` sits at index `len - 1 - i`.
#[derive(Debug)]
pub struct Lattice {
    cutoff: usize,
    modes: Vec<Mode>,
    // Dense lookup over the cube [-n, n]^3, `u32::MAX` marks modes outside the ball.
    lookup: Vec<u32>,
    grid_size: usize,
}

impl Lattice {
    /// Builds the lattice of cutoff `n`. The physical grid is the smallest
    /// 7-smooth size `>= 3n + 1`, which makes quadratic products alias-free
    /// after restriction to `|k| <= n`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "lattice cutoff n must be at least 1".into(),
            ));
        }
        let ni = n as i32;
        let side = 2 * n + 1;
        let n_sq = (n * n) as i64;
        let mut modes = Vec::new();
        let mut lookup = vec![u32::MAX; side * side * side];
        for kx in -ni..=ni {
            for ky in -ni..=ni {
                for kz in -ni..=ni {
                    let k = [kx, ky, kz];
                    let q = mode_norm_sq(&k);
                    if q == 0 || q > n_sq {
                        continue;
                    }
                    let slot = Self::slot(n, &k);
                    lookup[slot] = modes.len() as u32;
                    modes.push(k);
                }
            }
        }
        Ok(Self {
            cutoff: n,
            modes,
            lookup,
            grid_size: next_smooth(3 * n + 1),
        })
    }

    /// Shared, cached lattice of cutoff `n`.
    pub fn shared(n: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Lattice>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(l) = cache.lock().unwrap().get(&n) {
            return Ok(Arc::clone(l));
        }
        let lattice = Arc::new(Self::new(n)?);
        cache
            .lock()
            .unwrap()
            .entry(n)
            .or_insert_with(|| Arc::clone(&lattice));
        Ok(lattice)
    }

    #[inline]
    fn slot(n: usize, k: &Mode) -> usize {
        let side = 2 * n + 1;
        let off = n as i32;
        let i = (k[0] + off) as usize;
        let j = (k[1] + off) as usize;
        let l = (k[2] + off) as usize;
        (i * side + j) * side + l
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Dealiasing grid size per dimension.
    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn mode(&self, i: usize) -> Mode {
        self.modes[i]
    }

    #[inline]
    pub fn norm_sq(&self, i: usize) -> f64 {
        mode_norm_sq(&self.modes[i]) as f64
    }

    pub fn index_of(&self, k: &Mode) -> Option<usize> {
        let n = self.cutoff as i32;
        if k.iter().any(|&c| c < -n || c > n) {
            return None;
        }
        match self.lookup[Self::slot(self.cutoff, k)] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    /// Index of `-k` for the mode at index `i`.
    #[inline]
    pub fn conj_index(&self, i: usize) -> usize {
        self.modes.len() - 1 - i
    }

    /// Index range of the Hermitian half-lattice (`k_x > 0`, or `k_x = 0 and
    /// k_y > 0`, or `k_x = k_y = 0 and k_z > 0`), which is the upper half of
    /// the lexicographic order.
    pub fn half_range(&self) -> std::ops::Range<usize> {
        self.modes.len() / 2..self.modes.len()
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.cutoff == other.cutoff
    }
}

impl Eq for Lattice {}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(n: i32) -> usize {
        let mut count = 0;
        for a in -n..=n {
            for b in -n..=n {
                for c in -n..=n {
                    let q = a * a + b * b + c * c;
                    if q >= 1 && q <= n * n {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn unit_lattice_has_six_modes() {
        let l = Lattice::new(1).unwrap();
        assert_eq!(l.len(), 6);
        for k in l.modes() {
            assert_eq!(mode_norm_sq(k), 1);
        }
    }

    #[test]
    fn mode_counts_match_enumeration() {
        assert_eq!(Lattice::new(2).unwrap().len(), 32);
        for n in 1..=7 {
            assert_eq!(Lattice::new(n).unwrap().len(), brute_force_count(n as i32));
        }
    }

    #[test]
    fn zero_cutoff_rejected() {
        assert!(matches!(Lattice::new(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn grid_is_smooth_and_dealiasing() {
        assert!(Lattice::new(8).unwrap().grid_size() >= 25);
        assert_eq!(Lattice::new(8).unwrap().grid_size(), 25);
        assert_eq!(Lattice::new(4).unwrap().grid_size(), 14);
        assert_eq!(Lattice::new(32).unwrap().grid_size(), 98);
        for n in 1..40 {
            let m = Lattice::new(n).unwrap().grid_size();
            assert!(m > 3 * n);
            assert_eq!(next_smooth(m), m);
        }
    }

    #[test]
    fn negation_closure_and_conj_index() {
        let l = Lattice::new(5).unwrap();
        for (i, k) in l.modes().iter().enumerate() {
            let neg = [-k[0], -k[1], -k[2]];
            assert_eq!(l.index_of(&neg), Some(l.conj_index(i)));
            assert_eq!(l.index_of(k), Some(i));
        }
        assert_eq!(l.index_of(&[0, 0, 0]), None);
        assert_eq!(l.index_of(&[6, 0, 0]), None);
    }

    #[test]
    fn half_range_is_positive_half() {
        let l = Lattice::new(3).unwrap();
        for i in l.half_range() {
            let k = l.mode(i);
            assert!(k > [0, 0, 0], "{k:?}");
        }
    }
}
