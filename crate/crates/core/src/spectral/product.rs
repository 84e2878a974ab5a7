//! Alias-free quadratic products through the physical grid.

use std::sync::Arc;

use super::field::{SpectralScalar, SpectralVector};
use super::grid::Grid;
use super::lattice::{next_smooth, Lattice};
use crate::error::{Error, Result};

/// Index pairs `(i, j)` with `i <= j` of the symmetric tensor `u_i u_j`.
pub const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Position of `(i, j)` in [`SYM_PAIRS`].
#[inline]
pub fn sym_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

/// Smallest grid on which products of two fields of cutoff `n` are exact
/// after restriction to modes of cutoff `out`. Product components reach
/// `2n`, so a mode with `|k_i| <= out` is hit by an alias only when
/// `M <= 2n + out`.
pub fn product_grid_size(n: usize, out: usize) -> usize {
    next_smooth(2 * n + out + 1)
}

/// Truncated convolution `(f g)_k` for `0 < |k| <= n` on the shared lattice
/// of `f` and `g`, evaluated on the lattice's dealiasing grid.
pub fn dealiased_product(f: &SpectralScalar, g: &SpectralScalar) -> Result<SpectralScalar> {
    dealiased_product_on(f, g, f.lattice().grid_size())
}

/// As [`dealiased_product`] on an explicit grid of `m` points per dimension.
pub fn dealiased_product_on(
    f: &SpectralScalar,
    g: &SpectralScalar,
    m: usize,
) -> Result<SpectralScalar> {
    if f.lattice() != g.lattice() {
        return Err(Error::InvalidArgument(format!(
            "product operands on different lattices (cutoff {} vs {})",
            f.cutoff(),
            g.cutoff()
        )));
    }
    let n = f.cutoff();
    if m < 3 * n + 1 {
        return Err(Error::Configuration(format!(
            "grid of {m} points cannot dealias products at cutoff {n} (need at least {})",
            3 * n + 1
        )));
    }
    let grid = Grid::shared(m);
    let modes = f.lattice().modes();
    let a = grid.synthesize(modes, f.coeffs());
    let b = grid.synthesize(modes, g.coeffs());
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Ok(SpectralScalar::from_physical(
        Arc::clone(f.lattice()),
        &grid,
        &prod,
    ))
}

/// Coefficients of the six products `u_i u_j` on `out`, computed on a grid
/// that is alias-free for that lattice. The zero mode is discarded.
pub fn velocity_products(u: &SpectralVector, out: &Arc<Lattice>) -> [SpectralScalar; 6] {
    let grid = Grid::shared(product_grid_size(u.cutoff(), out.cutoff()));
    let [ux, uy, uz] = u.to_physical(&grid);
    let comps = [&ux, &uy, &uz];
    let mul = |i: usize, j: usize| -> Vec<f64> {
        comps[i].iter().zip(comps[j]).map(|(a, b)| a * b).collect()
    };
    let modes = out.modes();
    let (p00, p01) = grid.analyze_pair(&mul(0, 0), &mul(0, 1), modes);
    let (p02, p11) = grid.analyze_pair(&mul(0, 2), &mul(1, 1), modes);
    let (p12, p22) = grid.analyze_pair(&mul(1, 2), &mul(2, 2), modes);
    [p00, p01, p02, p11, p12, p22]
        .map(|c| SpectralScalar::from_coeffs(Arc::clone(out), c).expect("length matches lattice"))
}
