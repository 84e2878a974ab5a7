//! Wavevector lattice, spectral fields, projectors, derivative multipliers,
//! Sobolev norms, and dealiased products.

pub mod field;
pub mod grid;
pub mod lattice;
pub mod product;

pub use field::{
    canonical_conj, project_mode, SpectralScalar, SpectralVector, SpectralVelocity, Vec3c,
};
pub use grid::{grid_mean, Grid};
pub use lattice::{mode_norm_sq, next_smooth, Lattice, Mode};
pub use product::{dealiased_product, dealiased_product_on, velocity_products};

use std::sync::Arc;

use crate::error::Result;

/// Lattice of cutoff `n` (Euclidean ball, zero mode excluded).
pub fn make_lattice(n: usize) -> Result<Arc<Lattice>> {
    Lattice::shared(n)
}
