//! Fourier-Galerkin solver for the Navier-Stokes-Voigt equations on the
//! periodic box `(R / 2πZ)^3`, with diagnostics that check the energy
//! equality, the α-weighted a priori bounds, the pressure bound, and the
//! local energy identity of the Galerkin approximations.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod initial;
pub mod io;
pub mod oracle;
pub mod quadrature;
pub mod spectral;
pub mod suitability;
pub mod verify;

pub use error::{Error, Result};
