//! Local energy machinery for the Galerkin approximations: separable test
//! functions, the term-by-term testing identity, the high-mode remainder and
//! its tail functional, and sweeps coupling `α` to the cutoff.

mod coupling;
mod local_energy;
mod tail;
mod test_function;

pub use coupling::{coupling_sweep, CouplingRow, CouplingSpec};
pub use local_energy::{
    extended_cutoff, local_energy_terms, LocalEnergyReport, MIN_WINDOW_SAMPLES,
};
pub use tail::{
    fitted_tail_constant, remainder_term, tail_energy, tail_functional, RemainderReport, TailSample,
};
pub use test_function::{ProfileOnGrid, TestFunction};
