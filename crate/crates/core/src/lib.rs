//! Twist-and-turn dynamics of power-law XY spin models.
//!
//! The crate bundles several routes to the same physics: exact evolution in
//! the collective (all-to-all) limit, a closed-form bosonic linearisation,
//! rotor/spin-wave theory for finite-range couplings, and discrete truncated
//! Wigner sampling for the full lattice problem.

pub mod bosonic;
pub mod collective;
pub mod dtwa;
pub mod error;
pub mod lattice;
pub mod observables;
pub mod series;
pub mod spinwave;
pub mod tridiagonal;

pub use error::{Error, Result};
pub use lattice::{build_couplings, fourier_factors, CouplingTable, FourierFactors, LatticeSpec};
pub use series::{Observable, ObservableSeries};
