//! Analytic XX spin chains whose couplings and magnetic fields are the
//! recurrence coefficients of para-Racah polynomials.
//!
//! The crate covers the whole pipeline:
//!
//! * [`params`]: parameter validation and the integer search for
//!   fractional-revival (FR) parameter sets, with their perfect state
//!   transfer (PST) schedules.
//! * [`chain`]: coupling/field tables for odd `N`, even `N` and the
//!   dual-Hahn special case, plus the Jacobi matrix.
//! * [`spectral`]: the quadratic bi-lattice, a tridiagonal eigensolver and
//!   the orthonormal polynomials attached to a table.
//! * [`dynamics`]: one-excitation evolution and FR/PST certification, and a
//!   full many-body Hamiltonian used as an oracle.
//! * [`surgery`]: removal of the top level of an odd chain, which yields the
//!   even family.
//! * [`deform`]: the isospectral involution that adds a second FR angle.
//! * [`io`]: CSV and JSON formats shared with the command-line tool.

pub mod chain;
pub mod deform;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod params;
pub mod spectral;
pub mod surgery;

pub use chain::{CouplingTable, JacobiMatrix};
pub use deform::DeformationAngle;
pub use dynamics::{Evolution, FrReport};
pub use error::{Error, Result};
pub use params::{ChainParams, FrSolution, Parity, Rational, Variant};
pub use spectral::{EigenSystem, Spectrum, Sublattice};
pub use surgery::SurgeryRatios;

pub use num_complex::Complex64;
