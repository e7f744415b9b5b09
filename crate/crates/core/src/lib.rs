//! Digitized quantum annealing and digitized counterdiabatic (CD) quenches of
//! the transverse-field Ising model on lattice graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`] builds the graphs (chain, ladder, square, heavy-hex, custom).
//! * [`pauli`] is a sparse Pauli-string algebra with commutators and
//!   normalized Hilbert-Schmidt traces.
//! * [`agp`] computes the first-order adiabatic gauge potential coefficient
//!   `alpha1(lambda)` variationally and in closed form.
//! * [`exact1d`] solves the periodic 1D quench mode by mode (free fermions).
//! * [`circuit`] builds the first-order Trotterized gate sequence.
//! * [`statevector`] runs gate sequences, samples, and integrates the full
//!   Schrödinger equation as an oracle for small systems.
//! * [`stats`] turns samples or exact distributions into kink cumulants.
//! * [`cli`] ties everything together for the `cdquench` binary.
//!
//! Units: `hbar = 1`, energies in units of `J`, times in units of `1/J`.

pub mod agp;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod exact1d;
pub mod lattice;
mod ode;
pub mod pauli;
pub mod statevector;
pub mod stats;

pub use error::{Error, Result};
pub use lattice::{Geometry, LatticeGraph};
pub use num_complex::Complex64;
