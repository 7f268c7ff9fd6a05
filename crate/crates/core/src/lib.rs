//! Exact quantum intermediate scattering function (ISF) and quantum recoil
//! for a particle in a flat or harmonic potential, linearly coupled to a
//! harmonic bath.
//!
//! Two independent routes are provided:
//!
//! * the normal-mode route: discretize the bath ([`bath`]), diagonalise the
//!   global quadratic Hamiltonian ([`normal_modes`]) and sum mode
//!   contributions ([`correlators`]);
//! * the closed-form route for an exponentially decaying friction kernel
//!   on a flat surface ([`closed_form`]).
//!
//! Units throughout are ps, Å, meV and the consistent mass unit
//! 1 c.m.u. = 1 meV·ps²/Å² ([`units`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod cli;
pub mod closed_form;
pub mod correlators;
pub mod dsf;
pub mod error;
pub mod grid;
pub mod normal_modes;
pub mod oracle;
pub mod output;
pub mod quad;
pub mod units;

pub use error::{Error, Result};
pub use grid::TimeGrid;
