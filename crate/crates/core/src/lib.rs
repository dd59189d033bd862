//! Simulator for a two-qubit entanglement engine built from NV-center
//! electron spins coupled to nuclear-spin baths held at different
//! polarizations.
//!
//! - [`nvphys`]: engine parameters from NV / ¹³C physics, plus the bath registry.
//! - [`lindblad`]: Hamiltonian, local Lindblad generator, propagation, steady states.
//! - [`entanglement`]: concurrence and heat currents.
//! - [`experiments`]: sweeps, coupling optimization, transient traces, feasibility.
//! - [`cli`]: the `nv-entangle` command-line front end.

// `!(x >= 0.0)` style checks are there to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod entanglement;
pub mod cli;
pub mod experiments;
pub mod lindblad;
pub mod nvphys;

pub use error::{Error, Result};
