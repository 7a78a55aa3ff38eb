//! Exact computations around the n = 3 arithmetic transfer identity for a
//! ramified quadratic extension F/Q_p: intersection numbers from Keating's
//! lengths, orbital integrals and their germ expansions, and the comparison
//! of the two sides.

pub mod at_verify;
pub mod error;
pub mod germ_engine;
pub mod integrator;
pub mod keating;
pub mod orbit_space;
pub mod orbital_values;
pub mod padic_core;
pub mod svalue;

pub use error::{Error, Result};
