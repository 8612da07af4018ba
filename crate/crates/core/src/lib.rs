//! Coherent states of the 2D isotropic harmonic oscillator expanded in the
//! joint energy / angular-momentum eigenbasis.
//!
//! Modules build on one another bottom-up:
//! [`specialfn`] → [`states`] → [`expansion`] → [`observables`] → [`dynamics`],
//! with [`cli`] exposing everything as CSV/JSON reports.

pub mod error;
pub mod specialfn;
pub mod states;
pub mod expansion;
pub mod observables;
pub mod dynamics;
pub mod cli;

pub use error::{Error, Result};
