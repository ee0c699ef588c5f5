//! Two-qubit T2 spectroscopy observables.
//!
//! Computes the local noise N1, the correlated dephasing N12, the integrated
//! response X12 and the protocol filter functions for Markovian, harmonic,
//! diffusive and NV-coupled environments. Units are natural throughout:
//! ħ = k_B = 1, energies and rates share one unit and lengths share another.

pub mod error;
pub mod numerics;

pub use error::{Error, Result};
pub mod analysis;
pub mod diffusive;
pub mod filters;
pub mod harmonic;
pub mod map;
pub mod markov;
pub mod model;
pub mod runner;
pub mod verify;
