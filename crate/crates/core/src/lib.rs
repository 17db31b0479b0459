//! Simulation of multi-photon state transfer across coupled-resonator
//! networks.
//!
//! The crate builds transfer layouts (Cartesian powers of short paths and
//! engineered chains), checks their mirror-swap propagators spectrally,
//! attaches independent dephasing baths to each resonator, and reports
//! transfer fidelities for Fock, coherent, and multi-node entangled inputs.

pub mod bath;
pub mod error;
pub mod evolution;
pub mod fidelity;
pub mod fmt;
pub mod oracle;
pub mod quad;
pub mod states;
pub mod topology;

pub use error::{Error, Result};
