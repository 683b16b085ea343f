//! Simulation, compilation and analysis toolkit for demon-assisted EPR
//! steering on a small superconducting register.
//!
//! The crate is organised bottom-up:
//!
//! * [`sim`]: dense state-vector / density-matrix simulation and sampling.
//! * [`circuit`]: gate vocabulary, including the demon's doubly-controlled
//!   rotations, and the circuit container.
//! * [`transpiler`]: decomposition to `{1q, CZ}`, SWAP routing on a coupling
//!   graph, peephole optimisation and unitary equivalence checking.
//! * [`noise`]: depolarizing gate noise, readout confusion and mitigation,
//!   noise fitting and randomized benchmarking.
//! * [`steering`]: the with-demon and no-demon experiments and the `S2`
//!   estimator.
//! * [`tomography`]: two-qubit Pauli tomography and Bell-state fidelity.

pub mod circuit;
pub mod error;
pub mod format;
pub mod noise;
pub mod rng;
pub mod sim;
pub mod steering;
pub mod tomography;
pub mod transpiler;

pub use error::{Error, Result};
