//! Noise modelling: depolarizing gate noise, readout confusion and its
//! mitigation, fitting the two-qubit depolarizing rate, and randomized
//! benchmarking.

pub mod calibration;
mod execute;
mod fit;
mod model;
mod rb;
mod readout;

pub use execute::{noisy_execute, noisy_execute_from};
pub use fit::{fit_lambda2, BisectionStep, Lambda2Fit, FIT_TOLERANCE};
pub use model::NoiseModel;
pub use rb::{
    fit_decay, fit_interleaved, interleaved_survival, one_qubit_cliffords, rb_simulate, rb_simulate_interleaved_cz,
    rb_survival, two_qubit_cliffords, InterleavedRbResult, RbResult,
};
pub use readout::{apply_confusion, mitigate, mitigate_distribution, total_variation, ReadoutConfusion};
