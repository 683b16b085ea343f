//! The demon-assisted steering experiment.
//!
//! Three sub-circuits are compiled for the device: the with-demon run for
//! each value of the demon's coin and the no-demon run. A run with demon
//! probability `p` mixes them `p/2 : p/2 : 1 - p`; `S2` is the mean of the
//! `sigma_Z` and `sigma_X` correlators between Bob and Alice.

mod circuits;
mod run;

pub use circuits::{
    build_bell_herald_circuit, build_demon_branch, build_logical_demon_circuit, build_no_demon_circuit,
    heralded_pair, outcome_table, roles, setting_correlator, OutcomeTable, SteeringCircuits, DEVICE_LAYOUT,
};
pub use run::{
    correlator, run_steering, sweep_csv, theoretical_s2, violation_sigmas, Correlators, SteeringConfig,
    SteeringExperiment, SteeringReport, SweepRow, BOOTSTRAP_RESAMPLES, BOOTSTRAP_SET_SIZE, CLASSICAL_BOUND, DEFAULT_GRID,
    SWEEP_CSV_HEADER,
};
