//! Finite-dimensional projective-measurement simulator.
//!
//! The [`quantum`](crate) kernel (states, observables, spectral decomposition,
//! evolution, Born rule, collapse) feeds a beam-network engine that propagates
//! particle beams through cascaded measurement devices and books the energy
//! each device injects. Experiments are described in a small line-oriented
//! language (`.sgx` files) and reported as tables, CSV or JSON.

pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod matrix;
pub mod measurement;
pub mod operators;
pub mod state;

pub use num_complex::Complex64;

pub use dynamics::{evolve, propagator};
pub use eigen::{spectral_decompose, Eigensystem, DEFAULT_CLUSTER_TOL};
pub use error::QuantumError;
pub use matrix::ComplexMatrix;
pub use measurement::{
    born_probabilities, collapse, expectation, expected_post_measurement_energy, MeasurementOutcome,
};
pub use operators::{
    ground_state, spin_hamiltonian, spin_operator, GroundState, Hamiltonian, Observable, SpinAxis,
};
pub use state::{states_equal_up_to_phase, QuantumState, StateKind};

pub mod io;
pub mod network;

pub use io::{parse_experiment, render_report, ExperimentSpec, ParseError, ReportFormat};
pub use network::{
    battery_yield, build_network, compute_ledger, propagate_expectation, propagate_monte_carlo,
    BeamNetwork, EnergyLedger, NetworkError, RunMode, RunResult,
};
