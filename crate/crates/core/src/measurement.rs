//! Born-rule probabilities, projective collapse and energy expectations.

use crate::eigen::Eigensystem;
use crate::error::{QuantumError, Result};
use crate::matrix::ComplexMatrix;
use crate::operators::{Hamiltonian, Observable};
use crate::state::{QuantumState, StateKind};

/// Outcomes with probability below this cannot be collapsed onto.
pub const COLLAPSE_FLOOR: f64 = 1e-14;
/// Round-off allowance on individual probabilities before clamping.
pub const PROBABILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub outcome_index: usize,
    pub eigenvalue: f64,
    pub probability: f64,
    pub post_state: QuantumState,
}

fn check_dim(found: usize, expected: usize) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(QuantumError::DimensionMismatch { expected, found })
    }
}

fn projected_weight(state: &QuantumState, projector: &ComplexMatrix) -> f64 {
    match state.kind() {
        StateKind::Pure => {
            let k = state.ket().unwrap();
            projector.sandwich(k, k).re
        }
        StateKind::Mixed => projector.trace_product(state.rho().unwrap()).re,
    }
}

fn clamp_probability(p: f64) -> f64 {
    assert!(
        (-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p),
        "Born probability {p} outside [0, 1] beyond round-off"
    );
    p.clamp(0.0, 1.0)
}

/// p_k = ⟨ψ|P_k|ψ⟩ or trace(P_k ρ), in ascending-eigenvalue order.
pub fn born_probabilities(state: &QuantumState, eig: &Eigensystem) -> Result<Vec<f64>> {
    check_dim(state.dim(), eig.dim())?;
    Ok(eig
        .projectors()
        .iter()
        .map(|p| clamp_probability(projected_weight(state, p)))
        .collect())
}

/// Projects onto eigenspace `outcome_index` and renormalizes.
pub fn collapse(
    state: &QuantumState,
    eig: &Eigensystem,
    outcome_index: usize,
) -> Result<MeasurementOutcome> {
    collapse_with_floor(state, eig, outcome_index, COLLAPSE_FLOOR)
}

pub fn collapse_with_floor(
    state: &QuantumState,
    eig: &Eigensystem,
    outcome_index: usize,
    floor: f64,
) -> Result<MeasurementOutcome> {
    check_dim(state.dim(), eig.dim())?;
    if outcome_index >= eig.len() {
        return Err(QuantumError::IndexOutOfRange {
            index: outcome_index,
            len: eig.len(),
        });
    }
    let projector = &eig.projectors()[outcome_index];
    let probability = clamp_probability(projected_weight(state, projector));
    if probability < floor {
        return Err(QuantumError::ZeroProbabilityOutcome {
            index: outcome_index,
            probability,
        });
    }
    let post_state = match state.kind() {
        StateKind::Pure => QuantumState::from_ket_unchecked(projector.matvec(state.ket().unwrap())),
        StateKind::Mixed => {
            let rho = state.rho().unwrap();
            QuantumState::from_density_unchecked(projector.matmul(rho).matmul(projector))
        }
    };
    Ok(MeasurementOutcome {
        outcome_index,
        eigenvalue: eig.eigenvalues()[outcome_index],
        probability,
        post_state,
    })
}

/// ⟨ψ|M|ψ⟩ or trace(Mρ).
pub fn expectation(state: &QuantumState, obs: &Observable) -> Result<f64> {
    expectation_of_matrix(state, obs.matrix())
}

pub(crate) fn expectation_of_matrix(state: &QuantumState, m: &ComplexMatrix) -> Result<f64> {
    check_dim(state.dim(), m.dim())?;
    let value = match state.kind() {
        StateKind::Pure => {
            let k = state.ket().unwrap();
            m.sandwich(k, k)
        }
        StateKind::Mixed => m.trace_product(state.rho().unwrap()),
    };
    debug_assert!(value.im.abs() <= 1e-10, "imaginary expectation residue {}", value.im);
    Ok(value.re)
}

/// Energy expected after measuring `obs` non-selectively: Σ_k trace(P_k ρ P_k H).
pub fn expected_post_measurement_energy(
    state: &QuantumState,
    obs: &Observable,
    h: &Hamiltonian,
) -> Result<f64> {
    check_dim(state.dim(), obs.dim())?;
    check_dim(state.dim(), h.dim())?;
    let eig = Eigensystem::of_matrix(obs.matrix(), crate::eigen::DEFAULT_CLUSTER_TOL)?;
    Ok(post_measurement_energy_with(state, &eig, h))
}

pub(crate) fn post_measurement_energy_with(
    state: &QuantumState,
    eig: &Eigensystem,
    h: &Hamiltonian,
) -> f64 {
    let rho = state.density_matrix();
    eig.projectors()
        .iter()
        .map(|p| p.matmul(&rho).matmul(p).trace_product(h.matrix()).re)
        .sum()
}
