//! Unitary time evolution.

use num_complex::Complex64;

use crate::error::{QuantumError, Result};
use crate::matrix::ComplexMatrix;
use crate::operators::Hamiltonian;
use crate::state::{QuantumState, StateKind};

/// U(dt) = Σ_k exp(−i λ_k dt / ħ) P_k over the spectrum of H.
pub fn propagator(h: &Hamiltonian, dt: f64) -> ComplexMatrix {
    let hbar = h.hbar();
    h.spectrum()
        .apply_function(|lambda| Complex64::from_polar(1.0, -lambda * dt / hbar))
}

/// Applies U(dt) to a ket, or U ρ U† to a density operator.
pub fn evolve(state: &QuantumState, h: &Hamiltonian, dt: f64) -> Result<QuantumState> {
    if state.dim() != h.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: h.dim(),
            found: state.dim(),
        });
    }
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let u = propagator(h, dt);
    Ok(apply_unitary(state, &u))
}

pub(crate) fn apply_unitary(state: &QuantumState, u: &ComplexMatrix) -> QuantumState {
    match state.kind() {
        StateKind::Pure => QuantumState::from_ket_unchecked(u.matvec(state.ket().unwrap())),
        StateKind::Mixed => {
            let rho = state.rho().unwrap();
            QuantumState::from_density_unchecked(u.matmul(rho).matmul(&u.adjoint()))
        }
    }
}
