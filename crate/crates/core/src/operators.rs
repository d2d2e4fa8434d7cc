//! Observables, spin operators and Hamiltonians.

use num_complex::Complex64;

use crate::eigen::{Eigensystem, DEFAULT_CLUSTER_TOL, HERMITIAN_TOL};
use crate::error::{QuantumError, Result};
use crate::matrix::{ComplexMatrix, ZERO};
use crate::state::QuantumState;

/// A named Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    name: String,
    matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(name: impl Into<String>, matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(QuantumError::InvalidMatrix("non-finite entry".into()));
        }
        let deviation = matrix.hermiticity_error();
        if deviation > HERMITIAN_TOL {
            return Err(QuantumError::NonHermitianInput { deviation });
        }
        Ok(Self {
            name: name.into(),
            matrix,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn commutes_with(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.matrix.commutator(other).max_abs() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

impl SpinAxis {
    pub fn pauli(self) -> ComplexMatrix {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let rows = match self {
            SpinAxis::X => vec![vec![ZERO, one], vec![one, ZERO]],
            SpinAxis::Y => vec![vec![ZERO, -i], vec![i, ZERO]],
            SpinAxis::Z => vec![vec![one, ZERO], vec![ZERO, -one]],
        };
        ComplexMatrix::from_rows(rows).expect("Pauli matrices are well formed")
    }
}

/// (ħ/2)·σ_axis
pub fn spin_operator(axis: SpinAxis, hbar: f64) -> Observable {
    assert!(hbar > 0.0, "hbar must be positive");
    let name = match axis {
        SpinAxis::X => "Sx",
        SpinAxis::Y => "Sy",
        SpinAxis::Z => "Sz",
    };
    Observable {
        name: name.into(),
        matrix: axis.pauli().scale_real(hbar / 2.0),
    }
}

/// A Hamiltonian with its spectrum precomputed for time evolution.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    observable: Observable,
    hbar: f64,
    alpha: f64,
    spectrum: Eigensystem,
}

impl Hamiltonian {
    pub fn new(observable: Observable, hbar: f64, alpha: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(QuantumError::InvalidMatrix(format!("hbar must be positive, got {hbar}")));
        }
        let spectrum = Eigensystem::of_matrix(observable.matrix(), DEFAULT_CLUSTER_TOL)?;
        Ok(Self {
            observable,
            hbar,
            alpha,
            spectrum,
        })
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.observable.matrix()
    }

    pub fn dim(&self) -> usize {
        self.observable.dim()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn spectrum(&self) -> &Eigensystem {
        &self.spectrum
    }
}

/// H = −α·S_z = −(αħ/2)·σ_z
pub fn spin_hamiltonian(alpha: f64, hbar: f64) -> Hamiltonian {
    let sz = spin_operator(SpinAxis::Z, hbar);
    let obs = Observable {
        name: "H".into(),
        matrix: sz.matrix().scale_real(-alpha),
    };
    Hamiltonian::new(obs, hbar, alpha).expect("spin Hamiltonian is Hermitian")
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub state: QuantumState,
    pub energy: f64,
    /// Dimension of the lowest eigenspace.
    pub multiplicity: usize,
}

impl GroundState {
    pub fn is_degenerate(&self) -> bool {
        self.multiplicity > 1
    }
}

/// Normalized eigenvector of the lowest eigenvalue. A degenerate lowest
/// eigenspace yields the normalized projector column with the largest diagonal
/// entry (first one on ties) and is flagged through `multiplicity`.
pub fn ground_state(h: &Hamiltonian) -> GroundState {
    let spectrum = h.spectrum();
    let projector = &spectrum.projectors()[0];
    let multiplicity = spectrum.multiplicities()[0];
    let state = if multiplicity == 1 {
        QuantumState::from_ket_unchecked(spectrum.eigenvectors(0)[0].clone())
    } else {
        let n = projector.dim();
        let mut best = 0;
        for j in 1..n {
            if projector[(j, j)].re > projector[(best, best)].re {
                best = j;
            }
        }
        QuantumState::from_ket_unchecked(projector.column(best))
    };
    GroundState {
        state,
        energy: spectrum.eigenvalues()[0],
        multiplicity,
    }
}
