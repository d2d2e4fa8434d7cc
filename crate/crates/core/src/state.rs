//! Pure and mixed quantum states.

use num_complex::Complex64;

use crate::error::{QuantumError, Result};
use crate::matrix::{inner, vector_norm, ComplexMatrix};

pub const NORM_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Pure(Vec<Complex64>),
    Mixed(ComplexMatrix),
}

/// A normalized ket or a unit-trace density operator.
///
/// Kets are rays: two kets differing by a global phase describe the same state
/// and no canonical phase is imposed. Compare with [`states_equal_up_to_phase`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    repr: Repr,
}

impl QuantumState {
    /// A ket that must already be normalized to within 1e-12.
    pub fn pure(amplitudes: Vec<Complex64>) -> Result<Self> {
        validate_ket(&amplitudes)?;
        let norm = vector_norm(&amplitudes);
        if (norm * norm - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::InvalidState(format!(
                "ket has squared norm {}, expected 1",
                norm * norm
            )));
        }
        Ok(Self {
            repr: Repr::Pure(amplitudes),
        })
    }

    /// Normalizes the given amplitudes.
    pub fn pure_normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        validate_ket(&amplitudes)?;
        let norm = vector_norm(&amplitudes);
        if norm < 1e-300 {
            return Err(QuantumError::InvalidState("zero ket".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self {
            repr: Repr::Pure(amplitudes),
        })
    }

    pub fn pure_real(amplitudes: &[f64]) -> Result<Self> {
        Self::pure_normalized(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Density operator; must be Hermitian, unit-trace and positive semidefinite.
    pub fn mixed(rho: ComplexMatrix) -> Result<Self> {
        validate_density(&rho)?;
        Ok(Self {
            repr: Repr::Mixed(rho),
        })
    }

    /// I/d
    pub fn maximally_mixed(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            repr: Repr::Mixed(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64)),
        }
    }

    /// Basis ket |i⟩.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self {
            repr: Repr::Pure(amps),
        }
    }

    /// Trusted constructors for results of unitary maps and collapses, which
    /// preserve validity up to round-off. Renormalizes.
    pub(crate) fn from_ket_unchecked(mut amplitudes: Vec<Complex64>) -> Self {
        let norm = vector_norm(&amplitudes);
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self {
            repr: Repr::Pure(amplitudes),
        }
    }

    pub(crate) fn from_density_unchecked(rho: ComplexMatrix) -> Self {
        let tr = rho.trace().re;
        let mut rho = rho.scale_real(1.0 / tr);
        // Symmetrize away round-off.
        let n = rho.dim();
        for i in 0..n {
            rho[(i, i)] = Complex64::new(rho[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (rho[(i, j)] + rho[(j, i)].conj()) * 0.5;
                rho[(i, j)] = avg;
                rho[(j, i)] = avg.conj();
            }
        }
        Self {
            repr: Repr::Mixed(rho),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Pure(k) => k.len(),
            Repr::Mixed(r) => r.dim(),
        }
    }

    pub fn kind(&self) -> StateKind {
        match self.repr {
            Repr::Pure(_) => StateKind::Pure,
            Repr::Mixed(_) => StateKind::Mixed,
        }
    }

    pub fn ket(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Pure(k) => Some(k),
            Repr::Mixed(_) => None,
        }
    }

    pub fn rho(&self) -> Option<&ComplexMatrix> {
        match &self.repr {
            Repr::Pure(_) => None,
            Repr::Mixed(r) => Some(r),
        }
    }

    /// ρ for either representation (|ψ⟩⟨ψ| for kets).
    pub fn density_matrix(&self) -> ComplexMatrix {
        match &self.repr {
            Repr::Pure(k) => ComplexMatrix::outer(k),
            Repr::Mixed(r) => r.clone(),
        }
    }

    /// trace(ρ²)
    pub fn purity(&self) -> f64 {
        match &self.repr {
            Repr::Pure(_) => 1.0,
            Repr::Mixed(r) => r.trace_product(r).re,
        }
    }

    /// ⟨φ|ρ|φ⟩ for a normalized ket φ.
    pub fn fidelity_with_ket(&self, phi: &[Complex64]) -> f64 {
        match &self.repr {
            Repr::Pure(k) => inner(phi, k).norm_sqr(),
            Repr::Mixed(r) => r.sandwich(phi, phi).re,
        }
    }

    /// A mixed state whose density matrix is (numerically) rank one, rewritten as a ket.
    pub fn to_pure_if_rank_one(&self, tol: f64) -> Option<QuantumState> {
        match &self.repr {
            Repr::Pure(_) => Some(self.clone()),
            Repr::Mixed(r) => {
                if (self.purity() - 1.0).abs() > tol {
                    return None;
                }
                let n = r.dim();
                let j = (0..n)
                    .max_by(|&a, &b| r[(a, a)].re.total_cmp(&r[(b, b)].re))
                    .unwrap();
                let col = r.column(j);
                Some(Self::from_ket_unchecked(col))
            }
        }
    }
}

fn validate_ket(amplitudes: &[Complex64]) -> Result<()> {
    if amplitudes.is_empty() {
        return Err(QuantumError::InvalidState("empty ket".into()));
    }
    if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(QuantumError::InvalidState("non-finite amplitude".into()));
    }
    Ok(())
}

fn validate_density(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_finite() {
        return Err(QuantumError::InvalidState("non-finite density matrix".into()));
    }
    let herm = rho.hermiticity_error();
    if herm > NORM_TOL {
        return Err(QuantumError::InvalidState(format!(
            "density matrix is not Hermitian (deviation {herm:e})"
        )));
    }
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > NORM_TOL {
        return Err(QuantumError::InvalidState(format!("density matrix has trace {tr}")));
    }
    let (values, _) = crate::eigen::jacobi_eigen(rho)?;
    if let Some(min) = values.iter().copied().reduce(f64::min) {
        if min < -PSD_TOL {
            return Err(QuantumError::InvalidState(format!(
                "density matrix has negative eigenvalue {min}"
            )));
        }
    }
    Ok(())
}

/// Pure states: |⟨a|b⟩| ≥ 1 − tol. Mixed states: max |ρ_a − ρ_b| ≤ tol.
pub fn states_equal_up_to_phase(a: &QuantumState, b: &QuantumState, tol: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    match (&a.repr, &b.repr) {
        (Repr::Pure(x), Repr::Pure(y)) => Ok(inner(x, y).norm() >= 1.0 - tol),
        (Repr::Mixed(x), Repr::Mixed(y)) => Ok(x.max_abs_diff(y) <= tol),
        _ => Err(QuantumError::KindMismatch),
    }
}

/// Named spin-1/2 kets in the basis where σ_z = diag(1, −1).
pub mod spin_half {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    /// +ħ/2 eigenket of S_z.
    pub fn z_plus() -> QuantumState {
        QuantumState::basis(2, 0)
    }

    pub fn z_minus() -> QuantumState {
        QuantumState::basis(2, 1)
    }

    /// (|z−⟩ + |z+⟩)/√2
    pub fn x_plus() -> QuantumState {
        QuantumState::from_ket_unchecked(vec![
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        ])
    }

    /// (|z−⟩ − |z+⟩)/√2
    pub fn x_minus() -> QuantumState {
        QuantumState::from_ket_unchecked(vec![
            Complex64::new(-FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        ])
    }

    /// Labels and kets used when rendering states.
    pub fn named_kets() -> [(&'static str, QuantumState); 4] {
        [
            ("|z+>", z_plus()),
            ("|z->", z_minus()),
            ("|x+>", x_plus()),
            ("|x->", x_minus()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::spin_half::*;
    use super::*;

    #[test]
    fn constructors_validate() {
        assert!(QuantumState::pure(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).is_err());
        assert!(QuantumState::pure_real(&[0.0, 0.0]).is_err());
        assert!(QuantumState::pure(vec![]).is_err());
        let not_psd = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(QuantumState::mixed(not_psd).is_err());
        let bad_trace = ComplexMatrix::from_real_diagonal(&[0.5, 0.4]);
        assert!(QuantumState::mixed(bad_trace).is_err());
        let ok = QuantumState::mixed(ComplexMatrix::from_real_diagonal(&[0.25, 0.75])).unwrap();
        assert_eq!(ok.kind(), StateKind::Mixed);
    }

    #[test]
    fn phase_equality() {
        let phase = Complex64::from_polar(1.0, 0.7);
        let a = z_plus();
        let b = QuantumState::pure(vec![phase, Complex64::new(0.0, 0.0)]).unwrap();
        assert!(states_equal_up_to_phase(&a, &b, 1e-12).unwrap());
        assert!(!states_equal_up_to_phase(&z_plus(), &z_minus(), 1e-6).unwrap());
        assert_eq!(
            states_equal_up_to_phase(&a, &QuantumState::maximally_mixed(2), 1e-6),
            Err(QuantumError::KindMismatch)
        );
        assert!(matches!(
            states_equal_up_to_phase(&a, &QuantumState::basis(3, 0), 1e-6),
            Err(QuantumError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn x_kets_are_orthonormal() {
        let p = x_plus();
        let m = x_minus();
        assert!(inner(p.ket().unwrap(), m.ket().unwrap()).norm() < 1e-16);
        assert!((p.fidelity_with_ket(z_plus().ket().unwrap()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rank_one_density_becomes_ket() {
        let rho = x_minus().density_matrix();
        let s = QuantumState::mixed(rho).unwrap();
        let k = s.to_pure_if_rank_one(1e-9).unwrap();
        assert!(states_equal_up_to_phase(&k, &x_minus(), 1e-12).unwrap());
        assert!(QuantumState::maximally_mixed(2).to_pure_if_rank_one(1e-9).is_none());
    }
}
