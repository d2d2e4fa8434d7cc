//! Spectral decomposition of Hermitian matrices by cyclic complex Jacobi rotations.

use num_complex::Complex64;

use crate::error::{QuantumError, Result};
use crate::matrix::{ComplexMatrix, ZERO};
use crate::operators::Observable;

/// Off-diagonal Frobenius norm (relative to the full norm) at which a sweep stops.
pub const JACOBI_TOLERANCE: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative gap below which neighbouring eigenvalues share one eigenspace.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-9;
/// Entry-wise tolerance of the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues (unsorted) and unitary eigenvector matrix (columns) of a Hermitian matrix.
///
/// Each rotation is split in two unitary steps: a diagonal phase that makes the
/// pivot `a[p][q]` real, followed by a real plane rotation that annihilates it.
pub fn jacobi_eigen(matrix: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = matrix.dim();
    let mut a = matrix.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = matrix.frobenius_norm();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let threshold = JACOBI_TOLERANCE * scale;

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            return Ok((diagonal(&a), v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q, scale);
            }
        }
    }
    if off_diagonal_norm(&a) <= threshold {
        return Ok((diagonal(&a), v));
    }
    Err(QuantumError::NoConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
    })
}

fn diagonal(a: &ComplexMatrix) -> Vec<f64> {
    (0..a.dim()).map(|i| a[(i, i)].re).collect()
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let n = a.dim();
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= f64::EPSILON * 1e-3 * scale {
        return;
    }

    // Phase step: column q *= e^{-i phi}, row q *= e^{i phi}.
    let phase = apq / r;
    let phase_conj = phase.conj();
    for k in 0..n {
        a[(k, q)] *= phase_conj;
    }
    for k in 0..n {
        a[(q, k)] *= phase;
    }
    for k in 0..n {
        v[(k, q)] *= phase_conj;
    }
    a[(p, q)] = Complex64::new(r, 0.0);
    a[(q, p)] = Complex64::new(r, 0.0);

    // Real rotation: A <- R^T A R with R_pp = R_qq = c, R_pq = s, R_qp = -s.
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * s;
        a[(k, q)] = akp * s + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * s;
        a[(q, k)] = apk * s + aqk * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * s;
        v[(k, q)] = vkp * s + vkq * c;
    }
}

/// Distinct eigenvalues of a Hermitian operator in ascending order, with the
/// orthogonal projector onto each eigenspace.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
    multiplicities: Vec<usize>,
    /// Orthonormal eigenvectors grouped by eigenspace.
    vectors: Vec<Vec<Vec<Complex64>>>,
}

impl Eigensystem {
    /// Decomposes a Hermitian matrix, merging eigenvalues closer than
    /// `cluster_tol · max|λ|` into a single eigenspace.
    pub fn of_matrix(matrix: &ComplexMatrix, cluster_tol: f64) -> Result<Self> {
        assert!(cluster_tol > 0.0, "cluster tolerance must be positive");
        if !matrix.is_finite() {
            return Err(QuantumError::InvalidMatrix("non-finite entry".into()));
        }
        let deviation = matrix.hermiticity_error();
        if deviation > HERMITIAN_TOL {
            return Err(QuantumError::NonHermitianInput { deviation });
        }
        let n = matrix.dim();
        let (values, vecs) = jacobi_eigen(matrix)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));

        let largest = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let gap = cluster_tol * if largest > 0.0 { largest } else { 1.0 };

        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for &i in &order {
            match clusters.last_mut() {
                Some(last) if values[i] - values[*last.last().unwrap()] <= gap => last.push(i),
                _ => clusters.push(vec![i]),
            }
        }

        let mut eigenvalues = Vec::with_capacity(clusters.len());
        let mut projectors = Vec::with_capacity(clusters.len());
        let mut multiplicities = Vec::with_capacity(clusters.len());
        let mut vectors = Vec::with_capacity(clusters.len());
        for members in clusters {
            let mean = members.iter().map(|&i| values[i]).sum::<f64>() / members.len() as f64;
            let mut proj = ComplexMatrix::zeros(n);
            let mut basis = Vec::with_capacity(members.len());
            for &i in &members {
                let col = vecs.column(i);
                proj = proj.add(&ComplexMatrix::outer(&col));
                basis.push(col);
            }
            eigenvalues.push(mean);
            projectors.push(proj);
            multiplicities.push(members.len());
            vectors.push(basis);
        }
        Ok(Self {
            eigenvalues,
            projectors,
            multiplicities,
            vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    /// Number of distinct outcomes.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Orthonormal basis of eigenspace `k`.
    pub fn eigenvectors(&self, k: usize) -> &[Vec<Complex64>] {
        &self.vectors[k]
    }

    /// Σ_k λ_k P_k
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim());
        for (lambda, p) in self.eigenvalues.iter().zip(&self.projectors) {
            m.add_scaled_assign(p, *lambda);
        }
        m
    }

    /// Σ_k f(λ_k) P_k
    pub fn apply_function(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim());
        for (lambda, p) in self.eigenvalues.iter().zip(&self.projectors) {
            m = m.add(&p.scale(f(*lambda)));
        }
        m
    }
}

/// Spectral decomposition of an observable; see [`Eigensystem::of_matrix`].
pub fn spectral_decompose(obs: &Observable, cluster_tol: f64) -> Result<Eigensystem> {
    Eigensystem::of_matrix(obs.matrix(), cluster_tol)
}
