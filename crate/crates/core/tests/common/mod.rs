#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sgx_core::io::{DeviceDecl, MatrixExpr, ObservableDecl, RouteDecl, StateDecl};
use sgx_core::network::SinkFlavor;
use sgx_core::{ComplexMatrix, Complex64, ExperimentSpec, Hamiltonian, Observable, QuantumState};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Entries uniform in [-1, 1] (real and imaginary parts), Hermitian.
pub fn random_hermitian(rng: &mut StdRng, d: usize) -> ComplexMatrix {
    let mut rows = vec![vec![c(0.0, 0.0); d]; d];
    for i in 0..d {
        rows[i][i] = c(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..d {
            let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            rows[i][j] = z;
            rows[j][i] = z.conj();
        }
    }
    ComplexMatrix::from_rows(rows).unwrap()
}

pub fn random_real_symmetric(rng: &mut StdRng, d: usize) -> ComplexMatrix {
    let mut rows = vec![vec![c(0.0, 0.0); d]; d];
    for i in 0..d {
        for j in i..d {
            let x = c(rng.random_range(-1.0..1.0), 0.0);
            rows[i][j] = x;
            rows[j][i] = x;
        }
    }
    ComplexMatrix::from_rows(rows).unwrap()
}

pub fn random_ket(rng: &mut StdRng, d: usize) -> QuantumState {
    let v: Vec<Complex64> = (0..d)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    QuantumState::pure_normalized(v).unwrap()
}

/// Mixture of a few random kets with random weights.
pub fn random_mixed(rng: &mut StdRng, d: usize) -> QuantumState {
    let mut rho = ComplexMatrix::zeros(d);
    let terms = rng.random_range(1..=d + 1);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let k = random_ket(rng, d);
        rho.add_scaled_assign(&ComplexMatrix::outer(k.ket().unwrap()), w / total);
    }
    QuantumState::mixed(rho).unwrap()
}

pub fn random_state(rng: &mut StdRng, d: usize) -> QuantumState {
    if rng.random_bool(0.5) {
        random_ket(rng, d)
    } else {
        random_mixed(rng, d)
    }
}

pub fn observable(name: &str, m: ComplexMatrix) -> Observable {
    Observable::new(name, m).unwrap()
}

pub fn hamiltonian(m: ComplexMatrix) -> Hamiltonian {
    Hamiltonian::new(Observable::new("H", m).unwrap(), 1.0, 1.0).unwrap()
}

/// Plain dense matrix product, independent of the crate's kernels.
pub fn dense_mul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn dense(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    m.rows().map(|r| r.to_vec()).collect()
}

pub fn max_diff(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues (ascending) and eigenvectors (as columns) from nalgebra.
pub fn nalgebra_eigen(m: &ComplexMatrix) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let d = m.dim();
    let na = nalgebra::DMatrix::from_fn(d, d, |i, j| m[(i, j)]);
    let eig = na.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    (values, vectors)
}

pub fn literal(m: &sgx_core::ComplexMatrix) -> MatrixExpr {
    MatrixExpr::Literal(m.rows().map(|r| r.to_vec()).collect())
}

/// Valid random network: `splitters` devices measuring random observables, each
/// routing branch 0 onward and the rest to later splitters or sinks.
pub fn random_spec(r: &mut StdRng, d: usize, splitters: usize) -> ExperimentSpec {
    let observables: Vec<ObservableDecl> = (0..splitters)
        .map(|i| ObservableDecl { name: format!("o{i}"), expr: literal(&random_hermitian(r, d)) })
        .collect();
    let state = match r.random_range(0..3) {
        0 => StateDecl::Mixed,
        1 => StateDecl::Ground,
        _ => StateDecl::Ket((0..d).map(|_| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect()),
    };
    let mut devices = vec![DeviceDecl::Source { name: "src".into(), count: r.random_range(1..1_000_000), state }];
    let mut t = 0.0;
    for i in 0..splitters {
        t += r.random_range(0.0..2.0);
        devices.push(DeviceDecl::Splitter { name: format!("s{i}"), observable: format!("o{i}"), time: t });
    }
    let sinks = d;
    for k in 0..sinks {
        let flavor = if k == 0 { SinkFlavor::Battery } else { SinkFlavor::Camera };
        devices.push(DeviceDecl::Sink { name: format!("k{k}"), flavor });
    }
    let mut routes = vec![RouteDecl { from: "src".into(), branch: None, to: "s0".into() }];
    for i in 0..splitters {
        for b in 0..d {
            let to = if i + 1 == splitters {
                format!("k{b}")
            } else if b == 0 {
                format!("s{}", i + 1)
            } else {
                let j = r.random_range(i + 1..splitters + sinks);
                if j < splitters {
                    format!("s{j}")
                } else {
                    format!("k{}", j - splitters)
                }
            };
            routes.push(RouteDecl { from: format!("s{i}"), branch: Some(b), to });
        }
    }
    ExperimentSpec {
        name: "random".into(),
        dim: d,
        hbar: r.random_range(0.5..2.0),
        alpha: 1.0,
        hamiltonian: literal(&random_hermitian(r, d)),
        observables,
        devices,
        routes,
    }
}
