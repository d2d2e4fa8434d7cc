//! In-memory form of an `.sgx` experiment description.

use std::fmt::{self, Write as _};

use num_complex::Complex64;

use crate::matrix::ComplexMatrix;
use crate::operators::{SpinAxis, spin_operator};
use crate::network::SinkFlavor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Sx,
    Sy,
    Sz,
    Identity,
}

impl Builtin {
    pub fn keyword(self) -> &'static str {
        match self {
            Builtin::Sx => "Sx",
            Builtin::Sy => "Sy",
            Builtin::Sz => "Sz",
            Builtin::Identity => "I",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "Sx" => Some(Builtin::Sx),
            "Sy" => Some(Builtin::Sy),
            "Sz" => Some(Builtin::Sz),
            "I" => Some(Builtin::Identity),
            _ => None,
        }
    }
}

/// Scalar prefix of a builtin: `factor`, optionally multiplied by the
/// experiment's `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient {
    pub factor: f64,
    pub times_alpha: bool,
}

impl Coefficient {
    pub fn value(&self, alpha: f64) -> f64 {
        if self.times_alpha {
            self.factor * alpha
        } else {
            self.factor
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixExpr {
    Scaled {
        coefficient: Coefficient,
        builtin: Builtin,
    },
    Literal(Vec<Vec<Complex64>>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ResolveError {
    #[error("{0} is only defined for dim 2 (experiment has dim {1})")]
    SpinNeedsDimTwo(&'static str, usize),
    #[error("matrix literal is {found}x{found}, experiment has dim {expected}")]
    WrongDimension { expected: usize, found: usize },
    #[error("malformed matrix literal: {0}")]
    Malformed(String),
}

impl MatrixExpr {
    pub fn scaled(factor: f64, times_alpha: bool, builtin: Builtin) -> Self {
        MatrixExpr::Scaled {
            coefficient: Coefficient { factor, times_alpha },
            builtin,
        }
    }

    pub fn resolve(&self, dim: usize, hbar: f64, alpha: f64) -> Result<ComplexMatrix, ResolveError> {
        match self {
            MatrixExpr::Scaled { coefficient, builtin } => {
                let base = match builtin {
                    Builtin::Identity => ComplexMatrix::identity(dim),
                    spin => {
                        if dim != 2 {
                            return Err(ResolveError::SpinNeedsDimTwo(spin.keyword(), dim));
                        }
                        let axis = match spin {
                            Builtin::Sx => SpinAxis::X,
                            Builtin::Sy => SpinAxis::Y,
                            _ => SpinAxis::Z,
                        };
                        spin_operator(axis, hbar).matrix().clone()
                    }
                };
                Ok(base.scale_real(coefficient.value(alpha)))
            }
            MatrixExpr::Literal(rows) => {
                if rows.len() != dim {
                    return Err(ResolveError::WrongDimension {
                        expected: dim,
                        found: rows.len(),
                    });
                }
                ComplexMatrix::from_rows(rows.clone()).map_err(|e| ResolveError::Malformed(e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateDecl {
    /// I/d
    Mixed,
    /// Lowest eigenvector of the declared Hamiltonian.
    Ground,
    /// Amplitudes as written; normalized when the network is built.
    Ket(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeviceDecl {
    Source {
        name: String,
        count: u64,
        state: StateDecl,
    },
    Splitter {
        name: String,
        observable: String,
        time: f64,
    },
    Sink {
        name: String,
        flavor: SinkFlavor,
    },
}

impl DeviceDecl {
    pub fn name(&self) -> &str {
        match self {
            DeviceDecl::Source { name, .. }
            | DeviceDecl::Splitter { name, .. }
            | DeviceDecl::Sink { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableDecl {
    pub name: String,
    pub expr: MatrixExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteDecl {
    pub from: String,
    /// Outcome index (ascending eigenvalue); `None` for the source's single output.
    pub branch: Option<usize>,
    pub to: String,
}

/// A parsed experiment: system parameters, observables, devices and routes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub dim: usize,
    pub hbar: f64,
    pub alpha: f64,
    pub hamiltonian: MatrixExpr,
    pub observables: Vec<ObservableDecl>,
    pub devices: Vec<DeviceDecl>,
    pub routes: Vec<RouteDecl>,
}

impl ExperimentSpec {
    /// The default Hamiltonian, −α·S_z.
    pub fn default_hamiltonian() -> MatrixExpr {
        MatrixExpr::scaled(-1.0, true, Builtin::Sz)
    }

    /// Particle count of the (first) source.
    pub fn source_count(&self) -> Option<u64> {
        self.devices.iter().find_map(|d| match d {
            DeviceDecl::Source { count, .. } => Some(*count),
            _ => None,
        })
    }

    pub fn set_source_count(&mut self, n: u64) {
        for d in &mut self.devices {
            if let DeviceDecl::Source { count, .. } = d {
                *count = n;
            }
        }
    }

    /// Returns false if no splitter has that name.
    pub fn set_splitter_time(&mut self, splitter: &str, t: f64) -> bool {
        for d in &mut self.devices {
            if let DeviceDecl::Splitter { name, time, .. } = d {
                if name == splitter {
                    *time = t;
                    return true;
                }
            }
        }
        false
    }

    pub fn observable(&self, name: &str) -> Option<&MatrixExpr> {
        self.observables.iter().find(|o| o.name == name).map(|o| &o.expr)
    }

    /// Canonical `.sgx` text; parsing it yields an equal spec.
    pub fn to_sgx(&self) -> String {
        self.to_string()
    }
}

pub(crate) fn fmt_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

impl fmt::Display for MatrixExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixExpr::Scaled { coefficient, builtin } => {
                if coefficient.times_alpha {
                    if coefficient.factor == 1.0 {
                        write!(f, "alpha*{}", builtin.keyword())
                    } else if coefficient.factor == -1.0 {
                        write!(f, "-alpha*{}", builtin.keyword())
                    } else {
                        write!(f, "{}*alpha*{}", coefficient.factor, builtin.keyword())
                    }
                } else {
                    write!(f, "{}*{}", coefficient.factor, builtin.keyword())
                }
            }
            MatrixExpr::Literal(rows) => {
                let body: Vec<String> = rows
                    .iter()
                    .map(|r| {
                        let cells: Vec<String> = r.iter().map(|&z| fmt_complex(z)).collect();
                        format!("[{}]", cells.join(", "))
                    })
                    .collect();
                write!(f, "[{}]", body.join(", "))
            }
        }
    }
}

impl fmt::Display for ExperimentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "experiment {}", self.name);
        let _ = writeln!(out, "dim {}", self.dim);
        let _ = writeln!(out, "hbar {}", self.hbar);
        let _ = writeln!(out, "alpha {}", self.alpha);
        let _ = writeln!(out, "hamiltonian {}", self.hamiltonian);
        for o in &self.observables {
            let _ = writeln!(out, "observable {} {}", o.name, o.expr);
        }
        for d in &self.devices {
            match d {
                DeviceDecl::Source { name, count, state } => {
                    let state = match state {
                        StateDecl::Mixed => "mixed".to_string(),
                        StateDecl::Ground => "ground".to_string(),
                        StateDecl::Ket(amps) => {
                            let cells: Vec<String> = amps.iter().map(|&z| fmt_complex(z)).collect();
                            format!("ket[{}]", cells.join(", "))
                        }
                    };
                    let _ = writeln!(out, "source {name} count={count} state={state}");
                }
                DeviceDecl::Splitter { name, observable, time } => {
                    let _ = writeln!(out, "splitter {name} observable={observable} time={time}");
                }
                DeviceDecl::Sink { name, flavor } => {
                    let _ = writeln!(out, "sink {name} kind={}", flavor.keyword());
                }
            }
        }
        for r in &self.routes {
            match r.branch {
                Some(b) => {
                    let _ = writeln!(out, "route {}.{} -> {}", r.from, b, r.to);
                }
                None => {
                    let _ = writeln!(out, "route {} -> {}", r.from, r.to);
                }
            }
        }
        f.write_str(&out)
    }
}
