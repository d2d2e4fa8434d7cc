use std::collections::{BTreeSet, HashMap, HashSet};

use crate::eigen::{Eigensystem, DEFAULT_CLUSTER_TOL};
use crate::error::QuantumError;
use crate::io::spec::{DeviceDecl, ExperimentSpec, MatrixExpr, ResolveError, StateDecl};
use crate::matrix::ComplexMatrix;
use crate::operators::{ground_state, Hamiltonian, Observable};
use crate::state::QuantumState;

use super::{BeamNetwork, Device, DeviceKind, NetworkError, Route};

fn resolve(
    expr: &MatrixExpr,
    spec: &ExperimentSpec,
    context: &str,
) -> Result<ComplexMatrix, NetworkError> {
    expr.resolve(spec.dim, spec.hbar, spec.alpha).map_err(|e| match e {
        ResolveError::SpinNeedsDimTwo(_, dim) => NetworkError::DimensionMismatch {
            context: context.to_string(),
            expected: dim,
            found: 2,
        },
        ResolveError::WrongDimension { expected, found } => NetworkError::DimensionMismatch {
            context: context.to_string(),
            expected,
            found,
        },
        ResolveError::Malformed(msg) => QuantumError::InvalidMatrix(msg).into(),
    })
}

/// Validates an experiment and turns it into a network with every splitter's
/// eigensystem precomputed.
pub fn build_network(spec: &ExperimentSpec) -> Result<BeamNetwork, NetworkError> {
    if spec.dim == 0 {
        return Err(NetworkError::InvalidParameter("dim must be positive".into()));
    }
    if !(spec.hbar > 0.0 && spec.hbar.is_finite()) {
        return Err(NetworkError::InvalidParameter(format!("hbar must be positive, got {}", spec.hbar)));
    }
    if !spec.alpha.is_finite() {
        return Err(NetworkError::InvalidParameter(format!("alpha must be finite, got {}", spec.alpha)));
    }

    let h_matrix = resolve(&spec.hamiltonian, spec, "hamiltonian")?;
    let hamiltonian = Hamiltonian::new(Observable::new("H", h_matrix)?, spec.hbar, spec.alpha)?;

    let mut observables: HashMap<&str, (Observable, Eigensystem)> = HashMap::new();
    for decl in &spec.observables {
        if observables.contains_key(decl.name.as_str()) {
            return Err(NetworkError::DuplicateObservable(decl.name.clone()));
        }
        let m = resolve(&decl.expr, spec, &format!("observable `{}`", decl.name))?;
        let obs = Observable::new(decl.name.clone(), m)?;
        let eig = Eigensystem::of_matrix(obs.matrix(), DEFAULT_CLUSTER_TOL)?;
        observables.insert(decl.name.as_str(), (obs, eig));
    }

    let mut devices = Vec::with_capacity(spec.devices.len());
    let mut names = HashSet::new();
    let mut source: Option<usize> = None;
    for (idx, decl) in spec.devices.iter().enumerate() {
        if !names.insert(decl.name()) {
            return Err(NetworkError::DuplicateDeviceName(decl.name().to_string()));
        }
        let kind = match decl {
            DeviceDecl::Source { name, count, state } => {
                if let Some(prev) = source {
                    return Err(NetworkError::MultipleSources(
                        spec.devices[prev].name().to_string(),
                        name.clone(),
                    ));
                }
                source = Some(idx);
                if *count == 0 {
                    return Err(NetworkError::InvalidParameter(format!(
                        "source `{name}` must emit at least one particle"
                    )));
                }
                let emit_state = match state {
                    StateDecl::Mixed => QuantumState::maximally_mixed(spec.dim),
                    StateDecl::Ground => ground_state(&hamiltonian).state,
                    StateDecl::Ket(amps) => {
                        if amps.len() != spec.dim {
                            return Err(NetworkError::DimensionMismatch {
                                context: format!("state of source `{name}`"),
                                expected: spec.dim,
                                found: amps.len(),
                            });
                        }
                        QuantumState::pure_normalized(amps.clone())?
                    }
                };
                DeviceKind::Source {
                    count: *count,
                    emit_state,
                }
            }
            DeviceDecl::Splitter { name: _, observable, time } => {
                if !time.is_finite() {
                    return Err(NetworkError::InvalidParameter(format!(
                        "splitter `{}` has non-finite time",
                        decl.name()
                    )));
                }
                let (obs, eig) = observables
                    .get(observable.as_str())
                    .ok_or_else(|| NetworkError::UnknownObservable(observable.clone()))?;
                DeviceKind::Splitter {
                    observable: obs.clone(),
                    eigensystem: eig.clone(),
                    time: *time,
                }
            }
            DeviceDecl::Sink { flavor, .. } => DeviceKind::Sink { flavor: *flavor },
        };
        devices.push(Device {
            name: decl.name().to_string(),
            kind,
        });
    }
    let source = source.ok_or(NetworkError::MissingSource)?;

    let index: HashMap<&str, usize> = devices
        .iter()
        .enumerate()
        .map(|(i, d)| (d.name.as_str(), i))
        .collect();
    let lookup = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| NetworkError::UnknownDevice(name.to_string()))
    };

    let mut routes: Vec<Route> = Vec::with_capacity(spec.routes.len());
    let mut seen = HashSet::new();
    for decl in &spec.routes {
        let from = lookup(&decl.from)?;
        let to = lookup(&decl.to)?;
        match (&devices[from].kind, decl.branch) {
            (DeviceKind::Sink { .. }, _) => return Err(NetworkError::RouteFromSink(decl.from.clone())),
            (DeviceKind::Source { .. }, Some(_)) => {
                return Err(NetworkError::SourceBranch(decl.from.clone()))
            }
            (DeviceKind::Splitter { .. }, None) => return Err(NetworkError::MissingBranch(decl.from.clone())),
            (DeviceKind::Splitter { eigensystem, .. }, Some(b)) if b >= eigensystem.len() => {
                return Err(NetworkError::InvalidBranch {
                    device: decl.from.clone(),
                    branch: b,
                    outcomes: eigensystem.len(),
                })
            }
            _ => {}
        }
        if matches!(devices[to].kind, DeviceKind::Source { .. }) {
            return Err(NetworkError::RouteIntoSource(decl.to.clone()));
        }
        if !seen.insert((from, decl.branch)) {
            return Err(NetworkError::DuplicateRoute {
                device: decl.from.clone(),
                branch: decl.branch,
            });
        }
        routes.push(Route {
            from,
            branch: decl.branch,
            to,
            beam_id: String::new(),
            sort_key: (0, 0),
        });
    }

    for (i, device) in devices.iter().enumerate() {
        match &device.kind {
            DeviceKind::Source { .. } if !seen.contains(&(i, None)) => {
                return Err(NetworkError::UnroutedBranch {
                    device: device.name.clone(),
                    branch: None,
                })
            }
            DeviceKind::Splitter { eigensystem, .. } => {
                if let Some(b) = (0..eigensystem.len()).find(|b| !seen.contains(&(i, Some(*b)))) {
                    return Err(NetworkError::UnroutedBranch {
                        device: device.name.clone(),
                        branch: Some(b),
                    });
                }
            }
            _ => {}
        }
    }

    let topo_order = topological_order(&devices, &routes)?;

    let mut reachable = vec![false; devices.len()];
    reachable[source] = true;
    for &d in &topo_order {
        if reachable[d] {
            for r in routes.iter().filter(|r| r.from == d) {
                reachable[r.to] = true;
            }
        }
    }
    if let Some(d) = reachable.iter().position(|r| !r) {
        return Err(NetworkError::UnreachableDevice(devices[d].name.clone()));
    }

    assign_beam_ids(&mut routes, &topo_order, devices.len());

    Ok(BeamNetwork {
        dim: spec.dim,
        hamiltonian,
        devices,
        routes,
        topo_order,
        source,
    })
}

/// Kahn's algorithm, always releasing the earliest-declared ready device.
fn topological_order(devices: &[Device], routes: &[Route]) -> Result<Vec<usize>, NetworkError> {
    let n = devices.len();
    let mut indegree = vec![0usize; n];
    for r in routes {
        indegree[r.to] += 1;
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(d) = ready.pop_first() {
        order.push(d);
        for r in routes.iter().filter(|r| r.from == d) {
            indegree[r.to] -= 1;
            if indegree[r.to] == 0 {
                ready.insert(r.to);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap();
        return Err(NetworkError::CycleDetected {
            device: devices[stuck].name.clone(),
        });
    }
    Ok(order)
}

/// Layer = longest distance of the emitting device from the source, plus one.
/// Within a layer beams are numbered by emitting device (topological order)
/// and then by descending eigenvalue.
fn assign_beam_ids(routes: &mut [Route], topo_order: &[usize], n_devices: usize) {
    let mut depth = vec![0usize; n_devices];
    let mut position = vec![0usize; n_devices];
    for (pos, &d) in topo_order.iter().enumerate() {
        position[d] = pos;
        for r in routes.iter().filter(|r| r.from == d) {
            depth[r.to] = depth[r.to].max(depth[d] + 1);
        }
    }
    let mut keyed: Vec<(usize, usize, std::cmp::Reverse<Option<usize>>, usize)> = routes
        .iter()
        .enumerate()
        .map(|(i, r)| (depth[r.from] + 1, position[r.from], std::cmp::Reverse(r.branch), i))
        .collect();
    keyed.sort();
    let mut per_layer: HashMap<usize, usize> = HashMap::new();
    for &(layer, ..) in &keyed {
        *per_layer.entry(layer).or_default() += 1;
    }
    let mut counter: HashMap<usize, usize> = HashMap::new();
    for &(layer, _, _, i) in &keyed {
        let k = counter.entry(layer).or_default();
        *k += 1;
        routes[i].sort_key = (layer, *k);
        routes[i].beam_id = if per_layer[&layer] == 1 {
            layer.to_string()
        } else {
            format!("{layer}.{k}")
        };
    }
}
