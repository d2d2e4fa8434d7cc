//! Exact propagation: beams split into fractional counts n·p_k.

use crate::dynamics::evolve;
use crate::eigen::Eigensystem;
use crate::matrix::ComplexMatrix;
use crate::measurement::{born_probabilities, collapse, expectation_of_matrix, COLLAPSE_FLOOR};
use crate::state::QuantumState;

use super::ledger::compute_ledger;
use super::result::{Beam, RunMode, RunResult, SinkTally};
use super::{BeamNetwork, DeviceKind};

/// State reported on a branch that receives no particles: the eigenvector for
/// a simple eigenvalue, the normalized projector otherwise.
pub(crate) fn branch_placeholder(eig: &Eigensystem, k: usize) -> QuantumState {
    if eig.multiplicities()[k] == 1 {
        QuantumState::from_ket_unchecked(eig.eigenvectors(k)[0].clone())
    } else {
        QuantumState::from_density_unchecked(eig.projectors()[k].clone())
    }
}

/// Count-weighted mixture of the incoming states. A single contributing beam
/// keeps its representation.
pub(crate) fn merge_inputs(inputs: &[(f64, QuantumState)]) -> (f64, QuantumState) {
    let total: f64 = inputs.iter().map(|(n, _)| n).sum();
    let live: Vec<&(f64, QuantumState)> = inputs.iter().filter(|(n, _)| *n > 0.0).collect();
    match live.as_slice() {
        [] => (total, inputs[0].1.clone()),
        [(_, s)] => (total, s.clone()),
        _ => {
            let mut rho = ComplexMatrix::zeros(inputs[0].1.dim());
            for (n, s) in &live {
                rho.add_scaled_assign(&s.density_matrix(), n / total);
            }
            (total, QuantumState::from_density_unchecked(rho))
        }
    }
}

pub(crate) fn beam_energy(net: &BeamNetwork, count: f64, state: &QuantumState) -> f64 {
    count * expectation_of_matrix(state, net.hamiltonian.matrix()).expect("state dimension matches H")
}

/// Topological sweep computing every beam's count, state and energy exactly.
pub fn propagate_expectation(net: &BeamNetwork) -> RunResult {
    let mut emitted: Vec<Option<(f64, QuantumState)>> = vec![None; net.routes.len()];

    for &d in &net.topo_order {
        let device = &net.devices[d];
        match &device.kind {
            DeviceKind::Source { count, emit_state } => {
                for r in net.outgoing(d) {
                    emitted[r] = Some((*count as f64, emit_state.clone()));
                }
            }
            DeviceKind::Splitter {
                eigensystem, time, ..
            } => {
                let inputs: Vec<(f64, QuantumState)> = net
                    .incoming(d)
                    .map(|r| {
                        let (n, s) = emitted[r].clone().expect("upstream beams are computed first");
                        let t_from = net.devices[net.routes[r].from].time().unwrap_or(0.0);
                        let drifted = evolve(&s, &net.hamiltonian, time - t_from)
                            .expect("state dimension matches H");
                        (n, drifted)
                    })
                    .collect();
                let (n, state) = merge_inputs(&inputs);
                let probs = born_probabilities(&state, eigensystem).expect("dimension validated");
                for (k, &p) in probs.iter().enumerate() {
                    let r = net.route_for(d, Some(k)).expect("all branches routed");
                    let out_state = if p >= COLLAPSE_FLOOR {
                        collapse(&state, eigensystem, k)
                            .expect("probability above floor")
                            .post_state
                    } else {
                        branch_placeholder(eigensystem, k)
                    };
                    emitted[r] = Some((n * p, out_state));
                }
            }
            DeviceKind::Sink { .. } => {}
        }
    }

    let beams: Vec<Beam> = net
        .routes
        .iter()
        .zip(emitted)
        .map(|(route, e)| {
            let (count, state) = e.expect("every route is downstream of the source");
            Beam {
                id: route.beam_id.clone(),
                from: net.devices[route.from].name.clone(),
                branch: route.branch,
                to: net.devices[route.to].name.clone(),
                count,
                total_energy: beam_energy(net, count, &state),
                state,
            }
        })
        .collect();

    assemble(net, beams, RunMode::Expectation)
}

/// Orders beams by label, tallies sinks and computes the ledger.
pub(crate) fn assemble(net: &BeamNetwork, beams: Vec<Beam>, mode: RunMode) -> RunResult {
    let mut keyed: Vec<((usize, usize), Beam)> = net
        .routes
        .iter()
        .map(|r| r.sort_key)
        .zip(beams)
        .collect();
    keyed.sort_by_key(|(k, _)| *k);
    let beams: Vec<Beam> = keyed.into_iter().map(|(_, b)| b).collect();

    let sink_tallies = net
        .devices
        .iter()
        .filter_map(|d| match d.kind {
            DeviceKind::Sink { flavor } => {
                let incoming = beams.iter().filter(|b| b.to == d.name);
                let (count, total_energy) = incoming
                    .fold((0.0, 0.0), |(c, e), b| (c + b.count, e + b.total_energy));
                Some(SinkTally {
                    name: d.name.clone(),
                    flavor,
                    count,
                    total_energy,
                })
            }
            _ => None,
        })
        .collect();

    let ledger = compute_ledger(&beams, &net.hamiltonian);
    RunResult {
        mode,
        beams,
        ledger,
        sink_tallies,
    }
}
