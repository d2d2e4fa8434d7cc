//! Sampled trajectories.
//!
//! A particle's state is fully determined by the outcomes it has drawn so far,
//! so all reachable branch histories are enumerated once into a tree whose
//! nodes hold the post-collapse state and the cumulative Born distribution of
//! the next splitter. Each trajectory is then a walk down the tree driven by
//! counter-based uniforms, and the only per-particle output is an integer hit
//! count per node. Integer tallies make the result independent of how
//! particles are partitioned across threads.

use rayon::prelude::*;

use crate::dynamics::evolve;
use crate::matrix::ComplexMatrix;
use crate::measurement::{born_probabilities, collapse, expectation_of_matrix, COLLAPSE_FLOOR};
use crate::state::QuantumState;

use super::expectation::{assemble, propagate_expectation};
use super::result::{Beam, RunMode, RunResult};
use super::rng::TrajectoryRng;
use super::{BeamNetwork, DeviceKind, NetworkError};

/// Upper bound on distinct branch histories.
pub const MAX_PATH_NODES: usize = 1 << 20;
const PARTICLES_PER_TASK: u64 = 4096;

struct PathNode {
    route: usize,
    state: QuantumState,
    energy: f64,
    next: Next,
}

enum Next {
    Absorbed,
    /// `cumulative[j]` is the upper edge of `children[j]`'s interval in [0, 1).
    Split {
        cumulative: Vec<f64>,
        children: Vec<usize>,
    },
}

fn build_tree(net: &BeamNetwork) -> Result<Vec<PathNode>, NetworkError> {
    let h = net.hamiltonian.matrix();
    let energy_of = |s: &QuantumState| expectation_of_matrix(s, h).expect("dimension validated");

    let src = net.source;
    let root_route = net.route_for(src, None).expect("source is routed");
    let DeviceKind::Source { emit_state, .. } = &net.devices[src].kind else {
        unreachable!("source index points at a source")
    };
    let mut nodes = vec![PathNode {
        route: root_route,
        energy: energy_of(emit_state),
        state: emit_state.clone(),
        next: Next::Absorbed,
    }];

    let mut cursor = 0;
    while cursor < nodes.len() {
        let route = &net.routes[nodes[cursor].route];
        let target = &net.devices[route.to];
        if let DeviceKind::Splitter {
            eigensystem, time, ..
        } = &target.kind
        {
            let t_from = net.devices[route.from].time().unwrap_or(0.0);
            let arriving = evolve(&nodes[cursor].state, &net.hamiltonian, time - t_from)?;
            let probs = born_probabilities(&arriving, eigensystem)?;
            let allowed: f64 = probs.iter().filter(|&&p| p >= COLLAPSE_FLOOR).sum();

            let mut cumulative = Vec::new();
            let mut children = Vec::new();
            let mut acc = 0.0;
            for (k, &p) in probs.iter().enumerate() {
                if p < COLLAPSE_FLOOR {
                    continue;
                }
                if nodes.len() >= MAX_PATH_NODES {
                    return Err(NetworkError::TooManyHistories(MAX_PATH_NODES));
                }
                let post = collapse(&arriving, eigensystem, k)?.post_state;
                acc += p / allowed;
                cumulative.push(acc);
                children.push(nodes.len());
                nodes.push(PathNode {
                    route: net.route_for(route.to, Some(k)).expect("all branches routed"),
                    energy: energy_of(&post),
                    state: post,
                    next: Next::Absorbed,
                });
            }
            if let Some(last) = cumulative.last_mut() {
                *last = 1.0;
            }
            nodes[cursor].next = Next::Split {
                cumulative,
                children,
            };
        }
        cursor += 1;
    }
    Ok(nodes)
}

fn walk(nodes: &[PathNode], rng: &TrajectoryRng, particle: u64, hits: &mut [u64]) {
    let mut stream = rng.particle(particle);
    let mut node = 0;
    loop {
        hits[node] += 1;
        match &nodes[node].next {
            Next::Absorbed => return,
            Next::Split {
                cumulative,
                children,
            } => {
                let u = stream.next_uniform();
                let j = cumulative
                    .iter()
                    .position(|&c| u < c)
                    .unwrap_or(children.len() - 1);
                node = children[j];
            }
        }
    }
}

/// Samples `n_particles` independent trajectories from the source. Source
/// particles are drawn from the source state; counts are integers.
///
/// Results depend only on `(seed, n_particles)` and the network, not on the
/// size of the rayon pool the call runs in.
pub fn propagate_monte_carlo(
    net: &BeamNetwork,
    seed: u64,
    n_particles: u64,
) -> Result<RunResult, NetworkError> {
    if n_particles == 0 {
        return Err(NetworkError::InvalidParameter(
            "Monte Carlo needs at least one particle".into(),
        ));
    }
    let nodes = build_tree(net)?;
    let rng = TrajectoryRng::new(seed);

    let n_tasks = n_particles.div_ceil(PARTICLES_PER_TASK);
    let hits = (0..n_tasks)
        .into_par_iter()
        .map(|task| {
            let mut local = vec![0u64; nodes.len()];
            let start = task * PARTICLES_PER_TASK;
            let end = (start + PARTICLES_PER_TASK).min(n_particles);
            for particle in start..end {
                walk(&nodes, &rng, particle, &mut local);
            }
            local
        })
        .reduce(
            || vec![0u64; nodes.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    // Exact states stand in for beams no particle happened to take.
    let exact = propagate_expectation(net);

    let beams: Vec<Beam> = net
        .routes
        .iter()
        .enumerate()
        .map(|(r, route)| {
            let on_route: Vec<usize> = (0..nodes.len())
                .filter(|&i| nodes[i].route == r && hits[i] > 0)
                .collect();
            let count: u64 = on_route.iter().map(|&i| hits[i]).sum();
            let (state, total_energy) = match on_route.as_slice() {
                [] => {
                    let from = &net.devices[route.from].name;
                    let b = exact
                        .beam_from(from, route.branch)
                        .expect("exact run covers every route");
                    (b.state.clone(), 0.0)
                }
                [i] => (nodes[*i].state.clone(), hits[*i] as f64 * nodes[*i].energy),
                many => {
                    let mut rho = ComplexMatrix::zeros(net.dim);
                    let mut energy = 0.0;
                    for &i in many {
                        rho.add_scaled_assign(&nodes[i].state.density_matrix(), hits[i] as f64 / count as f64);
                        energy += hits[i] as f64 * nodes[i].energy;
                    }
                    (QuantumState::from_density_unchecked(rho), energy)
                }
            };
            Beam {
                id: route.beam_id.clone(),
                from: net.devices[route.from].name.clone(),
                branch: route.branch,
                to: net.devices[route.to].name.clone(),
                count: count as f64,
                state,
                total_energy,
            }
        })
        .collect();

    Ok(assemble(
        net,
        beams,
        RunMode::MonteCarlo {
            seed,
            trajectories: n_particles,
        },
    ))
}
