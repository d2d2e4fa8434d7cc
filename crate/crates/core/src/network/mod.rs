//! Beam networks: a source, measurement devices ("splitters") and sinks wired
//! into a DAG, propagated either exactly or by sampled trajectories.

mod build;
mod expectation;
mod ledger;
mod monte_carlo;
mod result;
pub mod rng;

use thiserror::Error;

use crate::eigen::Eigensystem;
use crate::error::QuantumError;
use crate::operators::{Hamiltonian, Observable};
use crate::state::QuantumState;

pub use build::build_network;
pub use expectation::propagate_expectation;
pub use ledger::{compute_ledger, DeviceEnergy, DeviceRole, EnergyLedger};
pub use monte_carlo::{propagate_monte_carlo, MAX_PATH_NODES};
pub use result::{battery_yield, Beam, RunMode, RunResult, SinkTally};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinkFlavor {
    Camera,
    Battery,
}

impl SinkFlavor {
    pub fn keyword(self) -> &'static str {
        match self {
            SinkFlavor::Camera => "camera",
            SinkFlavor::Battery => "battery",
        }
    }
}

#[derive(Debug, Clone)]
pub enum DeviceKind {
    Source {
        count: u64,
        emit_state: QuantumState,
    },
    Splitter {
        observable: Observable,
        eigensystem: Eigensystem,
        time: f64,
    },
    Sink {
        flavor: SinkFlavor,
    },
}

#[derive(Debug, Clone)]
pub struct Device {
    pub name: String,
    pub kind: DeviceKind,
}

impl Device {
    /// Time stamp at which the device acts; sources emit at 0.
    pub fn time(&self) -> Option<f64> {
        match &self.kind {
            DeviceKind::Source { .. } => Some(0.0),
            DeviceKind::Splitter { time, .. } => Some(*time),
            DeviceKind::Sink { .. } => None,
        }
    }

    pub fn is_sink(&self) -> bool {
        matches!(self.kind, DeviceKind::Sink { .. })
    }

    pub fn is_splitter(&self) -> bool {
        matches!(self.kind, DeviceKind::Splitter { .. })
    }
}

/// A wire from one output of a device to the input of another. Every route
/// carries exactly one beam.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub from: usize,
    pub branch: Option<usize>,
    pub to: usize,
    /// Table-style label: layer number, then `.k` when the layer has several beams.
    pub beam_id: String,
    pub(crate) sort_key: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct BeamNetwork {
    pub(crate) dim: usize,
    pub(crate) hamiltonian: Hamiltonian,
    pub(crate) devices: Vec<Device>,
    pub(crate) routes: Vec<Route>,
    pub(crate) topo_order: Vec<usize>,
    pub(crate) source: usize,
}

impl BeamNetwork {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn devices(&self) -> &[Device] {
        &self.devices
    }

    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    pub fn device_index(&self, name: &str) -> Option<usize> {
        self.devices.iter().position(|d| d.name == name)
    }

    pub fn device(&self, name: &str) -> Option<&Device> {
        self.devices.iter().find(|d| d.name == name)
    }

    pub fn source(&self) -> &Device {
        &self.devices[self.source]
    }

    pub fn source_count(&self) -> u64 {
        match self.devices[self.source].kind {
            DeviceKind::Source { count, .. } => count,
            _ => unreachable!("source index points at a source"),
        }
    }

    /// Devices in a topological order (source first).
    pub fn topological_order(&self) -> &[usize] {
        &self.topo_order
    }

    /// Indices of routes leaving `device`.
    pub fn outgoing(&self, device: usize) -> impl Iterator<Item = usize> + '_ {
        self.routes
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.from == device)
            .map(|(i, _)| i)
    }

    pub fn incoming(&self, device: usize) -> impl Iterator<Item = usize> + '_ {
        self.routes
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.to == device)
            .map(|(i, _)| i)
    }

    /// Route carrying outcome `branch` of `device`.
    pub fn route_for(&self, device: usize, branch: Option<usize>) -> Option<usize> {
        self.routes
            .iter()
            .position(|r| r.from == device && r.branch == branch)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("device `{device}` has no route for outcome {}", branch.map_or("(output)".to_string(), |b| b.to_string()))]
    UnroutedBranch { device: String, branch: Option<usize> },

    #[error("routes form a cycle through `{device}`")]
    CycleDetected { device: String },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("duplicate device name `{0}`")]
    DuplicateDeviceName(String),

    #[error("duplicate observable name `{0}`")]
    DuplicateObservable(String),

    #[error("network has no source")]
    MissingSource,

    #[error("network has more than one source (`{0}` and `{1}`)")]
    MultipleSources(String, String),

    #[error("unknown device `{0}`")]
    UnknownDevice(String),

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("route from `{device}` uses branch {branch}, but it has {outcomes} outcome(s)")]
    InvalidBranch {
        device: String,
        branch: usize,
        outcomes: usize,
    },

    #[error("route from `{0}` needs a branch index")]
    MissingBranch(String),

    #[error("source `{0}` has a single output and takes no branch index")]
    SourceBranch(String),

    #[error("outcome {} of `{device}` is routed twice", branch.map_or("(output)".to_string(), |b| b.to_string()))]
    DuplicateRoute { device: String, branch: Option<usize> },

    #[error("sink `{0}` cannot have outgoing routes")]
    RouteFromSink(String),

    #[error("source `{0}` cannot receive a beam")]
    RouteIntoSource(String),

    #[error("device `{0}` is not reachable from the source")]
    UnreachableDevice(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("network has no battery sink")]
    NoBatteryInNetwork,

    #[error("trajectory tree exceeds {0} distinct branch histories")]
    TooManyHistories(usize),

    #[error(transparent)]
    Quantum(#[from] QuantumError),
}
