use crate::state::QuantumState;

use super::ledger::EnergyLedger;
use super::{NetworkError, SinkFlavor};

/// One beam of the run: particles on a single route.
#[derive(Debug, Clone)]
pub struct Beam {
    pub id: String,
    pub from: String,
    pub branch: Option<usize>,
    pub to: String,
    /// Fractional in expectation mode, integral in Monte Carlo mode.
    pub count: f64,
    /// State as emitted by `from` (before any drift towards `to`).
    pub state: QuantumState,
    /// count × ⟨H⟩, in units of the configured ħ and α.
    pub total_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Expectation,
    MonteCarlo { seed: u64, trajectories: u64 },
}

#[derive(Debug, Clone)]
pub struct SinkTally {
    pub name: String,
    pub flavor: SinkFlavor,
    pub count: f64,
    pub total_energy: f64,
}

impl SinkTally {
    pub fn mean_energy(&self) -> f64 {
        if self.count > 0.0 {
            self.total_energy / self.count
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub mode: RunMode,
    pub beams: Vec<Beam>,
    pub ledger: EnergyLedger,
    pub sink_tallies: Vec<SinkTally>,
}

impl RunResult {
    pub fn beam(&self, id: &str) -> Option<&Beam> {
        self.beams.iter().find(|b| b.id == id)
    }

    /// Beam leaving `device` on outcome `branch`.
    pub fn beam_from(&self, device: &str, branch: Option<usize>) -> Option<&Beam> {
        self.beams
            .iter()
            .find(|b| b.from == device && b.branch == branch)
    }

    pub fn sink(&self, name: &str) -> Option<&SinkTally> {
        self.sink_tallies.iter().find(|s| s.name == name)
    }
}

/// Total (count, energy) collected by battery sinks.
pub fn battery_yield(result: &RunResult) -> Result<(f64, f64), NetworkError> {
    let mut found = false;
    let mut count = 0.0;
    let mut energy = 0.0;
    for s in result
        .sink_tallies
        .iter()
        .filter(|s| s.flavor == SinkFlavor::Battery)
    {
        found = true;
        count += s.count;
        energy += s.total_energy;
    }
    if found {
        Ok((count, energy))
    } else {
        Err(NetworkError::NoBatteryInNetwork)
    }
}
