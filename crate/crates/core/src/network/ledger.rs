//! Energy bookkeeping across devices.
//!
//! A device's injected energy is what leaves it minus what enters it. The
//! source's emission is the network input and sinks only absorb, so both
//! report zero injection; the identity
//! `Σ injected = network_total_out − network_total_in` then holds on any run.

use crate::measurement::expectation_of_matrix;
use crate::operators::Hamiltonian;

use super::result::Beam;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceRole {
    Source,
    Splitter,
    Sink,
}

#[derive(Debug, Clone)]
pub struct DeviceEnergy {
    pub name: String,
    pub role: DeviceRole,
    pub input_count: f64,
    pub energy_in: f64,
    pub energy_out: f64,
    pub injected: f64,
    pub absorbed: f64,
}

#[derive(Debug, Clone, Default)]
pub struct EnergyLedger {
    pub per_beam: Vec<(String, f64)>,
    pub devices: Vec<DeviceEnergy>,
    /// Energy emitted by the source.
    pub network_total_in: f64,
    /// Energy absorbed by sinks.
    pub network_total_out: f64,
    pub source_count: f64,
}

impl EnergyLedger {
    pub fn device(&self, name: &str) -> Option<&DeviceEnergy> {
        self.devices.iter().find(|d| d.name == name)
    }

    pub fn injected(&self, name: &str) -> Option<f64> {
        self.device(name).map(|d| d.injected)
    }

    /// Injection divided by the particles entering the device (`None` when none do).
    pub fn injected_per_input_particle(&self, name: &str) -> Option<f64> {
        self.device(name)
            .filter(|d| d.input_count > 0.0)
            .map(|d| d.injected / d.input_count)
    }

    /// Injection divided by the particles emitted by the source.
    pub fn injected_per_source_particle(&self, name: &str) -> Option<f64> {
        self.device(name)
            .filter(|_| self.source_count > 0.0)
            .map(|d| d.injected / self.source_count)
    }

    pub fn total_injected(&self) -> f64 {
        self.devices.iter().map(|d| d.injected).sum()
    }

    /// Σ injected − (out − in); zero up to round-off.
    pub fn conservation_residual(&self) -> f64 {
        self.total_injected() - (self.network_total_out - self.network_total_in)
    }
}

/// Builds the ledger from a beam table, recomputing each beam's energy as
/// count × ⟨H⟩ of its state.
pub fn compute_ledger(beams: &[Beam], h: &Hamiltonian) -> EnergyLedger {
    let mut ledger = EnergyLedger::default();
    let mut names: Vec<&str> = Vec::new();
    for b in beams {
        for n in [b.from.as_str(), b.to.as_str()] {
            if !names.contains(&n) {
                names.push(n);
            }
        }
    }
    let energies: Vec<f64> = beams
        .iter()
        .map(|b| {
            let e = expectation_of_matrix(&b.state, h.matrix()).expect("beam dimension matches H");
            b.count * e
        })
        .collect();
    ledger.per_beam = beams.iter().zip(&energies).map(|(b, &e)| (b.id.clone(), e)).collect();

    for name in names {
        let mut input_count = 0.0;
        let mut energy_in = 0.0;
        let mut energy_out = 0.0;
        let mut has_in = false;
        let mut has_out = false;
        for (b, &e) in beams.iter().zip(&energies) {
            if b.to == name {
                has_in = true;
                input_count += b.count;
                energy_in += e;
            }
            if b.from == name {
                has_out = true;
                energy_out += e;
            }
        }
        let role = match (has_in, has_out) {
            (false, _) => DeviceRole::Source,
            (true, false) => DeviceRole::Sink,
            (true, true) => DeviceRole::Splitter,
        };
        let (injected, absorbed) = match role {
            DeviceRole::Source => {
                ledger.network_total_in += energy_out;
                ledger.source_count += beams
                    .iter()
                    .filter(|b| b.from == name)
                    .map(|b| b.count)
                    .sum::<f64>();
                (0.0, 0.0)
            }
            DeviceRole::Sink => {
                ledger.network_total_out += energy_in;
                (0.0, energy_in)
            }
            DeviceRole::Splitter => (energy_out - energy_in, 0.0),
        };
        ledger.devices.push(DeviceEnergy {
            name: name.to_string(),
            role,
            input_count,
            energy_in,
            energy_out,
            injected,
            absorbed,
        });
    }
    ledger
}
