//! Built-in regression checks for the three-device heating experiment and its
//! variant without the S_x device.

use std::fmt;
use std::path::Path;

use sgx_core::network::{Beam, DeviceKind, SinkFlavor};
use sgx_core::{battery_yield, propagate_expectation, BeamNetwork, RunResult};

use crate::{build, load_spec, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// source → A → B → C with a camera on one branch of each splitter and a battery on C.
    Full,
    /// source → A → C.
    WithoutB,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Full => "three-splitter chain",
            Shape::WithoutB => "two-splitter chain, device B removed",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}  {}: observed {}, expected {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            sgx_core::io::report::fmt_sig12(self.observed),
            sgx_core::io::report::fmt_sig12(self.expected)
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub shape: Shape,
    pub checks: Vec<Check>,
}

struct Topology {
    shape: Shape,
    a: usize,
    b: Option<usize>,
    c: usize,
}

/// Branches of a two-outcome splitter as `(branch, target)`.
fn branches(net: &BeamNetwork, d: usize) -> Option<Vec<(usize, usize)>> {
    let out: Vec<(usize, usize)> = net
        .outgoing(d)
        .map(|r| (net.routes()[r].branch.unwrap_or(0), net.routes()[r].to))
        .collect();
    (out.len() == 2).then_some(out)
}

fn is_battery(net: &BeamNetwork, d: usize) -> bool {
    matches!(net.devices()[d].kind, DeviceKind::Sink { flavor: SinkFlavor::Battery })
}

fn is_sink(net: &BeamNetwork, d: usize) -> bool {
    net.devices()[d].is_sink()
}

fn is_splitter(net: &BeamNetwork, d: usize) -> bool {
    net.devices()[d].is_splitter()
}

/// One sink branch and one splitter branch; returns the splitter.
fn passes_on(net: &BeamNetwork, d: usize) -> Option<usize> {
    let br = branches(net, d)?;
    match (is_sink(net, br[0].1), is_sink(net, br[1].1)) {
        (true, false) if is_splitter(net, br[1].1) => Some(br[1].1),
        (false, true) if is_splitter(net, br[0].1) => Some(br[0].1),
        _ => None,
    }
}

/// Both branches into sinks, exactly one of them a battery.
fn ends_in_battery(net: &BeamNetwork, d: usize) -> bool {
    branches(net, d).is_some_and(|br| {
        br.iter().all(|&(_, t)| is_sink(net, t)) && br.iter().filter(|&&(_, t)| is_battery(net, t)).count() == 1
    })
}

fn classify(net: &BeamNetwork) -> Option<Topology> {
    if net.dim() != 2 {
        return None;
    }
    let src = net.device_index(&net.source().name)?;
    let first = net.routes().iter().find(|r| r.from == src)?.to;
    if !is_splitter(net, first) {
        return None;
    }
    let next = passes_on(net, first)?;
    let (shape, b, c, routes, devices) = if ends_in_battery(net, next) {
        (Shape::WithoutB, None, next, 5, 6)
    } else {
        let c = passes_on(net, next)?;
        if !ends_in_battery(net, c) {
            return None;
        }
        (Shape::Full, Some(next), c, 7, 8)
    };
    (net.routes().len() == routes && net.devices().len() == devices).then_some(Topology { shape, a: first, b, c })
}

struct Checker<'a> {
    result: &'a RunResult,
    /// Natural energy scale N·α·ħ for relative tolerances.
    scale: f64,
    /// α·ħ, the scale of per-particle energies.
    unit: f64,
    checks: Vec<Check>,
}

impl Checker<'_> {
    fn push(&mut self, name: String, observed: f64, expected: f64, tol: f64) {
        self.checks.push(Check {
            passed: (observed - expected).abs() <= tol,
            name,
            observed,
            expected,
        });
    }

    fn count(&mut self, name: String, observed: f64, expected: f64) {
        self.push(name, observed, expected, 1e-9 * expected.abs().max(1.0));
    }

    fn energy(&mut self, name: String, observed: f64, expected: f64) {
        self.push(name, observed, expected, 1e-9 * expected.abs().max(self.scale).max(1e-300));
    }

    fn per_particle(&mut self, name: String, observed: f64, expected: f64) {
        self.push(name, observed, expected, 1e-9 * expected.abs().max(self.unit).max(1e-300));
    }

    fn beam(&self, net: &BeamNetwork, device: usize, target: usize) -> &Beam {
        let from = &net.devices()[device].name;
        let to = &net.devices()[target].name;
        self.result
            .beams
            .iter()
            .find(|b| &b.from == from && &b.to == to)
            .expect("classified routes exist")
    }

    fn probabilities(&mut self, net: &BeamNetwork, d: usize, expected: impl Fn(usize) -> f64) {
        let name = &net.devices()[d].name;
        let input: f64 = self.result.beams.iter().filter(|b| &b.to == name).map(|b| b.count).sum();
        for (branch, target) in branches(net, d).unwrap() {
            let b = self.beam(net, d, target);
            let p = if input > 0.0 { b.count / input } else { f64::NAN };
            self.push(format!("{name} outcome {branch} probability"), p, expected(target), 1e-9);
        }
    }

    fn beam_row(&mut self, net: &BeamNetwork, d: usize, target: usize, count: f64, energy: f64) {
        let b = self.beam(net, d, target);
        let label = format!("beam {} ({} -> {})", b.id, b.from, b.to);
        let (c, e) = (b.count, b.total_energy);
        self.count(format!("{label} count"), c, count);
        self.energy(format!("{label} energy"), e, energy);
    }
}

pub fn verify(path: &Path) -> Result<VerifyReport, CliError> {
    let spec = load_spec(path)?;
    let net = build(&spec, path)?;
    let topo = classify(&net).ok_or_else(|| {
        CliError::Domain(format!(
            "{}: verify only checks the three-splitter heating chain or its variant without device B",
            path.display()
        ))
    })?;
    let result = propagate_expectation(&net);

    let n = net.source_count() as f64 / 2.0;
    let e = net.hamiltonian().alpha() * net.hamiltonian().hbar();
    let mut ck = Checker {
        result: &result,
        scale: n * e.abs(),
        unit: e.abs(),
        checks: Vec::new(),
    };

    let splitter_branch = |d: usize| -> (usize, usize) {
        let br = branches(&net, d).unwrap();
        let onward = br.iter().find(|&&(_, t)| !is_sink(&net, t)).unwrap().1;
        let sink = br.iter().find(|&&(_, t)| is_sink(&net, t)).unwrap().1;
        (onward, sink)
    };
    let c_targets = |c: usize| -> (usize, usize) {
        let br = branches(&net, c).unwrap();
        let battery = br.iter().find(|&&(_, t)| is_battery(&net, t)).unwrap().1;
        let camera = br.iter().find(|&&(_, t)| !is_battery(&net, t)).unwrap().1;
        (battery, camera)
    };

    let (a_on, a_sink) = splitter_branch(topo.a);
    let (battery, camera) = c_targets(topo.c);
    ck.probabilities(&net, topo.a, |_| 0.5);
    ck.beam_row(&net, topo.a, a_on, n, -n * e / 2.0);
    ck.beam_row(&net, topo.a, a_sink, n, n * e / 2.0);

    let (battery_count, battery_energy) = battery_yield(&result).map_err(|e| CliError::Runtime(e.to_string()))?;
    let c_name = net.devices()[topo.c].name.clone();

    match topo.b {
        Some(b) => {
            let b_name = net.devices()[b].name.clone();
            let (b_on, b_sink) = splitter_branch(b);
            ck.probabilities(&net, b, |_| 0.5);
            ck.probabilities(&net, topo.c, |_| 0.5);
            ck.beam_row(&net, b, b_on, n / 2.0, 0.0);
            ck.beam_row(&net, b, b_sink, n / 2.0, 0.0);
            ck.beam_row(&net, topo.c, camera, n / 4.0, -n * e / 8.0);
            ck.beam_row(&net, topo.c, battery, n / 4.0, n * e / 8.0);

            let ledger = &result.ledger;
            ck.energy(format!("{b_name} injected energy"), ledger.injected(&b_name).unwrap(), n * e / 2.0);
            ck.per_particle(
                format!("{b_name} injected energy per input particle"),
                ledger.injected_per_input_particle(&b_name).unwrap_or(f64::NAN),
                e / 2.0,
            );
            ck.per_particle(
                format!("{b_name} injected energy per source particle"),
                ledger.injected_per_source_particle(&b_name).unwrap_or(f64::NAN),
                e / 4.0,
            );

            let before = ck.beam(&net, topo.a, a_on).total_energy;
            let after_b: f64 = [(b, b_on), (b, b_sink)].iter().map(|&(d, t)| ck.beam(&net, d, t).total_energy).sum();
            let after_c = ck.beam(&net, b, b_sink).total_energy
                + ck.beam(&net, topo.c, camera).total_energy
                + ck.beam(&net, topo.c, battery).total_energy;
            ck.energy(format!("energy entering {b_name}"), before, -n * e / 2.0);
            ck.energy(format!("energy after {b_name}"), after_b, 0.0);
            ck.energy(format!("energy after {c_name}"), after_c, 0.0);
            ck.count("battery count".into(), battery_count, n / 4.0);
            ck.energy("battery energy".into(), battery_energy, n * e / 8.0);
        }
        None => {
            ck.probabilities(&net, topo.c, |t| if t == battery { 0.0 } else { 1.0 });
            ck.beam_row(&net, topo.c, camera, n, -n * e / 2.0);
            ck.beam_row(&net, topo.c, battery, 0.0, 0.0);
            ck.energy(format!("{c_name} injected energy"), result.ledger.injected(&c_name).unwrap(), 0.0);
            let after_c = ck.beam(&net, topo.c, camera).total_energy + ck.beam(&net, topo.c, battery).total_energy;
            ck.energy(format!("energy after {c_name}"), after_c, -n * e / 2.0);
            ck.count("battery count".into(), battery_count, 0.0);
            ck.energy("battery energy".into(), battery_energy, 0.0);
        }
    }

    Ok(VerifyReport {
        shape: topo.shape,
        checks: ck.checks,
    })
}
