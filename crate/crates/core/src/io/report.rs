//! Run reports: aligned table, CSV and JSON.

use std::str::FromStr;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::matrix::ComplexMatrix;
use crate::network::{DeviceRole, RunMode, RunResult};
use crate::state::{spin_half, QuantumState, StateKind};

/// Fidelity a state must reach to be printed under a ket's name.
pub const LABEL_FIDELITY: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format `{other}` (expected table, csv or json)")),
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Shortest text of the value rounded to 12 significant digits; exponent
/// notation outside [1e-6, 1e15).
pub fn fmt_sig12(x: f64) -> String {
    let r = round_sig12(x);
    if r != 0.0 && r.is_finite() && !(1e-6..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn fmt_complex_sig12(z: Complex64) -> String {
    let re = round_sig12(z.re);
    let im = round_sig12(z.im);
    if im == 0.0 {
        fmt_sig12(re)
    } else if re == 0.0 {
        format!("{}i", fmt_sig12(im))
    } else {
        let sign = if im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", fmt_sig12(re), fmt_sig12(im.abs()))
    }
}

/// Amplitudes with the global phase fixed so the first non-negligible one is real positive.
fn amplitude_text(ket: &[Complex64]) -> String {
    let phase = ket
        .iter()
        .find(|a| a.norm() > 1e-12)
        .map_or(Complex64::new(1.0, 0.0), |a| a.conj() / a.norm());
    let cells: Vec<String> = ket.iter().map(|&a| fmt_complex_sig12(a * phase)).collect();
    format!("[{}]", cells.join(", "))
}

/// Named ket (|z±>, |x±>) when the state is within 1e-9 fidelity of one,
/// `I/d` for the maximally mixed state, otherwise the amplitudes (pure or
/// rank-one) or the density matrix.
pub fn state_label(state: &QuantumState) -> String {
    if state.dim() == 2 {
        for (label, ket) in spin_half::named_kets() {
            if state.fidelity_with_ket(ket.ket().unwrap()) >= LABEL_FIDELITY {
                return label.to_string();
            }
        }
    }
    match state.kind() {
        StateKind::Pure => amplitude_text(state.ket().unwrap()),
        StateKind::Mixed => {
            let d = state.dim();
            let rho = state.rho().unwrap();
            let mixed = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
            if rho.max_abs_diff(&mixed) <= 1e-9 {
                return format!("I/{d}");
            }
            if let Some(pure) = state.to_pure_if_rank_one(1e-9) {
                return amplitude_text(pure.ket().unwrap());
            }
            let rows: Vec<String> = rho
                .rows()
                .map(|r| {
                    let cells: Vec<String> = r.iter().map(|&z| fmt_complex_sig12(z)).collect();
                    format!("[{}]", cells.join(", "))
                })
                .collect();
            format!("rho[{}]", rows.join(", "))
        }
    }
}

pub fn render_report(result: &RunResult, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => render_table(result),
        ReportFormat::Csv => render_csv(result),
        ReportFormat::Json => render_json(result),
    }
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&rule.join("  "));
            out.push('\n');
        }
    }
    out
}

fn render_table(result: &RunResult) -> String {
    let mut rows = vec![vec![
        "beam".to_string(),
        "#particles".to_string(),
        "state".to_string(),
        "E_tot".to_string(),
    ]];
    for b in &result.beams {
        rows.push(vec![
            b.id.clone(),
            fmt_sig12(b.count),
            state_label(&b.state),
            fmt_sig12(b.total_energy),
        ]);
    }
    let mut out = aligned(&rows);

    let splitters: Vec<_> = result
        .ledger
        .devices
        .iter()
        .filter(|d| d.role == DeviceRole::Splitter)
        .collect();
    if !splitters.is_empty() {
        let mut rows = vec![vec![
            "device".to_string(),
            "E_in".to_string(),
            "E_out".to_string(),
            "injected".to_string(),
            "per input particle".to_string(),
            "per source particle".to_string(),
        ]];
        for d in splitters {
            let per_input = result.ledger.injected_per_input_particle(&d.name);
            let per_source = result.ledger.injected_per_source_particle(&d.name);
            rows.push(vec![
                d.name.clone(),
                fmt_sig12(d.energy_in),
                fmt_sig12(d.energy_out),
                fmt_sig12(d.injected),
                per_input.map_or("-".into(), fmt_sig12),
                per_source.map_or("-".into(), fmt_sig12),
            ]);
        }
        out.push('\n');
        out.push_str(&aligned(&rows));
    }

    if !result.sink_tallies.is_empty() {
        let mut rows = vec![vec![
            "sink".to_string(),
            "kind".to_string(),
            "count".to_string(),
            "E_absorbed".to_string(),
            "mean E".to_string(),
        ]];
        for s in &result.sink_tallies {
            rows.push(vec![
                s.name.clone(),
                s.flavor.keyword().to_string(),
                fmt_sig12(s.count),
                fmt_sig12(s.total_energy),
                fmt_sig12(s.mean_energy()),
            ]);
        }
        out.push('\n');
        out.push_str(&aligned(&rows));
        out.push_str(&format!(
            "\nenergy in: {}  energy out: {}\n",
            fmt_sig12(result.ledger.network_total_in),
            fmt_sig12(result.ledger.network_total_out)
        ));
    }
    out
}

fn render_csv(result: &RunResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["beam", "from", "branch", "to", "count", "state", "energy"])
        .expect("in-memory write");
    for b in &result.beams {
        w.write_record([
            b.id.clone(),
            b.from.clone(),
            b.branch.map_or(String::new(), |k| k.to_string()),
            b.to.clone(),
            fmt_sig12(b.count),
            state_label(&b.state),
            fmt_sig12(b.total_energy),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

fn num(x: f64) -> Value {
    json!(round_sig12(x))
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn render_json(result: &RunResult) -> String {
    let (mode, seed, trajectories) = match result.mode {
        RunMode::Expectation => ("expectation", Value::Null, Value::Null),
        RunMode::MonteCarlo { seed, trajectories } => ("montecarlo", json!(seed), json!(trajectories)),
    };
    let ledger = &result.ledger;
    let doc = json!({
        "mode": mode,
        "seed": seed,
        "trajectories": trajectories,
        "beams": result.beams.iter().map(|b| json!({
            "id": b.id,
            "from": b.from,
            "branch": b.branch,
            "to": b.to,
            "count": num(b.count),
            "state": state_label(&b.state),
            "energy": num(b.total_energy),
        })).collect::<Vec<_>>(),
        "ledger": {
            "per_beam": ledger.per_beam.iter().map(|(id, e)| json!({"beam": id, "energy": num(*e)})).collect::<Vec<_>>(),
            "devices": ledger.devices.iter().map(|d| json!({
                "name": d.name,
                "role": match d.role {
                    DeviceRole::Source => "source",
                    DeviceRole::Splitter => "splitter",
                    DeviceRole::Sink => "sink",
                },
                "input_count": num(d.input_count),
                "energy_in": num(d.energy_in),
                "energy_out": num(d.energy_out),
                "injected": num(d.injected),
                "injected_per_input_particle": opt_num(ledger.injected_per_input_particle(&d.name)),
                "injected_per_source_particle": opt_num(ledger.injected_per_source_particle(&d.name)),
                "absorbed": num(d.absorbed),
            })).collect::<Vec<_>>(),
            "network_total_in": num(ledger.network_total_in),
            "network_total_out": num(ledger.network_total_out),
            "source_count": num(ledger.source_count),
        },
        "sinks": result.sink_tallies.iter().map(|s| json!({
            "name": s.name,
            "kind": s.flavor.keyword(),
            "count": num(s.count),
            "total_energy": num(s.total_energy),
            "mean_energy": num(s.mean_energy()),
        })).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{EnergyLedger, RunResult};

    fn empty() -> RunResult {
        RunResult {
            mode: RunMode::Expectation,
            beams: vec![],
            ledger: EnergyLedger::default(),
            sink_tallies: vec![],
        }
    }

    #[test]
    fn sig12_rounding() {
        assert_eq!(fmt_sig12(100000.0), "100000");
        assert_eq!(fmt_sig12(-0.0), "0");
        assert_eq!(fmt_sig12(1e-17), "1e-17");
        assert_eq!(fmt_sig12(3.749399456654e-33), "3.74939945665e-33");
        assert_eq!(fmt_sig12(0.000123), "0.000123");
        assert_eq!(fmt_sig12(2e15), "2e15");
        assert_eq!(fmt_sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig12(-12500.000000000002), "-12500");
        assert_eq!(round_sig12(123456789012345.0), 123456789012000.0);
    }

    #[test]
    fn empty_reports_are_header_only() {
        let r = empty();
        assert_eq!(render_report(&r, ReportFormat::Csv), "beam,from,branch,to,count,state,energy\n");
        let table = render_report(&r, ReportFormat::Table);
        assert_eq!(table.lines().count(), 2);
        assert!(table.starts_with("beam"));
        let v: Value = serde_json::from_str(&render_report(&r, ReportFormat::Json)).unwrap();
        assert_eq!(v["beams"].as_array().unwrap().len(), 0);
        assert_eq!(v["sinks"].as_array().unwrap().len(), 0);
        assert_eq!(v["mode"], "expectation");
        assert!(v["seed"].is_null());
        assert!(v["ledger"].is_object());
    }

    #[test]
    fn labels() {
        assert_eq!(state_label(&spin_half::z_plus()), "|z+>");
        assert_eq!(state_label(&spin_half::x_minus()), "|x->");
        assert_eq!(state_label(&QuantumState::maximally_mixed(2)), "I/2");
        assert_eq!(state_label(&QuantumState::maximally_mixed(3)), "I/3");
        let rank_one = QuantumState::mixed(spin_half::z_minus().density_matrix()).unwrap();
        assert_eq!(state_label(&rank_one), "|z->");
        let y = QuantumState::pure_normalized(vec![Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0)]).unwrap();
        assert_eq!(state_label(&y), "[0.707106781187, 0.707106781187i]");
        let partial = QuantumState::mixed(ComplexMatrix::from_real_diagonal(&[0.25, 0.75])).unwrap();
        assert_eq!(state_label(&partial), "rho[[0.25, 0], [0, 0.75]]");
    }
}
