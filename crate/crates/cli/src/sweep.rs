use serde_json::{json, Map, Value};
use sgx_core::io::report::{fmt_sig12, round_sig12};
use sgx_core::network::SinkFlavor;
use sgx_core::{build_network, RunResult};

use crate::run::execute;
use crate::{load_spec, CliError, Format, SweepArgs};

#[derive(Debug, Clone, PartialEq)]
pub enum SweepParam {
    Alpha,
    /// Timestamp of the named splitter.
    Time(String),
}

impl SweepParam {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.split_once(':') {
            None if s == "alpha" => Ok(SweepParam::Alpha),
            Some(("time", name)) if !name.is_empty() => Ok(SweepParam::Time(name.to_string())),
            _ => Err(CliError::Input(format!(
                "unknown sweep parameter `{s}` (expected `alpha` or `time:<splitter>`)"
            ))),
        }
    }

    fn label(&self) -> String {
        match self {
            SweepParam::Alpha => "alpha".into(),
            SweepParam::Time(name) => format!("time:{name}"),
        }
    }
}

/// Evenly spaced values from `from` to `to` inclusive.
pub fn sweep_values(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !from.is_finite() || !to.is_finite() {
        return Err(CliError::Input("sweep bounds must be finite".into()));
    }
    if steps == 0 {
        return Err(CliError::Input("--steps must be at least 1".into()));
    }
    if to < from {
        return Err(CliError::Input(format!("empty sweep range: --to {to} is below --from {from}")));
    }
    if steps == 1 {
        return if from == to {
            Ok(vec![from])
        } else {
            Err(CliError::Input("a single step needs --from equal to --to".into()))
        };
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i + 1 == steps { to } else { from + (to - from) * i as f64 / last })
        .collect())
}

/// One row per parameter value; `None` marks quantities undefined at that
/// point (a splitter no particle reaches).
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn render(&self, format: Format) -> String {
        let cell = |v: &Option<f64>| v.map_or("-".to_string(), fmt_sig12);
        match format {
            Format::Table => {
                let mut grid = vec![self.columns.clone()];
                grid.extend(self.rows.iter().map(|r| r.iter().map(cell).collect::<Vec<_>>()));
                let widths: Vec<usize> = (0..self.columns.len())
                    .map(|c| grid.iter().map(|r| r[c].len()).max().unwrap_or(0))
                    .collect();
                let mut out = String::new();
                for row in &grid {
                    let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
                    out.push_str(&line.join("  "));
                    out.push('\n');
                }
                out
            }
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|v| v.map_or(String::new(), fmt_sig12)).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.clone(), v.map_or(Value::Null, |x| json!(round_sig12(x)))))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = json!({ "parameter": self.columns[0], "columns": self.columns, "rows": rows });
                let mut text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
                text.push('\n');
                text
            }
        }
    }
}

struct Layout {
    /// Splitters in topological order with their outcome counts.
    splitters: Vec<(String, usize)>,
    has_battery: bool,
}

fn columns(param: &SweepParam, layout: &Layout) -> Vec<String> {
    let mut cols = vec![param.label()];
    for (name, outcomes) in &layout.splitters {
        cols.extend((0..*outcomes).map(|k| format!("{name}.p{k}")));
        cols.push(format!("{name}.injected"));
        cols.push(format!("{name}.injected_per_particle"));
    }
    if layout.has_battery {
        cols.push("battery.count".into());
        cols.push("battery.energy".into());
    }
    cols.push("energy_in".into());
    cols.push("energy_out".into());
    cols
}

fn row(value: f64, layout: &Layout, r: &RunResult) -> Vec<Option<f64>> {
    let mut out = vec![Some(value)];
    for (name, outcomes) in &layout.splitters {
        let input: f64 = r.beams.iter().filter(|b| &b.to == name).map(|b| b.count).sum();
        for k in 0..*outcomes {
            let count = r.beam_from(name, Some(k)).map_or(0.0, |b| b.count);
            out.push((input > 0.0).then(|| count / input));
        }
        out.push(r.ledger.injected(name));
        out.push(r.ledger.injected_per_input_particle(name));
    }
    if layout.has_battery {
        let (count, energy) = sgx_core::battery_yield(r).map_or((0.0, 0.0), |y| y);
        out.push(Some(count));
        out.push(Some(energy));
    }
    out.push(Some(r.ledger.network_total_in));
    out.push(Some(r.ledger.network_total_out));
    out
}

pub fn sweep(args: &SweepArgs) -> Result<SweepTable, CliError> {
    let param = SweepParam::parse(&args.param)?;
    let values = sweep_values(args.from, args.to, args.steps)?;
    let spec = load_spec(&args.input)?;
    if let SweepParam::Time(name) = &param {
        if !spec.clone().set_splitter_time(name, 0.0) {
            return Err(CliError::Input(format!("{}: no splitter named `{name}`", args.input.display())));
        }
    }

    let net = build_network(&spec).map_err(|e| CliError::Input(format!("{}: {e}", args.input.display())))?;
    let layout = Layout {
        splitters: net
            .topological_order()
            .iter()
            .map(|&d| &net.devices()[d])
            .filter_map(|d| match &d.kind {
                sgx_core::network::DeviceKind::Splitter { eigensystem, .. } => Some((d.name.clone(), eigensystem.len())),
                _ => None,
            })
            .collect(),
        has_battery: net
            .devices()
            .iter()
            .any(|d| matches!(d.kind, sgx_core::network::DeviceKind::Sink { flavor: SinkFlavor::Battery })),
    };

    let mut rows = Vec::with_capacity(values.len());
    for &v in &values {
        let mut s = spec.clone();
        match &param {
            SweepParam::Alpha => s.alpha = v,
            SweepParam::Time(name) => {
                s.set_splitter_time(name, v);
            }
        }
        let result = execute(s, &args.engine, &args.input)?;
        rows.push(row(v, &layout, &result));
    }
    Ok(SweepTable {
        columns: columns(&param, &layout),
        rows,
    })
}
