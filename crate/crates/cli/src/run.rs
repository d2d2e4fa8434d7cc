use std::path::Path;

use sgx_core::{propagate_expectation, propagate_monte_carlo, render_report, ExperimentSpec, RunResult};

use crate::{build, load_spec, CliError, EngineArgs, Mode, RunArgs};

/// Runs `spec` with the chosen engine. `--particles` replaces the source count
/// in both modes.
pub fn execute(mut spec: ExperimentSpec, engine: &EngineArgs, path: &Path) -> Result<RunResult, CliError> {
    if let Some(n) = engine.particles {
        if n == 0 {
            return Err(CliError::Input("--particles must be at least 1".into()));
        }
        spec.set_source_count(n);
    }
    let net = build(&spec, path)?;
    match engine.mode {
        Mode::Expectation => Ok(propagate_expectation(&net)),
        Mode::Montecarlo => propagate_monte_carlo(&net, engine.seed, net.source_count())
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

pub fn run(args: &RunArgs) -> Result<String, CliError> {
    let spec = load_spec(&args.input)?;
    let result = execute(spec, &args.engine, &args.input)?;
    Ok(render_report(&result, args.format.into()))
}
