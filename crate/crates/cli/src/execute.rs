use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use sqkd_core::analysis::{detection_sweep, efficiency_sweep, run_trials, to_json, write_csv, TrialRow};
use sqkd_core::postprocess::{parse_golden, verify_golden, BUNDLED_GOLDEN};

use crate::spec::{Command, ExperimentSpec, ReportFormat};
use crate::CliError;

/// Runs the experiment and writes its report. Protocol aborts are data, not
/// failures.
pub fn execute(spec: &ExperimentSpec) -> Result<(), CliError> {
    let internal = |e: sqkd_core::protocol::ProtocolError| CliError::Internal(e.to_string());
    let rows: Vec<TrialRow> = match spec.command {
        Command::Run => run_trials(
            &spec.config,
            &spec.attack,
            spec.trials,
            spec.workers,
            0,
            ("N", spec.config.n as f64),
        )
        .map_err(internal)?,
        Command::Sweep => {
            let axis = spec.axis.as_ref().expect("validated sweep axis");
            efficiency_sweep(&spec.config, axis, spec.trials, &spec.attack, spec.workers)
                .map_err(internal)?
                .rows()
                .cloned()
                .collect()
        }
        Command::AttackEval => {
            let axis = spec.axis.as_ref().expect("validated sweep axis");
            detection_sweep(&spec.config, &spec.attack, axis, spec.trials, spec.workers)
                .map_err(internal)?
                .rows()
                .cloned()
                .collect()
        }
        Command::VerifyGolden => return Err(CliError::Internal("verify-golden has no experiment".into())),
    };
    write_report(spec, &rows)
}

fn write_report(spec: &ExperimentSpec, rows: &[TrialRow]) -> Result<(), CliError> {
    let header = spec.header();
    let render = |out: &mut dyn Write| -> io::Result<()> {
        match spec.format {
            ReportFormat::Csv => write_csv(out, &header, rows),
            ReportFormat::Json => {
                let text = serde_json::to_string_pretty(&to_json(&header, rows)).map_err(io::Error::other)?;
                writeln!(out, "{text}")
            }
        }
    };
    match &spec.out {
        Some(path) => {
            let output_error = |e: io::Error| CliError::Output {
                path: path.display().to_string(),
                message: e.to_string(),
            };
            let mut file = BufWriter::new(File::create(path).map_err(output_error)?);
            render(&mut file).map_err(output_error)?;
            file.flush().map_err(output_error)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            render(&mut lock).map_err(|e| CliError::Internal(format!("writing stdout: {e}")))
        }
    }
}

/// Checks a golden file (or the bundled vectors); returns the vector count.
pub fn verify_golden_file(path: Option<&Path>) -> Result<usize, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::config("golden", format!("cannot read {}: {e}", p.display())))?,
        None => BUNDLED_GOLDEN.to_string(),
    };
    parse_golden(&text).map_err(|e| CliError::config("golden", e.to_string()))?;
    verify_golden(&text).map_err(|e| CliError::Internal(format!("golden vectors do not verify: {e}")))
}
