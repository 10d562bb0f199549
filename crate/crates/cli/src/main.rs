mod args;
mod error;
mod output;
mod params;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use jrc_core::scenario::load_scenario;
use jrc_core::{Execution, ScenarioConfig};

use args::{Cli, Command, Output};
use error::{CliError, EXIT_OK, EXIT_USAGE};
use output::{commit, json_bytes, manifest_path, read_manifest, Artifact, RunManifest};
use params::Params;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("jrc: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// What a run needs beyond its parameters.
struct Job {
    params: Params,
    scenario_file: Option<String>,
    scenario: Option<ScenarioConfig>,
    out: PathBuf,
    force: bool,
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let job = match cli.command {
        Command::Sweep {
            scenario,
            r02,
            waveform,
            grid,
            output,
        } => with_scenario(&scenario, Params::Sweep { r02, waveform, grid }, output)?,
        Command::Starpoints {
            scenario,
            qos,
            waveform,
            output,
        } => with_scenario(&scenario, Params::Starpoints { qos: qos.0, waveform }, output)?,
        Command::Fairness {
            scenario,
            r02_list,
            waveform,
            grid,
            output,
        } => with_scenario(
            &scenario,
            Params::Fairness {
                r02: r02_list.0,
                waveform,
                grid,
            },
            output,
        )?,
        Command::Asymmetry {
            scenario,
            r02,
            waveform,
            gaps_db,
            grid,
            output,
        } => with_scenario(
            &scenario,
            Params::Asymmetry {
                r02,
                waveform,
                gaps_db: gaps_db.0,
                grid,
            },
            output,
        )?,
        Command::WaveformValidate {
            waveform,
            tw,
            bandwidth_hz,
            oversampling,
            output,
        } => Job {
            params: Params::WaveformValidate {
                waveforms: waveform.0,
                time_bandwidths: tw.0,
                bandwidth_hz,
                oversampling,
            },
            scenario_file: None,
            scenario: None,
            out: output.out,
            force: output.force,
        },
        Command::McDelay {
            scenario,
            alloc,
            waveform,
            target,
            delay,
            trials,
            seed,
            oversampling,
            output,
        } => with_scenario(
            &scenario,
            Params::McDelay {
                alloc: alloc.0,
                waveform,
                target,
                delay_s: delay,
                trials,
                seed,
                oversampling,
            },
            output,
        )?,
        Command::Region {
            scenario,
            waveform,
            samples,
            seed,
            output,
        } => with_scenario(&scenario, Params::Region { waveform, samples, seed }, output)?,
        Command::Replay { manifest, out, force } => from_manifest(&manifest, out, force)?,
    };
    perform(job, exec)
}

fn with_scenario(path: &Path, params: Params, output: Output) -> Result<Job, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let cfg = load_scenario(&text).map_err(|source| CliError::Scenario {
        path: path.to_owned(),
        source,
    })?;
    Ok(Job {
        params,
        scenario_file: Some(path.display().to_string()),
        scenario: Some(cfg),
        out: output.out,
        force: output.force,
    })
}

fn from_manifest(path: &Path, out: Option<PathBuf>, force: bool) -> Result<Job, CliError> {
    let m = read_manifest(path)?;
    let out = match out {
        Some(out) => out,
        None => m
            .outputs
            .first()
            .map(PathBuf::from)
            .ok_or_else(|| CliError::Usage(format!("{}: manifest lists no outputs", path.display())))?,
    };
    if m.params.needs_scenario() && m.scenario.is_none() {
        return Err(CliError::Usage(format!("{}: manifest has no scenario", path.display())));
    }
    Ok(Job {
        params: m.params,
        scenario_file: m.scenario_file,
        scenario: m.scenario,
        out,
        force,
    })
}

fn perform(job: Job, exec: Execution) -> Result<u8, CliError> {
    let warnings = job.scenario.map(|c| c.warnings()).unwrap_or_default();
    for w in &warnings {
        eprintln!("jrc: warning: {w}");
    }
    let outcome = run::execute(&job.params, job.scenario.as_ref(), &job.out, exec)?;
    let manifest = RunManifest {
        tool: "jrc".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: job.params.seed(),
        params: job.params,
        scenario_file: job.scenario_file,
        scenario_summary: job.scenario.map(|c| c.summary()),
        scenario: job.scenario,
        warnings,
        outputs: outcome.artifacts.iter().map(|a| a.path.display().to_string()).collect(),
    };
    let mut artifacts = outcome.artifacts;
    artifacts.push(Artifact {
        path: manifest_path(&job.out),
        bytes: json_bytes(&manifest),
    });
    commit(&artifacts, job.force)?;

    for m in &outcome.messages {
        println!("{m}");
    }
    for a in &artifacts {
        println!("wrote {}", a.path.display());
    }
    Ok(outcome.status)
}
