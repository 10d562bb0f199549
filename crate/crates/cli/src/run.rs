//! Executes resolved parameters into in-memory artifacts.

use std::path::{Path, PathBuf};

use jrc_core::optimizer::{
    asymmetry_sweep_with, sample_feasible_region_with, star_point, tradeoff_sweep_with, AsymmetryCase,
    SweepResult, TradeoffPoint, ASYMMETRY_NOTE,
};
use jrc_core::radar::{analytic_energy, analytic_rms_bandwidth_sq, WaveformKind, WaveformSpec};
use jrc_core::waveform::{mc_delay_estimation, numeric_energy, numeric_rms_bandwidth_sq, synthesize, McSetup, RmsMethod};
use jrc_core::{Execution, ScenarioConfig};
use serde::Serialize;

use crate::error::{CliError, EXIT_CHECK_FAILED, EXIT_OK};
use crate::output::{json_bytes, Artifact, Csv};
use crate::params::Params;

pub const SWEEP_HEADER: &str =
    "ar_sq,a1_sq,a2_sq,r1,r2,r_sum,sigma_eps_sq,sigma_eps_sq_norm,log10_norm,fairness";
pub const STARPOINT_HEADER: &str = "r01,r02,ar_sq,r_sum,sigma_eps_sq_norm";
pub const FAIRNESS_HEADER: &str = "r02,ar_sq,r_sum,fairness";
pub const VALIDATE_HEADER: &str = "waveform,time_bandwidth,energy_analytic,energy_numeric,\
brms_sq_analytic,brms_sq_instfreq,brms_sq_spectrum,instfreq_rel_err,spectrum_rel_err";

/// Relative error allowed between the InstFreq moment and the closed form.
pub const INSTFREQ_TOL: f64 = 1e-6;

pub struct Outcome {
    /// Primary output first.
    pub artifacts: Vec<Artifact>,
    pub messages: Vec<String>,
    pub status: u8,
}

impl Outcome {
    fn single(path: &Path, bytes: Vec<u8>, messages: Vec<String>) -> Self {
        Self {
            artifacts: vec![Artifact {
                path: path.to_owned(),
                bytes,
            }],
            messages,
            status: EXIT_OK,
        }
    }
}

pub fn execute(
    params: &Params,
    scenario: Option<&ScenarioConfig>,
    out: &Path,
    exec: Execution,
) -> Result<Outcome, CliError> {
    let cfg = match (params.needs_scenario(), scenario) {
        (true, Some(cfg)) => {
            cfg.validate()?;
            Some(cfg)
        }
        (true, None) => return Err(CliError::Usage(format!("{} needs a scenario", params.name()))),
        (false, _) => None,
    };
    let spec_for = |kind: WaveformKind| {
        let cfg = cfg.expect("scenario checked above");
        let spec = WaveformSpec::for_scenario(kind, cfg);
        spec.validate().map(|_| spec)
    };

    match params {
        Params::Sweep { r02, waveform, grid } => {
            let sweep = tradeoff_sweep_with(cfg.unwrap(), *r02, &spec_for(*waveform)?, &grid.grid()?, exec)?;
            let csv = sweep_csv(&sweep.points);
            let mut messages = vec![format!("{} feasible points", csv.rows())];
            messages.extend(tail_message(&sweep));
            Ok(Outcome::single(out, csv.into_bytes(), messages))
        }
        Params::Starpoints { qos, waveform } => {
            let spec = spec_for(*waveform)?;
            let mut csv = Csv::new(STARPOINT_HEADER);
            for q in qos {
                let p = star_point(cfg.unwrap(), q, &spec)?;
                csv.row(&[q.r01, q.r02, p.alloc.ar_sq, p.r_sum, p.sigma_eps_sq_normalized]);
            }
            let msg = format!("{} star points", csv.rows());
            Ok(Outcome::single(out, csv.into_bytes(), vec![msg]))
        }
        Params::Fairness { r02, waveform, grid } => {
            let spec = spec_for(*waveform)?;
            let grid = grid.grid()?;
            let mut csv = Csv::new(FAIRNESS_HEADER);
            let mut messages = Vec::new();
            for &r in r02 {
                let sweep = tradeoff_sweep_with(cfg.unwrap(), r, &spec, &grid, exec)?;
                for p in &sweep.points {
                    csv.row(&[r, p.alloc.ar_sq, p.r_sum, p.fairness]);
                }
                if let Some(first) = sweep.points.first() {
                    messages.push(format!("r02 = {r}: fairness {:.3} at maximum sum rate", first.fairness));
                }
            }
            Ok(Outcome::single(out, csv.into_bytes(), messages))
        }
        Params::Asymmetry {
            r02,
            waveform,
            gaps_db,
            grid,
        } => {
            let cases = asymmetry_sweep_with(cfg.unwrap(), *r02, &spec_for(*waveform)?, gaps_db, &grid.grid()?, exec)?;
            asymmetry_outcome(out, *r02, *waveform, &cases)
        }
        Params::WaveformValidate {
            waveforms,
            time_bandwidths,
            bandwidth_hz,
            oversampling,
        } => validate_waveforms(out, waveforms, time_bandwidths, *bandwidth_hz, *oversampling),
        Params::McDelay {
            alloc,
            waveform,
            target,
            delay_s,
            trials,
            seed,
            oversampling,
        } => {
            let setup = McSetup {
                target: *target,
                true_delay_s: *delay_s,
                trials: *trials,
                seed: *seed,
                oversampling: *oversampling,
            };
            let report = mc_delay_estimation(cfg.unwrap(), alloc, &spec_for(*waveform)?, &setup, exec)?;
            let msg = format!(
                "post-integration SNR {:.2} dB, variance / CRLB = {:.4}",
                report.snr_post_db, report.efficiency
            );
            Ok(Outcome::single(out, json_bytes(&report), vec![msg]))
        }
        Params::Region {
            waveform,
            samples,
            seed,
        } => {
            let points = sample_feasible_region_with(cfg.unwrap(), &spec_for(*waveform)?, *samples, *seed, exec)?;
            let csv = sweep_csv(&points);
            let msg = format!("{} sampled allocations", csv.rows());
            Ok(Outcome::single(out, csv.into_bytes(), vec![msg]))
        }
    }
}

fn sweep_csv(points: &[TradeoffPoint]) -> Csv {
    let mut csv = Csv::new(SWEEP_HEADER);
    for p in points {
        csv.row(&[
            p.alloc.ar_sq,
            p.alloc.a1_sq,
            p.alloc.a2_sq,
            p.r1,
            p.r2,
            p.r_sum,
            p.sigma_eps_sq,
            p.sigma_eps_sq_normalized,
            p.log10_normalized(),
            p.fairness,
        ]);
    }
    csv
}

fn tail_message(sweep: &SweepResult) -> Option<String> {
    sweep.infeasible_tail_start.map(|t| {
        format!(
            "weak-user QoS infeasible for ar_sq > {t:.6} (kappa_min = {:.6})",
            1.0 - t
        )
    })
}

/// `<dir>/<stem>_gap<Δ>db.csv` next to the combined JSON.
pub fn gap_csv_path(out: &Path, gap_db: f64) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_gap{gap_db}db.csv"))
}

#[derive(Serialize)]
struct AsymmetryReport<'a> {
    note: &'static str,
    r02: f64,
    waveform: WaveformKind,
    files: Vec<String>,
    cases: &'a [AsymmetryCase],
}

fn asymmetry_outcome(
    out: &Path,
    r02: f64,
    waveform: WaveformKind,
    cases: &[AsymmetryCase],
) -> Result<Outcome, CliError> {
    let mut artifacts = Vec::new();
    let mut files = Vec::new();
    let mut messages = Vec::new();
    for case in cases {
        let path = gap_csv_path(out, case.gap_db);
        let csv = sweep_csv(&case.sweep.points);
        messages.push(format!("gap {} dB: {} feasible points", case.gap_db, csv.rows()));
        files.push(path.file_name().unwrap_or_default().to_string_lossy().into_owned());
        artifacts.push(Artifact {
            path,
            bytes: csv.into_bytes(),
        });
    }
    let report = AsymmetryReport {
        note: ASYMMETRY_NOTE,
        r02,
        waveform,
        files,
        cases,
    };
    artifacts.insert(
        0,
        Artifact {
            path: out.to_owned(),
            bytes: json_bytes(&report),
        },
    );
    Ok(Outcome {
        artifacts,
        messages,
        status: EXIT_OK,
    })
}

fn validate_waveforms(
    out: &Path,
    kinds: &[WaveformKind],
    tws: &[f64],
    bandwidth_hz: f64,
    oversampling: f64,
) -> Result<Outcome, CliError> {
    let mut csv = Csv::new(VALIDATE_HEADER);
    let mut messages = Vec::new();
    let mut failed = false;
    for &kind in kinds {
        for &tw in tws {
            let spec = WaveformSpec::new(kind, bandwidth_hz, tw)?;
            let w = synthesize(&spec, oversampling * bandwidth_hz)?;
            let b_exact = analytic_rms_bandwidth_sq(&spec);
            let b_inst = numeric_rms_bandwidth_sq(&w, RmsMethod::InstFreq);
            let b_spec = numeric_rms_bandwidth_sq(&w, RmsMethod::Spectrum);
            let err_inst = ((b_inst - b_exact) / b_exact).abs();
            let err_spec = ((b_spec - b_exact) / b_exact).abs();
            let mut cells = vec![kind.to_string()];
            cells.extend(
                [tw, analytic_energy(&spec), numeric_energy(&w), b_exact, b_inst, b_spec, err_inst, err_spec]
                    .map(crate::output::sci),
            );
            csv.raw_row(&cells);
            let verdict = if err_inst <= INSTFREQ_TOL { "ok" } else { "FAIL" };
            failed |= err_inst > INSTFREQ_TOL;
            messages.push(format!(
                "{kind} TW={tw}: instfreq rel err {err_inst:.2e} ({verdict}), spectrum rel err {err_spec:.2e}"
            ));
        }
    }
    let mut outcome = Outcome::single(out, csv.into_bytes(), messages);
    if failed {
        outcome.status = EXIT_CHECK_FAILED;
    }
    Ok(outcome)
}
