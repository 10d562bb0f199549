use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use jrc_core::radar::WaveformKind;

use crate::params::{AllocArg, GridSpec, KindList, NumList, QosList};

#[derive(Debug, Parser)]
#[command(
    name = "jrc",
    version,
    about = "Radar/communications superposition tradeoffs: sweeps, star points, fairness, waveform checks",
    after_help = "Exit status: 0 success, 1 validation check failed, 2 infeasible operating point, 3 usage or configuration error."
)]
pub struct Cli {
    /// Evaluate on the calling thread only (outputs are identical either way).
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; a `<out>.manifest.json` sidecar is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Overwrite existing outputs.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sum-rate optimal tradeoff curve over a radar-share grid.
    Sweep {
        scenario: PathBuf,
        /// Weak-user QoS rate, bits/s/Hz.
        #[arg(long, default_value_t = 0.7)]
        r02: f64,
        #[arg(long, default_value = "linear")]
        waveform: WaveformKind,
        /// Radar-share grid as lo:hi:n.
        #[arg(long, default_value_t = GridSpec::default())]
        grid: GridSpec,
        #[command(flatten)]
        output: Output,
    },
    /// Minimum estimation error under both users' QoS constraints.
    Starpoints {
        scenario: PathBuf,
        /// Comma-separated r01:r02 pairs.
        #[arg(long, default_value = "1.5:0.7,0.7:0.7,1.5:1.5")]
        qos: QosList,
        #[arg(long, default_value = "linear")]
        waveform: WaveformKind,
        #[command(flatten)]
        output: Output,
    },
    /// Jain fairness along the tradeoff curve for several weak-user QoS rates.
    Fairness {
        scenario: PathBuf,
        /// Comma-separated weak-user QoS rates.
        #[arg(long = "r02", default_value = "0.7,1.0,1.5")]
        r02_list: NumList,
        #[arg(long, default_value = "linear")]
        waveform: WaveformKind,
        #[arg(long, default_value_t = GridSpec::default())]
        grid: GridSpec,
        #[command(flatten)]
        output: Output,
    },
    /// Tradeoff curves for widening channel gaps between the two users.
    Asymmetry {
        scenario: PathBuf,
        #[arg(long, default_value_t = 0.7)]
        r02: f64,
        #[arg(long, default_value = "linear")]
        waveform: WaveformKind,
        /// Comma-separated gaps |h1|²/|h2|² in dB, each > 0.
        #[arg(long, default_value = "5,10,15")]
        gaps_db: NumList,
        #[arg(long, default_value_t = GridSpec::default())]
        grid: GridSpec,
        /// Combined JSON; per-gap CSVs go next to it as <stem>_gap<D>db.csv.
        #[command(flatten)]
        output: Output,
    },
    /// Compare numeric waveform moments against their closed forms.
    WaveformValidate {
        /// Comma-separated waveform names.
        #[arg(long, default_value = "linear,parabolic")]
        waveform: KindList,
        /// Comma-separated time-bandwidth products.
        #[arg(long, default_value = "100,1000")]
        tw: NumList,
        #[arg(long, default_value_t = 2e7)]
        bandwidth_hz: f64,
        /// Sample rate as a multiple of the bandwidth.
        #[arg(long, default_value_t = 8.0)]
        oversampling: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo matched-filter delay estimation against the CRLB.
    McDelay {
        scenario: PathBuf,
        /// Power shares a1_sq,a2_sq,ar_sq.
        #[arg(long)]
        alloc: AllocArg,
        #[arg(long, default_value = "linear")]
        waveform: WaveformKind,
        /// Target index, 1 or 2.
        #[arg(long, default_value_t = 1)]
        target: usize,
        /// True round-trip delay, seconds.
        #[arg(long)]
        delay: f64,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8.0)]
        oversampling: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Random allocations over the ordered power simplex, for the achievable region.
    Region {
        scenario: PathBuf,
        #[arg(long, default_value = "linear")]
        waveform: WaveformKind,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Re-run a command from its manifest.
    Replay {
        manifest: PathBuf,
        /// Write here instead of the recorded primary output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
}
