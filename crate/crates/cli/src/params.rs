//! Resolved command parameters. These are what a manifest records and what
//! `replay` feeds back into the runner.

use std::fmt;
use std::str::FromStr;

use jrc_core::optimizer::Grid;
use jrc_core::radar::WaveformKind;
use jrc_core::{PowerAllocation, QosRequirement};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Params {
    Sweep {
        r02: f64,
        waveform: WaveformKind,
        grid: GridSpec,
    },
    Starpoints {
        qos: Vec<QosRequirement>,
        waveform: WaveformKind,
    },
    Fairness {
        r02: Vec<f64>,
        waveform: WaveformKind,
        grid: GridSpec,
    },
    Asymmetry {
        r02: f64,
        waveform: WaveformKind,
        gaps_db: Vec<f64>,
        grid: GridSpec,
    },
    WaveformValidate {
        waveforms: Vec<WaveformKind>,
        time_bandwidths: Vec<f64>,
        bandwidth_hz: f64,
        oversampling: f64,
    },
    McDelay {
        alloc: PowerAllocation,
        waveform: WaveformKind,
        target: usize,
        delay_s: f64,
        trials: usize,
        seed: u64,
        oversampling: f64,
    },
    Region {
        waveform: WaveformKind,
        samples: usize,
        seed: u64,
    },
}

impl Params {
    pub fn name(&self) -> &'static str {
        match self {
            Params::Sweep { .. } => "sweep",
            Params::Starpoints { .. } => "starpoints",
            Params::Fairness { .. } => "fairness",
            Params::Asymmetry { .. } => "asymmetry",
            Params::WaveformValidate { .. } => "waveform-validate",
            Params::McDelay { .. } => "mc-delay",
            Params::Region { .. } => "region",
        }
    }

    pub fn needs_scenario(&self) -> bool {
        !matches!(self, Params::WaveformValidate { .. })
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Params::McDelay { seed, .. } | Params::Region { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

/// `lo:hi:n`, a uniform radar-share grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn grid(&self) -> jrc_core::Result<Grid> {
        Grid::uniform(self.lo, self.hi, self.n)
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            lo: 0.01,
            hi: 0.99,
            n: 200,
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected lo:hi:n, got `{s}`"));
        };
        let spec = GridSpec {
            lo: parse_f64(lo)?,
            hi: parse_f64(hi)?,
            n: n.trim().parse().map_err(|_| format!("bad point count `{n}`"))?,
        };
        spec.grid().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("bad number `{s}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// Comma-separated numbers, at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct NumList(pub Vec<f64>);

impl FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = split_list(s)
            .into_iter()
            .map(parse_f64)
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err("list is empty".into());
        }
        Ok(NumList(values))
    }
}

/// Comma-separated `r01:r02` pairs, at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct QosList(pub Vec<QosRequirement>);

impl FromStr for QosList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for item in split_list(s) {
            let (r01, r02) = item
                .split_once(':')
                .ok_or_else(|| format!("expected r01:r02, got `{item}`"))?;
            let qos = QosRequirement::new(parse_f64(r01)?, parse_f64(r02)?).map_err(|e| e.to_string())?;
            out.push(qos);
        }
        if out.is_empty() {
            return Err("QoS list is empty".into());
        }
        Ok(QosList(out))
    }
}

/// Comma-separated waveform names, at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct KindList(pub Vec<WaveformKind>);

impl FromStr for KindList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kinds = split_list(s)
            .into_iter()
            .map(|k| k.parse::<WaveformKind>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        if kinds.is_empty() {
            return Err("waveform list is empty".into());
        }
        Ok(KindList(kinds))
    }
}

/// `a1_sq,a2_sq,ar_sq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocArg(pub PowerAllocation);

impl FromStr for AllocArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v = NumList::from_str(s)?.0;
        let [a1, a2, ar] = v[..] else {
            return Err(format!("expected a1_sq,a2_sq,ar_sq, got `{s}`"));
        };
        let alloc = PowerAllocation::new(a1, a2, ar);
        let check = alloc.check();
        if let Some(v) = check.violations.first() {
            return Err(v.to_string());
        }
        Ok(AllocArg(alloc))
    }
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}
