//! Experiment configuration and unit handling.
//!
//! Scenario files are flat UTF-8 `key=value` text. `#` starts a comment, and
//! pairs are separated by newlines (a comma also separates pairs on one line).
//! Gains and powers may be given in logarithmic or linear form, e.g.
//! `h1_gain_db=-90` or `h1_gain=1e-9`, but not both. Missing keys take the
//! reference defaults returned by [`ScenarioConfig::default`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `10^(value_db / 10)`.
pub fn db_to_linear(value_db: f64) -> Result<f64> {
    if !value_db.is_finite() {
        return Err(Error::NonFinite {
            what: "dB value".into(),
            value: value_db,
        });
    }
    Ok(10f64.powf(value_db / 10.0))
}

/// `10 log10(ratio)`. Non-positive ratios map to `-inf`/NaN like `log10`.
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Physical parameters of one two-user mono-static broadcast experiment.
///
/// Gains are linear power gains, noise powers are in mW.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub h1_gain: f64,
    pub h2_gain: f64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub sigma_r_sq: f64,
    /// RCS of user 1, m².
    pub eta1: f64,
    /// RCS of user 2, m².
    pub eta2: f64,
    pub bandwidth_hz: f64,
    pub time_bandwidth: f64,
    pub total_power_mw: f64,
    /// Metadata unless [`ScenarioConfig::with_si_residue`] is applied.
    pub si_suppression_db: f64,
}

impl Default for ScenarioConfig {
    /// Reference parameter set: -90/-100 dB gains, -105 dBm user noise,
    /// -110 dBm radar noise, RCS 0.1/0.5 m², 20 MHz, TW = 1000, 0 dBm.
    fn default() -> Self {
        Self {
            h1_gain: 1e-9,
            h2_gain: 1e-10,
            sigma1_sq: dbm(-105.0),
            sigma2_sq: dbm(-105.0),
            sigma_r_sq: dbm(-110.0),
            eta1: 0.1,
            eta2: 0.5,
            bandwidth_hz: 20e6,
            time_bandwidth: 1000.0,
            total_power_mw: 1.0,
            si_suppression_db: 110.0,
        }
    }
}

fn dbm(v: f64) -> f64 {
    10f64.powf(v / 10.0)
}

impl ScenarioConfig {
    /// Pulse duration `T = TW / W`, seconds.
    pub fn pulse_duration_s(&self) -> f64 {
        self.time_bandwidth / self.bandwidth_hz
    }

    pub fn channel_gain(&self, user: usize) -> f64 {
        match user {
            1 => self.h1_gain,
            2 => self.h2_gain,
            _ => panic!("user index must be 1 or 2, got {user}"),
        }
    }

    pub fn rcs(&self, user: usize) -> f64 {
        match user {
            1 => self.eta1,
            2 => self.eta2,
            _ => panic!("user index must be 1 or 2, got {user}"),
        }
    }

    /// Checks every hard invariant; the first failure names its field.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("h1_gain", self.h1_gain),
            ("h2_gain", self.h2_gain),
            ("sigma1_sq", self.sigma1_sq),
            ("sigma2_sq", self.sigma2_sq),
            ("sigma_r_sq", self.sigma_r_sq),
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("bandwidth_hz", self.bandwidth_hz),
            ("time_bandwidth", self.time_bandwidth),
            ("total_power_mw", self.total_power_mw),
            ("si_suppression_db", self.si_suppression_db),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("{v} is not finite")));
            }
        }
        for (name, v) in &fields[..8] {
            if *v <= 0.0 {
                return Err(Error::invalid(*name, format!("must be > 0, got {v}")));
            }
        }
        if self.total_power_mw <= 0.0 {
            return Err(Error::invalid(
                "total_power_mw",
                format!("must be > 0, got {}", self.total_power_mw),
            ));
        }
        if self.time_bandwidth < 1.0 {
            return Err(Error::invalid(
                "time_bandwidth",
                format!("must be >= 1, got {}", self.time_bandwidth),
            ));
        }
        if self.h1_gain <= self.h2_gain {
            return Err(Error::invalid(
                "h1_gain",
                format!(
                    "user 1 must be the stronger user: h1_gain ({:e}) <= h2_gain ({:e})",
                    self.h1_gain, self.h2_gain
                ),
            ));
        }
        Ok(())
    }

    /// Soft modeling-assumption violations that do not reject the config.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.sigma1_sq > self.sigma2_sq {
            out.push(format!(
                "sigma1_sq ({:e} mW) > sigma2_sq ({:e} mW): sum-rate monotonicity is not guaranteed",
                self.sigma1_sq, self.sigma2_sq
            ));
        }
        out
    }

    /// Copy with the residual self-interference `P * 10^(-si/10)` added to
    /// the radar noise floor, for sensitivity studies.
    pub fn with_si_residue(&self) -> Self {
        let mut cfg = *self;
        cfg.sigma_r_sq += self.total_power_mw * 10f64.powf(-self.si_suppression_db / 10.0);
        cfg
    }

    /// Same config with `|h2|² = |h1|² · 10^(-gap/10)`.
    pub fn with_channel_gap_db(&self, gap_db: f64) -> Result<Self> {
        if !gap_db.is_finite() || gap_db <= 0.0 {
            return Err(Error::invalid(
                "gap_db",
                format!("channel asymmetry must be > 0 dB so that |h1|² > |h2|², got {gap_db}"),
            ));
        }
        let mut cfg = *self;
        cfg.h2_gain = self.h1_gain * db_to_linear(-gap_db)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Log-domain view for reports, 6 significant digits.
    pub fn summary(&self) -> ScenarioSummary {
        ScenarioSummary {
            h1_gain_db: sig6(linear_to_db(self.h1_gain)),
            h1_gain: sig6(self.h1_gain),
            h2_gain_db: sig6(linear_to_db(self.h2_gain)),
            h2_gain: sig6(self.h2_gain),
            sigma1_sq_dbm: sig6(linear_to_db(self.sigma1_sq)),
            sigma1_sq_mw: sig6(self.sigma1_sq),
            sigma2_sq_dbm: sig6(linear_to_db(self.sigma2_sq)),
            sigma2_sq_mw: sig6(self.sigma2_sq),
            sigma_r_sq_dbm: sig6(linear_to_db(self.sigma_r_sq)),
            sigma_r_sq_mw: sig6(self.sigma_r_sq),
            total_power_dbm: sig6(linear_to_db(self.total_power_mw)),
            total_power_mw: sig6(self.total_power_mw),
            eta1: sig6(self.eta1),
            eta2: sig6(self.eta2),
            bandwidth_hz: sig6(self.bandwidth_hz),
            time_bandwidth: sig6(self.time_bandwidth),
            pulse_duration_s: sig6(self.pulse_duration_s()),
            si_suppression_db: sig6(self.si_suppression_db),
        }
    }
}

fn sig6(v: f64) -> String {
    format!("{v:.5e}")
}

/// Human-facing rendering of a [`ScenarioConfig`]: dB/dBm with linear values alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub h1_gain_db: String,
    pub h1_gain: String,
    pub h2_gain_db: String,
    pub h2_gain: String,
    pub sigma1_sq_dbm: String,
    pub sigma1_sq_mw: String,
    pub sigma2_sq_dbm: String,
    pub sigma2_sq_mw: String,
    pub sigma_r_sq_dbm: String,
    pub sigma_r_sq_mw: String,
    pub total_power_dbm: String,
    pub total_power_mw: String,
    pub eta1: String,
    pub eta2: String,
    pub bandwidth_hz: String,
    pub time_bandwidth: String,
    pub pulse_duration_s: String,
    pub si_suppression_db: String,
}

#[derive(Clone, Copy)]
enum Unit {
    Linear,
    Db,
}

/// (field, key, unit) for every accepted key.
const KEYS: &[(&str, &str, Unit)] = &[
    ("h1_gain", "h1_gain", Unit::Linear),
    ("h1_gain", "h1_gain_db", Unit::Db),
    ("h2_gain", "h2_gain", Unit::Linear),
    ("h2_gain", "h2_gain_db", Unit::Db),
    ("sigma1_sq", "sigma1_sq", Unit::Linear),
    ("sigma1_sq", "sigma1_sq_dbm", Unit::Db),
    ("sigma2_sq", "sigma2_sq", Unit::Linear),
    ("sigma2_sq", "sigma2_sq_dbm", Unit::Db),
    ("sigma_r_sq", "sigma_r_sq", Unit::Linear),
    ("sigma_r_sq", "sigma_r_sq_dbm", Unit::Db),
    ("eta1", "eta1", Unit::Linear),
    ("eta2", "eta2", Unit::Linear),
    ("bandwidth_hz", "bandwidth_hz", Unit::Linear),
    ("time_bandwidth", "time_bandwidth", Unit::Linear),
    ("total_power_mw", "total_power_mw", Unit::Linear),
    ("total_power_mw", "total_power_dbm", Unit::Db),
    ("si_suppression_db", "si_suppression_db", Unit::Linear),
];

/// Parse and validate scenario text.
pub fn load_scenario(source: &str) -> Result<ScenarioConfig> {
    let mut seen: HashMap<&'static str, f64> = HashMap::new();
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        for pair in content.split(',') {
            let pair = pair.trim();
            if pair.is_empty() {
                continue;
            }
            let Some((key, value)) = pair.split_once('=') else {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected key=value, got `{pair}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let Some(&(field, _, unit)) = KEYS.iter().find(|(_, k, _)| *k == key) else {
                return Err(Error::UnknownKey {
                    line: line_no,
                    key: key.to_string(),
                });
            };
            let parsed: f64 = value.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{key}`: cannot parse `{value}` as a number"),
            })?;
            if !parsed.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("`{key}`: value must be finite"),
                });
            }
            let linear = match unit {
                Unit::Linear => parsed,
                Unit::Db => db_to_linear(parsed)?,
            };
            if seen.insert(field, linear).is_some() {
                return Err(Error::ConflictingKey {
                    line: line_no,
                    key: key.to_string(),
                });
            }
        }
    }

    let mut cfg = ScenarioConfig::default();
    for (field, value) in seen {
        let slot = match field {
            "h1_gain" => &mut cfg.h1_gain,
            "h2_gain" => &mut cfg.h2_gain,
            "sigma1_sq" => &mut cfg.sigma1_sq,
            "sigma2_sq" => &mut cfg.sigma2_sq,
            "sigma_r_sq" => &mut cfg.sigma_r_sq,
            "eta1" => &mut cfg.eta1,
            "eta2" => &mut cfg.eta2,
            "bandwidth_hz" => &mut cfg.bandwidth_hz,
            "time_bandwidth" => &mut cfg.time_bandwidth,
            "total_power_mw" => &mut cfg.total_power_mw,
            "si_suppression_db" => &mut cfg.si_suppression_db,
            _ => unreachable!("field table out of sync"),
        };
        *slot = value;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Power fractions `(α₁², α₂², α_r²)` of the unit-power superposed transmit signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    pub a1_sq: f64,
    pub a2_sq: f64,
    pub ar_sq: f64,
}

/// Slack allowed on the unit power budget for rounding in closed-form splits.
pub const POWER_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotFinite { component: &'static str, value: f64 },
    OutOfRange { component: &'static str, value: f64 },
    PowerSum { sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotFinite { component, value } => {
                write!(f, "{component} = {value} is not finite")
            }
            Violation::OutOfRange { component, value } => {
                write!(f, "{component} = {value} outside [0, 1)")
            }
            Violation::PowerSum { sum } => write!(f, "power sum {sum} > 1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AllocationWarning {
    /// `α₂² ≤ α₁²`: the weak user can no longer decode its own signal first.
    SicOrderingBroken { a1_sq: f64, a2_sq: f64 },
}

impl fmt::Display for AllocationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AllocationWarning::SicOrderingBroken { a1_sq, a2_sq } => write!(
                f,
                "α₂² ≤ α₁² ({a2_sq} ≤ {a1_sq}), SIC ordering broken"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AllocationCheck {
    pub violations: Vec<Violation>,
    pub warnings: Vec<AllocationWarning>,
}

impl AllocationCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl PowerAllocation {
    pub fn new(a1_sq: f64, a2_sq: f64, ar_sq: f64) -> Self {
        Self { a1_sq, a2_sq, ar_sq }
    }

    pub fn total(&self) -> f64 {
        self.a1_sq + self.a2_sq + self.ar_sq
    }

    /// Communications share `κ = α₁² + α₂²`.
    pub fn comms_share(&self) -> f64 {
        self.a1_sq + self.a2_sq
    }

    /// Lists violated constraints in component order, then the sum; SIC
    /// ordering is reported separately as a warning.
    pub fn check(&self) -> AllocationCheck {
        let mut check = AllocationCheck::default();
        let comps = [
            ("a1_sq", self.a1_sq),
            ("a2_sq", self.a2_sq),
            ("ar_sq", self.ar_sq),
        ];
        for (component, value) in comps {
            if !value.is_finite() {
                check.violations.push(Violation::NotFinite { component, value });
            } else if !(0.0..1.0).contains(&value) {
                check.violations.push(Violation::OutOfRange { component, value });
            }
        }
        let sum = self.total();
        if sum.is_finite() && sum > 1.0 + POWER_SUM_TOL {
            check.violations.push(Violation::PowerSum { sum });
        }
        if self.a2_sq <= self.a1_sq {
            check.warnings.push(AllocationWarning::SicOrderingBroken {
                a1_sq: self.a1_sq,
                a2_sq: self.a2_sq,
            });
        }
        check
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        match self.check().violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::invalid("allocation", v.to_string())),
        }
    }
}

/// Minimum rates (bits/s/Hz) owed to each user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosRequirement {
    pub r01: f64,
    pub r02: f64,
}

impl QosRequirement {
    pub fn new(r01: f64, r02: f64) -> Result<Self> {
        let q = Self { r01, r02 };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("r01", self.r01), ("r02", self.r02)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}
