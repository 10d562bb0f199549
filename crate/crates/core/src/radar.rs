//! Radar side: FM waveform moments and the delay-estimation CRLB.
//!
//! The echo of target `k` arrives with amplitude `η_k |h_k|² α_r √P` (the
//! power gain is applied twice, once per direction). The reflected
//! communications components are treated as interference and contribute no
//! Fisher information, so the bound is
//!
//! ```text
//! CRLB_k = σ_r² / (2 η_k² |h_k|⁴ α_r² P · E · W · B_rms²)
//! ```
//!
//! with `B_rms²` the 4π²-weighted second spectral moment.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{PowerAllocation, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveformKind {
    #[serde(rename = "linear")]
    LinearFm,
    #[serde(rename = "parabolic")]
    ParabolicFm,
}

impl fmt::Display for WaveformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WaveformKind::LinearFm => "linear",
            WaveformKind::ParabolicFm => "parabolic",
        })
    }
}

impl FromStr for WaveformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "lfm" | "linear-fm" => Ok(WaveformKind::LinearFm),
            "parabolic" | "pfm" | "parabolic-fm" => Ok(WaveformKind::ParabolicFm),
            other => Err(Error::invalid(
                "waveform",
                format!("expected `linear` or `parabolic`, got `{other}`"),
            )),
        }
    }
}

/// Constant-envelope FM pulse with a rectangular envelope of duration `TW / W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveformSpec {
    pub kind: WaveformKind,
    pub bandwidth_hz: f64,
    pub time_bandwidth: f64,
}

impl WaveformSpec {
    pub fn new(kind: WaveformKind, bandwidth_hz: f64, time_bandwidth: f64) -> Result<Self> {
        let spec = Self {
            kind,
            bandwidth_hz,
            time_bandwidth,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The waveform matching a scenario's bandwidth and TW product.
    pub fn for_scenario(kind: WaveformKind, cfg: &ScenarioConfig) -> Self {
        Self {
            kind,
            bandwidth_hz: cfg.bandwidth_hz,
            time_bandwidth: cfg.time_bandwidth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return Err(Error::invalid(
                "bandwidth_hz",
                format!("must be finite and > 0, got {}", self.bandwidth_hz),
            ));
        }
        if !(self.time_bandwidth.is_finite() && self.time_bandwidth >= 1.0) {
            return Err(Error::invalid(
                "time_bandwidth",
                format!("must be finite and >= 1, got {}", self.time_bandwidth),
            ));
        }
        Ok(())
    }

    pub fn duration_s(&self) -> f64 {
        self.time_bandwidth / self.bandwidth_hz
    }
}

/// `E = T/2` for a unit-amplitude rectangular envelope (so `2E = ∫|x|² dt = T`).
pub fn analytic_energy(spec: &WaveformSpec) -> f64 {
    spec.duration_s() / 2.0
}

/// `B_rms²` in rad²/s²: `π²W²/3` (linear FM), `16π²W²/45` (parabolic FM).
pub fn analytic_rms_bandwidth_sq(spec: &WaveformSpec) -> f64 {
    let w2 = spec.bandwidth_hz * spec.bandwidth_hz;
    match spec.kind {
        WaveformKind::LinearFm => PI * PI * w2 / 3.0,
        WaveformKind::ParabolicFm => 16.0 * PI * PI * w2 / 45.0,
    }
}

fn check_target(k: usize) -> Result<()> {
    if k == 1 || k == 2 {
        Ok(())
    } else {
        Err(Error::invalid("target", format!("must be 1 or 2, got {k}")))
    }
}

/// Delay CRLB for radar share `ar_sq`, without the `[0, 1)` allocation check.
///
/// Used directly for the normalization baseline at `α_r² = 1`.
pub(crate) fn crlb_for_share(
    cfg: &ScenarioConfig,
    ar_sq: f64,
    energy: f64,
    brms_sq: f64,
    k: usize,
) -> Result<f64> {
    if ar_sq <= 0.0 {
        return Err(Error::InfiniteCrlb);
    }
    let gain = cfg.channel_gain(k);
    let eta = cfg.rcs(k);
    let echo_power = eta * eta * gain * gain * ar_sq * cfg.total_power_mw;
    Ok(cfg.sigma_r_sq / (2.0 * echo_power * energy * cfg.bandwidth_hz * brms_sq))
}

/// Post-integration radar SNR `2 E W · (echo power) / σ_r²` for target `k`.
pub fn radar_snr(cfg: &ScenarioConfig, ar_sq: f64, spec: &WaveformSpec, k: usize) -> Result<f64> {
    check_target(k)?;
    let gain = cfg.channel_gain(k);
    let eta = cfg.rcs(k);
    let echo_power = eta * eta * gain * gain * ar_sq * cfg.total_power_mw;
    Ok(2.0 * analytic_energy(spec) * cfg.bandwidth_hz * echo_power / cfg.sigma_r_sq)
}

/// Lower bound on the delay MSE of target `k` (1 or 2), s².
pub fn crlb_delay(
    cfg: &ScenarioConfig,
    alloc: &PowerAllocation,
    spec: &WaveformSpec,
    k: usize,
) -> Result<f64> {
    check_target(k)?;
    alloc.ensure_valid()?;
    spec.validate()?;
    crlb_for_share(
        cfg,
        alloc.ar_sq,
        analytic_energy(spec),
        analytic_rms_bandwidth_sq(spec),
        k,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrlbReport {
    pub crlb_per_target: [f64; 2],
    pub sigma_eps_sq: f64,
    /// `σ_ε² / σ_ε²|_{α_r²=1}`.
    pub sigma_eps_sq_normalized: f64,
}

/// `σ_ε²` at full radar power: the normalization baseline.
pub fn min_total_variance(cfg: &ScenarioConfig, spec: &WaveformSpec) -> Result<f64> {
    spec.validate()?;
    let (e, b) = (analytic_energy(spec), analytic_rms_bandwidth_sq(spec));
    Ok(crlb_for_share(cfg, 1.0, e, b, 1)? + crlb_for_share(cfg, 1.0, e, b, 2)?)
}

/// Total estimation error variance bound `σ_ε² = CRLB_1 + CRLB_2`.
pub fn total_estimation_variance(
    cfg: &ScenarioConfig,
    alloc: &PowerAllocation,
    spec: &WaveformSpec,
) -> Result<CrlbReport> {
    let c1 = crlb_delay(cfg, alloc, spec, 1)?;
    let c2 = crlb_delay(cfg, alloc, spec, 2)?;
    let sigma_eps_sq = c1 + c2;
    Ok(CrlbReport {
        crlb_per_target: [c1, c2],
        sigma_eps_sq,
        sigma_eps_sq_normalized: sigma_eps_sq / min_total_variance(cfg, spec)?,
    })
}
