//! Discrete-time FM waveforms and numerical checks of their moments.
//!
//! Frequency laws over `t ∈ [0, T]` (both zero-mean, total excursion `W`):
//!
//! * linear FM: `f(t) = W (t/T − 1/2)`
//! * parabolic FM: `f(t) = W ((t/T)² − 1/3)`
//!
//! Samples sit at cell centres `t_i = (i + 1/2)/fs`, so sums over samples are
//! midpoint-rule integrals over the whole pulse.

mod montecarlo;

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radar::{WaveformKind, WaveformSpec};

pub use montecarlo::{mc_delay_estimation, McDelayReport, McSetup, MIN_POST_SNR_DB, MIN_TRIALS};

/// Minimum ratio of sample rate to sweep bandwidth.
pub const MIN_OVERSAMPLING: f64 = 8.0;

/// Instantaneous frequency (Hz) of the pulse at `t` seconds after its start.
pub fn inst_freq(spec: &WaveformSpec, t: f64) -> f64 {
    let u = t / spec.duration_s();
    match spec.kind {
        WaveformKind::LinearFm => spec.bandwidth_hz * (u - 0.5),
        WaveformKind::ParabolicFm => spec.bandwidth_hz * (u * u - 1.0 / 3.0),
    }
}

/// Running phase `2π ∫₀ᵗ f(s) ds`.
pub fn phase(spec: &WaveformSpec, t: f64) -> f64 {
    let w = spec.bandwidth_hz;
    let dur = spec.duration_s();
    match spec.kind {
        WaveformKind::LinearFm => 2.0 * PI * w * (t * t / (2.0 * dur) - t / 2.0),
        WaveformKind::ParabolicFm => 2.0 * PI * w * (t * t * t / (3.0 * dur * dur) - t / 3.0),
    }
}

/// Unit-modulus pulse value at `t`, zero outside `[0, T)`.
pub fn pulse_at(spec: &WaveformSpec, t: f64) -> Complex64 {
    if (0.0..spec.duration_s()).contains(&t) {
        Complex64::from_polar(1.0, phase(spec, t))
    } else {
        Complex64::new(0.0, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    pub samples: Vec<Complex64>,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    /// `None` for hand-built sample sequences.
    pub spec: Option<WaveformSpec>,
}

impl SampledWaveform {
    /// Wraps arbitrary samples taken at `sample_rate_hz`.
    pub fn from_samples(samples: Vec<Complex64>, sample_rate_hz: f64) -> Self {
        let duration_s = samples.len() as f64 / sample_rate_hz;
        Self {
            samples,
            sample_rate_hz,
            duration_s,
            spec: None,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_time(&self, i: usize) -> f64 {
        (i as f64 + 0.5) / self.sample_rate_hz
    }

    /// Copy with every sample multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|x| x * c).collect(),
            ..self.clone()
        }
    }

    /// Three whitespace-separated columns `time_s re im`, after one `#` header
    /// line recording the sample rate and the originating spec.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        match &self.spec {
            Some(s) => writeln!(
                out,
                "# kind={} bandwidth_hz={:e} time_bandwidth={:e} sample_rate_hz={:e} samples={}",
                s.kind,
                s.bandwidth_hz,
                s.time_bandwidth,
                self.sample_rate_hz,
                self.len()
            )?,
            None => writeln!(
                out,
                "# kind=custom sample_rate_hz={:e} samples={}",
                self.sample_rate_hz,
                self.len()
            )?,
        }
        for (i, x) in self.samples.iter().enumerate() {
            writeln!(out, "{:.9e} {:.9e} {:.9e}", self.sample_time(i), x.re, x.im)?;
        }
        Ok(())
    }
}

/// Samples the pulse at `sample_rate_hz`, which must be at least `8 W`.
pub fn synthesize(spec: &WaveformSpec, sample_rate_hz: f64) -> Result<SampledWaveform> {
    spec.validate()?;
    let required = MIN_OVERSAMPLING * spec.bandwidth_hz;
    if sample_rate_hz.is_nan() || sample_rate_hz < required {
        return Err(Error::Undersampled {
            sample_rate: sample_rate_hz,
            required,
        });
    }
    let duration_s = spec.duration_s();
    let n = (sample_rate_hz * duration_s).round() as usize;
    let samples = (0..n)
        .map(|i| Complex64::from_polar(1.0, phase(spec, (i as f64 + 0.5) / sample_rate_hz)))
        .collect();
    Ok(SampledWaveform {
        samples,
        sample_rate_hz,
        duration_s,
        spec: Some(*spec),
    })
}

/// `E = ½ ∫|x|² dt` by the midpoint rule.
pub fn numeric_energy(w: &SampledWaveform) -> f64 {
    let dt = 1.0 / w.sample_rate_hz;
    0.5 * w.samples.iter().map(|x| x.norm_sqr()).sum::<f64>() * dt
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RmsMethod {
    /// Mean of `(2π f(t))²` with `f` recovered from the sampled phase.
    InstFreq,
    /// 4π²-weighted second moment of the DFT power, over `|f| ≤ 2W`.
    Spectrum,
}

pub fn numeric_rms_bandwidth_sq(w: &SampledWaveform, method: RmsMethod) -> f64 {
    match method {
        RmsMethod::InstFreq => inst_freq_moment(w),
        RmsMethod::Spectrum => spectrum_moment(w),
    }
}

/// Phase unwrapped from consecutive sample products.
fn unwrapped_phase(samples: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = samples.first().map_or(0.0, |x| x.arg());
    out.push(acc);
    for pair in samples.windows(2) {
        acc += (pair[1] * pair[0].conj()).arg();
        out.push(acc);
    }
    out
}

/// One-sided second-order derivative estimate at the first sample.
fn edge_slope(v0: f64, v1: f64, v2: f64, h: f64) -> f64 {
    (-3.0 * v0 + 4.0 * v1 - v2) / (2.0 * h)
}

fn inst_freq_moment(w: &SampledWaveform) -> f64 {
    let n = w.len();
    if n < 3 {
        return 0.0;
    }
    let h = 1.0 / w.sample_rate_hz;
    let phi = unwrapped_phase(&w.samples);
    // Angular frequency at each sample.
    let mut omega = Vec::with_capacity(n);
    omega.push(edge_slope(phi[0], phi[1], phi[2], h));
    omega.extend(phi.windows(3).map(|p| (p[2] - p[0]) / (2.0 * h)));
    omega.push(-edge_slope(phi[n - 1], phi[n - 2], phi[n - 3], h));

    let g: Vec<f64> = omega.iter().map(|o| o * o).collect();
    let midpoint = g.iter().sum::<f64>() * h;
    // Euler-Maclaurin end correction: ∫g = M + h²/24 (g'(b) − g'(a)) + O(h⁴).
    let slope_a = edge_slope(g[0], g[1], g[2], h);
    let slope_b = -edge_slope(g[n - 1], g[n - 2], g[n - 3], h);
    let integral = midpoint + h * h / 24.0 * (slope_b - slope_a);
    integral / (n as f64 * h)
}

fn spectrum_moment(w: &SampledWaveform) -> f64 {
    let n = w.len();
    if n == 0 {
        return 0.0;
    }
    let mut buf = w.samples.clone();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let df = w.sample_rate_hz / n as f64;
    let limit = w
        .spec
        .map_or(w.sample_rate_hz / 2.0, |s| 2.0 * s.bandwidth_hz);
    let (mut num, mut den) = (0.0, 0.0);
    for (k, x) in buf.iter().enumerate() {
        let f = if k < n.div_ceil(2) {
            k as f64 * df
        } else {
            (k as f64 - n as f64) * df
        };
        if f.abs() <= limit {
            let p = x.norm_sqr();
            num += f * f * p;
            den += p;
        }
    }
    if den == 0.0 {
        return 0.0;
    }
    4.0 * PI * PI * num / den
}

/// Mean-square derivative `(1/T') ∫|x'(t)|² dt` over the interior.
///
/// Uses the fourth-order five-point stencil and skips two samples at each
/// edge so the envelope discontinuities do not enter. For a unit-modulus
/// pulse this equals `B_rms²`, i.e. `∫|x'|² dt = 2E · B_rms²`.
pub fn numeric_msq_derivative(w: &SampledWaveform) -> f64 {
    let n = w.len();
    if n < 5 {
        return 0.0;
    }
    let h = 1.0 / w.sample_rate_hz;
    let x = &w.samples;
    let total: f64 = (2..n - 2)
        .map(|i| ((x[i - 2] - x[i + 2]) + (x[i + 1] - x[i - 1]) * 8.0) / (12.0 * h))
        .map(|d| d.norm_sqr())
        .sum();
    total / (n - 4) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radar::{analytic_energy, analytic_rms_bandwidth_sq};
    use approx::assert_relative_eq;

    fn spec(kind: WaveformKind, tw: f64) -> WaveformSpec {
        WaveformSpec::new(kind, 2e7, tw).unwrap()
    }

    #[test]
    fn sample_count_and_modulus() {
        let s = spec(WaveformKind::LinearFm, 1000.0);
        let w = synthesize(&s, 8.0 * 2e7).unwrap();
        assert_eq!(w.len(), 8000);
        assert!(w.samples.iter().all(|x| (x.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn undersampling_is_rejected() {
        let s = spec(WaveformKind::LinearFm, 100.0);
        assert!(matches!(
            synthesize(&s, 7.9 * 2e7),
            Err(Error::Undersampled { .. })
        ));
    }

    #[test]
    fn frequency_laws() {
        let lin = spec(WaveformKind::LinearFm, 1000.0);
        let t = lin.duration_s();
        assert_relative_eq!(inst_freq(&lin, 0.0), -1e7);
        assert_relative_eq!(inst_freq(&lin, t), 1e7);
        // Zero mean for both laws, by midpoint rule on a fine grid.
        for kind in [WaveformKind::LinearFm, WaveformKind::ParabolicFm] {
            let s = spec(kind, 1000.0);
            let n = 100_000;
            let mean: f64 = (0..n)
                .map(|i| inst_freq(&s, (i as f64 + 0.5) / n as f64 * t))
                .sum::<f64>()
                / n as f64;
            assert!(mean.abs() < 1e-3, "{kind}: mean {mean}");
        }
        // Phase is the running integral of 2πf.
        let par = spec(WaveformKind::ParabolicFm, 1000.0);
        let dt = 1e-12;
        let t0 = 0.3 * t;
        let fd = (phase(&par, t0 + dt) - phase(&par, t0 - dt)) / (2.0 * dt) / (2.0 * PI);
        assert_relative_eq!(fd, inst_freq(&par, t0), max_relative = 1e-4);
    }

    #[test]
    fn energy_matches_half_duration() {
        for tw in [100.0, 1000.0] {
            let s = spec(WaveformKind::ParabolicFm, tw);
            let w = synthesize(&s, 1.6e8).unwrap();
            assert_relative_eq!(numeric_energy(&w), analytic_energy(&s), max_relative = 1e-9);
            assert_relative_eq!(numeric_energy(&w.scaled(3.0)), 9.0 * analytic_energy(&s), max_relative = 1e-9);
        }
        let short = synthesize(&spec(WaveformKind::LinearFm, 100.0), 1.6e8).unwrap();
        let long = synthesize(&spec(WaveformKind::LinearFm, 1000.0), 1.6e8).unwrap();
        assert_relative_eq!(numeric_energy(&long) / numeric_energy(&short), 10.0, max_relative = 1e-9);
        assert_relative_eq!(numeric_energy(&long), 2.5e-5, max_relative = 1e-9);
    }

    #[test]
    fn inst_freq_moment_matches_closed_forms() {
        for kind in [WaveformKind::LinearFm, WaveformKind::ParabolicFm] {
            for tw in [100.0, 1000.0] {
                let s = spec(kind, tw);
                let w = synthesize(&s, 1.6e8).unwrap();
                let got = numeric_rms_bandwidth_sq(&w, RmsMethod::InstFreq);
                assert_relative_eq!(got, analytic_rms_bandwidth_sq(&s), max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn spectrum_moment_converges_with_tw() {
        for kind in [WaveformKind::LinearFm, WaveformKind::ParabolicFm] {
            let err = |tw: f64| {
                let s = spec(kind, tw);
                let w = synthesize(&s, 1.6e8).unwrap();
                let b = numeric_rms_bandwidth_sq(&w, RmsMethod::Spectrum);
                (b / analytic_rms_bandwidth_sq(&s) - 1.0).abs()
            };
            let (e100, e1000) = (err(100.0), err(1000.0));
            assert!(e1000 < 0.05, "{kind}: {e1000}");
            assert!(e1000 < e100, "{kind}: {e1000} !< {e100}");
        }
    }

    #[test]
    fn derivative_energy_tracks_inst_freq_moment() {
        for kind in [WaveformKind::LinearFm, WaveformKind::ParabolicFm] {
            let w = synthesize(&spec(kind, 1000.0), 1.6e8).unwrap();
            let d = numeric_msq_derivative(&w);
            let b = numeric_rms_bandwidth_sq(&w, RmsMethod::InstFreq);
            assert_relative_eq!(d, b, max_relative = 2e-2);
        }
        let tone = SampledWaveform::from_samples(vec![Complex64::new(1.0, 0.0); 256], 1e6);
        assert_eq!(numeric_msq_derivative(&tone), 0.0);
        assert_eq!(numeric_rms_bandwidth_sq(&tone, RmsMethod::InstFreq), 0.0);
    }

    #[test]
    fn text_export_has_header_and_three_columns() {
        let w = synthesize(&spec(WaveformKind::LinearFm, 1.0), 1.6e8).unwrap();
        let mut out = Vec::new();
        w.write_text(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# kind=linear"));
        let rows: Vec<_> = lines.collect();
        assert_eq!(rows.len(), w.len());
        assert!(rows.iter().all(|r| r.split_whitespace().count() == 3));
    }
}
