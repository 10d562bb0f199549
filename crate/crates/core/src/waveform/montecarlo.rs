//! Matched-filter delay estimation against the CRLB.
//!
//! Each trial receives the echo of one target,
//!
//! ```text
//! z[n] = g √P (α₁ s₁[n] + α₂ s₂[n] + α_r x(t_n − τ)) + n_r[n],   g = η_k |h_k|²
//! ```
//!
//! with `s₁, s₂` unit-power circular Gaussian surrogates for the data
//! symbols. The noise has variance `σ_r² · fs / W` in each quadrature, so its
//! in-band power per real dimension is `σ_r²`; with that convention the
//! complex-baseband CRLB coincides with [`crate::radar::crlb_delay`].
//!
//! The estimate is the peak of `|z ⋆ x|` refined by a three-point parabola.
//! Trial `i` draws from ChaCha stream `i` of `seed`, so results do not depend
//! on how trials are scheduled.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{pulse_at, synthesize, MIN_OVERSAMPLING};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::radar::{crlb_delay, radar_snr, WaveformSpec};
use crate::scenario::{PowerAllocation, ScenarioConfig};

/// Post-integration SNR below which the estimator leaves its asymptotic region.
pub const MIN_POST_SNR_DB: f64 = 10.0;
pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSetup {
    /// Target index, 1 or 2.
    pub target: usize,
    pub true_delay_s: f64,
    pub trials: usize,
    pub seed: u64,
    /// Sample rate as a multiple of `W`; at least 8.
    pub oversampling: f64,
}

impl McSetup {
    pub fn new(target: usize, true_delay_s: f64, trials: usize, seed: u64) -> Self {
        Self {
            target,
            true_delay_s,
            trials,
            seed,
            oversampling: MIN_OVERSAMPLING,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McDelayReport {
    pub target: usize,
    pub trials: usize,
    pub true_delay_s: f64,
    pub sample_rate_hz: f64,
    pub snr_post_db: f64,
    pub mean_estimate_s: f64,
    pub bias_s: f64,
    /// Sample variance of the estimates about their mean, s².
    pub empirical_var: f64,
    /// Mean squared error about the true delay, s².
    pub empirical_mse: f64,
    pub crlb: f64,
    /// `empirical_var / crlb`.
    pub efficiency: f64,
    pub seed: u64,
}

struct Receiver {
    echo: Vec<Complex64>,
    template_fft: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    max_lag: usize,
    echo_amp: f64,
    comms_amp: [f64; 2],
    noise_std: f64,
}

impl Receiver {
    fn trial(&self, seed: u64, index: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let len = self.echo.len();
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
        let mut buf: Vec<Complex64> = self
            .echo
            .iter()
            .map(|e| {
                let mut z = e * self.echo_amp;
                for amp in self.comms_amp {
                    if amp > 0.0 {
                        z += Complex64::new(normal(), normal()) * (amp * half);
                    }
                }
                z + Complex64::new(normal(), normal()) * self.noise_std
            })
            .collect();

        let mut scratch = vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
        self.forward.process_with_scratch(&mut buf, &mut scratch);
        for (z, x) in buf.iter_mut().zip(&self.template_fft) {
            *z *= x.conj();
        }
        scratch.resize(self.inverse.get_inplace_scratch_len(), Complex64::new(0.0, 0.0));
        self.inverse.process_with_scratch(&mut buf, &mut scratch);
        debug_assert_eq!(buf.len(), len);

        let mag: Vec<f64> = buf[..=self.max_lag].iter().map(|c| c.norm()).collect();
        let peak = (1..self.max_lag)
            .max_by(|&a, &b| mag[a].total_cmp(&mag[b]))
            .ok_or_else(|| Error::Contract("lag window too short".into()))?;
        Ok(peak as f64 + parabolic_offset(mag[peak - 1], mag[peak], mag[peak + 1]))
    }
}

/// Vertex offset of the parabola through three equally spaced samples.
pub(crate) fn parabolic_offset(left: f64, centre: f64, right: f64) -> f64 {
    let denom = left - 2.0 * centre + right;
    if denom == 0.0 {
        0.0
    } else {
        0.5 * (left - right) / denom
    }
}

/// Runs `setup.trials` matched-filter delay estimates for target `setup.target`.
pub fn mc_delay_estimation(
    cfg: &ScenarioConfig,
    alloc: &PowerAllocation,
    spec: &WaveformSpec,
    setup: &McSetup,
    exec: Execution,
) -> Result<McDelayReport> {
    cfg.validate()?;
    let crlb = crlb_delay(cfg, alloc, spec, setup.target)?;
    if setup.trials < MIN_TRIALS {
        return Err(Error::invalid(
            "trials",
            format!("need at least {MIN_TRIALS}, got {}", setup.trials),
        ));
    }
    let w = spec.bandwidth_hz;
    let duration = spec.duration_s();
    let tau = setup.true_delay_s;
    if !(tau >= 2.0 / w && tau <= duration / 2.0) {
        return Err(Error::invalid(
            "true_delay_s",
            format!("must lie in [2/W, T/2] = [{:e}, {:e}], got {tau:e}", 2.0 / w, duration / 2.0),
        ));
    }
    let snr = radar_snr(cfg, alloc.ar_sq, spec, setup.target)?;
    let snr_post_db = 10.0 * snr.log10();
    if snr_post_db.is_nan() || snr_post_db < MIN_POST_SNR_DB {
        return Err(Error::SnrBelowThreshold {
            snr_db: snr_post_db,
            required_db: MIN_POST_SNR_DB,
        });
    }

    let fs = setup.oversampling * w;
    let template = synthesize(spec, fs)?;
    let n = template.len();
    let max_lag = (duration / 2.0 * fs).ceil() as usize + 4;
    let len = n + max_lag;

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);
    let mut template_fft = template.samples.clone();
    template_fft.resize(len, Complex64::new(0.0, 0.0));
    forward.process(&mut template_fft);

    let gain = cfg.rcs(setup.target) * cfg.channel_gain(setup.target) * cfg.total_power_mw.sqrt();
    let echo = (0..len)
        .map(|i| pulse_at(spec, (i as f64 + 0.5) / fs - tau))
        .collect();
    let rx = Receiver {
        echo,
        template_fft,
        forward,
        inverse,
        max_lag,
        echo_amp: gain * alloc.ar_sq.sqrt(),
        comms_amp: [gain * alloc.a1_sq.sqrt(), gain * alloc.a2_sq.sqrt()],
        noise_std: (cfg.sigma_r_sq * fs / w).sqrt(),
    };

    let lags: Vec<f64> = exec
        .map_range(setup.trials, |i| rx.trial(setup.seed, i as u64))
        .into_iter()
        .collect::<Result<_>>()?;
    let estimates: Vec<f64> = lags.iter().map(|lag| lag / fs).collect();

    let count = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / count;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (count - 1.0);
    let mse = estimates.iter().map(|e| (e - tau).powi(2)).sum::<f64>() / count;
    Ok(McDelayReport {
        target: setup.target,
        trials: setup.trials,
        true_delay_s: tau,
        sample_rate_hz: fs,
        snr_post_db,
        mean_estimate_s: mean,
        bias_s: mean - tau,
        empirical_var: var,
        empirical_mse: mse,
        crlb,
        efficiency: var / crlb,
        seed: setup.seed,
    })
}
