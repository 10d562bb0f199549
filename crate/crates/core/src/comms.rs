//! Communications side: SINRs, Shannon rate bounds, SIC decodability and fairness.
//!
//! Rates are spectral efficiencies in bits/s/Hz. All received powers scale
//! with `total_power_mw`, so only noise-to-power ratios `σ²/P` matter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{PowerAllocation, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sinr {
    /// User 1 after removing s₂ by SIC.
    pub gamma1: f64,
    /// s₂ at user 2, with s₁ as interference.
    pub gamma2: f64,
    /// s₂ at user 1 during the SIC stage.
    pub gamma2_bar: f64,
}

pub fn compute_sinr(cfg: &ScenarioConfig, alloc: &PowerAllocation) -> Sinr {
    let p = cfg.total_power_mw;
    // The SIC-stage noise is the noise at user 1, where SIC runs.
    let sigma_c_sq = cfg.sigma1_sq;
    Sinr {
        gamma1: alloc.a1_sq * cfg.h1_gain * p / cfg.sigma1_sq,
        gamma2: alloc.a2_sq * cfg.h2_gain * p / (cfg.h2_gain * alloc.a1_sq * p + cfg.sigma2_sq),
        gamma2_bar: alloc.a2_sq * cfg.h1_gain * p / (cfg.h1_gain * alloc.a1_sq * p + sigma_c_sq),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma2_bar: f64,
    pub r1: f64,
    pub r2: f64,
    pub r_sum: f64,
    /// The SIC stage at user 1, not user 2's own receiver, caps `r2`.
    pub r2_limited_by_sic: bool,
}

pub fn rate_report(cfg: &ScenarioConfig, alloc: &PowerAllocation) -> RateReport {
    let Sinr {
        gamma1,
        gamma2,
        gamma2_bar,
    } = compute_sinr(cfg, alloc);
    let r1 = gamma1.ln_1p() / std::f64::consts::LN_2;
    let r2_direct = gamma2.ln_1p() / std::f64::consts::LN_2;
    let r2_sic = gamma2_bar.ln_1p() / std::f64::consts::LN_2;
    let r2 = r2_direct.min(r2_sic);
    RateReport {
        gamma1,
        gamma2,
        gamma2_bar,
        r1,
        r2,
        r_sum: r1 + r2,
        r2_limited_by_sic: r2_sic < r2_direct,
    }
}

/// Normalized Jain index `(Σx)² / (n Σx²)`, in `(0, 1]`.
pub fn jain_fairness(rates: &[f64]) -> Result<f64> {
    if rates.is_empty() {
        return Err(Error::UndefinedFairness("no rates given".into()));
    }
    if let Some(bad) = rates.iter().find(|r| !r.is_finite() || **r < 0.0) {
        return Err(Error::UndefinedFairness(format!(
            "rates must be finite and >= 0, got {bad}"
        )));
    }
    let sum: f64 = rates.iter().sum();
    let sum_sq: f64 = rates.iter().map(|r| r * r).sum();
    if sum_sq == 0.0 {
        return Err(Error::UndefinedFairness("all rates are zero".into()));
    }
    Ok(sum * sum / (rates.len() as f64 * sum_sq))
}

/// `∂f₁/∂α₂²` along `α₁² + α₂² = κ`, where `f₁ = (1+γ₁)(1+γ₂)`.
///
/// Negative whenever `|h₁|²σ₂² > |h₂|²σ₁²`, which makes the sum rate
/// decrease as power moves from the strong to the weak user.
pub fn f1_derivative(cfg: &ScenarioConfig, alloc: &PowerAllocation) -> Result<f64> {
    let kappa = 1.0 - alloc.ar_sq;
    let share = alloc.comms_share();
    if (share - kappa).abs() > 1e-9 {
        return Err(Error::Contract(format!(
            "f1_derivative needs a1_sq + a2_sq = 1 - ar_sq ({share} != {kappa})"
        )));
    }
    let p = cfg.total_power_mw;
    let (h1, h2) = (cfg.h1_gain, cfg.h2_gain);
    let (s1, s2) = (cfg.sigma1_sq, cfg.sigma2_sq);
    let denom = h2 * (kappa - alloc.a2_sq) * p + s2;
    Ok(-(h1 * s2 - h2 * s1) * (h2 * kappa * p + s2) * p / (denom * denom * s1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use approx::assert_relative_eq;

    #[test]
    fn sinr_at_weak_user_qos_optimum() {
        let cfg = ScenarioConfig::default();
        let s = compute_sinr(&cfg, &PowerAllocation::new(0.09189, 0.40811, 0.5));
        assert_relative_eq!(s.gamma1, 2.9057, max_relative = 1e-3);
        assert_relative_eq!(s.gamma2, 1.0, max_relative = 1e-3);
        assert_relative_eq!(s.gamma2_bar, 3.3040, max_relative = 1e-3);
    }

    #[test]
    fn degenerate_allocations() {
        let cfg = ScenarioConfig::default();
        let s = compute_sinr(&cfg, &PowerAllocation::new(0.0, 0.3, 0.5));
        assert_eq!(s.gamma1, 0.0);
        assert_relative_eq!(s.gamma2, 0.3 * cfg.h2_gain / cfg.sigma2_sq, max_relative = 1e-15);
        let s = compute_sinr(&cfg, &PowerAllocation::new(0.3, 0.0, 0.5));
        assert_eq!((s.gamma2, s.gamma2_bar), (0.0, 0.0));
        let r = rate_report(&cfg, &PowerAllocation::new(0.0, 0.0, 0.9));
        assert_eq!(r.r_sum, 0.0);
    }

    #[test]
    fn rates_at_reference_points() {
        let cfg = ScenarioConfig::default();
        let r = rate_report(&cfg, &PowerAllocation::new(0.09189, 0.40811, 0.5));
        assert_abs_diff_eq!(r.r2, 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(r.r1, 1.9657, epsilon = 1e-3);
        assert_abs_diff_eq!(r.r_sum, 2.9657, epsilon = 1e-3);
        assert!(!r.r2_limited_by_sic);

        let r = rate_report(&cfg, &PowerAllocation::new(0.05782, 0.23360, 0.70858));
        assert_abs_diff_eq!(r.r1, 1.5, epsilon = 1e-4);
        assert_abs_diff_eq!(r.r2, 0.7, epsilon = 1e-4);
    }

    #[test]
    fn sic_branch_binds_when_strong_user_is_noisy() {
        let cfg = ScenarioConfig {
            sigma1_sq: 1e-9,
            ..ScenarioConfig::default()
        };
        let r = rate_report(&cfg, &PowerAllocation::new(0.1, 0.4, 0.5));
        assert!(r.gamma2_bar < r.gamma2);
        assert!(r.r2_limited_by_sic);
    }

    #[test]
    fn jain_examples() {
        assert_eq!(jain_fairness(&[1.0, 1.0]).unwrap(), 1.0);
        assert_relative_eq!(jain_fairness(&[3.0, 1.0]).unwrap(), 0.8, max_relative = 1e-15);
        assert_abs_diff_eq!(jain_fairness(&[4.0546, 0.7]).unwrap(), 0.6678, epsilon = 1e-3);
        assert!(jain_fairness(&[0.0, 0.0]).is_err());
        assert!(jain_fairness(&[]).is_err());
        assert!(jain_fairness(&[1.0, -1.0]).is_err());
    }

    fn f1(cfg: &ScenarioConfig, kappa: f64, a2: f64) -> f64 {
        let s = compute_sinr(cfg, &PowerAllocation::new(kappa - a2, a2, 1.0 - kappa));
        (1.0 + s.gamma1) * (1.0 + s.gamma2)
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-6;
        for cfg in [
            ScenarioConfig::default(),
            ScenarioConfig {
                total_power_mw: 3.7,
                sigma2_sq: 8e-11,
                ..ScenarioConfig::default()
            },
        ] {
            let kappa = 0.5;
            for a2 in [0.05, 0.2, 0.3, 0.45] {
                let alloc = PowerAllocation::new(kappa - a2, a2, 1.0 - kappa);
                let d = f1_derivative(&cfg, &alloc).unwrap();
                let fd = (f1(&cfg, kappa, a2 + h) - f1(&cfg, kappa, a2 - h)) / (2.0 * h);
                assert!(d < 0.0);
                assert_relative_eq!(d, fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn derivative_vanishes_on_balanced_noise() {
        // |h1|²σ2² = |h2|²σ1² = 0.125, exact in binary.
        let cfg = ScenarioConfig {
            h1_gain: 0.5,
            h2_gain: 0.25,
            sigma1_sq: 0.5,
            sigma2_sq: 0.25,
            ..ScenarioConfig::default()
        };
        let d = f1_derivative(&cfg, &PowerAllocation::new(0.2, 0.3, 0.5)).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn derivative_rejects_off_line_allocations() {
        let cfg = ScenarioConfig::default();
        assert!(matches!(
            f1_derivative(&cfg, &PowerAllocation::new(0.1, 0.1, 0.5)),
            Err(Error::Contract(_))
        ));
    }
}
