//! Closed-form power splits and the tradeoff studies built on them.
//!
//! For a fixed radar share `α_r²` (so `κ = 1 - α_r²` is left for
//! communications) the sum rate falls monotonically as power moves to the
//! weak user, so the sum-rate optimum puts the weak user exactly on its QoS
//! floor. The estimation-error optimum instead gives radar everything left
//! over once both users sit on their QoS floors.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::comms::{jain_fairness, rate_report};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::radar::{self, WaveformSpec};
use crate::scenario::{PowerAllocation, QosRequirement, ScenarioConfig};

/// One sample of the rate/estimation-error plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub alloc: PowerAllocation,
    pub r1: f64,
    pub r2: f64,
    pub r_sum: f64,
    /// `f64::INFINITY` when `α_r² = 0`.
    pub sigma_eps_sq: f64,
    pub sigma_eps_sq_normalized: f64,
    pub fairness: f64,
}

impl TradeoffPoint {
    /// Evaluates both models at `alloc`.
    pub fn evaluate(
        cfg: &ScenarioConfig,
        alloc: &PowerAllocation,
        spec: &WaveformSpec,
    ) -> Result<Self> {
        let rates = rate_report(cfg, alloc);
        let (sigma_eps_sq, sigma_eps_sq_normalized) =
            match radar::total_estimation_variance(cfg, alloc, spec) {
                Ok(rep) => (rep.sigma_eps_sq, rep.sigma_eps_sq_normalized),
                Err(Error::InfiniteCrlb) => (f64::INFINITY, f64::INFINITY),
                Err(e) => return Err(e),
            };
        // No communications power at all: report zero rather than undefined.
        let fairness = jain_fairness(&[rates.r1, rates.r2]).unwrap_or(0.0);
        Ok(Self {
            alloc: *alloc,
            r1: rates.r1,
            r2: rates.r2,
            r_sum: rates.r_sum,
            sigma_eps_sq,
            sigma_eps_sq_normalized,
            fairness,
        })
    }

    /// `log10` of the normalized variance, the scale the tradeoff plots use.
    pub fn log10_normalized(&self) -> f64 {
        self.sigma_eps_sq_normalized.log10()
    }
}

/// Smallest communications share `κ` that lets user 2 reach `r02` with
/// user 1 silent: `σ₂²/P · (2^{R₀,₂} − 1) / |h₂|²`.
pub fn kappa_min(cfg: &ScenarioConfig, r02: f64) -> f64 {
    let noise = cfg.sigma2_sq / cfg.total_power_mw;
    noise * two_pow_minus_one(r02) / cfg.h2_gain
}

/// `2^r − 1`, accurate for small `r`.
fn two_pow_minus_one(r: f64) -> f64 {
    (r * std::f64::consts::LN_2).exp_m1()
}

/// Sum-rate maximizing split for radar share `ar_sq` subject to `R₂ ≥ r02`.
///
/// User 2 gets exactly the power that meets `r02`; user 1 gets the rest of
/// `κ = 1 − ar_sq`.
pub fn optimal_allocation_for_sumrate(
    cfg: &ScenarioConfig,
    r02: f64,
    ar_sq: f64,
) -> Result<PowerAllocation> {
    if !(r02.is_finite() && r02 > 0.0) {
        return Err(Error::invalid("r02", format!("must be finite and > 0, got {r02}")));
    }
    if !(0.0..1.0).contains(&ar_sq) {
        return Err(Error::invalid("ar_sq", format!("must lie in [0, 1), got {ar_sq}")));
    }
    let kappa = 1.0 - ar_sq;
    let g = two_pow_minus_one(r02);
    let noise = cfg.sigma2_sq / cfg.total_power_mw;
    let h2 = cfg.h2_gain;
    let a1_sq = (kappa * h2 - noise * g) / (h2 * (1.0 + g));
    if a1_sq < 0.0 {
        return Err(Error::Infeasible {
            kappa_min: kappa_min(cfg, r02),
        });
    }
    let (a1_sq, a2_sq) = split_exactly(kappa, a1_sq);
    Ok(PowerAllocation { a1_sq, a2_sq, ar_sq })
}

/// `(a, κ − a)` with `a + b == κ` in floating point. When `a + b` would land
/// on a rounding tie that skips `κ`, `a` moves by one of its own ulps.
fn split_exactly(kappa: f64, a: f64) -> (f64, f64) {
    for a in [a, a.next_up(), a.next_down()] {
        let b = kappa - a;
        for b in [b, b.next_up(), b.next_down()] {
            if a + b == kappa && a >= 0.0 && b >= 0.0 {
                return (a, b);
            }
        }
    }
    (a, kappa - a)
}

/// QoS power floors `(α₁²_min, α₂²_min)`: the smallest fractions meeting
/// `R₁ ≥ r01` and `R₂ ≥ r02`.
pub fn min_power_for_qos(cfg: &ScenarioConfig, qos: &QosRequirement) -> Result<(f64, f64)> {
    qos.validate()?;
    let p = cfg.total_power_mw;
    let a1_min = two_pow_minus_one(qos.r01) * cfg.sigma1_sq / p / cfg.h1_gain;
    let a2_min =
        two_pow_minus_one(qos.r02) * (a1_min + cfg.sigma2_sq / p / cfg.h2_gain);
    if a1_min + a2_min >= 1.0 {
        return Err(Error::InfeasibleQos { a1_min, a2_min });
    }
    Ok((a1_min, a2_min))
}

/// Both users on their QoS floors, radar takes the remainder.
pub fn max_radar_allocation(cfg: &ScenarioConfig, qos: &QosRequirement) -> Result<PowerAllocation> {
    let (a1_sq, a2_sq) = min_power_for_qos(cfg, qos)?;
    Ok(PowerAllocation {
        a1_sq,
        a2_sq,
        ar_sq: 1.0 - a1_sq - a2_sq,
    })
}

/// Minimum-`σ_ε²` operating point under both QoS constraints.
pub fn star_point(
    cfg: &ScenarioConfig,
    qos: &QosRequirement,
    spec: &WaveformSpec,
) -> Result<TradeoffPoint> {
    let alloc = max_radar_allocation(cfg, qos)?;
    TradeoffPoint::evaluate(cfg, &alloc, spec)
}

/// Strictly increasing radar-share grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid(Vec<f64>);

impl Grid {
    /// Default grid: 200 points spanning [0.01, 0.99].
    pub const DEFAULT: (f64, f64, usize) = (0.01, 0.99, 200);

    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("grid", "needs at least one point"));
        }
        if n == 1 {
            return Self::new(vec![lo]);
        }
        let step = (hi - lo) / (n - 1) as f64;
        Self::new((0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect())
    }

    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("grid", "needs at least one point"));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(Error::invalid("grid", format!("values must lie in [0, 1), got {v}")));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid", "values must be strictly increasing"));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl Default for Grid {
    fn default() -> Self {
        let (lo, hi, n) = Self::DEFAULT;
        Self::uniform(lo, hi, n).expect("default grid is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: WaveformSpec,
    pub qos: QosRequirement,
    /// Feasible points in ascending `α_r²`.
    pub points: Vec<TradeoffPoint>,
    /// `1 − κ_min` when part of the grid lies past it; radar shares above
    /// this leave user 2 short of its QoS.
    pub infeasible_tail_start: Option<f64>,
}

/// Sum-rate optimal curve over `grid` for weak-user QoS `r02`.
pub fn tradeoff_sweep(
    cfg: &ScenarioConfig,
    r02: f64,
    spec: &WaveformSpec,
    grid: &Grid,
) -> Result<SweepResult> {
    tradeoff_sweep_with(cfg, r02, spec, grid, Execution::default())
}

pub fn tradeoff_sweep_with(
    cfg: &ScenarioConfig,
    r02: f64,
    spec: &WaveformSpec,
    grid: &Grid,
    exec: Execution,
) -> Result<SweepResult> {
    spec.validate()?;
    let evaluated = exec.map_slice(grid.values(), |&ar_sq| {
        match optimal_allocation_for_sumrate(cfg, r02, ar_sq) {
            Ok(alloc) => TradeoffPoint::evaluate(cfg, &alloc, spec).map(Some),
            Err(Error::Infeasible { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    });
    // Feasibility is monotone in the grid, so the infeasible points form a tail.
    let mut points = Vec::with_capacity(evaluated.len());
    let mut any_infeasible = false;
    for p in evaluated {
        match p? {
            Some(p) => points.push(p),
            None => any_infeasible = true,
        }
    }
    let kmin = kappa_min(cfg, r02);
    if points.is_empty() {
        return Err(Error::EmptySweep { kappa_min: kmin });
    }
    Ok(SweepResult {
        spec: *spec,
        qos: QosRequirement { r01: 0.0, r02 },
        points,
        infeasible_tail_start: any_infeasible.then_some(1.0 - kmin),
    })
}

/// Uniform draw from `{α₁² + α₂² + α_r² ≤ 1, all ≥ 0}`: the first three
/// spacings of three sorted uniforms on [0, 1].
fn simplex_draw<R: Rng>(rng: &mut R) -> PowerAllocation {
    let mut u = [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()];
    u.sort_by(f64::total_cmp);
    PowerAllocation {
        a1_sq: u[0],
        a2_sq: u[1] - u[0],
        ar_sq: u[2] - u[1],
    }
}

/// Allocations drawn uniformly over the power simplex restricted to
/// `α₂² > α₁²` (rejection), deterministic given `seed`.
pub fn sample_allocations(n: usize, seed: u64) -> Vec<PowerAllocation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = simplex_draw(&mut rng);
        if a.a2_sq > a.a1_sq {
            out.push(a);
        }
    }
    out
}

/// Background cloud of achievable (rate, error) points.
pub fn sample_feasible_region(
    cfg: &ScenarioConfig,
    spec: &WaveformSpec,
    n: usize,
    seed: u64,
) -> Result<Vec<TradeoffPoint>> {
    sample_feasible_region_with(cfg, spec, n, seed, Execution::default())
}

pub fn sample_feasible_region_with(
    cfg: &ScenarioConfig,
    spec: &WaveformSpec,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<TradeoffPoint>> {
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    spec.validate()?;
    let allocs = sample_allocations(n, seed);
    exec.map_slice(&allocs, |a| TradeoffPoint::evaluate(cfg, a, spec))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryCase {
    pub gap_db: f64,
    pub h2_gain: f64,
    pub sweep: SweepResult,
}

/// What the asymmetry study holds fixed while widening the channel gap.
pub const ASYMMETRY_NOTE: &str =
    "|h1|^2 held at the scenario value; |h2|^2 = |h1|^2 * 10^(-gap_db/10)";

/// One sweep per channel gap `Δ` (dB) with `|h₁|²` fixed.
pub fn asymmetry_sweep(
    cfg: &ScenarioConfig,
    r02: f64,
    spec: &WaveformSpec,
    gaps_db: &[f64],
    grid: &Grid,
) -> Result<Vec<AsymmetryCase>> {
    asymmetry_sweep_with(cfg, r02, spec, gaps_db, grid, Execution::default())
}

pub fn asymmetry_sweep_with(
    cfg: &ScenarioConfig,
    r02: f64,
    spec: &WaveformSpec,
    gaps_db: &[f64],
    grid: &Grid,
    exec: Execution,
) -> Result<Vec<AsymmetryCase>> {
    if gaps_db.is_empty() {
        return Err(Error::invalid("gaps_db", "needs at least one gap"));
    }
    gaps_db
        .iter()
        .map(|&gap_db| {
            let shifted = cfg.with_channel_gap_db(gap_db)?;
            let sweep = tradeoff_sweep_with(&shifted, r02, spec, grid, exec)?;
            Ok(AsymmetryCase {
                gap_db,
                h2_gain: shifted.h2_gain,
                sweep,
            })
        })
        .collect()
}
