//! Joint radar and communications by power-domain superposition.
//!
//! A dual-function station broadcasts two superposed communications signals
//! and a radar waveform to two users, then estimates the round-trip delay of
//! each user's echo. This crate evaluates both sides of that link budget and
//! solves the power-split problems in closed form:
//!
//! * [`scenario`]: configuration, unit conversion, allocation checks.
//! * [`comms`]: SINRs, rate bounds, SIC ordering, Jain fairness.
//! * [`radar`]: waveform moments, per-target delay CRLB, total error variance.
//! * [`optimizer`]: sum-rate optimal split, QoS power minima, sweeps.
//! * [`waveform`]: sampled FM waveforms and a matched-filter Monte Carlo.
//!
//! Batch work (sweeps, region samples, Monte Carlo trials) runs through
//! [`exec::Execution`], which uses rayon when the `parallel` feature is on.

pub mod comms;
pub mod error;
pub mod exec;
pub mod optimizer;
pub mod radar;
pub mod scenario;
pub mod waveform;

pub use error::{Error, Result};
pub use exec::Execution;
pub use scenario::{PowerAllocation, QosRequirement, ScenarioConfig};
