use thiserror::Error;

/// Errors produced by the models, the optimizer and the waveform lab.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} is not finite ({value})")]
    NonFinite { what: String, value: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: `{key}` conflicts with an earlier entry for the same field")]
    ConflictingKey { line: usize, key: String },

    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("fairness is undefined: {0}")]
    UndefinedFairness(String),

    #[error("radar power fraction is zero; Fisher information vanishes and the CRLB is infinite")]
    InfiniteCrlb,

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("weak-user QoS infeasible: needs 1 - ar_sq >= kappa_min = {kappa_min:.6}")]
    Infeasible { kappa_min: f64 },

    #[error("QoS infeasible: minimum powers a1_sq = {a1_min:.6}, a2_sq = {a2_min:.6} leave no radar power")]
    InfeasibleQos { a1_min: f64, a2_min: f64 },

    #[error("no feasible grid point (kappa_min = {kappa_min:.6}; {})", feasible_range(*.kappa_min))]
    EmptySweep { kappa_min: f64 },

    #[error("sample rate {sample_rate} Hz is below the required {required} Hz")]
    Undersampled { sample_rate: f64, required: f64 },

    #[error("post-integration SNR {snr_db:.2} dB is below the {required_db:.1} dB asymptotic-region guard")]
    SnrBelowThreshold { snr_db: f64, required_db: f64 },
}

fn feasible_range(kappa_min: f64) -> String {
    if kappa_min < 1.0 {
        format!("feasible only for ar_sq <= {:.6}", 1.0 - kappa_min)
    } else {
        "unreachable even with all power on communications".into()
    }
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors that describe an infeasible operating point rather than bad input.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::Infeasible { .. }
                | Error::InfeasibleQos { .. }
                | Error::EmptySweep { .. }
                | Error::SnrBelowThreshold { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
