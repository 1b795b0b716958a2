use thiserror::Error;

/// Errors raised by the computational modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("scan step {step} exceeds the certification limit {limit} (eps / 4C)")]
    StepTooCoarse { step: f64, limit: f64 },

    #[error("budget exceeded: {what} needs {needed}, cap is {cap}")]
    Budget {
        what: &'static str,
        needed: u64,
        cap: u64,
    },

    #[error("no almost period found in the scan window")]
    EmptySet,

    #[error("need at least {needed} resolved samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("need at least {needed} scales, got {got}")]
    TooFewScales { needed: usize, got: usize },

    #[error("precision exhausted after {certified} certified partial quotients")]
    PrecisionExhausted { certified: usize },

    #[error("index {index} out of range (have {len})")]
    OutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid spacing {spacing} is coarser than the required {limit}")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("parse error at {pos}: {msg} (`{token}`)")]
    Parse {
        pos: usize,
        token: String,
        msg: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Caps on brute-force work. Every scan checks its size against these before
/// it starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of grid evaluations in a single scan.
    pub max_grid_points: u64,
    /// Maximum denominator range for Diophantine searches.
    pub max_q: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_grid_points: 4_000_000_000,
            max_q: 100_000_000,
        }
    }
}

impl Limits {
    pub(crate) fn check_grid(&self, what: &'static str, needed: u64) -> Result<()> {
        if needed > self.max_grid_points {
            return Err(Error::Budget {
                what,
                needed,
                cap: self.max_grid_points,
            });
        }
        Ok(())
    }

    pub(crate) fn check_q(&self, what: &'static str, needed: u64) -> Result<()> {
        if needed > self.max_q {
            return Err(Error::Budget {
                what,
                needed,
                cap: self.max_q,
            });
        }
        Ok(())
    }
}
