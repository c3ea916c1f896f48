use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Hermite order {order} is above the supported maximum {max}")]
    UnsupportedOrder { order: u32, max: u32 },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("transmission denominator vanishes for these rates and detunings")]
    SingularParameters,
    #[error("empty or reversed range [{start}, {end}]")]
    EmptyRange { start: f64, end: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("trace window does not contain any bins or does not cover the crossing time")]
    DegenerateWindow,
    #[error("trace has no photon counts")]
    MissingCounts,
    #[error("trace columns have mismatched lengths")]
    LengthMismatch,
    #[error("no transit dip found in the trace")]
    NoTransit,
    #[error("unknown symmetry transform `{0}`")]
    UnknownTransform(alloc::string::String),
    #[error("zero velocity spread: temperature estimate is not positive")]
    ZeroTemperature,
}
