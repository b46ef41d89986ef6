use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    ConfigParse(String),
    #[error("config invariant violated at `{key}`: {reason}")]
    ConfigInvariant { key: String, reason: String },
    #[error("discretization index {index} out of range [0, {n_steps})")]
    IndexOutOfRange { index: usize, n_steps: usize },
    #[error("torque demand {torque_nm} N·m unachievable at motor speed {omega_radps} rad/s (at or beyond synchronous speed)")]
    Unachievable { torque_nm: f64, omega_radps: f64 },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("simulation aborted at t={time_s} s: {reason}")]
    RunAborted { time_s: f64, reason: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
