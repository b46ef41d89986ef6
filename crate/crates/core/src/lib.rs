//! Deterministic longitudinal speed-tracking simulator.
//!
//! A point-mass vehicle plant with an induction-motor torque path, closed by
//! either a gradient-aware shrinking-domain controller or a PID baseline, and
//! a benchmark harness that reports rise time, RMSE, and steady-state error
//! per scenario and terrain.

pub mod config;
pub mod controller;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod motor;
pub mod pid;
pub mod plant;
pub mod scenario;
pub mod terrain;

pub use config::Config;
pub use error::{Error, Result};
