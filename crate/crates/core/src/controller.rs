//! Gradient-aware shrinking-domain speed controller.
//!
//! Within each planner window of length T the horizon contracts as
//! t = T(1 - i/n); the required force is recomputed at every index from the
//! current measurement, so tracking error does not integrate across steps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motor::{
    brake_pedal_from_torque, motor_torque_from_wheel, pedal_from_motor_torque, BrakeMap,
    MotorParams,
};
use crate::plant::{gradient_force, rolling_resistance, VehicleParams};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ControllerConfig {
    /// Planner window T in seconds.
    pub window_s: f64,
    /// Discretization count n.
    pub n_steps: usize,
    pub accel_upper_mps2: f64,
    pub accel_lower_mps2: f64,
    /// |f| at or below this triggers Coast.
    pub coast_deadband_n: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            window_s: 2.0,
            n_steps: 10,
            accel_upper_mps2: 2.5,
            accel_lower_mps2: 0.0,
            coast_deadband_n: 1.0,
        }
    }
}

impl ControllerConfig {
    /// Controller tick interval T/n.
    pub fn tick_s(&self) -> f64 {
        self.window_s / self.n_steps as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub velocity_mps: f64,
    pub grade_rad: f64,
    pub wheel_speed_radps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Drive,
    Brake,
    Coast,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Drive => "drive",
            Mode::Brake => "brake",
            Mode::Coast => "coast",
        })
    }
}

/// Actuator command; throttle and brake are mutually exclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlCommand {
    pub ep_v: f64,
    pub brake_percent: f64,
    pub mode: Mode,
}

impl ControlCommand {
    pub fn coast() -> Self {
        Self {
            ep_v: 0.0,
            brake_percent: 0.0,
            mode: Mode::Coast,
        }
    }
}

/// Remaining horizon at index i: T(1 - i/n). Index n is excluded; it would
/// make the horizon zero and the required force singular.
pub fn horizon_time(config: &ControllerConfig, i: usize) -> Result<f64> {
    if i >= config.n_steps {
        return Err(Error::IndexOutOfRange {
            index: i,
            n_steps: config.n_steps,
        });
    }
    Ok(config.window_s * (1.0 - i as f64 / config.n_steps as f64))
}

/// Force needed to close the velocity gap over the remaining horizon while
/// holding against grade and rolling resistance:
/// M(V_T - U)/t + F_gradient + F_rolling.
pub fn required_force(
    velocity_mps: f64,
    v_target_mps: f64,
    horizon_s: f64,
    mass_kg: f64,
    f_gradient_n: f64,
    f_rolling_n: f64,
) -> f64 {
    mass_kg * (v_target_mps - velocity_mps) / horizon_s + f_gradient_n + f_rolling_n
}

/// Pulls the target back toward the current velocity so the implied
/// acceleration stays within the upper bound. Demands below the lower bound
/// pass through unchanged.
pub fn clamp_demand(
    velocity_mps: f64,
    v_target_mps: f64,
    horizon_s: f64,
    config: &ControllerConfig,
) -> f64 {
    let accel = (v_target_mps - velocity_mps) / horizon_s;
    if accel.abs() <= config.accel_upper_mps2 {
        v_target_mps
    } else {
        velocity_mps + accel.signum() * config.accel_upper_mps2 * horizon_s
    }
}

/// Drive above the dead-band, brake below it, coast inside it.
pub fn select_mode(f_required_n: f64, deadband_n: f64) -> Mode {
    if f_required_n > deadband_n {
        Mode::Drive
    } else if f_required_n < -deadband_n {
        Mode::Brake
    } else {
        Mode::Coast
    }
}

/// One controller tick: horizon, force budget (grade + rolling, no aero),
/// acceleration clamp, mode selection, and actuator mapping.
pub fn control_step(
    meas: &Measurement,
    v_target_mps: f64,
    i: usize,
    config: &ControllerConfig,
    vparams: &VehicleParams,
    mparams: &MotorParams,
    bmap: &BrakeMap,
) -> Result<ControlCommand> {
    let horizon = horizon_time(config, i)?;
    let f_gradient = gradient_force(vparams, meas.grade_rad);
    let f_rolling = rolling_resistance(vparams, meas.grade_rad);
    let target = clamp_demand(meas.velocity_mps, v_target_mps, horizon, config);
    let f = required_force(
        meas.velocity_mps,
        target,
        horizon,
        vparams.mass_kg,
        f_gradient,
        f_rolling,
    );
    if !f.is_finite() {
        return Err(Error::NonFinite("required force".into()));
    }

    match select_mode(f, config.coast_deadband_n) {
        Mode::Coast => Ok(ControlCommand::coast()),
        Mode::Drive => {
            let wheel_torque = vparams.wheel_radius_m * f;
            let motor_torque = motor_torque_from_wheel(wheel_torque, mparams);
            let omega_motor = mparams.motor_speed(meas.wheel_speed_radps);
            let ep_v = match pedal_from_motor_torque(motor_torque, omega_motor, mparams) {
                Ok(ep) => ep,
                // demand beyond synchronous speed saturates the pedal
                Err(Error::Unachievable { .. }) => mparams.ep_max_v,
                Err(e) => return Err(e),
            };
            Ok(ControlCommand {
                ep_v,
                brake_percent: 0.0,
                mode: Mode::Drive,
            })
        }
        Mode::Brake => {
            let brake_torque = -vparams.brake_radius_m * f;
            Ok(ControlCommand {
                ep_v: 0.0,
                brake_percent: brake_pedal_from_torque(brake_torque, bmap),
                mode: Mode::Brake,
            })
        }
    }
}
