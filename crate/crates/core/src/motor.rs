//! Induction-motor torque map, its inversion for the controller, gearbox
//! conversions, and the brake pedal lookup.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MotorParams {
    /// Torque coefficient in N·m/V².
    pub k1: f64,
    /// Speed coefficient in s/rad; 1/k2 is the synchronous speed.
    pub k2: f64,
    pub ep_max_v: f64,
    pub gear_ratio: f64,
    pub transmission_efficiency: f64,
}

impl Default for MotorParams {
    fn default() -> Self {
        Self {
            k1: 0.06692,
            k2: 0.00126,
            ep_max_v: 5.0,
            gear_ratio: 10.23,
            transmission_efficiency: 0.85,
        }
    }
}

impl MotorParams {
    /// Motor-shaft speed for a given wheel speed.
    pub fn motor_speed(&self, wheel_speed_radps: f64) -> f64 {
        wheel_speed_radps * self.gear_ratio
    }
}

/// Monotone brake-torque → pedal-percent map, anchored at (0, 0) and
/// (T_b_max, 100).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BrakeMap {
    pub points: Vec<(f64, f64)>,
}

impl Default for BrakeMap {
    fn default() -> Self {
        Self {
            points: vec![(0.0, 0.0), (800.0, 100.0)],
        }
    }
}

impl BrakeMap {
    pub fn max_torque_nm(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.0)
    }
}

/// Motor torque from pedal voltage and shaft speed: k1·Ep²·(1 − k2·ω),
/// floored at 0 (no regenerative braking).
pub fn motor_torque(ep_v: f64, omega_radps: f64, params: &MotorParams) -> f64 {
    (params.k1 * ep_v * ep_v * (1.0 - params.k2 * omega_radps)).max(0.0)
}

/// Smallest pedal voltage producing at least `torque_nm` at shaft speed
/// `omega_radps`, clamped to the pedal range.
pub fn pedal_from_motor_torque(
    torque_nm: f64,
    omega_radps: f64,
    params: &MotorParams,
) -> Result<f64> {
    if torque_nm <= 0.0 {
        return Ok(0.0);
    }
    let slip_factor = 1.0 - params.k2 * omega_radps;
    if slip_factor <= 0.0 {
        return Err(Error::Unachievable {
            torque_nm,
            omega_radps,
        });
    }
    Ok((torque_nm / (params.k1 * slip_factor)).sqrt().min(params.ep_max_v))
}

/// Wheel torque delivered for a given motor torque through the gearbox.
pub fn wheel_torque_from_motor(motor_torque_nm: f64, params: &MotorParams) -> f64 {
    motor_torque_nm * params.gear_ratio * params.transmission_efficiency
}

/// Motor torque required to deliver a given wheel torque.
pub fn motor_torque_from_wheel(wheel_torque_nm: f64, params: &MotorParams) -> f64 {
    wheel_torque_nm / (params.gear_ratio * params.transmission_efficiency)
}

/// Pedal percent for a brake-torque demand, piecewise-linear over the map and
/// clamped to 100% above the map's range.
pub fn brake_pedal_from_torque(torque_nm: f64, map: &BrakeMap) -> f64 {
    interpolate(&map.points, torque_nm, |p| p.0, |p| p.1).clamp(0.0, 100.0)
}

/// Brake torque for a pedal percent; inverse of `brake_pedal_from_torque` on
/// the map's range.
pub fn brake_torque_from_pedal(pedal_percent: f64, map: &BrakeMap) -> f64 {
    interpolate(&map.points, pedal_percent, |p| p.1, |p| p.0)
        .clamp(0.0, map.max_torque_nm())
}

fn interpolate(
    points: &[(f64, f64)],
    x: f64,
    key: impl Fn(&(f64, f64)) -> f64,
    value: impl Fn(&(f64, f64)) -> f64,
) -> f64 {
    match points {
        [] => 0.0,
        [only] => value(only),
        _ => {
            if x <= key(&points[0]) {
                return value(&points[0]);
            }
            for pair in points.windows(2) {
                let (a, b) = (&pair[0], &pair[1]);
                if x <= key(b) {
                    let span = key(b) - key(a);
                    let frac = (x - key(a)) / span;
                    return value(a) + frac * (value(b) - value(a));
                }
            }
            value(points.last().unwrap())
        }
    }
}
