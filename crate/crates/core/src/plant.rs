//! Point-mass longitudinal plant: resistive and driving forces plus an
//! explicit-Euler velocity integrator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::terrain::TerrainProfile;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VehicleParams {
    pub mass_kg: f64,
    pub wheel_radius_m: f64,
    pub brake_radius_m: f64,
    pub mu_rolling: f64,
    pub gravity_mps2: f64,
    pub air_density_kgpm3: f64,
    pub frontal_area_m2: f64,
    pub drag_coeff: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            mass_kg: 1250.0,
            wheel_radius_m: 0.27,
            brake_radius_m: 0.14,
            mu_rolling: 0.03,
            gravity_mps2: 9.81,
            air_density_kgpm3: 1.225,
            frontal_area_m2: 2.0,
            drag_coeff: 0.35,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct VehicleState {
    pub velocity_mps: f64,
    pub wheel_speed_radps: f64,
    pub distance_m: f64,
    pub grade_rad: f64,
}

impl VehicleState {
    /// At-rest state at the terrain's origin.
    pub fn at_rest(terrain: &TerrainProfile) -> Self {
        Self {
            velocity_mps: 0.0,
            wheel_speed_radps: 0.0,
            distance_m: 0.0,
            grade_rad: terrain.grade_at(0.0),
        }
    }
}

/// Per-step force decomposition, all in newtons. Resistive terms are positive
/// when they oppose forward motion; `gradient_n` is signed by the pitch angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceBreakdown {
    pub rolling_n: f64,
    pub gradient_n: f64,
    pub aero_n: f64,
    pub driving_n: f64,
    pub net_n: f64,
}

/// Rolling resistance magnitude: mu_r * M * g * cos(theta).
pub fn rolling_resistance(params: &VehicleParams, grade_rad: f64) -> f64 {
    params.mu_rolling * params.mass_kg * params.gravity_mps2 * grade_rad.cos()
}

/// Gravity component along the road: M * g * sin(theta). Negative downhill.
pub fn gradient_force(params: &VehicleParams, grade_rad: f64) -> f64 {
    params.mass_kg * params.gravity_mps2 * grade_rad.sin()
}

/// Aerodynamic drag: 0.5 * rho * A * v^2 * C_d.
pub fn aero_force(params: &VehicleParams, velocity_mps: f64) -> f64 {
    0.5 * params.air_density_kgpm3
        * params.frontal_area_m2
        * velocity_mps
        * velocity_mps
        * params.drag_coeff
}

/// Net tire-contact force from wheel and brake torques:
/// T_w / R_eff - T_b / R_brake.
pub fn driving_force(wheel_torque_nm: f64, brake_torque_nm: f64, params: &VehicleParams) -> f64 {
    wheel_torque_nm / params.wheel_radius_m - brake_torque_nm / params.brake_radius_m
}

/// Force balance at the given state and commanded torques.
pub fn force_breakdown(
    state: &VehicleState,
    wheel_torque_nm: f64,
    brake_torque_nm: f64,
    params: &VehicleParams,
) -> ForceBreakdown {
    let rolling_n = rolling_resistance(params, state.grade_rad);
    let gradient_n = gradient_force(params, state.grade_rad);
    let aero_n = aero_force(params, state.velocity_mps);
    let driving_n = driving_force(wheel_torque_nm, brake_torque_nm, params);
    let net_n = driving_n - rolling_n - gradient_n - aero_n;
    ForceBreakdown {
        rolling_n,
        gradient_n,
        aero_n,
        driving_n,
        net_n,
    }
}

/// One explicit-Euler step of the longitudinal dynamics.
///
/// The vehicle cannot be driven backward: at standstill a non-positive net
/// force keeps it at rest, and a decelerating step clamps velocity at zero.
pub fn plant_step(
    state: &VehicleState,
    wheel_torque_nm: f64,
    brake_torque_nm: f64,
    params: &VehicleParams,
    terrain: &TerrainProfile,
    dt_s: f64,
) -> Result<VehicleState> {
    for (name, v) in [
        ("velocity", state.velocity_mps),
        ("wheel_torque", wheel_torque_nm),
        ("brake_torque", brake_torque_nm),
        ("dt", dt_s),
        ("grade", state.grade_rad),
    ] {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("plant_step input {name}")));
        }
    }

    let forces = force_breakdown(state, wheel_torque_nm, brake_torque_nm, params);

    let velocity_mps = if state.velocity_mps == 0.0 && forces.net_n <= 0.0 {
        // reactive forces cannot start motion
        0.0
    } else {
        (state.velocity_mps + dt_s * forces.net_n / params.mass_kg).max(0.0)
    };

    let distance_m = state.distance_m + state.velocity_mps * dt_s;
    let grade_rad = terrain.grade_at(distance_m);

    Ok(VehicleState {
        velocity_mps,
        wheel_speed_radps: velocity_mps / params.wheel_radius_m,
        distance_m,
        grade_rad,
    })
}
