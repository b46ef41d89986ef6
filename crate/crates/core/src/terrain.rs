//! Road pitch as a function of distance traveled.

use serde::{Deserialize, Serialize};

/// Grade profile over the odometer axis. Grade is the signed road pitch in
/// radians, positive uphill.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub enum TerrainProfile {
    Flat,
    /// Segments as (start_distance_m, grade_rad), sorted by start distance.
    /// The first segment's grade also applies before its start; the last
    /// extends to infinity.
    PiecewiseGrade(Vec<(f64, f64)>),
    Sinusoidal {
        amplitude_rad: f64,
        wavelength_m: f64,
    },
}

impl TerrainProfile {
    pub fn grade_at(&self, distance_m: f64) -> f64 {
        match self {
            TerrainProfile::Flat => 0.0,
            TerrainProfile::PiecewiseGrade(segments) => {
                let mut grade = segments.first().map_or(0.0, |s| s.1);
                for &(start, g) in segments {
                    if distance_m >= start {
                        grade = g;
                    } else {
                        break;
                    }
                }
                grade
            }
            TerrainProfile::Sinusoidal {
                amplitude_rad,
                wavelength_m,
            } => amplitude_rad * (2.0 * std::f64::consts::PI * distance_m / wavelength_m).sin(),
        }
    }

    /// Constant-grade profile, used for hold-on-a-hill scenarios.
    pub fn constant(grade_rad: f64) -> Self {
        TerrainProfile::PiecewiseGrade(vec![(0.0, grade_rad)])
    }
}
