//! Rise time, RMSE, and steady-state error over a run trace.

use crate::scenario::RunTrace;

pub const MPS_TO_KMH: f64 = 3.6;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub scenario: String,
    pub terrain: String,
    pub controller: String,
    /// `None` when the response never crosses both thresholds.
    pub rise_time_s: Option<f64>,
    pub rmse_kmh: f64,
    pub sse_kmh: f64,
}

/// 10%-to-90% rise time against the commanded final value, with linear
/// interpolation between ticks. `None` if either threshold is never crossed.
pub fn rise_time(trace: &RunTrace, final_value_mps: f64) -> Option<f64> {
    let low = first_crossing(trace, 0.1 * final_value_mps)?;
    let high = first_crossing(trace, 0.9 * final_value_mps)?;
    Some(high - low)
}

fn first_crossing(trace: &RunTrace, threshold: f64) -> Option<f64> {
    let rows = &trace.rows;
    if let Some(first) = rows.first() {
        if first.velocity_mps >= threshold {
            return Some(first.time_s);
        }
    }
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.velocity_mps < threshold && b.velocity_mps >= threshold {
            let frac = (threshold - a.velocity_mps) / (b.velocity_mps - a.velocity_mps);
            return Some(a.time_s + frac * (b.time_s - a.time_s));
        }
    }
    None
}

/// Root-mean-square tracking error over the whole trace, in km/h.
pub fn rmse(trace: &RunTrace) -> f64 {
    if trace.rows.is_empty() {
        return 0.0;
    }
    let sum_sq: f64 = trace
        .rows
        .iter()
        .map(|r| {
            let e = r.ref_velocity_mps - r.velocity_mps;
            e * e
        })
        .sum();
    (sum_sq / trace.rows.len() as f64).sqrt() * MPS_TO_KMH
}

/// Mean absolute tracking error over the final `window_fraction` of the
/// trace, in km/h.
pub fn steady_state_error(trace: &RunTrace, window_fraction: f64) -> f64 {
    if trace.rows.is_empty() {
        return 0.0;
    }
    let n = trace.rows.len();
    let count = ((n as f64 * window_fraction).ceil() as usize).clamp(1, n);
    let tail = &trace.rows[n - count..];
    let sum: f64 = tail
        .iter()
        .map(|r| (r.ref_velocity_mps - r.velocity_mps).abs())
        .sum();
    sum / count as f64 * MPS_TO_KMH
}
