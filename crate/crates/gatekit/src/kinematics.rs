//! Closed-form motion primitives shared by the scene generator and the
//! expert pool: constant-velocity lines, constant-turn-rate arcs, and the
//! smooth lateral-evasion profile used for cut-in responses.

use crate::core::{wrap_heading, AgentState};

/// Yaw rates below this are rolled out as straight lines to avoid the 1/omega
/// singularity of the arc closed form.
pub const STRAIGHT_YAW_RATE_EPS: f64 = 1e-9;

/// Exact constant-turn-rate, constant-speed (unicycle) state at time `t`
/// from an initial pose. Degenerates to constant-velocity motion as
/// `yaw_rate -> 0`.
pub fn unicycle_state(
    x0: f64,
    y0: f64,
    heading0: f64,
    speed: f64,
    yaw_rate: f64,
    t: f64,
) -> AgentState {
    let (x, y, heading) = if yaw_rate.abs() < STRAIGHT_YAW_RATE_EPS {
        (
            x0 + speed * t * heading0.cos(),
            y0 + speed * t * heading0.sin(),
            heading0,
        )
    } else {
        let h = heading0 + yaw_rate * t;
        (
            x0 + speed / yaw_rate * (h.sin() - heading0.sin()),
            y0 - speed / yaw_rate * (h.cos() - heading0.cos()),
            h,
        )
    };
    AgentState::new(x, y, speed * heading.cos(), speed * heading.sin(), heading)
}

/// Rolls out `steps` unicycle states starting one tick after the initial pose.
pub fn unicycle_rollout(
    x0: f64,
    y0: f64,
    heading0: f64,
    speed: f64,
    yaw_rate: f64,
    dt: f64,
    steps: usize,
) -> Vec<AgentState> {
    (1..=steps)
        .map(|i| unicycle_state(x0, y0, heading0, speed, yaw_rate, i as f64 * dt))
        .collect()
}

/// Constant-velocity rollout starting one tick after the initial position.
pub fn cv_rollout(x0: f64, y0: f64, vx: f64, vy: f64, dt: f64, steps: usize) -> Vec<AgentState> {
    let heading = if vx.hypot(vy) > 1e-12 {
        vy.atan2(vx)
    } else {
        0.0
    };
    (1..=steps)
        .map(|i| {
            let t = i as f64 * dt;
            AgentState::new(x0 + vx * t, y0 + vy * t, vx, vy, heading)
        })
        .collect()
}

/// Cubic smoothstep: 0 at u<=0, 1 at u>=1, C1-continuous in between.
pub fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// Lateral evasion displacement at normalized progress `u` through the
/// maneuver, saturating at `amplitude` meters. This is the shared cut-in
/// response shape: the generator applies it to ground-truth futures and the
/// interaction-aware expert applies the same profile when a neighbor
/// converges on the ego rollout.
pub fn evasion_offset(amplitude: f64, u: f64) -> f64 {
    amplitude * smoothstep(u)
}

/// Applies a lateral evasion ramp to a rollout: each state is shifted
/// perpendicular to its heading by `evasion_offset(amplitude, i/ramp_len)`,
/// signed by `side` (+1 = left of heading, -1 = right).
pub fn apply_lateral_evasion(states: &mut [AgentState], amplitude: f64, side: f64, ramp_len: usize) {
    let n = ramp_len.max(1) as f64;
    for (i, s) in states.iter_mut().enumerate() {
        let u = (i + 1) as f64 / n;
        let off = evasion_offset(amplitude, u) * side.signum();
        // Perpendicular (left) of the heading direction.
        let (px, py) = (-s.heading.sin(), s.heading.cos());
        s.x += off * px;
        s.y += off * py;
    }
}

/// Signed smallest difference `a - b` between two angles.
pub fn heading_diff(a: f64, b: f64) -> f64 {
    wrap_heading(a - b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unicycle_degenerates_to_straight_line() {
        let s = unicycle_state(1.0, 2.0, 0.0, 10.0, 0.0, 0.5);
        assert!((s.x - 6.0).abs() < 1e-12);
        assert!((s.y - 2.0).abs() < 1e-12);

        // Tiny yaw rate matches the straight line to first order.
        let s2 = unicycle_state(1.0, 2.0, 0.0, 10.0, 1e-12, 0.5);
        assert!((s2.x - 6.0).abs() < 1e-9);
        assert!((s2.y - 2.0).abs() < 1e-9);
    }

    #[test]
    fn unicycle_quarter_circle() {
        // Quarter turn at radius v/omega = 2.
        let s = unicycle_state(0.0, 0.0, 0.0, 1.0, 0.5, PI);
        assert!((s.x - 2.0).abs() < 1e-12);
        assert!((s.y - 2.0).abs() < 1e-12);
        assert!((s.heading - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn evasion_saturates_at_amplitude() {
        assert_eq!(evasion_offset(1.0, 0.0), 0.0);
        assert_eq!(evasion_offset(1.0, 1.0), 1.0);
        assert_eq!(evasion_offset(1.0, 2.0), 1.0);
        let mid = evasion_offset(1.0, 0.5);
        assert!((mid - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lateral_evasion_shifts_perpendicular() {
        let mut states = cv_rollout(0.0, 0.0, 5.0, 0.0, 0.05, 40);
        apply_lateral_evasion(&mut states, 1.0, 1.0, 40);
        // Heading east, left is +y: the final state is offset a full meter up.
        let last = states.last().unwrap();
        assert!((last.y - 1.0).abs() < 1e-12);
    }
}
