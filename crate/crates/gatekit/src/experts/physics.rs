//! Constant-velocity Kalman filter expert. Filters the ego history with a
//! white-acceleration motion model (positions as measurements), then
//! extrapolates the terminal state at constant velocity. The output is
//! dynamically feasible by construction: zero acceleration, zero curvature.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::core::{AgentState, Horizons, Scene, Trajectory};

use super::{Expert, ExpertId, Prediction};

/// Measurement noise variance (m^2); matched to the generator's default
/// position noise.
const MEASUREMENT_VAR: f64 = 0.0025;

/// White-acceleration process noise intensity (m^2/s^3).
const PROCESS_NOISE: f64 = 0.5;

pub struct PhysicsExpert {
    id: ExpertId,
    horizons: Horizons,
    jitter_scale: f64,
}

/// One-axis [position, velocity] Kalman filter.
struct AxisFilter {
    p_pos: f64,
    p_cross: f64,
    p_vel: f64,
    pos: f64,
    vel: f64,
}

impl AxisFilter {
    fn new(pos: f64, vel: f64) -> Self {
        Self {
            p_pos: MEASUREMENT_VAR,
            p_cross: 0.0,
            p_vel: 0.25,
            pos,
            vel,
        }
    }

    fn step(&mut self, measurement: f64, dt: f64, q: f64) {
        // Predict.
        self.pos += self.vel * dt;
        let p00 = self.p_pos + 2.0 * dt * self.p_cross + dt * dt * self.p_vel + q * dt * dt * dt / 3.0;
        let p01 = self.p_cross + dt * self.p_vel + q * dt * dt / 2.0;
        let p11 = self.p_vel + q * dt;

        // Update with the position measurement.
        let s = p00 + MEASUREMENT_VAR;
        let k0 = p00 / s;
        let k1 = p01 / s;
        let innovation = measurement - self.pos;
        self.pos += k0 * innovation;
        self.vel += k1 * innovation;
        self.p_pos = (1.0 - k0) * p00;
        self.p_cross = (1.0 - k0) * p01;
        self.p_vel = p11 - k1 * p01;
    }
}

impl PhysicsExpert {
    pub fn new(id: ExpertId, horizons: Horizons, jitter_scale: f64) -> Self {
        Self {
            id,
            horizons,
            jitter_scale,
        }
    }

    fn filter_terminal(&self, scene: &Scene, process_noise: f64) -> (f64, f64, f64, f64) {
        let hist = &scene.ego_history.states;
        let dt = scene.ego_history.dt();
        let first = &hist[0];
        let mut fx = AxisFilter::new(first.x, first.vx);
        let mut fy = AxisFilter::new(first.y, first.vy);
        for s in &hist[1..] {
            fx.step(s.x, dt, process_noise);
            fy.step(s.y, dt, process_noise);
        }
        (fx.pos, fy.pos, fx.vel, fy.vel)
    }

    fn rollout(&self, scene: &Scene, process_noise: f64) -> Trajectory {
        let (px, py, vx, vy) = self.filter_terminal(scene, process_noise);
        let dt = 1.0 / self.horizons.rate_hz;
        let steps = self.horizons.future_len();
        let heading = if vx.hypot(vy) > 1e-9 {
            vy.atan2(vx)
        } else {
            scene.ego_history.last().heading
        };
        let states: Vec<AgentState> = (1..=steps)
            .map(|i| {
                let t = i as f64 * dt;
                AgentState::new(px + vx * t, py + vy * t, vx, vy, heading)
            })
            .collect();
        Trajectory {
            states,
            rate_hz: self.horizons.rate_hz,
        }
    }
}

impl Expert for PhysicsExpert {
    fn id(&self) -> &ExpertId {
        &self.id
    }

    fn predict_detailed(&self, scene: &Scene) -> Prediction {
        Prediction {
            trajectory: self.rollout(scene, PROCESS_NOISE),
            fallback: false,
        }
    }

    fn predict_jittered(&self, scene: &Scene, rng: &mut ChaCha8Rng) -> Trajectory {
        // Process-noise resampling: log-normal rescaling of q changes the
        // filter gains, which only moves the result where innovations are
        // non-zero (model mismatch).
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        let q = PROCESS_NOISE * (self.jitter_scale * z).exp();
        self.rollout(scene, q)
    }
}
