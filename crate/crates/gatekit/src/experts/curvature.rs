//! Constant-turn-rate, constant-speed (unicycle) expert. Yaw rate and speed
//! are estimated from the trailing history window; the rollout uses the
//! exact arc closed form and so tracks constant-curvature motion and turn
//! onsets that the constant-velocity filter misses.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::core::{AgentState, Horizons, Scene, Trajectory};
use crate::kinematics::{heading_diff, unicycle_rollout};

use super::{Expert, ExpertId, Prediction};

/// Trailing history window used for estimation.
pub const ESTIMATION_WINDOW: usize = 10;

/// Speeds below this (m/s) count as a degenerate, zero-motion history.
const DEGENERATE_SPEED: f64 = 0.05;

/// A window whose finite-difference speed disagrees with its reported
/// velocity fields by more than this absolute/relative band is treated as
/// corrupted, and the expert degrades to a straight rollout.
const CONSISTENCY_ABS: f64 = 0.8;
const CONSISTENCY_REL: f64 = 0.35;

/// Window estimates extracted from the trailing history.
pub struct WindowEstimate {
    pub speed: f64,
    pub yaw_rate: f64,
    pub fd_speed: f64,
    pub anchor: AgentState,
}

/// Estimates speed (mean of reported velocity magnitudes), yaw rate (mean
/// wrapped heading increment), and the finite-difference speed used for the
/// consistency check, all over the trailing window.
pub fn estimate_window(scene: &Scene) -> WindowEstimate {
    let hist = &scene.ego_history.states;
    let dt = scene.ego_history.dt();
    let w = hist.len().min(ESTIMATION_WINDOW).max(2);
    let window = &hist[hist.len() - w..];

    let speed = window.iter().map(|s| s.speed()).sum::<f64>() / w as f64;
    let yaw_rate = window
        .windows(2)
        .map(|p| heading_diff(p[1].heading, p[0].heading))
        .sum::<f64>()
        / ((w - 1) as f64 * dt);
    let fd_speed = window
        .windows(2)
        .map(|p| (p[1].x - p[0].x).hypot(p[1].y - p[0].y) / dt)
        .sum::<f64>()
        / (w - 1) as f64;

    WindowEstimate {
        speed,
        yaw_rate,
        fd_speed,
        anchor: *hist.last().unwrap(),
    }
}

pub struct CurvatureExpert {
    id: ExpertId,
    horizons: Horizons,
    jitter_scale: f64,
}

impl CurvatureExpert {
    pub fn new(id: ExpertId, horizons: Horizons, jitter_scale: f64) -> Self {
        Self {
            id,
            horizons,
            jitter_scale,
        }
    }

    /// Shared with the interactive expert: unicycle rollout from window
    /// estimates, with degenerate and corrupted-window fallbacks.
    pub fn base_rollout(
        scene: &Scene,
        horizons: &Horizons,
        speed_factor: f64,
        yaw_factor: f64,
    ) -> Prediction {
        let est = estimate_window(scene);
        let dt = 1.0 / horizons.rate_hz;
        let steps = horizons.future_len();
        let a = est.anchor;

        // Degenerate history: hold position.
        if est.speed < DEGENERATE_SPEED {
            let states = vec![AgentState::new(a.x, a.y, 0.0, 0.0, a.heading); steps];
            return Prediction {
                trajectory: Trajectory {
                    states,
                    rate_hz: horizons.rate_hz,
                },
                fallback: true,
            };
        }

        // Inconsistent window (positions disagree with reported velocities):
        // drop the turn-rate estimate and roll straight at the reported speed.
        let band = CONSISTENCY_ABS.max(CONSISTENCY_REL * est.speed);
        if (est.fd_speed - est.speed).abs() > band {
            let states = unicycle_rollout(a.x, a.y, a.heading, est.speed * speed_factor, 0.0, dt, steps);
            return Prediction {
                trajectory: Trajectory {
                    states,
                    rate_hz: horizons.rate_hz,
                },
                fallback: true,
            };
        }

        let states = unicycle_rollout(
            a.x,
            a.y,
            a.heading,
            est.speed * speed_factor,
            est.yaw_rate * yaw_factor,
            dt,
            steps,
        );
        Prediction {
            trajectory: Trajectory {
                states,
                rate_hz: horizons.rate_hz,
            },
            fallback: false,
        }
    }
}

impl Expert for CurvatureExpert {
    fn id(&self) -> &ExpertId {
        &self.id
    }

    fn predict_detailed(&self, scene: &Scene) -> Prediction {
        Self::base_rollout(scene, &self.horizons, 1.0, 1.0)
    }

    fn predict_jittered(&self, scene: &Scene, rng: &mut ChaCha8Rng) -> Trajectory {
        // Jittered yaw-rate and speed estimates, std 5% of value.
        let mut gauss = || {
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let sf = 1.0 + 0.05 * self.jitter_scale * gauss();
        let yf = 1.0 + 0.05 * self.jitter_scale * gauss();
        Self::base_rollout(scene, &self.horizons, sf, yf).trajectory
    }
}
