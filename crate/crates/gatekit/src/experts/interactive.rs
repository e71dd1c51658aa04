//! Interaction-aware expert: starts from the curvature rollout, then applies
//! a neighbor-repulsion lateral evasion whenever a neighbor's extrapolated
//! path converges on the ego rollout. The evasion profile is the same shape
//! the generator uses for cut-in ground truth, so this is the only expert
//! that can be systematically right on cut-in scenes.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::core::{Horizons, Scene, Trajectory};
use crate::kinematics::apply_lateral_evasion;
use crate::scenario::EVASION_AMPLITUDE_M;

use super::curvature::CurvatureExpert;
use super::{Expert, ExpertId, Prediction};

/// Reaction distance: a neighbor whose extrapolated path passes within this
/// range of the ego rollout triggers an evasion.
pub const REACTION_DISTANCE_M: f64 = 5.0;

/// Trailing neighbor states used for velocity estimation.
const NEIGHBOR_WINDOW: usize = 10;

pub struct InteractiveExpert {
    id: ExpertId,
    horizons: Horizons,
    jitter_scale: f64,
}

impl InteractiveExpert {
    pub fn new(id: ExpertId, horizons: Horizons, jitter_scale: f64) -> Self {
        Self {
            id,
            horizons,
            jitter_scale,
        }
    }

    fn with_reaction(&self, scene: &Scene, reaction_distance: f64) -> Prediction {
        let mut base = CurvatureExpert::base_rollout(scene, &self.horizons, 1.0, 1.0);
        if scene.neighbor_histories.is_empty() {
            return base;
        }

        let dt = 1.0 / self.horizons.rate_hz;
        let states = &mut base.trajectory.states;
        let mut side_sum = 0.0;

        for neighbor in &scene.neighbor_histories {
            let ns = &neighbor.states;
            let w = ns.len().min(NEIGHBOR_WINDOW).max(1);
            let window = &ns[ns.len() - w..];
            let vx = window.iter().map(|s| s.vx).sum::<f64>() / w as f64;
            let vy = window.iter().map(|s| s.vy).sum::<f64>() / w as f64;
            let last = ns.last().unwrap();

            // Closest time-aligned approach between the neighbor's
            // constant-velocity extrapolation and the ego rollout.
            let mut min_d = f64::INFINITY;
            let mut min_i = 0usize;
            for (i, s) in states.iter().enumerate() {
                let t = (i + 1) as f64 * dt;
                let nx = last.x + vx * t;
                let ny = last.y + vy * t;
                let d = (s.x - nx).hypot(s.y - ny);
                if d < min_d {
                    min_d = d;
                    min_i = i;
                }
            }
            if min_d < reaction_distance {
                // Side the neighbor encroaches from, at closest approach:
                // positive cross product means it sits to the ego's left.
                let ego = &states[min_i];
                let t = (min_i + 1) as f64 * dt;
                let nx = last.x + vx * t;
                let ny = last.y + vy * t;
                let (hx, hy) = (ego.heading.cos(), ego.heading.sin());
                let cross = hx * (ny - ego.y) - hy * (nx - ego.x);
                side_sum += if cross >= 0.0 { 1.0 } else { -1.0 };
            }
        }

        if side_sum != 0.0 {
            // Evade away from the encroaching side, capped at the shared
            // evasion amplitude.
            let side = -side_sum.signum();
            let len = states.len();
            apply_lateral_evasion(states, EVASION_AMPLITUDE_M, side, len);
        }
        base
    }
}

impl Expert for InteractiveExpert {
    fn id(&self) -> &ExpertId {
        &self.id
    }

    fn predict_detailed(&self, scene: &Scene) -> Prediction {
        self.with_reaction(scene, REACTION_DISTANCE_M)
    }

    fn predict_jittered(&self, scene: &Scene, rng: &mut ChaCha8Rng) -> Trajectory {
        // Jittered reaction distance, +/-20%: near the reaction boundary the
        // passes flip between evading and not, which is exactly the
        // interaction-ambiguity signal the variance features pick up.
        let u: f64 = rng.gen_range(-1.0..1.0);
        let d = REACTION_DISTANCE_M * (1.0 + 0.2 * self.jitter_scale * u);
        self.with_reaction(scene, d).trajectory
    }
}
