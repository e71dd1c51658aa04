//! The three-expert pool behind a uniform interface: plain prediction,
//! seeded stochastic passes for uncertainty probing, and perturbed-input
//! prediction for stability probing.
//!
//! The experts are intentionally complementary closed-form predictors:
//!
//! * `physics` — constant-velocity Kalman filter, smooth and precise on
//!   straight motion, blind to turns.
//! * `curvature` — constant-turn-rate unicycle rollout from the trailing
//!   history window, tracks arcs and turn onsets.
//! * `interactive` — curvature rollout plus a neighbor-repulsion lateral
//!   evasion, the only expert that anticipates cut-in responses.

mod curvature;
mod interactive;
mod physics;

pub use curvature::CurvatureExpert;
pub use interactive::InteractiveExpert;
pub use physics::PhysicsExpert;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{Horizons, Scene, Trajectory};
use crate::seeding;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpertError {
    #[error("stochastic passes require passes >= 2, got {passes}")]
    TooFewPasses { passes: usize },

    #[error("no expert with index {index}")]
    UnknownExpert { index: usize },
}

/// Identity and relative inference cost of one expert.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertId {
    pub index: usize,
    pub name: String,
    /// Relative inference cost; the physics expert anchors at 1.
    pub cost_weight: f64,
}

/// A prediction plus diagnostic metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub trajectory: Trajectory,
    /// Set when the expert fell back to a degraded rollout (for example a
    /// zero-motion hold on a degenerate history).
    pub fallback: bool,
}

/// Uniform expert interface. `predict` is referentially transparent; the
/// stochastic pass takes an explicit RNG so parallel evaluation stays
/// deterministic regardless of scheduling.
pub trait Expert: Send + Sync {
    fn id(&self) -> &ExpertId;

    fn predict_detailed(&self, scene: &Scene) -> Prediction;

    fn predict(&self, scene: &Scene) -> Trajectory {
        self.predict_detailed(scene).trajectory
    }

    /// One stochastic pass with this expert's parameter jitter drawn from
    /// `rng`. With `jitter_scale` 0 this must equal `predict`.
    fn predict_jittered(&self, scene: &Scene, rng: &mut ChaCha8Rng) -> Trajectory;
}

/// Pool configuration: cost weights, jitter scales, and the shared horizons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    pub horizons: Horizons,
    /// Scales every expert's stochastic parameter jitter; 0 disables it.
    pub jitter_scale: f64,
    /// Zeroes the physics expert's jitter, simulating an uncertainty blind
    /// spot on that expert. Off by default.
    pub physics_blind_spot: bool,
    pub cost_physics: f64,
    pub cost_curvature: f64,
    pub cost_interactive: f64,
}

impl Default for PoolConfig {
    fn default() -> Self {
        Self {
            horizons: Horizons::default(),
            jitter_scale: 1.0,
            physics_blind_spot: false,
            cost_physics: 1.0,
            cost_curvature: 3.0,
            cost_interactive: 10.0,
        }
    }
}

/// The fixed three-expert pool.
pub struct ExpertPool {
    experts: Vec<Box<dyn Expert>>,
    horizons: Horizons,
}

/// Index of the physics expert in the standard pool.
pub const PHYSICS: usize = 0;
/// Index of the curvature expert in the standard pool.
pub const CURVATURE: usize = 1;
/// Index of the interaction-aware expert in the standard pool.
pub const INTERACTIVE: usize = 2;

/// Number of experts in the pool.
pub const NUM_EXPERTS: usize = 3;

impl ExpertPool {
    pub fn standard(config: PoolConfig) -> Self {
        let jitter_physics = if config.physics_blind_spot {
            0.0
        } else {
            config.jitter_scale
        };
        let experts: Vec<Box<dyn Expert>> = vec![
            Box::new(PhysicsExpert::new(
                ExpertId {
                    index: PHYSICS,
                    name: "physics".into(),
                    cost_weight: config.cost_physics,
                },
                config.horizons,
                jitter_physics,
            )),
            Box::new(CurvatureExpert::new(
                ExpertId {
                    index: CURVATURE,
                    name: "curvature".into(),
                    cost_weight: config.cost_curvature,
                },
                config.horizons,
                config.jitter_scale,
            )),
            Box::new(InteractiveExpert::new(
                ExpertId {
                    index: INTERACTIVE,
                    name: "interactive".into(),
                    cost_weight: config.cost_interactive,
                },
                config.horizons,
                config.jitter_scale,
            )),
        ];
        Self {
            experts,
            horizons: config.horizons,
        }
    }

    pub fn horizons(&self) -> &Horizons {
        &self.horizons
    }

    pub fn len(&self) -> usize {
        self.experts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experts.is_empty()
    }

    pub fn expert(&self, index: usize) -> Result<&dyn Expert, ExpertError> {
        self.experts
            .get(index)
            .map(|e| e.as_ref())
            .ok_or(ExpertError::UnknownExpert { index })
    }

    pub fn experts(&self) -> impl Iterator<Item = &dyn Expert> {
        self.experts.iter().map(|e| e.as_ref())
    }

    pub fn ids(&self) -> Vec<ExpertId> {
        self.experts.iter().map(|e| e.id().clone()).collect()
    }

    /// Total cost of running every expert once.
    pub fn total_cost(&self) -> f64 {
        self.experts.iter().map(|e| e.id().cost_weight).sum()
    }

    /// Runs `passes` seeded stochastic forward passes of one expert.
    /// Deterministic for a fixed (seed, scene, expert): each pass derives its
    /// own stream from the scene id and pass index.
    pub fn predict_stochastic(
        &self,
        expert_index: usize,
        scene: &Scene,
        passes: usize,
        seed: u64,
    ) -> Result<Vec<Trajectory>, ExpertError> {
        if passes < 2 {
            return Err(ExpertError::TooFewPasses { passes });
        }
        let expert = self.expert(expert_index)?;
        let scene_salt = seeding::hash_str(&scene.id);
        Ok((0..passes)
            .map(|p| {
                let mut rng = seeding::rng(seed, &[0xacce5, scene_salt, expert_index as u64, p as u64]);
                expert.predict_jittered(scene, &mut rng)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{clamp_horizon, fde, ScenarioTag};
    use crate::scenario::{generate, GeneratorConfig};

    fn pool() -> ExpertPool {
        ExpertPool::standard(PoolConfig::default())
    }

    fn scenes(tag: ScenarioTag, n: usize, seed: u64, noisy: bool) -> Vec<crate::core::Scene> {
        let mut cfg = GeneratorConfig::single_family(seed, tag, n);
        if !noisy {
            cfg.noise_position_std = 0.0;
            cfg.noise_velocity_std = 0.0;
        }
        generate(&cfg).unwrap()
    }

    #[test]
    fn all_outputs_cover_the_horizon() {
        let pool = pool();
        for tag in ScenarioTag::ALL {
            for scene in scenes(tag, 3, 5, true) {
                for expert in pool.experts() {
                    let t = expert.predict(&scene);
                    assert!(t.len() >= 80, "{} on {}: {}", expert.id().name, scene.id, t.len());
                }
            }
        }
    }

    #[test]
    fn predict_is_referentially_transparent() {
        let pool = pool();
        for scene in scenes(ScenarioTag::Curve, 2, 9, true) {
            for expert in pool.experts() {
                assert_eq!(expert.predict(&scene), expert.predict(&scene));
            }
        }
    }

    #[test]
    fn stochastic_passes_count_and_determinism() {
        let pool = pool();
        let scene = &scenes(ScenarioTag::Cruise, 1, 3, true)[0];
        let a = pool.predict_stochastic(CURVATURE, scene, 8, 42).unwrap();
        assert_eq!(a.len(), 8);
        let b = pool.predict_stochastic(CURVATURE, scene, 8, 42).unwrap();
        assert_eq!(a, b);
        let c = pool.predict_stochastic(CURVATURE, scene, 8, 43).unwrap();
        assert_ne!(a, c);
        assert!(matches!(
            pool.predict_stochastic(CURVATURE, scene, 1, 42),
            Err(ExpertError::TooFewPasses { passes: 1 })
        ));
    }

    #[test]
    fn zero_jitter_makes_passes_identical() {
        let cfg = PoolConfig {
            jitter_scale: 0.0,
            ..PoolConfig::default()
        };
        let pool = ExpertPool::standard(cfg);
        let scene = &scenes(ScenarioTag::Curve, 1, 3, true)[0];
        for idx in 0..NUM_EXPERTS {
            let passes = pool.predict_stochastic(idx, scene, 4, 42).unwrap();
            let base = pool.expert(idx).unwrap().predict(scene);
            for p in &passes {
                assert_eq!(p, &base, "expert {idx} jitter not disabled");
            }
        }
    }

    #[test]
    fn physics_blind_spot_switch_zeroes_only_physics() {
        let cfg = PoolConfig {
            physics_blind_spot: true,
            ..PoolConfig::default()
        };
        let pool = ExpertPool::standard(cfg);
        let scene = &scenes(ScenarioTag::Curve, 1, 3, true)[0];
        let phys = pool.predict_stochastic(PHYSICS, scene, 4, 42).unwrap();
        assert!(phys.windows(2).all(|w| w[0] == w[1]));
        let curv = pool.predict_stochastic(CURVATURE, scene, 4, 42).unwrap();
        assert!(curv.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn noise_free_cruise_physics_is_exact() {
        let pool = pool();
        let h = *pool.horizons();
        for scene in scenes(ScenarioTag::Cruise, 10, 21, false) {
            let pred = pool.expert(PHYSICS).unwrap().predict(&scene);
            let clamped = clamp_horizon(&pred, &h).unwrap();
            let err = fde(&clamped, &scene.ground_truth_future).unwrap();
            assert!(err < 1e-9, "{}: fde {err}", scene.id);
        }
    }

    #[test]
    fn noise_free_curve_curvature_is_near_exact() {
        let pool = pool();
        let h = *pool.horizons();
        for scene in scenes(ScenarioTag::Curve, 10, 22, false) {
            let pred = pool.expert(CURVATURE).unwrap().predict(&scene);
            let clamped = clamp_horizon(&pred, &h).unwrap();
            let err = fde(&clamped, &scene.ground_truth_future).unwrap();
            assert!(err < 0.01, "{}: fde {err}", scene.id);
        }
    }

    #[test]
    fn noise_free_curve_physics_is_strictly_worse_than_curvature() {
        let pool = pool();
        let h = *pool.horizons();
        for scene in scenes(ScenarioTag::Curve, 10, 23, false) {
            let p = clamp_horizon(&pool.expert(PHYSICS).unwrap().predict(&scene), &h).unwrap();
            let c = clamp_horizon(&pool.expert(CURVATURE).unwrap().predict(&scene), &h).unwrap();
            let fp = fde(&p, &scene.ground_truth_future).unwrap();
            let fc = fde(&c, &scene.ground_truth_future).unwrap();
            assert!(fp > fc, "{}: physics {fp} <= curvature {fc}", scene.id);
        }
    }

    #[test]
    fn straight_history_makes_curvature_match_physics() {
        let pool = pool();
        for scene in scenes(ScenarioTag::Cruise, 5, 24, false) {
            let p = pool.expert(PHYSICS).unwrap().predict(&scene);
            let c = pool.expert(CURVATURE).unwrap().predict(&scene);
            for (a, b) in p.states.iter().zip(&c.states) {
                let d = (a.x - b.x).hypot(a.y - b.y);
                assert!(d < 1e-6, "{}: divergence {d}", scene.id);
            }
        }
    }

    #[test]
    fn interactive_equals_curvature_without_neighbors() {
        let pool = pool();
        for scene in scenes(ScenarioTag::Curve, 5, 25, true) {
            assert!(scene.neighbor_histories.is_empty());
            let c = pool.expert(CURVATURE).unwrap().predict(&scene);
            let i = pool.expert(INTERACTIVE).unwrap().predict(&scene);
            assert_eq!(c, i, "{}", scene.id);
        }
    }

    #[test]
    fn far_neighbor_leaves_interactive_untouched() {
        let pool = pool();
        // Ambient cruise neighbors sit 35+ meters out and run parallel.
        let with_neighbors: Vec<_> = scenes(ScenarioTag::Cruise, 40, 26, true)
            .into_iter()
            .filter(|s| !s.neighbor_histories.is_empty())
            .collect();
        assert!(!with_neighbors.is_empty());
        for scene in with_neighbors {
            let c = pool.expert(CURVATURE).unwrap().predict(&scene);
            let i = pool.expert(INTERACTIVE).unwrap().predict(&scene);
            for (a, b) in c.states.iter().zip(&i.states) {
                let d = (a.x - b.x).hypot(a.y - b.y);
                assert!(d < 1e-9, "{}: far neighbor moved prediction {d}", scene.id);
            }
        }
    }

    #[test]
    fn interactive_wins_most_cutin_scenes() {
        let pool = pool();
        let h = *pool.horizons();
        let scenes = scenes(ScenarioTag::CutIn, 100, 42, true);
        let mut wins = 0usize;
        for scene in &scenes {
            let mut fdes = [0.0; NUM_EXPERTS];
            for (k, expert) in pool.experts().enumerate() {
                let pred = clamp_horizon(&expert.predict(scene), &h).unwrap();
                fdes[k] = fde(&pred, &scene.ground_truth_future).unwrap();
            }
            if fdes[INTERACTIVE] < fdes[PHYSICS] && fdes[INTERACTIVE] < fdes[CURVATURE] {
                wins += 1;
            }
        }
        assert!(wins >= 80, "interactive won only {wins}/100 cut-in scenes");
    }

    #[test]
    fn degenerate_history_falls_back_to_hold() {
        let pool = pool();
        let mut scene = scenes(ScenarioTag::Cruise, 1, 30, false)[0].clone();
        let anchor = *scene.ego_history.last();
        for s in scene.ego_history.states.iter_mut() {
            *s = crate::core::AgentState::new(anchor.x, anchor.y, 0.0, 0.0, anchor.heading);
        }
        let pred = pool.expert(CURVATURE).unwrap().predict_detailed(&scene);
        assert!(pred.fallback);
        for s in &pred.trajectory.states {
            assert!((s.x - anchor.x).abs() < 1e-9);
            assert!((s.y - anchor.y).abs() < 1e-9);
        }
    }

    #[test]
    fn kalman_velocity_matches_mean_finite_difference_on_cruise() {
        // On straight scenes the filtered terminal velocity agrees with the
        // telescoped finite-difference velocity of the noisy history to
        // within 3 sigma of the combined estimation noise.
        let pool = pool();
        let scenes = scenes(ScenarioTag::Cruise, 200, 77, true);
        let cfg = GeneratorConfig::default();
        let dt = 1.0 / 20.0;
        let span = 39.0 * dt;
        // FD velocity noise: two clamped position errors over the span, plus
        // filter residual of comparable scale.
        let sigma = (2.0f64).sqrt() * cfg.noise_position_std / span * 2.0;
        let mut violations = 0usize;
        for scene in &scenes {
            let hist = &scene.ego_history.states;
            let first = hist.first().unwrap();
            let last = hist.last().unwrap();
            let fd_vx = (last.x - first.x) / span;
            let fd_vy = (last.y - first.y) / span;
            let pred = pool.expert(PHYSICS).unwrap().predict(&scene);
            // Terminal filtered velocity is the rollout's constant velocity.
            let v = pred.states[0];
            if (v.vx - fd_vx).abs() > 3.0 * sigma || (v.vy - fd_vy).abs() > 3.0 * sigma {
                violations += 1;
            }
        }
        // 3-sigma bound with slack for the small-sample tail.
        assert!(violations <= 10, "{violations}/200 scenes outside 3 sigma");
    }
}
