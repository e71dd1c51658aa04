//! Deterministic, seeded generator of synthetic scenes in six scenario
//! families, engineered so that different experts dominate different
//! families and the per-scene oracle has real headroom over any single
//! expert.
//!
//! Ground-truth futures are exact kinematic closed forms (or finely
//! integrated profiles), so they never violate acceleration or curvature
//! limits; measurement noise is applied to history states only, clamped at
//! four standard deviations.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{AgentState, Horizons, MapContext, Scene, ScenarioTag, Trajectory};
use crate::kinematics::{apply_lateral_evasion, unicycle_state};
use crate::seeding;

/// Amplitude of the cut-in lateral evasion response, shared with the
/// interaction-aware expert so that its reaction model matches the
/// generator's ground truth.
pub const EVASION_AMPLITUDE_M: f64 = 1.0;

/// Fraction of the ego history replaced by placeholder states in occlusion
/// scenes.
pub const OCCLUSION_CORRUPT_FRACTION: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("total scene count is zero")]
    ZeroTotalCount,

    #[error("need at least 2 scenes to split, got {n}")]
    TooFewScenes { n: usize },

    #[error("train fraction must be in (0, 1), got {fraction}")]
    InvalidFraction { fraction: f64 },

    #[error("invalid generator config: {reason}")]
    InvalidConfig { reason: String },
}

/// Closed interval of speeds in meters/second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedRange {
    pub min: f64,
    pub max: f64,
}

impl SpeedRange {
    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.max > self.min {
            rng.gen_range(self.min..self.max)
        } else {
            self.min
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Scenes to generate per scenario family.
    pub counts: BTreeMap<ScenarioTag, usize>,
    /// Per-axis position measurement noise on history states, meters.
    pub noise_position_std: f64,
    /// Per-axis velocity measurement noise on history states, meters/second.
    pub noise_velocity_std: f64,
    /// Per-family ego speed ranges.
    pub speed_ranges: BTreeMap<ScenarioTag, SpeedRange>,
    pub horizons: Horizons,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        let mut counts = BTreeMap::new();
        for tag in ScenarioTag::ALL {
            counts.insert(tag, 100);
        }
        let mut speed_ranges = BTreeMap::new();
        speed_ranges.insert(ScenarioTag::Cruise, SpeedRange::new(5.0, 15.0));
        speed_ranges.insert(ScenarioTag::LeftTurn, SpeedRange::new(3.0, 8.0));
        speed_ranges.insert(ScenarioTag::CutIn, SpeedRange::new(8.0, 18.0));
        speed_ranges.insert(ScenarioTag::HighSpeed, SpeedRange::new(25.0, 35.0));
        speed_ranges.insert(ScenarioTag::Occlusion, SpeedRange::new(2.5, 6.0));
        speed_ranges.insert(ScenarioTag::Curve, SpeedRange::new(4.0, 12.0));
        Self {
            seed: 42,
            counts,
            noise_position_std: 0.05,
            noise_velocity_std: 0.1,
            speed_ranges,
            horizons: Horizons::default(),
        }
    }
}

impl GeneratorConfig {
    /// Default benchmark config with a different seed.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Config with a single family populated; other counts zero.
    pub fn single_family(seed: u64, tag: ScenarioTag, count: usize) -> Self {
        let mut cfg = Self::with_seed(seed);
        for t in ScenarioTag::ALL {
            cfg.counts.insert(t, if t == tag { count } else { 0 });
        }
        cfg
    }

    pub fn total_count(&self) -> usize {
        self.counts.values().sum()
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.total_count() == 0 {
            return Err(GenError::ZeroTotalCount);
        }
        if self.noise_position_std < 0.0 || self.noise_velocity_std < 0.0 {
            return Err(GenError::InvalidConfig {
                reason: "noise stds must be non-negative".into(),
            });
        }
        for tag in ScenarioTag::ALL {
            if self.counts.get(&tag).copied().unwrap_or(0) > 0 {
                let r = self.speed_ranges.get(&tag).ok_or(GenError::InvalidConfig {
                    reason: format!("missing speed range for {tag}"),
                })?;
                if !(r.min > 0.0 && r.max >= r.min) {
                    return Err(GenError::InvalidConfig {
                        reason: format!("bad speed range for {tag}: [{}, {}]", r.min, r.max),
                    });
                }
            }
        }
        self.horizons.validate().map_err(|e| GenError::InvalidConfig {
            reason: e.to_string(),
        })
    }
}

/// Generates the configured scene set. Deterministic for a fixed config:
/// each scene draws from its own sub-stream keyed by (seed, family, index).
pub fn generate(config: &GeneratorConfig) -> Result<Vec<Scene>, GenError> {
    config.validate()?;
    let mut scenes = Vec::with_capacity(config.total_count());
    for (family_ord, tag) in ScenarioTag::ALL.into_iter().enumerate() {
        let count = config.counts.get(&tag).copied().unwrap_or(0);
        for idx in 0..count {
            let mut rng = seeding::rng(config.seed, &[0x5ce0e5, family_ord as u64, idx as u64]);
            scenes.push(gen_scene(tag, idx, config, &mut rng));
        }
    }
    Ok(scenes)
}

/// Deterministic stratified split: each family's proportion is preserved to
/// within one scene, and output order follows the input order.
pub fn split(
    scenes: Vec<Scene>,
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<Scene>, Vec<Scene>), GenError> {
    if scenes.len() < 2 {
        return Err(GenError::TooFewScenes { n: scenes.len() });
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(GenError::InvalidFraction {
            fraction: train_fraction,
        });
    }

    let mut groups: BTreeMap<ScenarioTag, Vec<usize>> = BTreeMap::new();
    for (i, s) in scenes.iter().enumerate() {
        groups.entry(s.tag).or_default().push(i);
    }

    let mut is_train = vec![false; scenes.len()];
    for (ord, (_tag, mut idxs)) in groups.into_iter().enumerate() {
        let mut rng = seeding::rng(seed, &[0x5b117, ord as u64]);
        // Fisher-Yates on the group's indices.
        for i in (1..idxs.len()).rev() {
            let j = rng.gen_range(0..=i);
            idxs.swap(i, j);
        }
        let n_train = ((idxs.len() as f64) * train_fraction).round() as usize;
        for &i in idxs.iter().take(n_train) {
            is_train[i] = true;
        }
    }

    // Guard against rounding emptying one side.
    if is_train.iter().all(|&t| t) {
        if let Some(last) = is_train.last_mut() {
            *last = false;
        }
    }
    if is_train.iter().all(|&t| !t) {
        if let Some(first) = is_train.first_mut() {
            *first = true;
        }
    }

    let mut train = Vec::new();
    let mut val = Vec::new();
    for (i, s) in scenes.into_iter().enumerate() {
        if is_train[i] {
            train.push(s);
        } else {
            val.push(s);
        }
    }
    Ok((train, val))
}

// ---------------------------------------------------------------------------
// Per-family construction
// ---------------------------------------------------------------------------

struct NoiseModel {
    pos_std: f64,
    vel_std: f64,
}

impl NoiseModel {
    /// Gaussian sample clamped at 4 sigma, so noise bounds are hard.
    fn bounded_gauss(&self, rng: &mut ChaCha8Rng, std: f64) -> f64 {
        if std == 0.0 {
            return 0.0;
        }
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        let g = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        (g * std).clamp(-4.0 * std, 4.0 * std)
    }

    fn perturb(&self, s: &AgentState, rng: &mut ChaCha8Rng) -> AgentState {
        AgentState::new(
            s.x + self.bounded_gauss(rng, self.pos_std),
            s.y + self.bounded_gauss(rng, self.pos_std),
            s.vx + self.bounded_gauss(rng, self.vel_std),
            s.vy + self.bounded_gauss(rng, self.vel_std),
            s.heading,
        )
    }
}

fn gen_scene(tag: ScenarioTag, idx: usize, config: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Scene {
    let h = &config.horizons;
    let dt = 1.0 / h.rate_hz;
    let hist_len = h.history_len();
    let fut_len = h.future_len();
    let noise = NoiseModel {
        pos_std: config.noise_position_std,
        vel_std: config.noise_velocity_std,
    };

    let x0 = rng.gen_range(-100.0..100.0);
    let y0 = rng.gen_range(-100.0..100.0);
    let heading0 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let speed = config.speed_ranges[&tag].sample(rng);

    // True ego states sampled at t_i = (i - (hist_len - 1)) * dt, so the last
    // history state sits at t = 0 and the future begins one tick later.
    let times = |i: usize| (i as f64 - (hist_len - 1) as f64) * dt;
    let total = hist_len + fut_len;

    let mut true_states: Vec<AgentState> = Vec::with_capacity(total);
    let mut map_context = MapContext::default();
    let mut neighbors: Vec<Trajectory> = Vec::new();
    let mut occl_kind = false;

    match tag {
        ScenarioTag::Cruise | ScenarioTag::HighSpeed => {
            for i in 0..total {
                true_states.push(unicycle_state(x0, y0, heading0, speed, 0.0, times(i)));
            }
            // Occasional distant parallel neighbor for geometric variety.
            if tag == ScenarioTag::Cruise && rng.gen_bool(0.3) {
                neighbors.push(ambient_neighbor(x0, y0, heading0, speed, hist_len, dt, rng, &noise));
            }
        }
        ScenarioTag::Curve | ScenarioTag::Occlusion => {
            let mag = rng.gen_range(0.15..0.45);
            let yaw_rate = if rng.gen_bool(0.5) { mag } else { -mag };
            occl_kind = tag == ScenarioTag::Occlusion;
            for i in 0..total {
                true_states.push(unicycle_state(x0, y0, heading0, speed, yaw_rate, times(i)));
            }
            map_context.lane_curvature = yaw_rate / speed;
        }
        ScenarioTag::LeftTurn => {
            let profile = LeftTurnProfile::new(speed, h.t_future_s);
            for i in 0..total {
                true_states.push(profile.state_at(x0, y0, heading0, times(i), dt));
            }
            map_context.intersection = true;
            map_context.lane_curvature = profile.yaw_rate / (profile.v_turn);
        }
        ScenarioTag::CutIn => {
            for i in 0..total {
                true_states.push(unicycle_state(x0, y0, heading0, speed, 0.0, times(i)));
            }
            let (neighbor, side) = cutin_neighbor(x0, y0, heading0, speed, hist_len, dt, rng, &noise);
            neighbors.push(neighbor);
            // Ego responds with a smooth lateral evasion away from the
            // approaching neighbor over the whole future.
            let fut = &mut true_states[hist_len..];
            apply_lateral_evasion(fut, EVASION_AMPLITUDE_M, -side, fut_len);
        }
    }

    // Observed history: measurement noise on positions and velocities.
    let mut history: Vec<AgentState> = true_states[..hist_len]
        .iter()
        .map(|s| noise.perturb(s, rng))
        .collect();

    if occl_kind {
        // The agent only became visible halfway through the window: the
        // earlier samples are placeholders frozen at the first detection.
        let corrupt = ((hist_len as f64) * OCCLUSION_CORRUPT_FRACTION).round() as usize;
        let anchor = history[corrupt];
        for s in history.iter_mut().take(corrupt) {
            *s = AgentState::new(anchor.x, anchor.y, 0.0, 0.0, anchor.heading);
        }
    }

    let future: Vec<AgentState> = true_states[hist_len..].to_vec();

    Scene {
        id: format!("{}-{idx:04}", tag.as_str()),
        tag,
        ego_history: Trajectory {
            states: history,
            rate_hz: h.rate_hz,
        },
        neighbor_histories: neighbors,
        ground_truth_future: Trajectory {
            states: future,
            rate_hz: h.rate_hz,
        },
        map_context,
    }
}

/// Left-turn future: heading sweeps +pi/2 over the future at constant yaw
/// rate; speed follows a decelerate/hold/accelerate trapezoid. The turn
/// begins 0.5 s before the end of the history so the trailing window is
/// already rotating.
struct LeftTurnProfile {
    v_entry: f64,
    v_turn: f64,
    yaw_rate: f64,
    t_future: f64,
    turn_lead_s: f64,
}

impl LeftTurnProfile {
    fn new(v_entry: f64, t_future: f64) -> Self {
        Self {
            v_entry,
            v_turn: 0.6 * v_entry,
            yaw_rate: std::f64::consts::FRAC_PI_2 / t_future,
            t_future,
            turn_lead_s: 0.5,
        }
    }

    fn speed_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.v_entry;
        }
        let tf = self.t_future;
        if t < 0.25 * tf {
            let u = t / (0.25 * tf);
            self.v_entry + (self.v_turn - self.v_entry) * u
        } else if t < 0.75 * tf {
            self.v_turn
        } else if t < tf {
            let u = (t - 0.75 * tf) / (0.25 * tf);
            self.v_turn + (self.v_entry - self.v_turn) * u
        } else {
            self.v_entry
        }
    }

    fn heading_at(&self, heading0: f64, t: f64) -> f64 {
        if t <= -self.turn_lead_s {
            heading0
        } else {
            heading0 + self.yaw_rate * (t + self.turn_lead_s)
        }
    }

    /// Pose at time `t` relative to the anchor pose at t = 0 (the last
    /// history state). Positions are integrated with fine midpoint substeps.
    fn state_at(&self, x0: f64, y0: f64, heading0: f64, t: f64, dt: f64) -> AgentState {
        // heading0 here is the heading at t = 0.
        let sub = (dt / 16.0).copysign(if t >= 0.0 { 1.0 } else { -1.0 });
        let n = ((t / sub).abs().round() as usize).max(0);
        let mut x = x0;
        let mut y = y0;
        let mut u = 0.0;
        for _ in 0..n {
            let tm = u + sub * 0.5;
            let v = self.speed_at(tm);
            let th = self.heading_at(heading0, tm);
            x += v * th.cos() * sub;
            y += v * th.sin() * sub;
            u += sub;
        }
        let v = self.speed_at(t);
        let th = self.heading_at(heading0, t);
        AgentState::new(x, y, v * th.cos(), v * th.sin(), th)
    }
}

/// Distant parallel neighbor that never interacts with the ego.
#[allow(clippy::too_many_arguments)]
fn ambient_neighbor(
    x0: f64,
    y0: f64,
    heading0: f64,
    speed: f64,
    hist_len: usize,
    dt: f64,
    rng: &mut ChaCha8Rng,
    noise: &NoiseModel,
) -> Trajectory {
    let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let lateral = side * rng.gen_range(35.0..70.0);
    let ahead = rng.gen_range(-20.0..20.0);
    let (fx, fy) = (heading0.cos(), heading0.sin());
    let (lx, ly) = (-heading0.sin(), heading0.cos());
    let nx = x0 + fx * ahead + lx * lateral;
    let ny = y0 + fy * ahead + ly * lateral;
    let n_speed = speed * rng.gen_range(0.8..1.2);
    let states: Vec<AgentState> = (0..hist_len)
        .map(|i| {
            let t = (i as f64 - (hist_len - 1) as f64) * dt;
            let s = unicycle_state(nx, ny, heading0, n_speed, 0.0, t);
            noise.perturb(&s, rng)
        })
        .collect();
    Trajectory {
        states,
        rate_hz: 1.0 / dt,
    }
}

/// Converging cut-in neighbor. Returns the noisy neighbor history and the
/// side it approaches from (+1 = from the ego's left).
#[allow(clippy::too_many_arguments)]
fn cutin_neighbor(
    x0: f64,
    y0: f64,
    heading0: f64,
    ego_speed: f64,
    hist_len: usize,
    dt: f64,
    rng: &mut ChaCha8Rng,
    noise: &NoiseModel,
) -> (Trajectory, f64) {
    let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let gap0 = rng.gen_range(7.0..11.0);
    let lat0 = side * rng.gen_range(2.5..3.5);
    let dv = rng.gen_range(1.2..2.2);
    let t_cross = rng.gen_range(3.5..4.5);
    let v_lat = -lat0 / t_cross;

    let (fx, fy) = (heading0.cos(), heading0.sin());
    let (lx, ly) = (-heading0.sin(), heading0.cos());
    // Pose at t = 0 (end of history).
    let nx = x0 + fx * gap0 + lx * lat0;
    let ny = y0 + fy * gap0 + ly * lat0;
    let vx = fx * (ego_speed - dv) + lx * v_lat;
    let vy = fy * (ego_speed - dv) + ly * v_lat;

    let states: Vec<AgentState> = (0..hist_len)
        .map(|i| {
            let t = (i as f64 - (hist_len - 1) as f64) * dt;
            let s = AgentState::new(nx + vx * t, ny + vy * t, vx, vy, vy.atan2(vx));
            noise.perturb(&s, rng)
        })
        .collect();
    (
        Trajectory {
            states,
            rate_hz: 1.0 / dt,
        },
        side,
    )
}
