use serde::{Deserialize, Serialize};

use super::CoreError;

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_heading(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = theta.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

/// A single agent state: 2D position, velocity, and heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    /// Position x in meters.
    pub x: f64,
    /// Position y in meters.
    pub y: f64,
    /// Velocity x in meters/second.
    pub vx: f64,
    /// Velocity y in meters/second.
    pub vy: f64,
    /// Heading in radians, normalized into `(-pi, pi]`.
    pub heading: f64,
}

impl AgentState {
    pub fn new(x: f64, y: f64, vx: f64, vy: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            vx,
            vy,
            heading: wrap_heading(heading),
        }
    }

    pub fn position(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.vx.is_finite()
            && self.vy.is_finite()
            && self.heading.is_finite()
    }
}

/// A timestamped 2D state sequence at a fixed sample rate.
///
/// States are spaced exactly `1/rate_hz` seconds apart; no timestamps are
/// stored. The sequence is never empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<AgentState>,
    pub rate_hz: f64,
}

impl Trajectory {
    pub fn new(states: Vec<AgentState>, rate_hz: f64) -> Result<Self, CoreError> {
        if states.is_empty() {
            return Err(CoreError::EmptyTrajectory);
        }
        if !(rate_hz > 0.0) || !rate_hz.is_finite() {
            return Err(CoreError::InvalidField {
                field: "rate_hz",
                reason: format!("must be positive and finite, got {rate_hz}"),
            });
        }
        if let Some(i) = states.iter().position(|s| !s.is_finite()) {
            return Err(CoreError::InvalidField {
                field: "states",
                reason: format!("non-finite state at index {i}"),
            });
        }
        Ok(Self { states, rate_hz })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.rate_hz
    }

    pub fn first(&self) -> &AgentState {
        &self.states[0]
    }

    pub fn last(&self) -> &AgentState {
        &self.states[self.states.len() - 1]
    }

    /// Positions as `(x, y)` pairs.
    pub fn positions(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.states.iter().map(|s| (s.x, s.y))
    }

    /// Sum of consecutive position-step lengths.
    pub fn path_length(&self) -> f64 {
        self.states
            .windows(2)
            .map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y))
            .sum()
    }
}

/// Scenario families the generator produces and the report slices on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioTag {
    Cruise,
    LeftTurn,
    CutIn,
    HighSpeed,
    Occlusion,
    Curve,
}

impl ScenarioTag {
    pub const ALL: [ScenarioTag; 6] = [
        ScenarioTag::Cruise,
        ScenarioTag::LeftTurn,
        ScenarioTag::CutIn,
        ScenarioTag::HighSpeed,
        ScenarioTag::Occlusion,
        ScenarioTag::Curve,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioTag::Cruise => "cruise",
            ScenarioTag::LeftTurn => "left_turn",
            ScenarioTag::CutIn => "cut_in",
            ScenarioTag::HighSpeed => "high_speed",
            ScenarioTag::Occlusion => "occlusion",
            ScenarioTag::Curve => "curve",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|t| t.as_str() == s)
    }
}

impl std::fmt::Display for ScenarioTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Reduced map context: a lane-curvature scalar plus an intersection flag.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MapContext {
    /// Lane curvature in 1/meters (signed).
    pub lane_curvature: f64,
    pub intersection: bool,
}

/// History/future horizon configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizons {
    pub t_history_s: f64,
    pub t_future_s: f64,
    pub rate_hz: f64,
}

impl Default for Horizons {
    fn default() -> Self {
        Self {
            t_history_s: 2.0,
            t_future_s: 4.0,
            rate_hz: 20.0,
        }
    }
}

impl Horizons {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.t_history_s > 0.0 && self.t_future_s > 0.0 && self.rate_hz > 0.0) {
            return Err(CoreError::InvalidField {
                field: "horizons",
                reason: "all fields must be positive".into(),
            });
        }
        let steps = self.t_future_s * self.rate_hz;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(CoreError::InvalidField {
                field: "t_future_s",
                reason: format!("t_future_s * rate_hz = {steps} is not an integer"),
            });
        }
        Ok(())
    }

    pub fn history_len(&self) -> usize {
        (self.t_history_s * self.rate_hz).round() as usize
    }

    pub fn future_len(&self) -> usize {
        (self.t_future_s * self.rate_hz).round() as usize
    }
}

/// One evaluation unit: ego history, neighbor histories, map context, and the
/// ground-truth future.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub id: String,
    pub tag: ScenarioTag,
    pub ego_history: Trajectory,
    pub neighbor_histories: Vec<Trajectory>,
    pub ground_truth_future: Trajectory,
    pub map_context: MapContext,
}

impl Scene {
    /// Checks the structural invariants against the given horizons.
    pub fn validate(&self, horizons: &Horizons) -> Result<(), CoreError> {
        if self.ego_history.len() != horizons.history_len() {
            return Err(CoreError::InvalidField {
                field: "ego_history",
                reason: format!(
                    "expected {} states, got {}",
                    horizons.history_len(),
                    self.ego_history.len()
                ),
            });
        }
        if self.ground_truth_future.len() != horizons.future_len() {
            return Err(CoreError::InvalidField {
                field: "ground_truth_future",
                reason: format!(
                    "expected {} states, got {}",
                    horizons.future_len(),
                    self.ground_truth_future.len()
                ),
            });
        }
        Ok(())
    }
}
