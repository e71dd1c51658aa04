//! Domain types, trajectory arithmetic, and the displacement metrics shared
//! by every other module.

mod metrics;
mod types;

pub use metrics::{ade, clamp_horizon, fde, orr};
pub use types::{AgentState, Horizons, MapContext, Scene, ScenarioTag, Trajectory};

use thiserror::Error;

/// Contract violations raised by trajectory arithmetic and metrics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("trajectory length mismatch: pred has {pred} states, truth has {truth}")]
    LengthMismatch { pred: usize, truth: usize },

    #[error("prediction shorter than horizon: required {required} states, got {actual}")]
    HorizonUnderrun { required: usize, actual: usize },

    #[error("degenerate oracle gap: baseline FDE {baseline} must exceed oracle FDE {oracle}")]
    DegenerateGap { baseline: f64, oracle: f64 },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid {field}: {reason}")]
    InvalidField { field: &'static str, reason: String },
}
