//! gatekit: dynamic per-sample expert selection for trajectory forecasting.
//!
//! The crate generates synthetic driving scenes in six scenario families,
//! runs a pool of complementary trajectory experts, extracts model-internal
//! meta-features, trains a family of gating strategies (centered on a
//! pairwise ranking gate with an optional semantic supervisor), and reports
//! ADE/FDE/ORR with slice and ablation tables.

pub mod cli;
pub mod core;
pub mod experts;
pub mod kinematics;
pub mod scenario;
pub mod seeding;
