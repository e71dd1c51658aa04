use super::types::{Horizons, Trajectory};
use super::CoreError;

/// Average Displacement Error: mean L2 distance between predicted and
/// ground-truth positions over the horizon.
pub fn ade(pred: &Trajectory, truth: &Trajectory) -> Result<f64, CoreError> {
    if pred.is_empty() || truth.is_empty() {
        return Err(CoreError::EmptyTrajectory);
    }
    if pred.len() != truth.len() {
        return Err(CoreError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    let sum: f64 = pred
        .states
        .iter()
        .zip(&truth.states)
        .map(|(p, t)| (p.x - t.x).hypot(p.y - t.y))
        .sum();
    Ok(sum / pred.len() as f64)
}

/// Final Displacement Error: L2 distance at the last index.
pub fn fde(pred: &Trajectory, truth: &Trajectory) -> Result<f64, CoreError> {
    if pred.is_empty() || truth.is_empty() {
        return Err(CoreError::EmptyTrajectory);
    }
    if pred.len() != truth.len() {
        return Err(CoreError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    let p = pred.last();
    let t = truth.last();
    Ok((p.x - t.x).hypot(p.y - t.y))
}

/// Truncates a prediction to exactly the future horizon. Idempotent.
pub fn clamp_horizon(pred: &Trajectory, horizons: &Horizons) -> Result<Trajectory, CoreError> {
    let required = horizons.future_len();
    if pred.len() < required {
        return Err(CoreError::HorizonUnderrun {
            required,
            actual: pred.len(),
        });
    }
    Ok(Trajectory {
        states: pred.states[..required].to_vec(),
        rate_hz: pred.rate_hz,
    })
}

/// Oracle Realization Rate: percentage of the oracle gap closed by a gate.
///
/// May be negative (gate worse than baseline) or exceed 100 (gate beats the
/// oracle, which signals an oracle-computation bug and is flagged upstream).
pub fn orr(fde_baseline: f64, fde_gate: f64, fde_oracle: f64) -> Result<f64, CoreError> {
    if !(fde_baseline.is_finite() && fde_gate.is_finite() && fde_oracle.is_finite()) {
        return Err(CoreError::NonFinite { context: "orr inputs" });
    }
    if fde_baseline <= fde_oracle {
        return Err(CoreError::DegenerateGap {
            baseline: fde_baseline,
            oracle: fde_oracle,
        });
    }
    Ok(100.0 * (fde_baseline - fde_gate) / (fde_baseline - fde_oracle))
}
