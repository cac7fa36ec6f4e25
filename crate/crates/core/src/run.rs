use std::time::Duration;

use serde::Serialize;

use crate::model::{Sequence, Time};

/// Outcome of one heuristic run.
///
/// `elapsed` is wall time and is left out of the serialized form so that
/// JSON output stays reproducible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunResult {
    pub best_sequence: Sequence,
    pub best_value: Time,
    /// Shaking plus local-search iterations performed.
    pub iterations: u64,
    /// 3-opt restarts performed.
    pub perturbations: u64,
    #[serde(skip)]
    pub elapsed: Duration,
    pub seed: Option<u64>,
    /// Best value after each iteration, when recording was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<Time>>,
}

impl RunResult {
    pub(crate) fn deterministic(
        best_sequence: Sequence,
        best_value: Time,
        elapsed: Duration,
    ) -> Self {
        RunResult {
            best_sequence,
            best_value,
            iterations: 0,
            perturbations: 0,
            elapsed,
            seed: None,
            trace: None,
        }
    }
}
