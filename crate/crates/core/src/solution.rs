use serde::{Deserialize, Serialize};

use crate::epsap::PenaltyComponents;
use crate::model::Layout;

/// A layout accepted by one variable step of the sequential optimizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub variable: String,
    pub value: f64,
    pub objective: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    /// Stage-one generation in which the layout (before local search) first appeared.
    pub generation: usize,
    pub local_search_steps: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub optimization_trace: Vec<TraceEntry>,
}

/// A generated or optimised layout together with its scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub id: String,
    pub layout: Layout,
    pub fitness: f64,
    pub penalties: PenaltyComponents,
    #[serde(default)]
    pub thermal_objective: Option<f64>,
    #[serde(default)]
    pub provenance: Provenance,
}
