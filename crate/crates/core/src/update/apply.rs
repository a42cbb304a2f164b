use patchr_rdf::{Graph, Iri, Triple};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::UpdateInstruction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("instruction targets <{target}> but the graph is <{graph}>")]
pub struct GraphMismatch {
    pub graph: Iri,
    pub target: Iri,
}

/// Triples actually changed, plus requested deletions that were not present.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApplyReport {
    pub added: usize,
    pub removed: usize,
    pub absent_deletions: Vec<Triple>,
}

/// Removes the instruction's deletions, then adds its insertions. An unnamed
/// graph accepts any target graph.
pub fn apply_instruction(graph: &mut Graph, update: &UpdateInstruction) -> Result<ApplyReport, GraphMismatch> {
    if let Some(name) = graph.name() {
        if name != &update.target_graph {
            return Err(GraphMismatch {
                graph: name.clone(),
                target: update.target_graph.clone(),
            });
        }
    }
    let mut report = ApplyReport::default();
    for t in update.deletion_triples() {
        if graph.remove(&t) {
            report.removed += 1;
        } else {
            report.absent_deletions.push(t);
        }
    }
    for t in update.insertion_triples() {
        if graph.insert(t) {
            report.added += 1;
        }
    }
    Ok(report)
}
