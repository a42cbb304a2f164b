use chrono::{DateTime, Utc};
use patchr_rdf::Iri;
use serde::{Deserialize, Serialize};

use crate::model::{PatchBody, PatchGroup, PatchStatus};

/// One journal record. `sequence` starts at 1 and grows by one per record;
/// `at` never decreases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepositoryEvent {
    pub sequence: u64,
    pub at: DateTime<Utc>,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all_fields = "camelCase")]
pub enum EventKind {
    /// `patch_id` is the minted IRI, or the existing patch when `merged`.
    PatchSubmitted {
        patch_id: Iri,
        submitter: Iri,
        merged: bool,
        candidate: Box<PatchBody>,
    },
    VoteCast {
        patch_id: Iri,
        agent: Iri,
        position: VotePosition,
    },
    StatusChanged {
        patch_id: Iri,
        status: PatchStatus,
        by_agent: Iri,
    },
    GroupCreated {
        group: PatchGroup,
    },
    GroupAssigned {
        patch_id: Iri,
        group_id: Iri,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VotePosition {
    Advocate,
    Criticiser,
    Withdrawn,
}

impl std::str::FromStr for VotePosition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "advocate" => Ok(VotePosition::Advocate),
            "criticiser" | "criticizer" => Ok(VotePosition::Criticiser),
            "withdrawn" | "withdraw" => Ok(VotePosition::Withdrawn),
            _ => Err(format!("unknown vote position {s:?} (expected advocate, criticiser or withdrawn)")),
        }
    }
}
