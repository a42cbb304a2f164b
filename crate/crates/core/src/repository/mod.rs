//! The patch repository: event-journaled state with duplicate merging,
//! voting, status transitions and filtered retrieval.

mod event;
mod journal;
mod query;
mod state;

use chrono::{DateTime, Utc};
use patchr_rdf::{Iri, PrefixMap};
use thiserror::Error;

pub use event::{EventKind, RepositoryEvent, VotePosition};
pub use journal::{FileJournal, Journal, JournalError, MemoryJournal};
pub use query::{
    entity_report, ordering_registry, query_patches, report, MostPopular, MostRecent, PatchFilter, PatchOrder,
    PatchOrdering, PatchSummary,
};
pub use state::{replay, RepositoryState};

use crate::codec::patches_to_turtle;
use crate::model::{PatchBody, PatchGroup, PatchStatus};
use crate::validate::Violation;

#[derive(Debug, Error)]
pub enum RepositoryError {
    #[error("patch is invalid: {}", .0.iter().map(|v| v.code.as_str()).collect::<Vec<_>>().join(", "))]
    Validation(Vec<Violation>),
    #[error("{0}")]
    Invalid(String),
    #[error("unknown patch <{0}>")]
    UnknownPatch(Iri),
    #[error("patch <{0}> is {1} and accepts no votes")]
    TerminalPatch(Iri, PatchStatus),
    #[error("illegal status transition {from} -> {to}")]
    IllegalTransition { from: PatchStatus, to: PatchStatus },
    #[error("<{agent}> criticises the equivalent patch <{patch}>")]
    ConflictingPosition { patch: Iri, agent: Iri },
    #[error("group <{0}> already exists")]
    DuplicateGroup(Iri),
    #[error("unknown group <{0}>")]
    UnknownGroup(Iri),
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("corrupt journal at record {position}: {reason}")]
    CorruptJournal { position: usize, reason: String },
    #[error(transparent)]
    Journal(#[from] JournalError),
}

impl RepositoryError {
    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            RepositoryError::Validation(_) => "Validation",
            RepositoryError::Invalid(_) => "Invalid",
            RepositoryError::UnknownPatch(_) => "UnknownPatch",
            RepositoryError::TerminalPatch(..) => "TerminalPatch",
            RepositoryError::IllegalTransition { .. } => "IllegalTransition",
            RepositoryError::ConflictingPosition { .. } => "ConflictingPosition",
            RepositoryError::DuplicateGroup(_) => "DuplicateGroup",
            RepositoryError::UnknownGroup(_) => "UnknownGroup",
            RepositoryError::InvalidFilter(_) => "InvalidFilter",
            RepositoryError::CorruptJournal { .. } => "CorruptJournal",
            RepositoryError::Journal(_) => "Journal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmitOutcome {
    pub patch_id: Iri,
    pub merged: bool,
}

/// State plus the journal it is persisted to. Every mutation is appended to
/// the journal before it is applied.
#[derive(Debug)]
pub struct Repository<J: Journal> {
    state: RepositoryState,
    journal: J,
    base: Iri,
}

impl<J: Journal> Repository<J> {
    /// Replays the journal's records; new patch IRIs are minted under `base`.
    pub fn open(mut journal: J, base: Iri) -> Result<Self, RepositoryError> {
        let events = journal.load()?;
        let state = replay(&events)?;
        Ok(Repository { state, journal, base })
    }

    pub fn state(&self) -> &RepositoryState {
        &self.state
    }

    pub fn journal(&self) -> &J {
        &self.journal
    }

    pub fn base(&self) -> &Iri {
        &self.base
    }

    fn commit(&mut self, kind: EventKind, now: DateTime<Utc>) -> Result<RepositoryEvent, RepositoryError> {
        let event = self.state.stamp(kind, now);
        self.journal.append(&event)?;
        // Decided events always apply; a failure here means the decision and
        // apply rules disagree.
        self.state
            .apply(&event)
            .map_err(|reason| RepositoryError::CorruptJournal {
                position: event.sequence as usize,
                reason,
            })?;
        Ok(event)
    }

    pub fn submit_patch(
        &mut self,
        candidate: &PatchBody,
        submitter: &Iri,
        now: DateTime<Utc>,
    ) -> Result<SubmitOutcome, RepositoryError> {
        let kind = self.state.decide_submit(&self.base, candidate, submitter)?;
        let EventKind::PatchSubmitted { patch_id, merged, .. } = &kind else {
            unreachable!("submission decides a PatchSubmitted event")
        };
        let outcome = SubmitOutcome {
            patch_id: patch_id.clone(),
            merged: *merged,
        };
        self.commit(kind, now)?;
        Ok(outcome)
    }

    pub fn cast_vote(
        &mut self,
        patch_id: &Iri,
        agent: &Iri,
        position: VotePosition,
        now: DateTime<Utc>,
    ) -> Result<(), RepositoryError> {
        let kind = self.state.decide_vote(patch_id, agent, position)?;
        self.commit(kind, now).map(drop)
    }

    pub fn change_status(
        &mut self,
        patch_id: &Iri,
        status: PatchStatus,
        by_agent: &Iri,
        now: DateTime<Utc>,
    ) -> Result<(), RepositoryError> {
        let kind = self.state.decide_status(patch_id, status, by_agent)?;
        self.commit(kind, now).map(drop)
    }

    pub fn create_group(&mut self, group: &PatchGroup, now: DateTime<Utc>) -> Result<(), RepositoryError> {
        let kind = self.state.decide_group(group)?;
        self.commit(kind, now).map(drop)
    }

    pub fn assign_group(&mut self, patch_id: &Iri, group_id: &Iri, now: DateTime<Utc>) -> Result<(), RepositoryError> {
        let kind = self.state.decide_assign(patch_id, group_id)?;
        self.commit(kind, now).map(drop)
    }
}

/// Turtle document of every patch and group in `state`.
pub fn snapshot_turtle(state: &RepositoryState, prefixes: &PrefixMap) -> String {
    patches_to_turtle(state.patches(), state.groups(), prefixes)
}
