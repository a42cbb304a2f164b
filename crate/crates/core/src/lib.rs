//! Patch requests for Linked Data: the patch model and its Turtle encoding,
//! an event-journaled repository with duplicate merging and voting, SPARQL
//! UPDATE generation, and derivation of patches from quiz feedback.

pub mod codec;
pub mod feedback;
pub mod fixtures;
pub mod identity;
pub mod model;
pub mod registry;
pub mod repository;
pub mod update;
pub mod validate;
pub mod vocab;

pub use codec::{patch_from_turtle, patch_to_turtle, patches_to_turtle, CodecError, StructureError};
pub use feedback::{
    feedback_sentences, patch_from_feedback, FeedbackError, FeedbackVote, QuestionContext, SentenceTemplates,
    VoteKind,
};
pub use identity::canonical_key;
pub use model::{
    Patch, PatchBody, PatchGroup, PatchStatus, PatchType, PredicateObject, ProvenanceEvent, UpdateInstruction,
};
pub use registry::{Named, Registry};
pub use repository::{
    entity_report, query_patches, replay, report, snapshot_turtle, FileJournal, Journal, JournalError,
    MemoryJournal, PatchFilter, PatchOrder, PatchSummary, Repository, RepositoryError, RepositoryEvent,
    RepositoryState, SubmitOutcome, VotePosition,
};
pub use update::{
    apply_instruction, export_updates, to_sparql, ApplyReport, GraphMismatch, SparqlDialect, UpdateError,
};
pub use validate::{validate_body, validate_patch, Violation, ViolationCode};
