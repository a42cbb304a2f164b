use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use patchr_rdf::{CanonicalError, Iri};

use super::event::{EventKind, RepositoryEvent, VotePosition};
use super::RepositoryError;
use crate::identity::canonical_key;
use crate::model::{Patch, PatchBody, PatchGroup, PatchStatus, ProvenanceEvent};
use crate::validate::validate_body;

/// Materialized repository contents.
///
/// `by_key` maps the canonical key of every non-terminal patch to its id and
/// holds nothing else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepositoryState {
    patches: BTreeMap<Iri, Patch>,
    by_key: BTreeMap<String, Iri>,
    groups: BTreeMap<Iri, PatchGroup>,
    next_sequence: u64,
    minted: u64,
    last_at: Option<DateTime<Utc>>,
}

impl Default for RepositoryState {
    fn default() -> Self {
        RepositoryState::new()
    }
}

impl RepositoryState {
    pub fn new() -> Self {
        RepositoryState {
            patches: BTreeMap::new(),
            by_key: BTreeMap::new(),
            groups: BTreeMap::new(),
            next_sequence: 1,
            minted: 0,
            last_at: None,
        }
    }

    pub fn patches(&self) -> impl Iterator<Item = &Patch> {
        self.patches.values()
    }

    pub fn patch(&self, id: &Iri) -> Option<&Patch> {
        self.patches.get(id)
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn groups(&self) -> impl Iterator<Item = &PatchGroup> {
        self.groups.values()
    }

    pub fn group(&self, id: &Iri) -> Option<&PatchGroup> {
        self.groups.get(id)
    }

    pub fn next_sequence(&self) -> u64 {
        self.next_sequence
    }

    pub fn last_event_at(&self) -> Option<DateTime<Utc>> {
        self.last_at
    }

    /// The non-terminal patch carrying the same change, if any.
    pub fn find_equivalent(&self, body: &PatchBody) -> Result<Option<&Patch>, CanonicalError> {
        let key = canonical_key(&body.update, &body.dataset)?;
        Ok(self.by_key.get(&key).map(|id| &self.patches[id]))
    }

    pub fn key_index(&self) -> &BTreeMap<String, Iri> {
        &self.by_key
    }

    fn mint(&self, base: &Iri) -> Iri {
        let sep = if base.as_str().ends_with(['/', '#']) { "" } else { "/" };
        Iri::new(format!("{base}{sep}patch/{}", self.minted + 1)).expect("base IRI plus path segment")
    }

    fn existing(&self, id: &Iri) -> Result<&Patch, RepositoryError> {
        self.patches.get(id).ok_or_else(|| RepositoryError::UnknownPatch(id.clone()))
    }

    fn active(&self, id: &Iri) -> Result<&Patch, RepositoryError> {
        let patch = self.existing(id)?;
        if patch.body.status.is_terminal() {
            return Err(RepositoryError::TerminalPatch(id.clone(), patch.body.status));
        }
        Ok(patch)
    }

    pub fn decide_submit(&self, base: &Iri, candidate: &PatchBody, submitter: &Iri) -> Result<EventKind, RepositoryError> {
        let violations = validate_body(candidate);
        if !violations.is_empty() {
            return Err(RepositoryError::Validation(violations));
        }
        let (patch_id, merged) = match self.find_equivalent(candidate).map_err(|e| RepositoryError::Invalid(e.to_string()))? {
            Some(existing) if existing.body.criticisers.contains(submitter) => {
                return Err(RepositoryError::ConflictingPosition {
                    patch: existing.id.clone(),
                    agent: submitter.clone(),
                })
            }
            Some(existing) => (existing.id.clone(), true),
            None => (self.mint(base), false),
        };
        Ok(EventKind::PatchSubmitted {
            patch_id,
            submitter: submitter.clone(),
            merged,
            candidate: Box::new(candidate.clone()),
        })
    }

    pub fn decide_vote(&self, patch_id: &Iri, agent: &Iri, position: VotePosition) -> Result<EventKind, RepositoryError> {
        self.active(patch_id)?;
        Ok(EventKind::VoteCast {
            patch_id: patch_id.clone(),
            agent: agent.clone(),
            position,
        })
    }

    pub fn decide_status(&self, patch_id: &Iri, status: PatchStatus, by_agent: &Iri) -> Result<EventKind, RepositoryError> {
        let current = self.existing(patch_id)?.body.status;
        if !current.can_transition_to(status) {
            return Err(RepositoryError::IllegalTransition { from: current, to: status });
        }
        Ok(EventKind::StatusChanged {
            patch_id: patch_id.clone(),
            status,
            by_agent: by_agent.clone(),
        })
    }

    pub fn decide_group(&self, group: &PatchGroup) -> Result<EventKind, RepositoryError> {
        if self.groups.contains_key(&group.id) {
            return Err(RepositoryError::DuplicateGroup(group.id.clone()));
        }
        Ok(EventKind::GroupCreated { group: group.clone() })
    }

    pub fn decide_assign(&self, patch_id: &Iri, group_id: &Iri) -> Result<EventKind, RepositoryError> {
        self.existing(patch_id)?;
        if !self.groups.contains_key(group_id) {
            return Err(RepositoryError::UnknownGroup(group_id.clone()));
        }
        Ok(EventKind::GroupAssigned {
            patch_id: patch_id.clone(),
            group_id: group_id.clone(),
        })
    }

    /// Wraps `kind` with the next sequence number; `now` is clamped so that
    /// event times never decrease.
    pub fn stamp(&self, kind: EventKind, now: DateTime<Utc>) -> RepositoryEvent {
        let at = match self.last_at {
            Some(last) if last > now => last,
            _ => now,
        };
        RepositoryEvent {
            sequence: self.next_sequence,
            at,
            kind,
        }
    }

    /// Applies one event. On error the state is unchanged.
    pub fn apply(&mut self, event: &RepositoryEvent) -> Result<(), String> {
        if event.sequence != self.next_sequence {
            return Err(format!("expected sequence {}, found {}", self.next_sequence, event.sequence));
        }
        if self.last_at.is_some_and(|last| event.at < last) {
            return Err(format!("timestamp {} goes backwards", event.at));
        }
        self.apply_kind(&event.kind, event.at)?;
        self.next_sequence += 1;
        self.last_at = Some(event.at);
        Ok(())
    }

    fn apply_kind(&mut self, kind: &EventKind, at: DateTime<Utc>) -> Result<(), String> {
        match kind {
            EventKind::PatchSubmitted {
                patch_id,
                submitter,
                merged,
                candidate,
            } => {
                if !validate_body(candidate).is_empty() {
                    return Err(format!("submitted candidate for {patch_id} is invalid"));
                }
                let key = canonical_key(&candidate.update, &candidate.dataset).map_err(|e| e.to_string())?;
                if *merged {
                    if self.by_key.get(&key) != Some(patch_id) {
                        return Err(format!("merge target {patch_id} does not hold this change"));
                    }
                    let patch = self.patches.get_mut(patch_id).expect("indexed patch exists");
                    if patch.body.criticisers.contains(submitter) {
                        return Err(format!("{submitter} criticises {patch_id}"));
                    }
                    let performed_by = candidate
                        .provenance
                        .last()
                        .map_or_else(|| submitter.clone(), |e| e.performed_by.clone());
                    patch.body.advocates.insert(submitter.clone());
                    patch.body.types.extend(candidate.types.iter().cloned());
                    patch
                        .body
                        .record_provenance(ProvenanceEvent::new(performed_by, Some(submitter.clone()), at));
                } else {
                    if self.patches.contains_key(patch_id) {
                        return Err(format!("patch {patch_id} already exists"));
                    }
                    if self.by_key.contains_key(&key) {
                        return Err(format!("new patch {patch_id} duplicates an open patch"));
                    }
                    let mut body = (**candidate).clone();
                    body.status = PatchStatus::Active;
                    body.advocates = [submitter.clone()].into_iter().collect();
                    body.criticisers.clear();
                    self.patches.insert(patch_id.clone(), Patch::new(patch_id.clone(), body));
                    self.by_key.insert(key, patch_id.clone());
                    self.minted += 1;
                }
            }
            EventKind::VoteCast { patch_id, agent, position } => {
                let patch = self.active(patch_id).map_err(|e| e.to_string())?;
                let id = patch.id.clone();
                let body = &mut self.patches.get_mut(&id).expect("checked").body;
                body.advocates.remove(agent);
                body.criticisers.remove(agent);
                match position {
                    VotePosition::Advocate => {
                        body.advocates.insert(agent.clone());
                    }
                    VotePosition::Criticiser => {
                        body.criticisers.insert(agent.clone());
                    }
                    VotePosition::Withdrawn => {}
                }
            }
            EventKind::StatusChanged { patch_id, status, .. } => {
                let patch = self.existing(patch_id).map_err(|e| e.to_string())?;
                if !patch.body.status.can_transition_to(*status) {
                    return Err(format!("illegal transition {} -> {status}", patch.body.status));
                }
                let key = canonical_key(&patch.body.update, &patch.body.dataset).map_err(|e| e.to_string())?;
                self.by_key.remove(&key);
                self.patches.get_mut(patch_id).expect("checked").body.status = *status;
            }
            EventKind::GroupCreated { group } => {
                if self.groups.contains_key(&group.id) {
                    return Err(format!("group {} already exists", group.id));
                }
                self.groups.insert(group.id.clone(), group.clone());
            }
            EventKind::GroupAssigned { patch_id, group_id } => {
                if !self.groups.contains_key(group_id) {
                    return Err(format!("unknown group {group_id}"));
                }
                let patch = self
                    .patches
                    .get_mut(patch_id)
                    .ok_or_else(|| format!("unknown patch {patch_id}"))?;
                patch.body.groups.insert(group_id.clone());
            }
        }
        Ok(())
    }

    /// Checks the state-wide invariants; used by tests.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut expected = BTreeMap::new();
        for patch in self.patches.values() {
            let violations = validate_body(&patch.body);
            if !violations.is_empty() {
                return Err(format!("{} is invalid: {violations:?}", patch.id));
            }
            if !patch.body.status.is_terminal() {
                let key = canonical_key(&patch.body.update, &patch.body.dataset).map_err(|e| e.to_string())?;
                if expected.insert(key, patch.id.clone()).is_some() {
                    return Err(format!("two open patches share the key of {}", patch.id));
                }
            }
        }
        if expected != self.by_key {
            return Err("key index out of sync".into());
        }
        Ok(())
    }
}

/// Rebuilds state from a journal.
pub fn replay<'a>(events: impl IntoIterator<Item = &'a RepositoryEvent>) -> Result<RepositoryState, RepositoryError> {
    let mut state = RepositoryState::new();
    for (i, event) in events.into_iter().enumerate() {
        state
            .apply(event)
            .map_err(|reason| RepositoryError::CorruptJournal { position: i + 1, reason })?;
    }
    Ok(state)
}
