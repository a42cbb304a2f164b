//! Patch requests and their parts.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use patchr_rdf::{Iri, Term, TermError, Triple};
use serde::{Deserialize, Serialize};

use crate::vocab;

/// One predicate-object pair attached to the instruction's target subject.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PredicateObject {
    pub predicate: Iri,
    pub object: Term,
}

impl PredicateObject {
    pub fn new(predicate: Iri, object: impl Into<Term>) -> Self {
        PredicateObject {
            predicate,
            object: object.into(),
        }
    }
}

/// The insert/delete payload of a patch, scoped to one graph and one subject.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UpdateInstruction {
    pub target_graph: Iri,
    pub target_subject: Iri,
    #[serde(default)]
    pub insertions: BTreeSet<PredicateObject>,
    #[serde(default)]
    pub deletions: BTreeSet<PredicateObject>,
}

impl UpdateInstruction {
    pub fn new(target_graph: Iri, target_subject: Iri) -> Self {
        UpdateInstruction {
            target_graph,
            target_subject,
            insertions: BTreeSet::new(),
            deletions: BTreeSet::new(),
        }
    }

    pub fn with_insert(mut self, predicate: Iri, object: impl Into<Term>) -> Self {
        self.insertions.insert(PredicateObject::new(predicate, object));
        self
    }

    pub fn with_delete(mut self, predicate: Iri, object: impl Into<Term>) -> Self {
        self.deletions.insert(PredicateObject::new(predicate, object));
        self
    }

    pub fn insertion_triples(&self) -> Vec<Triple> {
        self.expand(&self.insertions)
    }

    pub fn deletion_triples(&self) -> Vec<Triple> {
        self.expand(&self.deletions)
    }

    fn expand(&self, pairs: &BTreeSet<PredicateObject>) -> Vec<Triple> {
        pairs
            .iter()
            .map(|po| {
                Triple::new(self.target_subject.clone(), po.predicate.clone(), po.object.clone())
                    .expect("IRI subject")
            })
            .collect()
    }
}

/// Who created (or co-reported) a patch, and when.
///
/// Field order gives the canonical provenance ordering: time, then service,
/// then actor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProvenanceEvent {
    pub performed_at: DateTime<Utc>,
    pub performed_by: Iri,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involved_actor: Option<Iri>,
}

impl ProvenanceEvent {
    pub fn new(performed_by: Iri, involved_actor: Option<Iri>, performed_at: DateTime<Utc>) -> Self {
        ProvenanceEvent {
            performed_at,
            performed_by,
            involved_actor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatchType {
    WrongFact,
    MissingFact,
    EncodingError,
    DatatypeError,
    Other(Iri),
}

impl PatchType {
    const NAMED: [(&'static str, PatchType); 4] = [
        ("WrongFact", PatchType::WrongFact),
        ("MissingFact", PatchType::MissingFact),
        ("EncodingError", PatchType::EncodingError),
        ("DatatypeError", PatchType::DatatypeError),
    ];

    pub fn to_iri(&self) -> Iri {
        match self {
            PatchType::Other(iri) => iri.clone(),
            named => vocab::pro(named.short_name().expect("named type")),
        }
    }

    /// Maps vocabulary IRIs back to the named variants.
    pub fn from_iri(iri: Iri) -> Self {
        iri.as_str()
            .strip_prefix(patchr_rdf::vocab::PRO)
            .and_then(|local| Self::NAMED.iter().find(|(name, _)| *name == local))
            .map_or(PatchType::Other(iri.clone()), |(_, t)| t.clone())
    }

    pub fn short_name(&self) -> Option<&'static str> {
        Self::NAMED.iter().find(|(_, t)| t == self).map(|(name, _)| *name)
    }
}

impl fmt::Display for PatchType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.short_name() {
            Some(name) => f.write_str(name),
            None => f.write_str(self.to_iri().as_str()),
        }
    }
}

impl FromStr for PatchType {
    type Err = TermError;

    /// Accepts a short name (`WrongFact`, case-insensitive, `-`/`_` ignored) or an IRI.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let folded: String = s.chars().filter(|c| !matches!(c, '-' | '_')).collect();
        if let Some((_, t)) = Self::NAMED.iter().find(|(name, _)| name.eq_ignore_ascii_case(&folded)) {
            return Ok(t.clone());
        }
        Iri::new(s).map(PatchType::from_iri)
    }
}

impl Serialize for PatchType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PatchType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatchStatus {
    #[default]
    Active,
    Resolved,
    Rejected,
}

impl PatchStatus {
    pub const ALL: [PatchStatus; 3] = [PatchStatus::Active, PatchStatus::Resolved, PatchStatus::Rejected];

    pub fn as_str(self) -> &'static str {
        match self {
            PatchStatus::Active => "active",
            PatchStatus::Resolved => "resolved",
            PatchStatus::Rejected => "rejected",
        }
    }

    pub fn is_terminal(self) -> bool {
        self != PatchStatus::Active
    }

    pub fn can_transition_to(self, next: PatchStatus) -> bool {
        self == PatchStatus::Active && next.is_terminal()
    }
}

impl fmt::Display for PatchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatchStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatchStatus::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown status {s:?} (expected active, resolved or rejected)"))
    }
}

/// Everything a patch carries except its repository-minted IRI. This is also
/// the shape of a submission candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatchBody {
    pub update: UpdateInstruction,
    pub dataset: Iri,
    #[serde(default)]
    pub types: BTreeSet<PatchType>,
    #[serde(default)]
    pub status: PatchStatus,
    #[serde(default)]
    pub advocates: BTreeSet<Iri>,
    #[serde(default)]
    pub criticisers: BTreeSet<Iri>,
    #[serde(default)]
    pub groups: BTreeSet<Iri>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    #[serde(default)]
    pub provenance: Vec<ProvenanceEvent>,
}

impl PatchBody {
    pub fn new(update: UpdateInstruction, dataset: Iri) -> Self {
        PatchBody {
            update,
            dataset,
            types: BTreeSet::new(),
            status: PatchStatus::Active,
            advocates: BTreeSet::new(),
            criticisers: BTreeSet::new(),
            groups: BTreeSet::new(),
            comment: None,
            provenance: Vec::new(),
        }
    }

    /// Inserts `event` at its place in the canonical provenance order.
    pub fn record_provenance(&mut self, event: ProvenanceEvent) {
        let at = self.provenance.partition_point(|e| e <= &event);
        self.provenance.insert(at, event);
    }

    pub fn latest_activity(&self) -> Option<DateTime<Utc>> {
        self.provenance.iter().map(|e| e.performed_at).max()
    }
}

/// A patch request held by the repository.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Patch {
    pub id: Iri,
    #[serde(flatten)]
    pub body: PatchBody,
}

impl Patch {
    pub fn new(id: Iri, body: PatchBody) -> Self {
        Patch { id, body }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchGroup {
    pub id: Iri,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}
