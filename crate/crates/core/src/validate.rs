//! Invariant checks for patches and update instructions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Patch, PatchBody};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationCode {
    EmptyInstruction,
    InsertDeleteOverlap,
    BlankNodeObject,
    AdvocateCriticiserOverlap,
    MissingType,
    MissingProvenance,
    ProvenanceOutOfOrder,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::EmptyInstruction => "EmptyInstruction",
            ViolationCode::InsertDeleteOverlap => "InsertDeleteOverlap",
            ViolationCode::BlankNodeObject => "BlankNodeObject",
            ViolationCode::AdvocateCriticiserOverlap => "AdvocateCriticiserOverlap",
            ViolationCode::MissingType => "MissingType",
            ViolationCode::MissingProvenance => "MissingProvenance",
            ViolationCode::ProvenanceOutOfOrder => "ProvenanceOutOfOrder",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

pub fn validate_patch(patch: &Patch) -> Vec<Violation> {
    validate_body(&patch.body)
}

/// Checks a patch body (a submission candidate). Empty result means valid.
pub fn validate_body(body: &PatchBody) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |code, message: String| out.push(Violation { code, message });
    let update = &body.update;

    if update.insertions.is_empty() && update.deletions.is_empty() {
        push(
            ViolationCode::EmptyInstruction,
            "update instruction neither inserts nor deletes anything".into(),
        );
    }
    if let Some(po) = update.insertions.intersection(&update.deletions).next() {
        push(
            ViolationCode::InsertDeleteOverlap,
            format!("<{}> {} is both inserted and deleted", po.predicate, po.object),
        );
    }
    if let Some(po) = update
        .insertions
        .iter()
        .chain(&update.deletions)
        .find(|po| po.object.is_blank())
    {
        push(
            ViolationCode::BlankNodeObject,
            format!("object {} of <{}> is a blank node", po.object, po.predicate),
        );
    }
    if let Some(agent) = body.advocates.intersection(&body.criticisers).next() {
        push(
            ViolationCode::AdvocateCriticiserOverlap,
            format!("<{agent}> is both advocate and criticiser"),
        );
    }
    if body.types.is_empty() {
        push(ViolationCode::MissingType, "patch has no patch type".into());
    }
    if body.provenance.is_empty() {
        push(ViolationCode::MissingProvenance, "patch has no provenance event".into());
    }
    if body
        .provenance
        .windows(2)
        .any(|w| w[0].performed_at > w[1].performed_at)
    {
        push(
            ViolationCode::ProvenanceOutOfOrder,
            "provenance timestamps decrease".into(),
        );
    }
    out
}
