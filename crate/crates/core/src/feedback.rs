//! Quiz-answer feedback turned into patch candidates.

use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use patchr_rdf::{Iri, Term, Triple};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{PatchBody, PatchType, ProvenanceEvent, UpdateInstruction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeedbackError {
    #[error("question source subject must be an IRI, found {0}")]
    NonIriSource(String),
    #[error("question answer must not be a blank node")]
    BlankAnswer,
    #[error("distractors must not include the source subject <{0}>")]
    SourceAmongDistractors(Iri),
    #[error("vote on <{0}> does not fit the question")]
    InconsistentVote(Iri),
}

/// A question generated from `source_triple`: its object is shown, its
/// subject is the right answer, `distractors` are the wrong choices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", try_from = "RawContext")]
pub struct QuestionContext {
    source_triple: Triple,
    distractor_subjects: BTreeSet<Iri>,
    dataset: Iri,
    target_graph: Iri,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawContext {
    source_triple: Triple,
    #[serde(default)]
    distractor_subjects: BTreeSet<Iri>,
    dataset: Iri,
    target_graph: Iri,
}

impl TryFrom<RawContext> for QuestionContext {
    type Error = FeedbackError;

    fn try_from(raw: RawContext) -> Result<Self, Self::Error> {
        QuestionContext::new(raw.source_triple, raw.distractor_subjects, raw.dataset, raw.target_graph)
    }
}

impl QuestionContext {
    pub fn new(
        source_triple: Triple,
        distractor_subjects: BTreeSet<Iri>,
        dataset: Iri,
        target_graph: Iri,
    ) -> Result<Self, FeedbackError> {
        let Term::Iri(subject) = source_triple.subject() else {
            return Err(FeedbackError::NonIriSource(source_triple.subject().to_string()));
        };
        if source_triple.object().is_blank() {
            return Err(FeedbackError::BlankAnswer);
        }
        if distractor_subjects.contains(subject) {
            return Err(FeedbackError::SourceAmongDistractors(subject.clone()));
        }
        Ok(QuestionContext {
            source_triple,
            distractor_subjects,
            dataset,
            target_graph,
        })
    }

    pub fn source_triple(&self) -> &Triple {
        &self.source_triple
    }

    pub fn source_subject(&self) -> &Iri {
        self.source_triple.subject().as_iri().expect("checked on construction")
    }

    pub fn property(&self) -> &Iri {
        self.source_triple.predicate()
    }

    pub fn object(&self) -> &Term {
        self.source_triple.object()
    }

    pub fn distractor_subjects(&self) -> &BTreeSet<Iri> {
        &self.distractor_subjects
    }

    pub fn dataset(&self) -> &Iri {
        &self.dataset
    }

    pub fn target_graph(&self) -> &Iri {
        &self.target_graph
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "subject", rename_all = "camelCase")]
pub enum VoteKind {
    NotAProperty(Iri),
    AlsoAProperty(Iri),
}

impl VoteKind {
    pub fn subject(&self) -> &Iri {
        match self {
            VoteKind::NotAProperty(s) | VoteKind::AlsoAProperty(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackVote {
    #[serde(flatten)]
    pub kind: VoteKind,
    pub actor: Iri,
    pub at: DateTime<Utc>,
}

/// Sentence patterns; `{object}`, `{property}` and `{subject}` are replaced
/// by labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceTemplates {
    pub not_a_property: String,
    pub also_a_property: String,
}

impl Default for SentenceTemplates {
    fn default() -> Self {
        SentenceTemplates {
            not_a_property: "{object} is not the {property} of {subject}.".into(),
            also_a_property: "{object} is also the {property} of {subject}.".into(),
        }
    }
}

/// Display label of a term: the IRI local name with underscores as spaces,
/// or a literal's lexical form.
pub fn label(term: &Term) -> String {
    match term {
        Term::Iri(iri) => iri_label(iri),
        Term::Literal(lit) => lit.lexical().to_owned(),
        Term::BlankNode(b) => b.to_string(),
    }
}

fn iri_label(iri: &Iri) -> String {
    let local = iri.local_name();
    let local = if local.is_empty() { iri.as_str() } else { local };
    local.replace('_', " ")
}

fn render(template: &str, ctx: &QuestionContext, subject: &Iri) -> String {
    template
        .replace("{object}", &label(ctx.object()))
        .replace("{property}", &iri_label(ctx.property()))
        .replace("{subject}", &iri_label(subject))
}

pub fn feedback_sentences(ctx: &QuestionContext) -> Vec<(VoteKind, String)> {
    feedback_sentences_with(ctx, &SentenceTemplates::default())
}

/// The not-a-property sentence for the source subject, then one
/// also-a-property sentence per distractor in IRI order.
pub fn feedback_sentences_with(ctx: &QuestionContext, templates: &SentenceTemplates) -> Vec<(VoteKind, String)> {
    let source = ctx.source_subject();
    std::iter::once((
        VoteKind::NotAProperty(source.clone()),
        render(&templates.not_a_property, ctx, source),
    ))
    .chain(ctx.distractor_subjects.iter().map(|d| {
        (
            VoteKind::AlsoAProperty(d.clone()),
            render(&templates.also_a_property, ctx, d),
        )
    }))
    .collect()
}

/// The patch candidate a single vote stands for.
pub fn patch_from_feedback(
    ctx: &QuestionContext,
    vote: &FeedbackVote,
    service_agent: &Iri,
) -> Result<PatchBody, FeedbackError> {
    let base = |subject: &Iri| UpdateInstruction::new(ctx.target_graph.clone(), subject.clone());
    let (update, patch_type) = match &vote.kind {
        VoteKind::NotAProperty(s) if s == ctx.source_subject() => (
            base(s).with_delete(ctx.property().clone(), ctx.object().clone()),
            PatchType::WrongFact,
        ),
        VoteKind::AlsoAProperty(s) if ctx.distractor_subjects.contains(s) => (
            base(s).with_insert(ctx.property().clone(), ctx.object().clone()),
            PatchType::MissingFact,
        ),
        other => return Err(FeedbackError::InconsistentVote(other.subject().clone())),
    };
    let mut body = PatchBody::new(update, ctx.dataset.clone());
    body.types.insert(patch_type);
    body.advocates.insert(vote.actor.clone());
    body.provenance.push(ProvenanceEvent::new(
        service_agent.clone(),
        Some(vote.actor.clone()),
        vote.at,
    ));
    Ok(body)
}
