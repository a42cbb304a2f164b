//! Turtle encoding of patch requests.
//!
//! A patch is a `pro:Patch` subject with one `pro:hasUpdate` node typed
//! `guo:UpdateInstruction` (carrying `guo:target_graph`, `guo:target_subject`
//! and `guo:insert`/`guo:delete` nodes of predicate-object pairs), plus
//! advocate/criticiser/group links, `pro:appliesTo`, a lowercase
//! `pro:status` literal, `pro:patchType`s, an optional `pro:comment`, and one
//! `prv:DataCreation` node per provenance event.

use chrono::{DateTime, SecondsFormat, Utc};
use patchr_rdf::{
    parse_turtle, serialize_turtle, BlankNode, Graph, Iri, Literal, PrefixMap, Term, Triple, TurtleError,
};
use thiserror::Error;

use crate::model::{Patch, PatchBody, PatchGroup, PatchStatus, PatchType, PredicateObject, ProvenanceEvent, UpdateInstruction};
use crate::validate::{validate_patch, Violation};
use crate::vocab::{guo, pro, prv, rdf_type, rdfs, xsd_date_time};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("patch subject is a blank node; patches need an IRI")]
    BlankPatchId,
    #[error("no pro:hasUpdate")]
    MissingUpdateInstruction,
    #[error("more than one pro:hasUpdate")]
    MultipleUpdateInstructions,
    #[error("malformed update instruction: {0}")]
    MalformedUpdate(String),
    #[error("malformed provenance: {0}")]
    MalformedProvenance(String),
    #[error("no pro:appliesTo dataset")]
    MissingDataset,
    #[error("more than one pro:appliesTo dataset")]
    MultipleDatasets,
    #[error("malformed pro:status: {0}")]
    MalformedStatus(String),
    #[error("malformed {property}: {reason}")]
    MalformedProperty { property: &'static str, reason: String },
}

impl StructureError {
    pub fn code(&self) -> &'static str {
        match self {
            StructureError::BlankPatchId => "BlankPatchId",
            StructureError::MissingUpdateInstruction => "MissingUpdateInstruction",
            StructureError::MultipleUpdateInstructions => "MultipleUpdateInstructions",
            StructureError::MalformedUpdate(_) => "MalformedUpdate",
            StructureError::MalformedProvenance(_) => "MalformedProvenance",
            StructureError::MissingDataset => "MissingDataset",
            StructureError::MultipleDatasets => "MultipleDatasets",
            StructureError::MalformedStatus(_) => "MalformedStatus",
            StructureError::MalformedProperty { .. } => "MalformedProperty",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error(transparent)]
    Parse(#[from] TurtleError),
    #[error("patch {patch}: {error}")]
    Structure { patch: String, error: StructureError },
    #[error("patch is invalid: {}", .0.iter().map(|v| v.code.as_str()).collect::<Vec<_>>().join(", "))]
    Invalid(Vec<Violation>),
}

/// Hands out fresh blank-node labels so several patches can share a graph.
#[derive(Debug, Default)]
pub struct BlankAllocator {
    next: usize,
}

impl BlankAllocator {
    pub fn fresh(&mut self) -> Term {
        let node = BlankNode::new(format!("n{}", self.next)).expect("generated label");
        self.next += 1;
        Term::BlankNode(node)
    }
}

fn add(graph: &mut Graph, s: &Term, p: Iri, o: impl Into<Term>) {
    graph.insert(Triple::new(s.clone(), p, o).expect("subject is IRI or blank"));
}

pub fn format_timestamp(at: &DateTime<Utc>) -> String {
    at.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

/// Adds the triples describing `patch` to `graph`.
pub fn write_patch(graph: &mut Graph, patch: &Patch, blanks: &mut BlankAllocator) {
    let body = &patch.body;
    let id = Term::Iri(patch.id.clone());
    add(graph, &id, rdf_type(), pro("Patch"));

    let update = blanks.fresh();
    add(graph, &id, pro("hasUpdate"), update.clone());
    add(graph, &update, rdf_type(), guo("UpdateInstruction"));
    add(graph, &update, guo("target_graph"), body.update.target_graph.clone());
    add(graph, &update, guo("target_subject"), body.update.target_subject.clone());
    for (property, pairs) in [("insert", &body.update.insertions), ("delete", &body.update.deletions)] {
        if pairs.is_empty() {
            continue;
        }
        let container = blanks.fresh();
        add(graph, &update, guo(property), container.clone());
        for po in pairs {
            add(graph, &container, po.predicate.clone(), po.object.clone());
        }
    }

    for agent in &body.advocates {
        add(graph, &id, pro("hasAdvocate"), agent.clone());
    }
    for agent in &body.criticisers {
        add(graph, &id, pro("hasCriticiser"), agent.clone());
    }
    for group in &body.groups {
        add(graph, &id, pro("memberOf"), group.clone());
    }
    add(graph, &id, pro("appliesTo"), body.dataset.clone());
    add(graph, &id, pro("status"), Literal::string(body.status.as_str()));
    for t in &body.types {
        add(graph, &id, pro("patchType"), t.to_iri());
    }
    if let Some(comment) = &body.comment {
        add(graph, &id, pro("comment"), Literal::string(comment.clone()));
    }
    for event in &body.provenance {
        let node = blanks.fresh();
        add(graph, &id, pro("hasProvenance"), node.clone());
        add(graph, &node, rdf_type(), prv("DataCreation"));
        add(graph, &node, prv("performedBy"), event.performed_by.clone());
        if let Some(actor) = &event.involved_actor {
            add(graph, &node, prv("involvedActor"), actor.clone());
        }
        let at = Literal::typed(format_timestamp(&event.performed_at), xsd_date_time()).expect("dateTime literal");
        add(graph, &node, prv("performedAt"), at);
    }
}

pub fn write_group(graph: &mut Graph, group: &PatchGroup) {
    let id = Term::Iri(group.id.clone());
    add(graph, &id, rdf_type(), pro("PatchGroup"));
    add(graph, &id, rdfs("label"), Literal::string(group.label.clone()));
    if let Some(description) = &group.description {
        add(graph, &id, rdfs("comment"), Literal::string(description.clone()));
    }
}

/// Serializes one valid patch as a Turtle document.
pub fn patch_to_turtle(patch: &Patch, prefixes: &PrefixMap) -> Result<String, CodecError> {
    let violations = validate_patch(patch);
    if !violations.is_empty() {
        return Err(CodecError::Invalid(violations));
    }
    let mut graph = Graph::new();
    write_patch(&mut graph, patch, &mut BlankAllocator::default());
    Ok(serialize_turtle(&graph, prefixes))
}

/// Serializes a collection of patches (and groups) into one document.
pub fn patches_to_turtle<'a>(
    patches: impl IntoIterator<Item = &'a Patch>,
    groups: impl IntoIterator<Item = &'a PatchGroup>,
    prefixes: &PrefixMap,
) -> String {
    let mut graph = Graph::new();
    let mut blanks = BlankAllocator::default();
    for patch in patches {
        write_patch(&mut graph, patch, &mut blanks);
    }
    for group in groups {
        write_group(&mut graph, group);
    }
    serialize_turtle(&graph, prefixes)
}

/// Reads every `pro:Patch` subject of a Turtle document, sorted by IRI.
pub fn patch_from_turtle(document: &str) -> Result<Vec<Patch>, CodecError> {
    let (graph, _) = parse_turtle(document, None)?;
    patches_from_graph(&graph)
}

pub fn patches_from_graph(graph: &Graph) -> Result<Vec<Patch>, CodecError> {
    let patch_class = Term::Iri(pro("Patch"));
    let mut subjects: Vec<&Term> = graph.subjects(&rdf_type(), &patch_class);
    subjects.sort();
    subjects
        .into_iter()
        .map(|subject| {
            read_patch(graph, subject).map_err(|error| CodecError::Structure {
                patch: subject.to_string(),
                error,
            })
        })
        .collect()
}

fn read_patch(graph: &Graph, subject: &Term) -> Result<Patch, StructureError> {
    let Term::Iri(id) = subject else {
        return Err(StructureError::BlankPatchId);
    };
    let update = match graph.objects(subject, &pro("hasUpdate")).as_slice() {
        [] => return Err(StructureError::MissingUpdateInstruction),
        [node] => read_update(graph, node)?,
        _ => return Err(StructureError::MultipleUpdateInstructions),
    };
    let dataset = match graph.objects(subject, &pro("appliesTo")).as_slice() {
        [] => return Err(StructureError::MissingDataset),
        [Term::Iri(iri)] => iri.clone(),
        [other] => {
            return Err(StructureError::MalformedProperty {
                property: "pro:appliesTo",
                reason: format!("{other} is not an IRI"),
            })
        }
        _ => return Err(StructureError::MultipleDatasets),
    };
    let mut body = PatchBody::new(update, dataset);

    body.status = match graph.objects(subject, &pro("status")).as_slice() {
        [] => PatchStatus::Active,
        [Term::Literal(lit)] => lit
            .lexical()
            .parse()
            .map_err(StructureError::MalformedStatus)?,
        [other] => return Err(StructureError::MalformedStatus(other.to_string())),
        _ => return Err(StructureError::MalformedStatus("more than one status".into())),
    };
    body.advocates = iris(graph, subject, "hasAdvocate", "pro:hasAdvocate")?.into_iter().collect();
    body.criticisers = iris(graph, subject, "hasCriticiser", "pro:hasCriticiser")?.into_iter().collect();
    body.groups = iris(graph, subject, "memberOf", "pro:memberOf")?.into_iter().collect();
    body.types = iris(graph, subject, "patchType", "pro:patchType")?
        .into_iter()
        .map(PatchType::from_iri)
        .collect();
    body.comment = match graph.objects(subject, &pro("comment")).as_slice() {
        [] => None,
        [Term::Literal(lit)] => Some(lit.lexical().to_owned()),
        _ => {
            return Err(StructureError::MalformedProperty {
                property: "pro:comment",
                reason: "expected a single literal".into(),
            })
        }
    };
    let mut provenance = graph
        .objects(subject, &pro("hasProvenance"))
        .into_iter()
        .map(|node| read_provenance(graph, node))
        .collect::<Result<Vec<_>, _>>()?;
    provenance.sort();
    body.provenance = provenance;
    Ok(Patch::new(id.clone(), body))
}

fn iris(graph: &Graph, subject: &Term, local: &str, property: &'static str) -> Result<Vec<Iri>, StructureError> {
    graph
        .objects(subject, &pro(local))
        .into_iter()
        .map(|o| match o {
            Term::Iri(iri) => Ok(iri.clone()),
            other => Err(StructureError::MalformedProperty {
                property,
                reason: format!("{other} is not an IRI"),
            }),
        })
        .collect()
}

fn single_iri(graph: &Graph, node: &Term, property: Iri, name: &str) -> Result<Option<Iri>, String> {
    match graph.objects(node, &property).as_slice() {
        [] => Ok(None),
        [Term::Iri(iri)] => Ok(Some(iri.clone())),
        [other] => Err(format!("{name} {other} is not an IRI")),
        _ => Err(format!("more than one {name}")),
    }
}

fn read_update(graph: &Graph, node: &Term) -> Result<UpdateInstruction, StructureError> {
    let malformed = StructureError::MalformedUpdate;
    let target_graph = single_iri(graph, node, guo("target_graph"), "guo:target_graph")
        .map_err(malformed)?
        .ok_or_else(|| malformed("missing guo:target_graph".into()))?;
    let target_subject = single_iri(graph, node, guo("target_subject"), "guo:target_subject")
        .map_err(malformed)?
        .ok_or_else(|| malformed("missing guo:target_subject".into()))?;
    let mut update = UpdateInstruction::new(target_graph, target_subject);
    for (property, into_insert) in [("insert", true), ("delete", false)] {
        for container in graph.objects(node, &guo(property)) {
            if matches!(container, Term::Literal(_)) {
                return Err(malformed(format!("guo:{property} points at a literal")));
            }
            for t in graph.matching(Some(container), None, None) {
                let po = PredicateObject::new(t.predicate().clone(), t.object().clone());
                if into_insert {
                    update.insertions.insert(po);
                } else {
                    update.deletions.insert(po);
                }
            }
        }
    }
    Ok(update)
}

fn read_provenance(graph: &Graph, node: &Term) -> Result<ProvenanceEvent, StructureError> {
    let malformed = StructureError::MalformedProvenance;
    if matches!(node, Term::Literal(_)) {
        return Err(malformed("pro:hasProvenance points at a literal".into()));
    }
    let performed_by = single_iri(graph, node, prv("performedBy"), "prv:performedBy")
        .map_err(malformed)?
        .ok_or_else(|| malformed("missing prv:performedBy".into()))?;
    let involved_actor = single_iri(graph, node, prv("involvedActor"), "prv:involvedActor").map_err(malformed)?;
    let performed_at = match graph.objects(node, &prv("performedAt")).as_slice() {
        [Term::Literal(lit)] => DateTime::parse_from_rfc3339(lit.lexical())
            .map(|t| t.with_timezone(&Utc))
            .map_err(|e| malformed(format!("prv:performedAt {:?}: {e}", lit.lexical())))?,
        [] => return Err(malformed("missing prv:performedAt".into())),
        _ => return Err(malformed("expected one prv:performedAt literal".into())),
    };
    Ok(ProvenanceEvent::new(performed_by, involved_actor, performed_at))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, dbpedia_dataset, dbpedia_graph, dbp, repo};
    use patchr_rdf::isomorphic;

    #[test]
    fn listing1_reads_back() {
        let patches = patch_from_turtle(fixtures::LISTING1_TTL).unwrap();
        assert_eq!(patches.len(), 1);
        let p = &patches[0];
        assert_eq!(p.id, repo("Patch_15"));
        assert_eq!(p.body.update.target_subject, dbp("Oregon"));
        assert_eq!(p.body.update.target_graph, dbpedia_graph());
        assert_eq!(p.body.update.insertions.len(), 1);
        assert!(p.body.update.deletions.is_empty());
        assert_eq!(p.body.dataset, dbpedia_dataset());
        assert_eq!(p.body.status, PatchStatus::Active);
        assert_eq!(p.body.advocates.iter().collect::<Vec<_>>(), vec![&repo("Player_25")]);
        assert_eq!(p, &fixtures::listing1_patch());
    }

    #[test]
    fn listing1_writes_isomorphic_document() {
        let text = patch_to_turtle(&fixtures::listing1_patch(), &PrefixMap::new()).unwrap();
        let (ours, _) = parse_turtle(&text, None).unwrap();
        let (theirs, _) = parse_turtle(fixtures::LISTING1_TTL, None).unwrap();
        assert!(isomorphic(&ours, &theirs), "{text}");
    }

    #[test]
    fn two_advocates_two_triples() {
        let mut patch = fixtures::listing1_patch();
        patch.body.advocates.insert(repo("Player_26"));
        let text = patch_to_turtle(&patch, &PrefixMap::new()).unwrap();
        let (g, _) = parse_turtle(&text, None).unwrap();
        assert_eq!(g.matching(None, Some(&pro("hasAdvocate")), None).len(), 2);
    }

    #[test]
    fn invalid_patch_not_written() {
        let mut patch = fixtures::listing1_patch();
        patch.body.types.clear();
        assert!(matches!(patch_to_turtle(&patch, &PrefixMap::new()), Err(CodecError::Invalid(_))));
    }

    #[test]
    fn no_patches() {
        assert_eq!(patch_from_turtle("").unwrap(), vec![]);
        assert_eq!(patch_from_turtle(fixtures::FIG3_TTL).unwrap(), vec![]);
    }

    #[test]
    fn two_updates_rejected() {
        let doc = fixtures::LISTING1_TTL.replace(
            "pro:hasAdvocate repo:Player_25 ;",
            "pro:hasAdvocate repo:Player_25 ; pro:hasUpdate [ guo:target_graph <http://x/> ; guo:target_subject <http://x/s> ] ;",
        );
        match patch_from_turtle(&doc) {
            Err(CodecError::Structure { patch, error }) => {
                assert_eq!(patch, "<http://example.org/repo/Patch_15>");
                assert_eq!(error, StructureError::MultipleUpdateInstructions);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_status_defaults_and_missing_type_reported() {
        let doc = fixtures::LISTING1_TTL
            .replace("pro:status \"active\" ;", "")
            .replace("pro:patchType pro:MissingFact ;", "");
        let patches = patch_from_turtle(&doc).unwrap();
        assert_eq!(patches[0].body.status, PatchStatus::Active);
        let codes: Vec<_> = validate_patch(&patches[0]).into_iter().map(|v| v.code).collect();
        assert_eq!(codes, vec![crate::validate::ViolationCode::MissingType]);
    }

    #[test]
    fn malformed_provenance_and_structure() {
        let elided = fixtures::LISTING1_TTL.replace("2012-04-16T10:00:00Z", "...");
        assert!(matches!(
            patch_from_turtle(&elided),
            Err(CodecError::Structure { error: StructureError::MalformedProvenance(_), .. })
        ));
        let no_update = "@prefix pro: <http://purl.org/hpi/patchr#> . <http://x/p> a pro:Patch .";
        assert!(matches!(
            patch_from_turtle(no_update),
            Err(CodecError::Structure { error: StructureError::MissingUpdateInstruction, .. })
        ));
        let blank = "@prefix pro: <http://purl.org/hpi/patchr#> . [] a pro:Patch .";
        assert!(matches!(
            patch_from_turtle(blank),
            Err(CodecError::Structure { error: StructureError::BlankPatchId, .. })
        ));
        let bad_status = fixtures::LISTING1_TTL.replace("\"active\"", "\"pending\"");
        assert!(matches!(
            patch_from_turtle(&bad_status),
            Err(CodecError::Structure { error: StructureError::MalformedStatus(_), .. })
        ));
    }

    #[test]
    fn groups_comment_and_deletes_round_trip() {
        let mut patch = fixtures::listing1_patch();
        patch.body.update.deletions.insert(PredicateObject::new(fixtures::dbo("language"), dbp("De_jure")));
        patch.body.groups.insert(repo("group/languages"));
        patch.body.comment = Some("multi\nline \"comment\"".into());
        patch.body.status = PatchStatus::Rejected;
        patch.body.criticisers.insert(repo("Player_9"));
        patch.body.types.insert(PatchType::Other(repo("Typo")));
        let text = patch_to_turtle(&patch, &PrefixMap::new()).unwrap();
        assert_eq!(patch_from_turtle(&text).unwrap(), vec![patch]);
    }
}
