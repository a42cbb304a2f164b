//! Sample data: the Oregon language patch request and the three
//! `dbo:language` facts behind the Ohio quiz question.

use chrono::{DateTime, Utc};
use patchr_rdf::{Graph, Iri, Triple};

use crate::feedback::QuestionContext;
use crate::model::{Patch, PatchBody, PatchType, ProvenanceEvent, UpdateInstruction};

pub const REPO_NS: &str = "http://example.org/repo/";
pub const DBPEDIA_GRAPH: &str = "http://dbpedia.org/";
pub const DBPEDIA_DATASET: &str = "http://dbpedia.org/void.ttl#DBpedia";

/// Turtle text of the Oregon patch, with a prefix header, a concrete
/// timestamp and a `pro:patchType`.
pub const LISTING1_TTL: &str = include_str!("../tests/fixtures/listing1.ttl");
pub const FIG3_TTL: &str = include_str!("../tests/fixtures/fig3.ttl");

pub fn repo(local: &str) -> Iri {
    Iri::new(format!("{REPO_NS}{local}")).expect("fixture IRI")
}

pub fn dbp(local: &str) -> Iri {
    Iri::new(format!("{}{local}", patchr_rdf::vocab::DBP)).expect("fixture IRI")
}

pub fn dbo(local: &str) -> Iri {
    Iri::new(format!("{}{local}", patchr_rdf::vocab::DBO)).expect("fixture IRI")
}

pub fn dbpedia_graph() -> Iri {
    Iri::new(DBPEDIA_GRAPH).expect("fixture IRI")
}

pub fn dbpedia_dataset() -> Iri {
    Iri::new(DBPEDIA_DATASET).expect("fixture IRI")
}

pub fn listing1_time() -> DateTime<Utc> {
    DateTime::parse_from_rfc3339("2012-04-16T10:00:00Z")
        .expect("fixture time")
        .with_timezone(&Utc)
}

pub fn oregon_instruction() -> UpdateInstruction {
    UpdateInstruction::new(dbpedia_graph(), dbp("Oregon")).with_insert(dbo("language"), dbp("English_language"))
}

pub fn listing1_body() -> PatchBody {
    let mut body = PatchBody::new(oregon_instruction(), dbpedia_dataset());
    body.types.insert(PatchType::MissingFact);
    body.advocates.insert(repo("Player_25"));
    body.provenance.push(ProvenanceEvent::new(
        repo("WhoKnows"),
        Some(repo("Player_25")),
        listing1_time(),
    ));
    body
}

pub fn listing1_patch() -> Patch {
    Patch::new(repo("Patch_15"), listing1_body())
}

pub fn fig3_graph() -> Graph {
    [
        ("Ohio", "English_language"),
        ("Oregon", "De_jure"),
        ("Dances_with_Wolves", "Lakota_language"),
    ]
    .into_iter()
    .map(|(s, o)| Triple::new(dbp(s), dbo("language"), dbp(o)).expect("fixture triple"))
    .collect()
}

/// The question "English language is the language of ...?" with Ohio as the
/// expected answer and Oregon / Dances with Wolves as distractors.
pub fn fig3_context() -> QuestionContext {
    QuestionContext::new(
        Triple::new(dbp("Ohio"), dbo("language"), dbp("English_language")).expect("fixture triple"),
        [dbp("Oregon"), dbp("Dances_with_Wolves")].into_iter().collect(),
        dbpedia_dataset(),
        dbpedia_graph(),
    )
    .expect("fixture context")
}
