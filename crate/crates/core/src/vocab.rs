//! Terms of the patch request, graph update and provenance vocabularies.

use patchr_rdf::vocab::{GUO, PRO, PRV, RDFS};
use patchr_rdf::Iri;

fn term(ns: &str, local: &str) -> Iri {
    Iri::new(format!("{ns}{local}")).expect("vocabulary IRI")
}

pub fn pro(local: &str) -> Iri {
    term(PRO, local)
}

pub fn guo(local: &str) -> Iri {
    term(GUO, local)
}

pub fn prv(local: &str) -> Iri {
    term(PRV, local)
}

pub fn rdfs(local: &str) -> Iri {
    term(RDFS, local)
}

pub fn rdf_type() -> Iri {
    Iri::new(patchr_rdf::vocab::RDF_TYPE).expect("rdf:type")
}

pub fn xsd_date_time() -> Iri {
    Iri::new(patchr_rdf::vocab::XSD_DATE_TIME).expect("xsd:dateTime")
}
