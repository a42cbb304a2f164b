//! Namespace and term IRIs used across the workspace.

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const PRO: &str = "http://purl.org/hpi/patchr#";
pub const GUO: &str = "http://webr3.org/owl/guo#";
pub const PRV: &str = "http://purl.org/net/provenance/ns#";
pub const VOID: &str = "http://rdfs.org/ns/void#";
pub const FOAF: &str = "http://xmlns.com/foaf/0.1/";
pub const DBP: &str = "http://dbpedia.org/resource/";
pub const DBO: &str = "http://dbpedia.org/ontology/";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";

/// Built-in prefix labels, in declaration order.
pub const BUILTIN_PREFIXES: &[(&str, &str)] = &[
    ("rdf", RDF),
    ("rdfs", RDFS),
    ("xsd", XSD),
    ("pro", PRO),
    ("guo", GUO),
    ("prv", PRV),
    ("void", VOID),
    ("foaf", FOAF),
    ("dbp", DBP),
    ("dbo", DBO),
];
