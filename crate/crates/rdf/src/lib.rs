//! RDF building blocks: terms, triples, an indexed in-memory graph, a reader
//! and deterministic writer for a Turtle subset, canonical N-Triples lines and
//! an isomorphism check.

pub mod error;
pub mod graph;
pub mod iso;
pub mod ntriples;
pub mod prefix;
pub mod term;
pub mod triple;
pub mod turtle;
pub mod vocab;

pub use error::{CanonicalError, Position, TermError, TurtleError, TurtleErrorKind};
pub use graph::Graph;
pub use iso::isomorphic;
pub use ntriples::{canonical_ntriples, write_ntriples};
pub use prefix::PrefixMap;
pub use term::{BlankNode, Iri, Literal, Term};
pub use triple::Triple;
pub use turtle::{compact_iri, compact_term, parse_turtle, parse_turtle_bytes, serialize_turtle};
