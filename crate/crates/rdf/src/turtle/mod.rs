mod parser;
mod serializer;

pub use parser::{parse_turtle, parse_turtle_bytes};
pub use serializer::{compact_iri, compact_term, serialize_turtle};
