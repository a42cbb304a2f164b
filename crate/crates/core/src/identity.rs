//! Canonical identity of an update instruction against a dataset.

use patchr_rdf::{canonical_ntriples, CanonicalError, Iri};

use crate::model::UpdateInstruction;

/// `dataset|graph|INS:<lines>|DEL:<lines>`, where each side is the sorted
/// N-Triples form of the expanded pairs joined by `\n`. Equal keys mean the
/// same change against the same dataset.
pub fn canonical_key(update: &UpdateInstruction, dataset: &Iri) -> Result<String, CanonicalError> {
    let ins = canonical_ntriples(&update.insertion_triples())?.join("\n");
    let del = canonical_ntriples(&update.deletion_triples())?.join("\n");
    Ok(format!("{dataset}|{}|INS:{ins}|DEL:{del}", update.target_graph))
}
