//! N-Triples output and the canonical line form used for identity.

use crate::error::CanonicalError;
use crate::graph::Graph;
use crate::triple::Triple;

/// Sorted, de-duplicated N-Triples lines for a set of ground triples.
pub fn canonical_ntriples<'a, I>(triples: I) -> Result<Vec<String>, CanonicalError>
where
    I: IntoIterator<Item = &'a Triple>,
{
    let mut lines = triples
        .into_iter()
        .map(|t| {
            if let Some(b) = t.subject().as_blank().or_else(|| t.object().as_blank()) {
                return Err(CanonicalError::BlankNode(b.to_string()));
            }
            Ok(t.to_ntriples())
        })
        .collect::<Result<Vec<_>, _>>()?;
    lines.sort();
    lines.dedup();
    Ok(lines)
}

/// Whole graph as N-Triples text, LF line endings, triples in sorted line order.
pub fn write_ntriples(graph: &Graph) -> String {
    let mut lines: Vec<String> = graph.iter().map(Triple::to_ntriples).collect();
    lines.sort();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}
