//! SPARQL UPDATE generation and local application of update instructions.

mod apply;
mod render;

use std::collections::BTreeSet;

use patchr_rdf::PrefixMap;
use thiserror::Error;

pub use apply::{apply_instruction, ApplyReport, GraphMismatch};
pub use render::{
    prefix_header, render_block, renderer_registry, Legacy, Operation, Sparql11, SparqlDialect, UpdateRenderer,
};

use crate::model::Patch;
use crate::repository::{query_patches, PatchFilter, RepositoryError, RepositoryState};
use crate::validate::{validate_patch, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UpdateError {
    #[error("patch is invalid: {}", .0.iter().map(|v| v.code.as_str()).collect::<Vec<_>>().join(", "))]
    Invalid(Vec<Violation>),
}

/// DELETE block (if any) then INSERT block (if any), joined by ` ;`.
fn patch_blocks(patch: &Patch, renderer: &dyn UpdateRenderer, prefixes: &PrefixMap, used: &mut BTreeSet<String>) -> String {
    let update = &patch.body.update;
    let mut blocks = Vec::new();
    for (op, triples) in [
        (Operation::Delete, update.deletion_triples()),
        (Operation::Insert, update.insertion_triples()),
    ] {
        if !triples.is_empty() {
            blocks.push(render_block(renderer, op, &update.target_graph, &triples, prefixes, used));
        }
    }
    blocks.join(" ;\n")
}

/// The update script for one patch, optionally preceded by `PREFIX` lines
/// for the prefixes it uses.
pub fn to_sparql(
    patch: &Patch,
    dialect: SparqlDialect,
    prefixes: &PrefixMap,
    emit_prefix_header: bool,
) -> Result<String, UpdateError> {
    let violations = validate_patch(patch);
    if !violations.is_empty() {
        return Err(UpdateError::Invalid(violations));
    }
    let mut used = BTreeSet::new();
    let body = patch_blocks(patch, dialect.renderer(), prefixes, &mut used);
    let header = if emit_prefix_header { prefix_header(&used, prefixes) } else { String::new() };
    Ok(format!("{header}{body}\n"))
}

/// One script for every patch `filter` selects, in query order, separated by
/// ` ;` and a blank line. An empty selection yields an empty script.
pub fn export_updates(
    state: &RepositoryState,
    filter: &PatchFilter,
    dialect: SparqlDialect,
    prefixes: &PrefixMap,
    emit_prefix_header: bool,
) -> Result<String, RepositoryError> {
    let patches = query_patches(state, filter)?;
    if patches.is_empty() {
        return Ok(String::new());
    }
    let mut used = BTreeSet::new();
    let blocks: Vec<String> = patches
        .iter()
        .map(|p| patch_blocks(p, dialect.renderer(), prefixes, &mut used))
        .collect();
    let header = if emit_prefix_header { prefix_header(&used, prefixes) } else { String::new() };
    Ok(format!("{header}{}\n", blocks.join(" ;\n\n")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, dbo, dbp};
    use crate::model::PredicateObject;

    fn normalized(s: &str) -> String {
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn listing2_layout() {
        let text = to_sparql(&fixtures::listing1_patch(), SparqlDialect::Legacy, &PrefixMap::new(), false).unwrap();
        assert_eq!(
            text,
            "INSERT DATA INTO <http://dbpedia.org/> {\n  dbp:Oregon\n     dbo:language dbp:English_language .\n}\n"
        );
        assert_eq!(
            normalized(&text),
            "INSERT DATA INTO <http://dbpedia.org/> { dbp:Oregon dbo:language dbp:English_language . }"
        );
    }

    #[test]
    fn header_lists_used_prefixes() {
        let text = to_sparql(&fixtures::listing1_patch(), SparqlDialect::Sparql11, &PrefixMap::new(), true).unwrap();
        assert_eq!(
            text,
            "PREFIX dbo: <http://dbpedia.org/ontology/>\nPREFIX dbp: <http://dbpedia.org/resource/>\n\n\
             INSERT DATA {\n  GRAPH <http://dbpedia.org/> {\n    dbp:Oregon\n       dbo:language dbp:English_language .\n  }\n}\n"
        );
    }

    #[test]
    fn deletion_only_and_modify() {
        let mut patch = fixtures::listing1_patch();
        patch.body.update = crate::model::UpdateInstruction::new(fixtures::dbpedia_graph(), dbp("Ohio"))
            .with_delete(dbo("language"), dbp("English_language"));
        let text = to_sparql(&patch, SparqlDialect::Sparql11, &PrefixMap::new(), false).unwrap();
        assert!(normalized(&text).starts_with("DELETE DATA { GRAPH <http://dbpedia.org/> {"));
        assert!(!text.contains("INSERT"));

        patch.body.update.insertions.insert(PredicateObject::new(dbo("language"), dbp("Ohio_English")));
        let text = to_sparql(&patch, SparqlDialect::Legacy, &PrefixMap::new(), false).unwrap();
        let d = text.find("DELETE DATA FROM").unwrap();
        let i = text.find("INSERT DATA INTO").unwrap();
        assert!(d < i);
        assert!(text.contains("} ;\nINSERT"));
    }

    #[test]
    fn invalid_patch_refused() {
        let mut patch = fixtures::listing1_patch();
        patch.body.update.insertions.clear();
        assert!(to_sparql(&patch, SparqlDialect::Legacy, &PrefixMap::new(), false).is_err());
    }

    #[test]
    fn dialect_names() {
        assert_eq!("Legacy".parse::<SparqlDialect>().unwrap(), SparqlDialect::Legacy);
        assert_eq!("sparql-1.1".parse::<SparqlDialect>().unwrap(), SparqlDialect::Sparql11);
        assert!("sql".parse::<SparqlDialect>().is_err());
        assert_eq!(SparqlDialect::default(), SparqlDialect::Sparql11);
        assert_eq!(renderer_registry().names(), vec!["sparql11", "legacy"]);
    }

    #[test]
    fn empty_export() {
        let state = RepositoryState::new();
        let text = export_updates(&state, &PatchFilter::default(), SparqlDialect::Legacy, &PrefixMap::new(), true).unwrap();
        assert_eq!(text, "");
    }
}
