use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use patchr_rdf::{compact_iri, compact_term, Iri, PrefixMap, Triple};
use serde::{Deserialize, Serialize};

use crate::registry::{Named, Registry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operation {
    Delete,
    Insert,
}

/// Block syntax of one SPARQL UPDATE dialect.
pub trait UpdateRenderer: Named + Send + Sync {
    /// Opening lines up to and including the brace before the statements.
    fn open(&self, op: Operation, graph: &str) -> String;
    /// Closing lines after the statements, without a trailing newline.
    fn close(&self) -> String;
    /// Indent of subject lines; predicate lines sit three columns deeper.
    fn indent(&self) -> usize;
}

/// `INSERT DATA INTO <g> { ... }` and `DELETE DATA FROM <g> { ... }`.
pub struct Legacy;

/// `INSERT DATA { GRAPH <g> { ... } }` and the matching `DELETE DATA`.
pub struct Sparql11;

impl Named for Legacy {
    fn name(&self) -> &'static str {
        "legacy"
    }
}

impl UpdateRenderer for Legacy {
    fn open(&self, op: Operation, graph: &str) -> String {
        match op {
            Operation::Delete => format!("DELETE DATA FROM {graph} {{\n"),
            Operation::Insert => format!("INSERT DATA INTO {graph} {{\n"),
        }
    }

    fn close(&self) -> String {
        "}".into()
    }

    fn indent(&self) -> usize {
        2
    }
}

impl Named for Sparql11 {
    fn name(&self) -> &'static str {
        "sparql11"
    }
}

impl UpdateRenderer for Sparql11 {
    fn open(&self, op: Operation, graph: &str) -> String {
        let verb = match op {
            Operation::Delete => "DELETE",
            Operation::Insert => "INSERT",
        };
        format!("{verb} DATA {{\n  GRAPH {graph} {{\n")
    }

    fn close(&self) -> String {
        "  }\n}".into()
    }

    fn indent(&self) -> usize {
        4
    }
}

pub fn renderer_registry() -> Registry<dyn UpdateRenderer> {
    let mut r: Registry<dyn UpdateRenderer> = Registry::new();
    r.register(Box::new(Sparql11));
    r.register(Box::new(Legacy));
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SparqlDialect {
    Legacy,
    #[default]
    Sparql11,
}

impl SparqlDialect {
    pub fn renderer(self) -> &'static dyn UpdateRenderer {
        match self {
            SparqlDialect::Legacy => &Legacy,
            SparqlDialect::Sparql11 => &Sparql11,
        }
    }

    pub fn as_str(self) -> &'static str {
        self.renderer().name()
    }
}

impl fmt::Display for SparqlDialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SparqlDialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_', '.'], "").as_str() {
            "legacy" | "sparul" => Ok(SparqlDialect::Legacy),
            "sparql11" | "11" => Ok(SparqlDialect::Sparql11),
            _ => Err(format!(
                "unknown dialect {s:?} (expected one of {})",
                renderer_registry().names().join(", ")
            )),
        }
    }
}

/// One `DELETE DATA` or `INSERT DATA` block, one statement group per triple.
pub fn render_block(
    renderer: &dyn UpdateRenderer,
    op: Operation,
    graph: &Iri,
    triples: &[Triple],
    prefixes: &PrefixMap,
    used: &mut BTreeSet<String>,
) -> String {
    let mut out = renderer.open(op, &compact_iri(graph, prefixes, used));
    let subject_pad = " ".repeat(renderer.indent());
    let predicate_pad = " ".repeat(renderer.indent() + 3);
    for t in triples {
        let subject = compact_term(t.subject(), prefixes, used);
        let predicate = if t.predicate().as_str() == patchr_rdf::vocab::RDF_TYPE {
            "a".to_owned()
        } else {
            compact_iri(t.predicate(), prefixes, used)
        };
        let object = compact_term(t.object(), prefixes, used);
        out.push_str(&format!("{subject_pad}{subject}\n{predicate_pad}{predicate} {object} .\n"));
    }
    out.push_str(&renderer.close());
    out
}

/// `PREFIX` lines for `used`, sorted by label, followed by a blank line.
pub fn prefix_header(used: &BTreeSet<String>, prefixes: &PrefixMap) -> String {
    let mut out = String::new();
    for label in used {
        if let Some(ns) = prefixes.get(label) {
            out.push_str(&format!("PREFIX {label}: <{ns}>\n"));
        }
    }
    if !out.is_empty() {
        out.push('\n');
    }
    out
}
