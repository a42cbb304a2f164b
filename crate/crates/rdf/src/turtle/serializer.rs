//! Deterministic Turtle writer.
//!
//! Layout: used `@prefix` lines sorted by label, a blank line, then one block
//! per top-level subject separated by blank lines. IRI subjects come first in
//! N-Triples order, then labelled blank nodes, then unreferenced blank-node
//! roots written as `[ ... ] .`. Inside a subject `a` comes first, other
//! predicates follow in N-Triples order. Blank nodes referenced exactly once
//! (and not on a cycle) are written inline and sorted among their siblings by
//! their rendered text, so the output does not depend on blank-node labels.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::graph::Graph;
use crate::prefix::PrefixMap;
use crate::term::{write_quoted, BlankNode, Iri, Term};
use crate::triple::Triple;
use crate::vocab::RDF_TYPE;

const INDENT: &str = "  ";

pub fn serialize_turtle(graph: &Graph, prefixes: &PrefixMap) -> String {
    if graph.is_empty() {
        return String::new();
    }
    let mut writer = Writer::new(graph, prefixes);
    let body = writer.body();
    let mut out = String::new();
    for label in &writer.used {
        let ns = prefixes.get(label).expect("used prefix is bound");
        out.push_str(&format!("@prefix {label}: <{ns}> .\n"));
    }
    if !writer.used.is_empty() {
        out.push('\n');
    }
    out.push_str(&body);
    out
}

struct Writer<'g> {
    graph: &'g Graph,
    prefixes: &'g PrefixMap,
    inline: BTreeSet<&'g BlankNode>,
    used: BTreeSet<String>,
}

impl<'g> Writer<'g> {
    fn new(graph: &'g Graph, prefixes: &'g PrefixMap) -> Self {
        Writer {
            graph,
            prefixes,
            inline: inlinable_blanks(graph),
            used: BTreeSet::new(),
        }
    }

    fn body(&mut self) -> String {
        let graph = self.graph;
        let subjects: BTreeSet<&Term> = graph.iter().map(Triple::subject).collect();
        let referenced: BTreeSet<&BlankNode> = graph.iter().filter_map(|t| t.object().as_blank()).collect();

        let mut iri_blocks = Vec::new();
        let mut labelled_blocks = Vec::new();
        let mut root_blocks = Vec::new();
        for subject in subjects {
            match subject {
                Term::BlankNode(b) if self.inline.contains(b) => {}
                Term::BlankNode(b) if !referenced.contains(b) => {
                    let text = format!("{} .", self.inline_blank(subject, 0));
                    root_blocks.push(text);
                }
                Term::BlankNode(_) => {
                    let text = format!("{} {} .", subject.to_ntriples(), self.predicate_objects(subject, 1));
                    labelled_blocks.push((subject.to_ntriples(), text));
                }
                _ => {
                    let head = self.term(subject, 0);
                    let text = format!("{head} {} .", self.predicate_objects(subject, 1));
                    iri_blocks.push((subject.to_ntriples(), text));
                }
            }
        }
        iri_blocks.sort();
        labelled_blocks.sort_by(|a, b| natural_cmp(&a.0, &b.0));
        root_blocks.sort();
        let blocks: Vec<String> = iri_blocks
            .into_iter()
            .map(|(_, t)| t)
            .chain(labelled_blocks.into_iter().map(|(_, t)| t))
            .chain(root_blocks)
            .collect();
        let mut out = blocks.join("\n\n");
        out.push('\n');
        out
    }

    /// Predicate-object list of `subject`; continuation lines sit at `level`.
    fn predicate_objects(&mut self, subject: &Term, level: usize) -> String {
        let mut grouped: BTreeMap<(bool, String), (Iri, Vec<&Term>)> = BTreeMap::new();
        for t in self.graph.matching(Some(subject), None, None) {
            let p = t.predicate();
            let key = (p.as_str() != RDF_TYPE, format!("<{p}>"));
            grouped.entry(key).or_insert_with(|| (p.clone(), Vec::new())).1.push(t.object());
        }
        let mut parts = Vec::new();
        for (_, (predicate, objects)) in grouped {
            let verb = if predicate.as_str() == RDF_TYPE {
                "a".to_owned()
            } else {
                self.iri(&predicate)
            };
            let mut rendered: Vec<(String, String)> = objects
                .into_iter()
                .map(|o| {
                    let text = self.term(o, level);
                    let key = match o {
                        Term::BlankNode(b) if self.inline.contains(b) => text.clone(),
                        _ => o.to_ntriples(),
                    };
                    (key, text)
                })
                .collect();
            rendered.sort();
            let objects: Vec<String> = rendered.into_iter().map(|(_, text)| text).collect();
            parts.push(format!("{verb} {}", objects.join(", ")));
        }
        parts.join(&format!(" ;\n{}", INDENT.repeat(level)))
    }

    fn inline_blank(&mut self, node: &Term, level: usize) -> String {
        if self.graph.matching(Some(node), None, None).is_empty() {
            return "[]".to_owned();
        }
        let inner = self.predicate_objects(node, level + 1);
        format!("[\n{}{inner}\n{}]", INDENT.repeat(level + 1), INDENT.repeat(level))
    }

    fn term(&mut self, term: &Term, level: usize) -> String {
        match term {
            Term::BlankNode(b) if self.inline.contains(b) => self.inline_blank(term, level),
            other => compact_term(other, self.prefixes, &mut self.used),
        }
    }

    fn iri(&mut self, iri: &Iri) -> String {
        compact_iri(iri, self.prefixes, &mut self.used)
    }
}

/// Writes an IRI as a prefixed name when a bound namespace allows it,
/// recording the label in `used`.
pub fn compact_iri(iri: &Iri, prefixes: &PrefixMap, used: &mut BTreeSet<String>) -> String {
    match prefixes.shrink(iri) {
        Some((label, local)) => {
            used.insert(label.to_owned());
            format!("{label}:{local}")
        }
        None => format!("<{iri}>"),
    }
}

/// Turtle/SPARQL surface form of a single term; blank nodes use their label.
pub fn compact_term(term: &Term, prefixes: &PrefixMap, used: &mut BTreeSet<String>) -> String {
    match term {
        Term::Iri(iri) => compact_iri(iri, prefixes, used),
        Term::BlankNode(b) => b.to_string(),
        Term::Literal(lit) => {
            let mut out = String::new();
            write_quoted(&mut out, lit.lexical());
            if let Some(lang) = lit.language() {
                out.push('@');
                out.push_str(lang);
            } else if !lit.is_plain_string() {
                out.push_str("^^");
                out.push_str(&compact_iri(lit.datatype(), prefixes, used));
            }
            out
        }
    }
}

/// Blank nodes that occur exactly once as an object and are not on a cycle of
/// such nodes.
fn inlinable_blanks(graph: &Graph) -> BTreeSet<&BlankNode> {
    let mut parent: HashMap<&BlankNode, Option<&Term>> = HashMap::new();
    for t in graph.iter() {
        if let Term::BlankNode(b) = t.object() {
            parent
                .entry(b)
                .and_modify(|p| *p = None)
                .or_insert(Some(t.subject()));
        }
    }
    let mut inline: BTreeSet<&BlankNode> = parent
        .iter()
        .filter(|(_, p)| p.is_some())
        .map(|(b, _)| *b)
        .collect();
    // Walk each candidate's parent chain; a chain that loops back is a cycle,
    // broken by writing its smallest member with a label.
    loop {
        let mut breaker = None;
        for &start in &inline {
            let mut seen = vec![start];
            let mut current = start;
            while let Some(Some(Term::BlankNode(p))) = parent.get(current) {
                if !inline.contains(p) {
                    break;
                }
                if p == start {
                    breaker = seen.iter().min().copied();
                    break;
                }
                if seen.contains(&p) {
                    break;
                }
                seen.push(p);
                current = p;
            }
            if breaker.is_some() {
                break;
            }
        }
        match breaker {
            Some(b) => {
                inline.remove(b);
            }
            None => return inline,
        }
    }
}

/// Orders `_:b2` before `_:b10`.
fn natural_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    let split = |s: &str| {
        let digits = s.len() - s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (head, tail) = s.split_at(s.len() - digits);
        (head.to_owned(), tail.len(), tail.to_owned())
    };
    split(a).cmp(&split(b))
}
