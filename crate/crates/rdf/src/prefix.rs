use crate::error::TermError;
use crate::term::Iri;
use crate::vocab::BUILTIN_PREFIXES;

/// Ordered mapping from prefix label to namespace IRI.
///
/// A fresh map always contains the built-in labels (rdf, rdfs, xsd, pro, guo,
/// prv, void, foaf, dbp, dbo). Re-binding a label replaces its namespace in
/// place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMap {
    entries: Vec<(String, Iri)>,
}

impl Default for PrefixMap {
    fn default() -> Self {
        let entries = BUILTIN_PREFIXES
            .iter()
            .map(|(label, ns)| ((*label).to_owned(), Iri::new(*ns).expect("built-in namespace")))
            .collect();
        PrefixMap { entries }
    }
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: impl Into<String>, namespace: Iri) -> Result<(), TermError> {
        let label = label.into();
        if !is_prefix_label(&label) {
            return Err(TermError::InvalidPrefixLabel(label));
        }
        match self.entries.iter_mut().find(|(l, _)| *l == label) {
            Some(entry) => entry.1 = namespace,
            None => self.entries.push((label, namespace)),
        }
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&Iri> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, ns)| ns)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> {
        self.entries.iter().map(|(l, ns)| (l.as_str(), ns))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Expands `label:local` to a full IRI string, if the label is bound.
    pub fn expand(&self, label: &str, local: &str) -> Option<String> {
        self.get(label).map(|ns| format!("{}{}", ns.as_str(), local))
    }

    /// Picks the longest bound namespace under which `iri` has a writable
    /// local name. Returns `(label, local)`.
    pub fn shrink<'a>(&'a self, iri: &'a Iri) -> Option<(&'a str, &'a str)> {
        self.entries
            .iter()
            .filter_map(|(label, ns)| {
                let local = iri.as_str().strip_prefix(ns.as_str())?;
                is_local_name(local).then_some((label.as_str(), local, ns.as_str().len()))
            })
            .max_by(|a, b| a.2.cmp(&b.2).then_with(|| b.0.cmp(a.0)))
            .map(|(label, local, _)| (label, local))
    }
}

/// `[A-Za-z][A-Za-z0-9_-]*`, or the empty label.
pub(crate) fn is_prefix_label(label: &str) -> bool {
    let mut chars = label.chars();
    match chars.next() {
        None => true,
        Some(c) => c.is_ascii_alphabetic() && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'),
    }
}

/// Local names the serializer writes and the parser reads back unchanged:
/// `[A-Za-z0-9_]` first, then `[A-Za-z0-9_.-]`, never ending in `.`.
pub(crate) fn is_local_name(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(first) => {
            (first.is_ascii_alphanumeric() || first == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
                && !local.ends_with('.')
        }
    }
}
