//! An in-memory triple set with subject, predicate and object indexes.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use crate::term::{Iri, Term};
use crate::triple::Triple;

#[derive(Debug, Clone, Default)]
pub struct Graph {
    name: Option<Iri>,
    triples: BTreeSet<Triple>,
    by_subject: HashMap<Term, BTreeSet<Triple>>,
    by_predicate: HashMap<Iri, BTreeSet<Triple>>,
    by_object: HashMap<Term, BTreeSet<Triple>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn named(name: Iri) -> Self {
        Graph {
            name: Some(name),
            ..Self::default()
        }
    }

    pub fn name(&self) -> Option<&Iri> {
        self.name.as_ref()
    }

    pub fn set_name(&mut self, name: Option<Iri>) {
        self.name = name;
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    /// Triples in ascending `Triple` order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// Returns `true` if the triple was not already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.triples.contains(&triple) {
            return false;
        }
        self.by_subject
            .entry(triple.subject().clone())
            .or_default()
            .insert(triple.clone());
        self.by_predicate
            .entry(triple.predicate().clone())
            .or_default()
            .insert(triple.clone());
        self.by_object
            .entry(triple.object().clone())
            .or_default()
            .insert(triple.clone());
        self.triples.insert(triple)
    }

    /// Returns `true` if the triple was present.
    pub fn remove(&mut self, triple: &Triple) -> bool {
        if !self.triples.remove(triple) {
            return false;
        }
        unindex(&mut self.by_subject, triple.subject(), triple);
        unindex(&mut self.by_predicate, triple.predicate(), triple);
        unindex(&mut self.by_object, triple.object(), triple);
        true
    }

    /// All triples matching the bound positions, in ascending order.
    pub fn matching(&self, s: Option<&Term>, p: Option<&Iri>, o: Option<&Term>) -> Vec<&Triple> {
        let mut candidates: Option<&BTreeSet<Triple>> = None;
        let lookups = [
            s.map(|s| self.by_subject.get(s)),
            p.map(|p| self.by_predicate.get(p)),
            o.map(|o| self.by_object.get(o)),
        ];
        for lookup in lookups.into_iter().flatten() {
            let Some(set) = lookup else {
                return Vec::new();
            };
            if candidates.is_none_or(|c| set.len() < c.len()) {
                candidates = Some(set);
            }
        }
        let source = match candidates {
            Some(set) => set.iter().collect::<Vec<_>>(),
            None => self.triples.iter().collect(),
        };
        source
            .into_iter()
            .filter(|t| {
                s.is_none_or(|s| t.subject() == s)
                    && p.is_none_or(|p| t.predicate() == p)
                    && o.is_none_or(|o| t.object() == o)
            })
            .collect()
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects<'a>(&'a self, subject: &Term, predicate: &Iri) -> Vec<&'a Term> {
        self.matching(Some(subject), Some(predicate), None)
            .into_iter()
            .map(Triple::object)
            .collect()
    }

    /// Subjects of `(?, predicate, object)`.
    pub fn subjects<'a>(&'a self, predicate: &Iri, object: &Term) -> Vec<&'a Term> {
        self.matching(None, Some(predicate), Some(object))
            .into_iter()
            .map(Triple::subject)
            .collect()
    }

    /// Checks that the indexes describe exactly the member triples.
    pub fn indexes_consistent(&self) -> bool {
        fn check<K: Eq + Hash>(
            triples: &BTreeSet<Triple>,
            index: &HashMap<K, BTreeSet<Triple>>,
            key: impl Fn(&Triple) -> &K,
        ) -> bool {
            let indexed: usize = index.values().map(BTreeSet::len).sum();
            indexed == triples.len()
                && index.values().all(|set| !set.is_empty())
                && index
                    .iter()
                    .all(|(k, set)| set.iter().all(|t| key(t) == k && triples.contains(t)))
                && triples
                    .iter()
                    .all(|t| index.get(key(t)).is_some_and(|set| set.contains(t)))
        }
        check(&self.triples, &self.by_subject, Triple::subject)
            && check(&self.triples, &self.by_predicate, Triple::predicate)
            && check(&self.triples, &self.by_object, Triple::object)
    }
}

fn unindex<K: Eq + Hash>(index: &mut HashMap<K, BTreeSet<Triple>>, key: &K, triple: &Triple) {
    if let Some(set) = index.get_mut(key) {
        set.remove(triple);
        if set.is_empty() {
            index.remove(key);
        }
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.triples == other.triples
    }
}

impl Eq for Graph {}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut graph = Graph::new();
        graph.extend(iter);
        graph
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::{DBO, DBP};

    fn res(local: &str) -> Term {
        Term::iri(format!("{DBP}{local}")).unwrap()
    }

    fn language() -> Iri {
        Iri::new(format!("{DBO}language")).unwrap()
    }

    pub(crate) fn fig3() -> Graph {
        [
            ("Ohio", "English_language"),
            ("Oregon", "De_jure"),
            ("Dances_with_Wolves", "Lakota_language"),
        ]
        .into_iter()
        .map(|(s, o)| Triple::new(res(s), language(), res(o)).unwrap())
        .collect()
    }

    #[test]
    fn set_semantics() {
        let mut g = fig3();
        let t = Triple::new(res("Ohio"), language(), res("English_language")).unwrap();
        assert_eq!(g.len(), 3);
        assert!(!g.insert(t.clone()));
        assert_eq!(g.len(), 3);
        assert!(g.remove(&t));
        assert!(!g.remove(&t));
        assert_eq!(g.len(), 2);
        assert!(g.indexes_consistent());
    }

    #[test]
    fn match_by_predicate_and_object() {
        let g = fig3();
        let lang = language();
        let hits = g.matching(None, Some(&lang), Some(&res("English_language")));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].subject(), &res("Ohio"));
    }

    #[test]
    fn match_by_subject() {
        let g = fig3();
        let hits = g.matching(Some(&res("Oregon")), None, None);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].object(), &res("De_jure"));
    }

    #[test]
    fn match_unbound_and_empty() {
        let g = fig3();
        assert_eq!(g.matching(None, None, None).len(), 3);
        assert!(Graph::new().matching(None, None, None).is_empty());
        assert!(Graph::new().matching(Some(&res("Ohio")), None, None).is_empty());
        assert!(g.matching(Some(&res("Nowhere")), Some(&language()), None).is_empty());
    }
}
