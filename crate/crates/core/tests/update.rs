mod support;

use std::collections::BTreeSet;

use patchr_core::{apply_instruction, to_sparql, SparqlDialect};
use patchr_rdf::{parse_turtle, PrefixMap, Triple};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use support::*;

/// Triples inside the DATA blocks of `script`; the statement groups are
/// themselves Turtle.
fn block_triples(script: &str, prefixes: &PrefixMap) -> BTreeSet<Triple> {
    let mut doc: String = prefixes.iter().map(|(l, ns)| format!("@prefix {l}: <{ns}> .\n")).collect();
    for line in script.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with("PREFIX") || t.contains("DATA") || t.starts_with("GRAPH") || t.starts_with('}') {
            continue;
        }
        doc.push_str(line);
        doc.push('\n');
    }
    let (g, _) = parse_turtle(&doc, None).unwrap();
    g.iter().cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn apply_is_idempotent(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 30);
        let u = random_instruction(&mut rng, &g);
        let mut once = g.clone();
        apply_instruction(&mut once, &u).unwrap();
        let mut twice = once.clone();
        apply_instruction(&mut twice, &u).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn disjoint_subjects_commute(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 30);
        let u1 = random_instruction(&mut rng, &g);
        let u2 = random_instruction(&mut rng, &g);
        prop_assume!(u1.target_subject != u2.target_subject);
        let mut a = g.clone();
        apply_instruction(&mut a, &u1).unwrap();
        apply_instruction(&mut a, &u2).unwrap();
        let mut b = g.clone();
        apply_instruction(&mut b, &u2).unwrap();
        apply_instruction(&mut b, &u1).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn dialects_carry_the_same_triples(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 20);
        let patch = patch_for(random_instruction(&mut rng, &g), ex("patch/1"));
        let prefixes = PrefixMap::new();
        let legacy = to_sparql(&patch, SparqlDialect::Legacy, &prefixes, false).unwrap();
        let modern = to_sparql(&patch, SparqlDialect::Sparql11, &prefixes, false).unwrap();
        let expected: BTreeSet<Triple> = patch
            .body
            .update
            .insertion_triples()
            .into_iter()
            .chain(patch.body.update.deletion_triples())
            .collect();
        prop_assert_eq!(block_triples(&legacy, &prefixes), expected.clone());
        prop_assert_eq!(block_triples(&modern, &prefixes), expected);
    }

    #[test]
    fn rendering_matches_reference_engine(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 15);
        let u = random_instruction(&mut rng, &g);
        let script = to_sparql(&patch_for(u.clone(), ex("p")), SparqlDialect::Sparql11, &PrefixMap::new(), true).unwrap();
        let mut ours = g.clone();
        apply_instruction(&mut ours, &u).unwrap();
        let reference = oracle::run_update(&g, &graph_iri(), &script).map_err(TestCaseError::fail)?;
        prop_assert_eq!(ours, reference);
    }
}

#[test]
fn export_joins_patches_in_query_order() {
    use patchr_core::fixtures::repo;
    use patchr_core::{export_updates, MemoryJournal, PatchFilter, PatchOrder, Repository};
    let mut r = Repository::open(MemoryJournal::new(), repo("")).unwrap();
    for (i, votes) in [(0usize, 2usize), (3, 5), (6, 1)] {
        for a in 0..votes {
            r.submit_patch(&universe_body(i, at(i as i64)), &agent(a), at(i as i64)).unwrap();
        }
    }
    let filter = PatchFilter { order: PatchOrder::MostPopular, ..PatchFilter::default() };
    let script = export_updates(r.state(), &filter, SparqlDialect::Legacy, &PrefixMap::new(), true).unwrap();
    assert_eq!(script.matches("INSERT DATA INTO").count(), 3);
    assert!(!script.contains("PREFIX"), "test IRIs have no bound prefix");
    let o3 = script.find("example.org/o3>").unwrap();
    let o0 = script.find("example.org/o0>").unwrap();
    let o6 = script.find("example.org/o6>").unwrap();
    assert!(o3 < o0 && o0 < o6);
    assert_eq!(script.matches(" ;\n\n").count(), 2);
}
