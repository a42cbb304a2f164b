//! Generators, a reference model of the repository rules, and a reference
//! SPARQL engine shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Duration, TimeZone, Utc};
use patchr_core::fixtures::{dbpedia_dataset, repo};
use patchr_core::{
    MemoryJournal, Patch, PatchBody, PatchStatus, PatchType, PredicateObject, ProvenanceEvent, Repository,
    RepositoryError, UpdateInstruction, VotePosition,
};
use patchr_rdf::{Graph, Iri, Literal, Term, Triple};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn ex(local: &str) -> Iri {
    Iri::new(format!("http://example.org/{local}")).unwrap()
}

pub fn graph_iri() -> Iri {
    ex("graph")
}

pub fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2012, 4, 16, 10, 0, 0).unwrap()
}

pub fn at(seconds: i64) -> DateTime<Utc> {
    t0() + Duration::seconds(seconds)
}

// ---------------------------------------------------------------- graphs

const LEXICALS: &[&str] = &["a", "b c", "quote \" here", "back\\slash", "line\nbreak", "tab\t", "é ü", ""];

pub fn random_object(rng: &mut StdRng) -> Term {
    match rng.gen_range(0..5) {
        0 | 1 => Term::Iri(ex(&format!("o{}", rng.gen_range(0..8)))),
        2 => Term::Literal(Literal::string(*LEXICALS.choose(rng).unwrap())),
        3 => Term::Literal(Literal::lang(*LEXICALS.choose(rng).unwrap(), ["en", "de", "en-gb"][rng.gen_range(0..3)]).unwrap()),
        _ => Term::Literal(Literal::typed(*LEXICALS.choose(rng).unwrap(), ex(&format!("dt{}", rng.gen_range(0..2)))).unwrap()),
    }
}

pub fn random_subject(rng: &mut StdRng) -> Iri {
    ex(&format!("s{}", rng.gen_range(0..10)))
}

pub fn random_predicate(rng: &mut StdRng) -> Iri {
    if rng.gen_ratio(1, 8) {
        Iri::new(patchr_rdf::vocab::RDF_TYPE).unwrap()
    } else {
        ex(&format!("p{}", rng.gen_range(0..4)))
    }
}

/// A ground graph with exactly `n` distinct triples.
pub fn random_graph(rng: &mut StdRng, n: usize) -> Graph {
    let mut g = Graph::new();
    while g.len() < n {
        let t = Triple::new(random_subject(rng), random_predicate(rng), random_object(rng)).unwrap();
        g.insert(t);
    }
    g
}

/// A valid instruction on a random subject of `graph`'s universe. Deletions
/// mix pairs present in `graph` with absent ones.
pub fn random_instruction(rng: &mut StdRng, graph: &Graph) -> UpdateInstruction {
    loop {
        let subject = random_subject(rng);
        let mut u = UpdateInstruction::new(graph_iri(), subject.clone());
        let present: Vec<&Triple> = graph.matching(Some(&Term::Iri(subject)), None, None);
        for _ in 0..rng.gen_range(0..4) {
            if !present.is_empty() && rng.gen_bool(0.7) {
                let t = present.choose(rng).unwrap();
                u.deletions.insert(PredicateObject::new(t.predicate().clone(), t.object().clone()));
            } else {
                u.deletions.insert(PredicateObject::new(random_predicate(rng), random_object(rng)));
            }
        }
        for _ in 0..rng.gen_range(0..4) {
            let po = PredicateObject::new(random_predicate(rng), random_object(rng));
            if !u.deletions.contains(&po) {
                u.insertions.insert(po);
            }
        }
        if !(u.insertions.is_empty() && u.deletions.is_empty()) {
            return u;
        }
    }
}

pub fn patch_for(update: UpdateInstruction, id: Iri) -> Patch {
    let mut body = PatchBody::new(update, ex("dataset"));
    body.types.insert(PatchType::Other(ex("Change")));
    body.advocates.insert(ex("agent"));
    body.provenance.push(ProvenanceEvent::new(ex("bot"), Some(ex("agent")), t0()));
    Patch::new(id, body)
}

// ------------------------------------------------------ reference engine

pub mod oracle {
    use super::*;
    use oxigraph::model as ox;
    use oxigraph::store::Store;

    fn to_ox_subject(t: &Term) -> ox::Subject {
        match t {
            Term::Iri(i) => ox::NamedNode::new(i.as_str()).unwrap().into(),
            other => panic!("unexpected subject {other}"),
        }
    }

    fn to_ox_term(t: &Term) -> ox::Term {
        match t {
            Term::Iri(i) => ox::NamedNode::new(i.as_str()).unwrap().into(),
            Term::Literal(l) => match l.language() {
                Some(lang) => ox::Literal::new_language_tagged_literal(l.lexical(), lang).unwrap().into(),
                None => ox::Literal::new_typed_literal(l.lexical(), ox::NamedNode::new(l.datatype().as_str()).unwrap())
                    .into(),
            },
            Term::BlankNode(b) => ox::BlankNode::new(b.label()).unwrap().into(),
        }
    }

    #[allow(unreachable_patterns)]
    fn from_ox_term(t: ox::Term) -> Term {
        match t {
            ox::Term::NamedNode(n) => Term::Iri(Iri::new(n.as_str()).unwrap()),
            ox::Term::Literal(l) => Term::Literal(match l.language() {
                Some(lang) => Literal::lang(l.value(), lang).unwrap(),
                None => Literal::typed(l.value(), Iri::new(l.datatype().as_str()).unwrap()).unwrap(),
            }),
            ox::Term::BlankNode(b) => Term::BlankNode(patchr_rdf::BlankNode::new(b.as_str()).unwrap()),
            other => panic!("unexpected term {other}"),
        }
    }

    #[allow(unreachable_patterns)]
    fn from_ox_subject(s: ox::Subject) -> Term {
        match s {
            ox::Subject::NamedNode(n) => Term::Iri(Iri::new(n.as_str()).unwrap()),
            ox::Subject::BlankNode(b) => Term::BlankNode(patchr_rdf::BlankNode::new(b.as_str()).unwrap()),
            other => panic!("unexpected subject {other}"),
        }
    }

    /// Loads `graph` into named graph `name` of a fresh store, runs `update`,
    /// and reads the named graph back.
    pub fn run_update(graph: &Graph, name: &Iri, update: &str) -> Result<Graph, String> {
        let store = Store::new().map_err(|e| e.to_string())?;
        let gname = ox::NamedNode::new(name.as_str()).unwrap();
        for t in graph.iter() {
            let q = ox::Quad::new(
                to_ox_subject(t.subject()),
                ox::NamedNode::new(t.predicate().as_str()).unwrap(),
                to_ox_term(t.object()),
                gname.clone(),
            );
            store.insert(&q).map_err(|e| e.to_string())?;
        }
        store.update(update).map_err(|e| format!("{e}\n{update}"))?;
        let mut out = Graph::new();
        for q in store.quads_for_pattern(None, None, None, Some(ox::GraphNameRef::NamedNode(gname.as_ref()))) {
            let q = q.map_err(|e| e.to_string())?;
            out.insert(
                Triple::new(
                    from_ox_subject(q.subject),
                    Iri::new(q.predicate.as_str()).unwrap(),
                    from_ox_term(q.object),
                )
                .unwrap(),
            );
        }
        Ok(out)
    }
}

// ------------------------------------------------- repository reference

pub const AGENTS: usize = 5;
pub const INSTRUCTIONS: usize = 10;

pub fn agent(i: usize) -> Iri {
    repo(&format!("agent{i}"))
}

/// Ten distinct valid instructions: inserts, deletes and modifications over
/// three subjects.
pub fn universe_instruction(i: usize) -> UpdateInstruction {
    let subject = ex(&format!("s{}", i % 3));
    let p = ex("p");
    let o = |k: usize| ex(&format!("o{k}"));
    let u = UpdateInstruction::new(graph_iri(), subject);
    match i % 3 {
        0 => u.with_insert(p, o(i)),
        1 => u.with_delete(p, o(i)),
        _ => u.with_delete(p.clone(), o(i)).with_insert(p, o(i + 100)),
    }
}

pub fn universe_body(i: usize, submitted_at: DateTime<Utc>) -> PatchBody {
    let mut body = PatchBody::new(universe_instruction(i), dbpedia_dataset());
    body.types.insert(if i.is_multiple_of(2) { PatchType::MissingFact } else { PatchType::WrongFact });
    body.provenance.push(ProvenanceEvent::new(repo("WhoKnows"), None, submitted_at));
    body
}

#[derive(Debug, Clone, Copy)]
pub enum Op {
    Submit { instruction: usize, agent: usize },
    Vote { target: usize, agent: usize, position: VotePosition },
    Status { target: usize, status: PatchStatus },
}

pub fn random_ops(rng: &mut StdRng, len: usize) -> Vec<Op> {
    (0..len)
        .map(|_| match rng.gen_range(0..10) {
            0..=4 => Op::Submit {
                instruction: rng.gen_range(0..INSTRUCTIONS),
                agent: rng.gen_range(0..AGENTS),
            },
            5..=8 => Op::Vote {
                target: rng.gen_range(0..64),
                agent: rng.gen_range(0..AGENTS),
                position: [VotePosition::Advocate, VotePosition::Criticiser, VotePosition::Withdrawn][rng.gen_range(0..3)],
            },
            _ => Op::Status {
                target: rng.gen_range(0..64),
                status: PatchStatus::ALL[rng.gen_range(0..3)],
            },
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelPatch {
    pub instruction: usize,
    pub status: PatchStatus,
    pub advocates: BTreeSet<usize>,
    pub criticisers: BTreeSet<usize>,
    pub provenance: usize,
}

/// The merge/vote/status rules restated over plain indices.
#[derive(Debug, Default)]
pub struct Model {
    pub patches: Vec<ModelPatch>,
    pub open: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Created(usize),
    Merged(usize),
    Ok,
    Conflict,
    Terminal,
    Illegal,
    NoTarget,
}

impl Model {
    pub fn step(&mut self, op: Op) -> Expect {
        match op {
            Op::Submit { instruction, agent } => match self.open.get(&instruction) {
                Some(&idx) => {
                    let p = &mut self.patches[idx];
                    if p.criticisers.contains(&agent) {
                        return Expect::Conflict;
                    }
                    p.advocates.insert(agent);
                    p.provenance += 1;
                    Expect::Merged(idx)
                }
                None => {
                    self.patches.push(ModelPatch {
                        instruction,
                        status: PatchStatus::Active,
                        advocates: [agent].into(),
                        criticisers: BTreeSet::new(),
                        provenance: 1,
                    });
                    let idx = self.patches.len() - 1;
                    self.open.insert(instruction, idx);
                    Expect::Created(idx)
                }
            },
            Op::Vote { target, agent, position } => {
                if self.patches.is_empty() {
                    return Expect::NoTarget;
                }
                let idx = target % self.patches.len();
                let p = &mut self.patches[idx];
                if p.status != PatchStatus::Active {
                    return Expect::Terminal;
                }
                p.advocates.remove(&agent);
                p.criticisers.remove(&agent);
                match position {
                    VotePosition::Advocate => {
                        p.advocates.insert(agent);
                    }
                    VotePosition::Criticiser => {
                        p.criticisers.insert(agent);
                    }
                    VotePosition::Withdrawn => {}
                }
                Expect::Ok
            }
            Op::Status { target, status } => {
                if self.patches.is_empty() {
                    return Expect::NoTarget;
                }
                let idx = target % self.patches.len();
                let p = &mut self.patches[idx];
                if p.status != PatchStatus::Active || status == PatchStatus::Active {
                    return Expect::Illegal;
                }
                p.status = status;
                self.open.remove(&p.instruction);
                Expect::Ok
            }
        }
    }
}

pub fn patch_iri(idx: usize) -> Iri {
    repo(&format!("patch/{}", idx + 1))
}

/// Runs `ops` against a live repository and the model side by side,
/// checking invariants after every step. Returns the repository.
pub fn run_against_model(ops: &[Op]) -> Result<Repository<MemoryJournal>, String> {
    let mut r = Repository::open(MemoryJournal::new(), repo("")).unwrap();
    let mut model = Model::default();
    for (step, &op) in ops.iter().enumerate() {
        let now = at(step as i64 * 7 % 50);
        let expected = model.step(op);
        let n = model.patches.len().max(1);
        let result: Result<Option<(Iri, bool)>, RepositoryError> = match op {
            Op::Submit { instruction, agent: a } => r
                .submit_patch(&universe_body(instruction, now), &agent(a), now)
                .map(|o| Some((o.patch_id, o.merged))),
            Op::Vote { target, agent: a, position } => {
                r.cast_vote(&patch_iri(target % n), &agent(a), position, now).map(|_| None)
            }
            Op::Status { target, status } => r
                .change_status(&patch_iri(target % n), status, &agent(0), now)
                .map(|_| None),
        };
        let agree = match (expected, &result) {
            (Expect::Created(i), Ok(Some((id, false)))) => id == &patch_iri(i),
            (Expect::Merged(i), Ok(Some((id, true)))) => id == &patch_iri(i),
            (Expect::Ok, Ok(None)) => true,
            (Expect::Conflict, Err(RepositoryError::ConflictingPosition { .. })) => true,
            (Expect::Terminal, Err(RepositoryError::TerminalPatch(..))) => true,
            (Expect::Illegal, Err(RepositoryError::IllegalTransition { .. })) => true,
            (Expect::NoTarget, Err(RepositoryError::UnknownPatch(_))) => true,
            _ => false,
        };
        if !agree {
            return Err(format!("step {step} {op:?}: model expected {expected:?}, repository gave {result:?}"));
        }
        r.state().check_invariants().map_err(|e| format!("step {step}: {e}"))?;
        for p in r.state().patches() {
            if !p.body.advocates.is_disjoint(&p.body.criticisers) {
                return Err(format!("step {step}: vote sets of {} overlap", p.id));
            }
        }
        for (i, m) in model.patches.iter().enumerate() {
            let p = r.state().patch(&patch_iri(i)).ok_or(format!("step {step}: patch {i} missing"))?;
            let adv: BTreeSet<Iri> = m.advocates.iter().map(|&a| agent(a)).collect();
            let crit: BTreeSet<Iri> = m.criticisers.iter().map(|&a| agent(a)).collect();
            if p.body.advocates != adv || p.body.criticisers != crit || p.body.status != m.status
                || p.body.provenance.len() != m.provenance
            {
                return Err(format!("step {step}: patch {i} differs from model: {p:?} vs {m:?}"));
            }
        }
        if r.state().len() != model.patches.len() {
            return Err(format!("step {step}: patch count differs"));
        }
    }
    Ok(r)
}

/// A valid patch with every optional part exercised at random.
pub fn random_patch(rng: &mut StdRng, id: Iri) -> Patch {
    let graph = random_graph(rng, 20);
    let mut body = PatchBody::new(random_instruction(rng, &graph), ex(&format!("dataset{}", rng.gen_range(0..2))));
    let types = [
        PatchType::WrongFact,
        PatchType::MissingFact,
        PatchType::EncodingError,
        PatchType::DatatypeError,
        PatchType::Other(ex("Typo")),
    ];
    let count = rng.gen_range(1..4);
    for t in types.choose_multiple(rng, count) {
        body.types.insert(t.clone());
    }
    body.status = PatchStatus::ALL[rng.gen_range(0..3)];
    for a in 0..AGENTS {
        match rng.gen_range(0..3) {
            0 => {
                body.advocates.insert(agent(a));
            }
            1 => {
                body.criticisers.insert(agent(a));
            }
            _ => {}
        }
    }
    if rng.gen_bool(0.3) {
        body.groups.insert(ex(&format!("group{}", rng.gen_range(0..3))));
    }
    if rng.gen_bool(0.3) {
        body.comment = Some(LEXICALS.choose(rng).unwrap().to_string());
    }
    for _ in 0..rng.gen_range(1..4) {
        let actor = rng.gen_bool(0.5).then(|| agent(rng.gen_range(0..AGENTS)));
        let millis = rng.gen_range(0..100_000i64);
        body.record_provenance(ProvenanceEvent::new(ex("bot"), actor, t0() + Duration::milliseconds(millis)));
    }
    Patch::new(id, body)
}
