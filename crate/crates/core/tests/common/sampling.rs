//! A 3-relation, 6-node graph whose every triple can be enumerated, and
//! the sampling-rule checks run against it.

use std::collections::BTreeSet;

use discatt::sme::{
    expand_positives, CorruptionKind, Corruptor, Fact, KnowledgeGraph, Relation, RelationSchema,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `Near` is symmetric; `Part` entails `Near`; `Kind` entails `Part`, so
/// `Kind` reaches `Near` only through the chain.
pub fn schema() -> RelationSchema {
    let rel = |name: &str, symmetric, entails: &[&str]| Relation {
        name: name.into(),
        symmetric,
        entails: entails.iter().map(|s| s.to_string()).collect(),
    };
    RelationSchema::new(vec![
        rel("Near", true, &[]),
        rel("Part", false, &["Near"]),
        rel("Kind", false, &["Part"]),
    ])
    .unwrap()
}

pub fn graph() -> KnowledgeGraph {
    let mut kg = KnowledgeGraph::new();
    for (r, h, t) in [
        ("Kind", "a", "b"),
        ("Part", "c", "d"),
        ("Near", "e", "f"),
        ("Kind", "b", "b"),
        ("Part", "a", "b"),
    ] {
        kg.add_edge(r, h, t);
    }
    kg
}

pub type Named = (String, String, String);

/// Independent fixpoint: generalize along direct entailments and reverse
/// symmetric relations until nothing changes.
pub fn expected_closure() -> BTreeSet<Named> {
    let direct = |r: &str| -> Vec<&'static str> {
        match r {
            "Part" => vec!["Near"],
            "Kind" => vec!["Part"],
            _ => vec![],
        }
    };
    let mut set: BTreeSet<Named> = graph()
        .edges()
        .map(|(r, h, t)| (r.to_string(), h.to_string(), t.to_string()))
        .collect();
    loop {
        let mut next = set.clone();
        for (r, h, t) in &set {
            for g in direct(r) {
                next.insert((g.to_string(), h.clone(), t.clone()));
            }
            if r == "Near" {
                next.insert((r.clone(), t.clone(), h.clone()));
            }
        }
        if next == set {
            return set;
        }
        set = next;
    }
}

pub fn named(kg: &KnowledgeGraph, s: &RelationSchema, f: &Fact) -> Named {
    let (r, h, t) = f.named(kg, s);
    (r.to_string(), h.to_string(), t.to_string())
}

pub fn every_fact(kg: &KnowledgeGraph, s: &RelationSchema) -> Vec<Fact> {
    let n = kg.node_count();
    let mut out = Vec::new();
    for rel in 0..s.len() {
        for head in 0..n {
            for tail in 0..n {
                out.push(Fact { rel, head, tail });
            }
        }
    }
    out
}

pub fn check_graph_shape() {
    let kg = graph();
    assert_eq!(kg.node_count(), 6);
    assert_eq!(schema().len(), 3);
}

pub fn check_expansion_is_closure() {
    let (kg, s) = (graph(), schema());
    let pos = expand_positives(&kg, &s).unwrap();
    let got: BTreeSet<Named> = pos.facts().iter().map(|f| named(&kg, &s, f)).collect();
    assert_eq!(got.len(), pos.len(), "duplicates in expansion");
    assert_eq!(got, expected_closure());
    assert!(got.contains(&("Near".into(), "b".into(), "a".into())));

    // applying each rule once more adds nothing
    for f in pos.facts() {
        for &g in s.entailed_by(f.rel) {
            assert!(pos.contains(&Fact { rel: g, ..*f }));
        }
        if s.is_symmetric(f.rel) {
            assert!(pos.contains(&Fact {
                rel: f.rel,
                head: f.tail,
                tail: f.head,
            }));
        }
    }
}

pub fn check_relation_replacement() {
    let (kg, s) = (graph(), schema());
    let c = Corruptor::new(&kg, &s).unwrap();
    let kind = s.index_of("Kind").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for f in c.positives().facts() {
        let mut seen = BTreeSet::new();
        if !c
            .applicable_kinds(f)
            .contains(&CorruptionKind::ReplaceRelation)
        {
            continue;
        }
        for _ in 0..200 {
            let out = c.apply(f, CorruptionKind::ReplaceRelation, &mut rng);
            assert_eq!((out.head, out.tail), (f.head, f.tail));
            seen.insert(out.rel);
        }
        let allowed: BTreeSet<usize> = (0..s.len())
            .filter(|&r| r != f.rel && !s.entailed_by(f.rel).contains(&r))
            .collect();
        assert_eq!(seen, allowed, "replacements for {:?}", named(&kg, &s, f));
    }
    // Kind entails everything else, so it cannot be relation-corrupted
    let kab = c
        .positives()
        .facts()
        .iter()
        .find(|f| f.rel == kind)
        .unwrap();
    assert!(!c
        .applicable_kinds(kab)
        .contains(&CorruptionKind::ReplaceRelation));
}

pub fn check_flips() {
    let (kg, s) = (graph(), schema());
    let c = Corruptor::new(&kg, &s).unwrap();
    for f in every_fact(&kg, &s) {
        let flips = c
            .applicable_kinds(&f)
            .contains(&CorruptionKind::FlipDirection);
        assert_eq!(flips, !s.is_symmetric(f.rel) && f.head != f.tail, "{f:?}");
    }
}

pub fn check_corrupt_returns_negatives() {
    let (kg, s) = (graph(), schema());
    let c = Corruptor::new(&kg, &s).unwrap();
    let all = every_fact(&kg, &s);
    let negatives: BTreeSet<Fact> = all
        .iter()
        .copied()
        .filter(|f| !c.positives().contains(f))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut reached = BTreeSet::new();
    for f in c.positives().facts() {
        for _ in 0..300 {
            let out = c.corrupt(f, &mut rng).unwrap();
            assert!(negatives.contains(&out), "{:?} from {:?}", out, f);
            // exactly one corruption step away from the source
            let same_terms = (out.head, out.tail) == (f.head, f.tail);
            let flipped = (out.head, out.tail) == (f.tail, f.head) && out.rel == f.rel;
            let one_term = out.rel == f.rel && ((out.head == f.head) ^ (out.tail == f.tail));
            assert!(same_terms || flipped || one_term);
            if flipped {
                assert!(!s.is_symmetric(f.rel));
            }
            if same_terms {
                assert!(!s.entailed_by(f.rel).contains(&out.rel));
            }
            reached.insert(out);
        }
    }
    assert!(reached.len() > negatives.len() / 2);
}

pub fn check_all() {
    check_graph_shape();
    check_expansion_is_closure();
    check_relation_replacement();
    check_flips();
    check_corrupt_returns_negatives();
}
