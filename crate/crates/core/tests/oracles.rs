//! Reported witnesses and counts, recomputed by naive brute force that shares
//! no code with the library, then frozen.

use std::collections::BTreeMap;

use pcmorph_core::*;
use Label::{Serve, Used, Wait};

type Map = BTreeMap<u32, Label>;

/// Every ticket map over keys `1..=bound`.
fn all_maps(bound: u32) -> Vec<Map> {
    let mut out = vec![Map::new()];
    for k in 1..=bound {
        let mut next = Vec::new();
        for m in &out {
            next.push(m.clone());
            for l in [Wait, Serve, Used] {
                let mut m2 = m.clone();
                m2.insert(k, l);
                next.push(m2);
            }
        }
        out = next;
    }
    out
}

fn union(x: &Map, y: &Map) -> Option<Map> {
    if x.keys().any(|k| y.contains_key(k)) {
        return None;
    }
    let mut m = x.clone();
    m.extend(y.iter().map(|(k, v)| (*k, *v)));
    Some(m)
}

fn serves(m: &Map) -> usize {
    m.values().filter(|&&l| l == Serve).count()
}

fn psi(m: &Map) -> u32 {
    m.iter().filter(|(_, &l)| l == Used).map(|(&k, _)| k).max().unwrap_or(0) + 1
}

fn gap_free(m: &Map) -> bool {
    m.keys().copied().eq(1..=m.len() as u32)
}

fn elem(m: &Map) -> Element {
    Element::map(m.iter().map(|(&k, &l)| (k, l)))
}

/// Subsets of `m` paired with their complements.
fn splits(m: &Map) -> Vec<(Map, Map)> {
    let keys: Vec<u32> = m.keys().copied().collect();
    (0..1u32 << keys.len())
        .map(|mask| {
            let (mut a, mut b) = (Map::new(), Map::new());
            for (i, k) in keys.iter().enumerate() {
                let side = if mask >> i & 1 == 1 { &mut a } else { &mut b };
                side.insert(*k, m[k]);
            }
            (a, b)
        })
        .collect()
}

#[test]
fn ticket_carrier_matches_naive_maps() {
    for bound in 1..=3 {
        let p = pcm_tickets(bound);
        let maps = all_maps(bound);
        assert_eq!(p.len(), maps.len() + 1);
        for x in &maps {
            for y in &maps {
                let got = p.join(&elem(x), &elem(y)).unwrap();
                match union(x, y) {
                    Some(u) => assert_eq!(got, elem(&u)),
                    None => assert!(got.is_top()),
                }
            }
        }
    }
}

#[test]
fn alpha_related_pairs_count() {
    let maps = all_maps(3);
    let naive = maps
        .iter()
        .flat_map(|x| maps.iter().map(move |y| (x, y)))
        .filter(|(x, y)| union(x, y).is_some_and(|u| serves(&u) <= 1))
        .count() as u64;
    let rep = check_seprel_laws(&rel_alpha(3));
    assert_eq!(rep.stats["related_pairs"], naive);
    // Per key: absent or one side with a non-serve label (5 ways), and at most one serve overall.
    assert_eq!(naive, 5u64.pow(3) + 3 * 2 * 5u64.pow(2));
}

#[test]
fn upsilon_first_associativity_failure() {
    let maps = all_maps(3);
    let p = pcm_tickets(3);
    let order: Vec<Map> = p
        .elements()
        .iter()
        .filter_map(|x| TicketMap::from_element(x).ok().map(|t| t.0))
        .collect();
    assert_eq!(order.len(), maps.len());
    let ups = |x: &Map, y: &Map| union(x, y).is_some_and(|u| gap_free(&u));
    let mut first = None;
    'search: for x in &order {
        for y in &order {
            for z in &order {
                let premise = ups(x, y) && union(x, y).is_some_and(|xy| ups(&xy, z));
                let conclusion = union(y, z).is_some_and(|yz| ups(x, &yz)) && ups(y, z);
                if premise && !conclusion {
                    first = Some((x.clone(), y.clone(), z.clone()));
                    break 'search;
                }
            }
        }
    }
    let (x, y, z) = first.expect("upsilon is not associative");
    let frozen = (Map::from([(2, Wait)]), Map::from([(1, Wait)]), Map::from([(3, Wait)]));
    assert_eq!((x.clone(), y.clone(), z.clone()), frozen);
    let rep = check_seprel_laws(&rel_upsilon(3));
    assert_eq!(rep.witness("associativity").unwrap(), &[elem(&x), elem(&y), elem(&z)]);

    let x = Map::from([(2, Wait)]);
    assert!(ups(&x, &Map::from([(1, Wait)])));
    assert!(!ups(&x, &Map::new()));
    assert_eq!(rep.status("definedness"), Some(Status::Fail));
}

#[test]
fn tensor_non_invertibility_witness() {
    let a = Map::from([(2, Serve)]);
    let alpha = |m: &Map| serves(m) > 0;
    // α⊗α sends `a` to (own, own), which splits as (ownbar, own) ⊕ (own, ownbar);
    // the only splits of `a` send both halves to equal pairs.
    assert!(alpha(&a));
    let alpha_pair = |m: &Map| (alpha(m), alpha(m));
    let lifts = splits(&a).iter().any(|(a1, a2)| {
        serves(a1) + serves(a2) <= 1 && alpha_pair(a1) == (false, true) && alpha_pair(a2) == (true, false)
    });
    assert!(!lifts);

    let a2 = morph_alpha(2);
    let rep = check_invertible_morph(&tensor(&a2, &a2).unwrap());
    let frozen = [
        elem(&a),
        Element::pair(Element::ownbar(), Element::own()),
        Element::pair(Element::own(), Element::ownbar()),
    ];
    assert_eq!(rep.witness("invertibility").unwrap(), &frozen);
}

#[test]
fn natmax_cancellativity_witness() {
    let mut first = None;
    'search: for a in 1..=5u32 {
        for b in 1..=5u32 {
            for c in 1..=5u32 {
                if b != c && a.max(b) == a.max(c) {
                    first = Some((a, b, c));
                    break 'search;
                }
            }
        }
    }
    assert_eq!(first, Some((2, 1, 2)));
    let rep = check_cancellative(&pcm_natmax(5));
    assert_eq!(rep.witness("cancellativity").unwrap(), &[Element::nat(2), Element::nat(1), Element::nat(2)]);
    assert_eq!(3u32.max(2), 3u32.max(1));
}

#[test]
fn framing_mutant_witness() {
    let top_used = |m: &Map| m.iter().next_back().is_none_or(|(_, &l)| l == Used);
    let rel = |x: &Map, y: &Map| union(x, y).is_some() && top_used(x) && top_used(y);
    let f = |b: u32, s: &Map, o: &Map| psi(s) == b && rel(s, o);
    let star = |b1: u32, b2: u32, s: &Map, o: &Map| {
        splits(s).iter().any(|(a1, a2)| {
            f(b1, a1, &union(a2, o).unwrap()) && f(b2, a2, &union(a1, o).unwrap())
        })
    };
    let a = Map::from([(2, Used), (3, Used)]);
    let o = Map::from([(1, Wait)]);
    assert!(star(3, 4, &a, &o));
    assert!(!f(3u32.max(4), &a, &o));

    let rep = check_framing_lemmas(&rel_alpha(3), &morph_psi_top_used(3));
    assert_eq!(
        rep.witness("F(b1⊕b2) ⇐ F(b1)∗F(b2)").unwrap(),
        &[elem(&a), elem(&o), Element::nat(3), Element::nat(4)]
    );

    for bound in 1..=2 {
        let rep = check_framing_lemmas(&rel_alpha(bound), &morph_psi_top_used(bound));
        assert_eq!(rep.status("F(b1⊕b2) ⇐ F(b1)∗F(b2)"), Some(Status::Pass));
    }
}

#[test]
fn subpcm_mutant_witness() {
    let maps = all_maps(3);
    let p = pcm_tickets(3);
    let first = p
        .elements()
        .iter()
        .filter_map(|x| TicketMap::from_element(x).ok())
        .find(|m| serves(&m.0) > 1)
        .unwrap();
    assert_eq!(first.0, Map::from([(2, Serve), (3, Serve)]));
    assert!(maps.contains(&first.0));

    let w = quotient(&p, &rel_alpha(3)).unwrap();
    let mutant = SubPcmWitness { retract: w.retract.with_seprel(rel_trivial(&p)).unwrap(), ..w };
    let rep = check_subpcm_axioms(&mutant);
    assert_eq!(rep.witness("inject-retract").unwrap(), &[elem(&first.0)]);
    assert_eq!(rep.status("retract-reflects"), Some(Status::Pass));
}

#[test]
fn product_non_normality_count() {
    let o = pcm_o();
    let rep = check_pcm_laws(&product(&o, &o));
    // Pairs with exactly one top component: two choices of side, two defined partners.
    assert_eq!(rep.stats["undefined_besides_top"], 4);
    assert_eq!(rep.stats["elements"], 9);
}

#[test]
fn quotient_sizes() {
    let maps = all_maps(3);
    let w = quotient(&pcm_tickets(3), &rel_alpha(3)).unwrap();
    let naive = maps.iter().filter(|m| serves(m) <= 1).count();
    assert_eq!(w.sub.len(), naive + 1);
    assert_eq!(naive, 54);
}

#[test]
fn statespace_size() {
    let maps = all_maps(3);
    let ordered = |m: &Map| {
        let keys = |l: Label| m.iter().filter(move |(_, &v)| v == l).map(|(&k, _)| k);
        let below = |lo: Label, hi: Label| keys(lo).all(|a| keys(hi).all(|b| a < b));
        below(Used, Serve) && below(Serve, Wait) && below(Used, Wait)
    };
    let naive = maps
        .iter()
        .flat_map(|x| maps.iter().map(move |y| (x, y)))
        .filter(|(x, y)| union(x, y).is_some_and(|u| ordered(&u) && gap_free(&u)))
        .count();
    assert_eq!(resource_tl(3).states().len(), naive);
}

#[test]
fn mutant_trace_is_minimal() {
    // Each thread must draw and then lock: four steps, five configurations.
    let r = resource_tl(4).with_mutation(Mutation::Lock);
    let p = thread_program(&r, 1).unwrap();
    let res = explore(&r, &[p.clone(), p], &[Check::Mutex]).unwrap();
    let v = res.violation(Check::Mutex).unwrap();
    assert_eq!(v.trace.len(), 5);
    let threads: Vec<Option<usize>> = v.trace.iter().map(|s| s.thread).collect();
    assert_eq!(threads, [None, Some(0), Some(0), Some(1), Some(1)]);
}
