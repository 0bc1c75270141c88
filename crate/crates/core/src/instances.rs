//! Concrete carriers, morphisms and relations: exclusive ownership, max and
//! additive naturals, ticket maps and lock histories.
//!
//! Finite-map carriers enumerate value vectors lexicographically, key 1 most
//! significant, with an absent key ordered before every value. `top` is last.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::element::{Element, HistOp, Label, Value};
use crate::error::{PcmError, Result};
use crate::morphism::{compose, equalizer, identity, Morphism};
use crate::pcm::{Pcm, PcmStructure};
use crate::seprel::{rel_lift_downclosed, rel_trivial, SepRel};

/// The exclusive-ownership PCM: `ownbar` is the unit and `own ⊕ own = top`.
pub fn pcm_o() -> Pcm {
    static O: OnceLock<Pcm> = OnceLock::new();
    O.get_or_init(|| {
        let elements = vec![Element::ownbar(), Element::own(), Element::Top];
        PcmStructure::from_fn("O", elements, &Element::ownbar(), |x| !x.is_top(), |x, y| {
            match (x, y) {
                (Element::Top, _) | (_, Element::Top) => Element::Top,
                (a, b) if *a == Element::ownbar() => b.clone(),
                (a, b) if *b == Element::ownbar() => a.clone(),
                _ => Element::Top,
            }
        })
        .expect("O is well-formed")
    })
    .clone()
}

/// `{1..n} ∪ {top}` under `max`, unit 1.
pub fn pcm_natmax(n: u32) -> Pcm {
    let mut elements: Vec<Element> = (1..=n.max(1)).map(Element::nat).collect();
    elements.push(Element::Top);
    PcmStructure::from_fn(format!("natmax({n})"), elements, &Element::nat(1), |x| !x.is_top(), |x, y| {
        match (x.as_nat(), y.as_nat()) {
            (Some(a), Some(b)) => Element::nat(a.max(b)),
            _ => Element::Top,
        }
    })
    .expect("natmax is join-closed")
}

/// `{0..cap} ∪ {top}` under addition, unit 0; sums beyond `cap` are `top`.
pub fn pcm_nat_add(cap: u32) -> Pcm {
    let mut elements: Vec<Element> = (0..=cap).map(Element::nat).collect();
    elements.push(Element::Top);
    PcmStructure::from_fn(format!("nat+({cap})"), elements, &Element::nat(0), |x| !x.is_top(), |x, y| {
        match (x.as_nat(), y.as_nat()) {
            (Some(a), Some(b)) if a + b <= cap => Element::nat(a + b),
            _ => Element::Top,
        }
    })
    .expect("capped addition is join-closed")
}

fn finmap_elements(keys: u32, values: &[Value]) -> Vec<Element> {
    let radix = values.len() + 1;
    let count = radix.pow(keys);
    let mut out = Vec::with_capacity(count + 1);
    for code in 0..count {
        let mut m = BTreeMap::new();
        let mut rest = code;
        for k in (1..=keys).rev() {
            let digit = rest % radix;
            rest /= radix;
            if digit > 0 {
                m.insert(k, values[digit - 1].clone());
            }
        }
        out.push(Element::Val(Value::Map(m)));
    }
    out.push(Element::Top);
    out
}

fn disjoint_union(x: &Element, y: &Element) -> Element {
    match (x.as_map(), y.as_map()) {
        (Some(a), Some(b)) if a.keys().all(|k| !b.contains_key(k)) => {
            let mut m = a.clone();
            m.extend(b.iter().map(|(k, v)| (*k, v.clone())));
            Element::Val(Value::Map(m))
        }
        _ => Element::Top,
    }
}

/// Finite maps from keys `1..=keys` to `values`, joined by disjoint union.
pub fn pcm_finmap(name: impl Into<String>, keys: u32, values: &[Value]) -> Pcm {
    PcmStructure::from_fn(
        name,
        finmap_elements(keys, values),
        &Element::empty_map(),
        |x| !x.is_top(),
        disjoint_union,
    )
    .expect("finite maps are join-closed")
}

fn cached(kind: &'static str, bound: u32, build: impl FnOnce() -> Pcm) -> Pcm {
    static CACHE: OnceLock<Mutex<HashMap<(&'static str, u32), Pcm>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("carrier cache").get(&(kind, bound)) {
        return p.clone();
    }
    let p = build();
    cache
        .lock()
        .expect("carrier cache")
        .entry((kind, bound))
        .or_insert(p)
        .clone()
}

/// Ticket maps `{1..B} ⇀ {wait, serve, used}`.
pub fn pcm_tickets(bound: u32) -> Pcm {
    cached("tickets", bound, || {
        let labels: Vec<Value> = Label::ALL.iter().map(|&l| l.into()).collect();
        pcm_finmap(format!("tickets({bound})"), bound, &labels)
    })
}

/// Lock histories `{1..B} ⇀ {L, U}`.
pub fn pcm_hist(bound: u32) -> Pcm {
    cached("hist", bound, || {
        let ops: Vec<Value> = HistOp::ALL.iter().map(|&op| op.into()).collect();
        pcm_finmap(format!("hist({bound})"), bound, &ops)
    })
}

/// A defined ticket map.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TicketMap(pub BTreeMap<u32, Label>);

impl TicketMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(t: u32, l: Label) -> Self {
        TicketMap(BTreeMap::from([(t, l)]))
    }

    pub fn get(&self, t: u32) -> Option<Label> {
        self.0.get(&t).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Disjoint union, `None` on overlapping domains.
    pub fn join(&self, other: &TicketMap) -> Option<TicketMap> {
        if self.0.keys().any(|k| other.0.contains_key(k)) {
            return None;
        }
        let mut m = self.0.clone();
        m.extend(other.0.iter().map(|(k, v)| (*k, *v)));
        Some(TicketMap(m))
    }

    /// Least ticket absent from the domain.
    pub fn fresh(&self) -> u32 {
        (1..).find(|t| !self.0.contains_key(t)).expect("finite map")
    }

    /// Largest used ticket plus one (1 when nothing is used).
    pub fn psi(&self) -> u32 {
        self.0
            .iter()
            .filter(|(_, &l)| l == Label::Used)
            .map(|(&k, _)| k)
            .max()
            .unwrap_or(0)
            + 1
    }

    pub fn count(&self, l: Label) -> usize {
        self.0.values().filter(|&&v| v == l).count()
    }

    pub fn keys_with(&self, l: Label) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().filter(move |(_, &v)| v == l).map(|(&k, _)| k)
    }

    pub fn to_element(&self) -> Element {
        Element::map(self.0.iter().map(|(&k, &l)| (k, l)))
    }

    pub fn from_element(x: &Element) -> Result<Self> {
        match x {
            Element::Top => Err(PcmError::TopInput { op: "ticket map".into() }),
            Element::Val(Value::Map(m)) => m
                .iter()
                .map(|(&k, v)| match v {
                    Value::Label(l) => Ok((k, *l)),
                    _ => Err(PcmError::Invalid(format!("`{x}` is not a ticket map"))),
                })
                .collect::<Result<_>>()
                .map(TicketMap),
            _ => Err(PcmError::Invalid(format!("`{x}` is not a ticket map"))),
        }
    }

    pub fn ordered(&self) -> bool {
        let max = |l| self.keys_with(l).max();
        let min = |l| self.keys_with(l).min();
        let below = |lo: Option<u32>, hi: Option<u32>| match (lo, hi) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        };
        below(max(Label::Used), min(Label::Serve))
            && below(max(Label::Serve), min(Label::Wait))
            && below(max(Label::Used), min(Label::Wait))
    }

    pub fn no_gaps(&self) -> bool {
        self.0.keys().all(|&t| t == 1 || self.0.contains_key(&(t - 1)))
    }
}

impl std::fmt::Display for TicketMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.to_element().fmt(f)
    }
}

/// A defined lock history.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct History(pub BTreeMap<u32, HistOp>);

impl History {
    pub fn from_element(x: &Element) -> Result<Self> {
        match x {
            Element::Top => Err(PcmError::TopInput { op: "history".into() }),
            Element::Val(Value::Map(m)) => m
                .iter()
                .map(|(&k, v)| match v {
                    Value::Op(op) => Ok((k, *op)),
                    _ => Err(PcmError::Invalid(format!("`{x}` is not a history"))),
                })
                .collect::<Result<_>>()
                .map(History),
            _ => Err(PcmError::Invalid(format!("`{x}` is not a history"))),
        }
    }

    pub fn last_key(&self) -> u32 {
        self.0.keys().next_back().copied().unwrap_or(0)
    }
}

/// Least ticket absent from `x`.
pub fn fresh(x: &Element) -> Result<u32> {
    Ok(TicketMap::from_element(x)?.fresh())
}

/// Keys used > served > waiting, compared as sets.
pub fn pred_ordered(x: &Element) -> bool {
    TicketMap::from_element(x).is_ok_and(|m| m.ordered())
}

/// Every present ticket above 1 has its predecessor present.
pub fn pred_no_gaps(x: &Element) -> bool {
    TicketMap::from_element(x).is_ok_and(|m| m.no_gaps())
}

/// Largest timestamp of a history, 0 when empty.
pub fn last_key(h: &Element) -> Result<u32> {
    Ok(History::from_element(h)?.last_key())
}

/// Timestamps run `1..n` with `L` at odd and `U` at even positions.
pub fn pred_alternating(h: &Element) -> bool {
    History::from_element(h).is_ok_and(|h| {
        h.0.iter().enumerate().all(|(i, (&k, &op))| {
            let expect = if k % 2 == 1 { HistOp::L } else { HistOp::U };
            k as usize == i + 1 && op == expect
        })
    })
}

fn map_tickets(x: &Element, f: impl Fn(&TicketMap) -> Element) -> Element {
    match TicketMap::from_element(x) {
        Ok(m) => f(&m),
        Err(_) => Element::Top,
    }
}

/// The identity view of the ticket map, as used by the lock resource.
pub fn morph_sigma(bound: u32) -> Morphism {
    identity(&pcm_tickets(bound)).renamed("sigma")
}

/// Largest used ticket plus one, into `natmax(B+1)`.
pub fn morph_psi(bound: u32) -> Morphism {
    Morphism::total("psi", &pcm_tickets(bound), &pcm_natmax(bound + 1), |x| {
        map_tickets(x, |m| Element::nat(m.psi()))
    })
    .expect("psi stays below B+2")
}

/// Largest ticket of any label plus one, into `natmax(B+1)`.
pub fn morph_max_key(bound: u32) -> Morphism {
    Morphism::total("max_key", &pcm_tickets(bound), &pcm_natmax(bound + 1), |x| {
        map_tickets(x, |m| Element::nat(m.0.keys().max().copied().unwrap_or(0) + 1))
    })
    .expect("max key stays below B+2")
}

/// Keeps only entries labelled `l`.
pub fn morph_filter(bound: u32, l: Label) -> Morphism {
    let p = pcm_tickets(bound);
    Morphism::total(format!("filter_{l}"), &p, &p, |x| {
        map_tickets(x, |m| TicketMap(m.0.iter().filter(|(_, &v)| v == l).map(|(&k, &v)| (k, v)).collect()).to_element())
    })
    .expect("filter stays in the carrier")
}

/// Domain size, into additive naturals capped at B.
pub fn morph_count(bound: u32) -> Morphism {
    Morphism::total("count", &pcm_tickets(bound), &pcm_nat_add(bound), |x| {
        map_tickets(x, |m| Element::nat(m.0.len() as u32))
    })
    .expect("count stays within the cap")
}

/// Number of served tickets, as `count ∘ filter_serve`.
pub fn morph_count_serve(bound: u32) -> Morphism {
    compose(&morph_count(bound), &morph_filter(bound, Label::Serve))
        .expect("filter lands in the tickets carrier")
        .renamed("count_serve")
}

/// `x ⊥ y` with at most one `l`-labelled ticket between them.
pub fn rel_alpha_label(bound: u32, l: Label) -> SepRel {
    let p = pcm_tickets(bound);
    let counts: Vec<usize> = p
        .elements()
        .iter()
        .map(|x| TicketMap::from_element(x).map_or(0, |m| m.count(l)))
        .collect();
    let name = if l == Label::Serve { "alpha".to_string() } else { format!("alpha_{l}") };
    SepRel::from_idx_fn(name, &p, |i, j| p.separate_idx(i, j) && counts[i] + counts[j] <= 1)
}

/// The lock-ownership relation: at most one served ticket between two threads.
pub fn rel_alpha(bound: u32) -> SepRel {
    rel_alpha_label(bound, Label::Serve)
}

/// `own` iff some ticket is labelled `l`, with [`rel_alpha_label`] as seprel.
pub fn morph_alpha_label(bound: u32, l: Label) -> Morphism {
    let name = if l == Label::Serve { "alpha".to_string() } else { format!("alpha_{l}") };
    Morphism::new(
        name,
        &pcm_tickets(bound),
        &pcm_o(),
        |x| map_tickets(x, |m| if m.count(l) > 0 { Element::own() } else { Element::ownbar() }),
        rel_alpha_label(bound, l),
    )
    .expect("alpha lands in O")
}

/// Lock ownership of a ticket map: `own` iff some ticket is being served.
pub fn morph_alpha(bound: u32) -> Morphism {
    morph_alpha_label(bound, Label::Serve)
}

/// Mutant: `alpha` paired with the trivial relation, so it no longer distributes.
pub fn morph_alpha_trivial_seprel(bound: u32) -> Morphism {
    let p = pcm_tickets(bound);
    morph_alpha(bound)
        .with_seprel(rel_trivial(&p))
        .expect("same source")
        .renamed("alpha[trivial seprel]")
}

/// Mutant: `psi` related only on maps whose highest ticket is used. The
/// relation is an equalizer into a non-cancellative target and is not invertible.
pub fn morph_psi_top_used(bound: u32) -> Morphism {
    let rel = equalizer(&morph_psi(bound), &morph_max_key(bound))
        .expect("parallel morphisms")
        .renamed("top_used");
    morph_psi(bound)
        .with_seprel(rel)
        .expect("same source")
        .renamed("psi[top used]")
}

pub fn rel_ordered(bound: u32) -> SepRel {
    rel_lift_downclosed(&pcm_tickets(bound), "ordered", pred_ordered)
}

/// The lift of `no_gaps`; deliberately not a separating relation.
pub fn rel_upsilon(bound: u32) -> SepRel {
    rel_lift_downclosed(&pcm_tickets(bound), "upsilon", pred_no_gaps)
}

/// Mutual-exclusion histories: a lock taken by one side at `t` is either the
/// last event overall or released by the same side at `t + 1`.
pub fn rel_hist(bound: u32) -> SepRel {
    let p = pcm_hist(bound);
    let hs: Vec<Option<History>> = p.elements().iter().map(|x| History::from_element(x).ok()).collect();
    let side_ok = |x: &History, last: u32| {
        x.0.iter()
            .filter(|(_, &op)| op == HistOp::L)
            .all(|(&t, _)| last <= t || x.0.get(&(t + 1)) == Some(&HistOp::U))
    };
    SepRel::from_idx_fn("hist", &p, |i, j| {
        let k = p.join_idx(i, j);
        match (&hs[i], &hs[j], &hs[k]) {
            (Some(x), Some(y), Some(xy)) if p.defined_idx(k) => {
                let last = xy.last_key();
                side_ok(x, last) && side_ok(y, last)
            }
            _ => false,
        }
    })
}

/// Lock ownership of a history: `own` iff its last event is `L`.
pub fn morph_hist_own(bound: u32) -> Morphism {
    Morphism::new(
        "omega",
        &pcm_hist(bound),
        &pcm_o(),
        |x| match History::from_element(x) {
            Ok(h) if h.last_key() > 0 && h.0[&h.last_key()] == HistOp::L => Element::own(),
            Ok(_) => Element::ownbar(),
            Err(_) => Element::Top,
        },
        rel_hist(bound),
    )
    .expect("omega lands in O")
}
