//! The ticket-lock resource: subjective ticket-map states, ghost transitions
//! and their transpositions, the state space, and exhaustive checks that the
//! transitions preserve it.

mod explore;
mod program;

pub use explore::{
    compare_with_quotient, explore, replay, thread_program, Check, ExplorationResult, GlobalConfig,
    ThreadState, TraceStep, Violation,
};
pub use program::{prog_lock, prog_unlock, Assertion, Point, Program, Registers, Step, View};

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::element::{Element, Label};
use crate::error::{PcmError, Result};
use crate::instances::{pcm_tickets, rel_alpha, TicketMap};
use crate::pcm::{Pcm, SubjState};
use crate::report::LawReport;
use crate::subpcm::quotient;

/// A thread's view of the ticket map: its own tickets and everyone else's.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TlState {
    pub self_: TicketMap,
    pub other: TicketMap,
}

impl TlState {
    pub fn new(self_: TicketMap, other: TicketMap) -> Self {
        TlState { self_, other }
    }

    /// `ŝ`, or `None` when the components overlap.
    pub fn joint(&self) -> Option<TicketMap> {
        self.self_.join(&self.other)
    }

    pub fn swap(&self) -> TlState {
        TlState { self_: self.other.clone(), other: self.self_.clone() }
    }

    /// The displayed ticket `ψ(ŝ)`, `None` when `ŝ` is undefined.
    pub fn display(&self) -> Option<u32> {
        self.joint().map(|j| j.psi())
    }

    pub fn to_subj(&self) -> SubjState {
        SubjState { self_: self.self_.to_element(), other: self.other.to_element() }
    }

    pub fn from_subj(s: &SubjState) -> Result<Self> {
        Ok(TlState {
            self_: TicketMap::from_element(&s.self_)?,
            other: TicketMap::from_element(&s.other)?,
        })
    }

    fn witness(&self) -> Vec<Element> {
        vec![self.self_.to_element(), self.other.to_element()]
    }
}

impl fmt::Display for TlState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(self {}, other {})", self.self_, self.other)
    }
}

type Guard = Arc<dyn Fn(&TlState) -> bool + Send + Sync>;
type Update = Arc<dyn Fn(&TlState) -> TlState + Send + Sync>;

/// A ghost transition acting on the self component. Transposition makes it
/// act on the other component instead, modelling a step of the environment.
#[derive(Clone)]
pub struct Transition {
    name: String,
    guard: Guard,
    update: Update,
    transposed: bool,
}

impl fmt::Debug for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Transition({})", self.name())
    }
}

impl Transition {
    pub fn new<G, U>(name: impl Into<String>, guard: G, update: U) -> Transition
    where
        G: Fn(&TlState) -> bool + Send + Sync + 'static,
        U: Fn(&TlState) -> TlState + Send + Sync + 'static,
    {
        Transition { name: name.into(), guard: Arc::new(guard), update: Arc::new(update), transposed: false }
    }

    pub fn name(&self) -> String {
        if self.transposed {
            format!("{}^T", self.name)
        } else {
            self.name.clone()
        }
    }

    pub fn base_name(&self) -> &str {
        &self.name
    }

    pub fn is_transposed(&self) -> bool {
        self.transposed
    }

    /// Swaps the roles of self and other.
    pub fn transpose(&self) -> Transition {
        Transition { transposed: !self.transposed, ..self.clone() }
    }

    pub fn enabled(&self, s: &TlState) -> bool {
        if self.transposed {
            (self.guard)(&s.swap())
        } else {
            (self.guard)(s)
        }
    }

    /// The successor state, or `None` when the guard is false.
    pub fn step(&self, s: &TlState) -> Option<TlState> {
        if self.transposed {
            let t = s.swap();
            (self.guard)(&t).then(|| (self.update)(&t).swap())
        } else {
            (self.guard)(s).then(|| (self.update)(s))
        }
    }
}

fn relabel(m: &TicketMap, t: u32, l: Label) -> TicketMap {
    let mut out = m.clone();
    out.0.insert(t, l);
    out
}

/// Draws the least ticket absent from `ŝ` into self, labelled `wait`.
pub fn tr_taketx(bound: u32) -> Transition {
    Transition::new(
        "taketx",
        move |s| s.joint().is_some_and(|j| j.fresh() <= bound),
        |s| {
            let t = s.joint().expect("guarded").fresh();
            TlState::new(relabel(&s.self_, t, Label::Wait), s.other.clone())
        },
    )
}

/// Promotes the displayed ticket from `wait` to `serve` when self holds it.
pub fn tr_lock() -> Transition {
    Transition::new(
        "lock",
        |s| s.display().is_some_and(|t| s.self_.get(t) == Some(Label::Wait)),
        |s| {
            let t = s.display().expect("guarded");
            TlState::new(relabel(&s.self_, t, Label::Serve), s.other.clone())
        },
    )
}

/// Marks the displayed ticket `used` when self is serving it.
pub fn tr_unlock() -> Transition {
    Transition::new(
        "unlock",
        |s| s.display().is_some_and(|t| s.self_.get(t) == Some(Label::Serve)),
        |s| {
            let t = s.display().expect("guarded");
            TlState::new(relabel(&s.self_, t, Label::Used), s.other.clone())
        },
    )
}

/// Mutant lock: serves the thread's smallest waiting ticket regardless of the display.
pub fn tr_lock_unguarded() -> Transition {
    Transition::new(
        "lock[unguarded]",
        |s| s.self_.keys_with(Label::Wait).next().is_some(),
        |s| {
            let t = s.self_.keys_with(Label::Wait).next().expect("guarded");
            TlState::new(relabel(&s.self_, t, Label::Serve), s.other.clone())
        },
    )
}

/// Mutant unlock: retires the thread's smallest served ticket regardless of the display.
pub fn tr_unlock_unguarded() -> Transition {
    Transition::new(
        "unlock[unguarded]",
        |s| s.self_.keys_with(Label::Serve).next().is_some(),
        |s| {
            let t = s.self_.keys_with(Label::Serve).next().expect("guarded");
            TlState::new(relabel(&s.self_, t, Label::Used), s.other.clone())
        },
    )
}

/// Mutant draw: picks the least ticket absent from self only.
pub fn tr_taketx_blind(bound: u32) -> Transition {
    Transition::new(
        "taketx[blind]",
        move |s| s.self_.fresh() <= bound,
        |s| {
            let t = s.self_.fresh();
            TlState::new(relabel(&s.self_, t, Label::Wait), s.other.clone())
        },
    )
}

/// Which transition a mutated resource replaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    Lock,
    Unlock,
    Taketx,
}

impl FromStr for Mutation {
    type Err = PcmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lock" => Ok(Mutation::Lock),
            "unlock" => Ok(Mutation::Unlock),
            "taketx" => Ok(Mutation::Taketx),
            other => Err(PcmError::Invalid(format!(
                "unknown mutation `{other}` (expected lock, unlock or taketx)"
            ))),
        }
    }
}

/// A ticket-lock resource over a bounded carrier. Separation of the two
/// components is judged by the carrier, so a quotient carrier yields the
/// rebased resource.
#[derive(Clone)]
pub struct Resource {
    pub name: String,
    pub pcm: Pcm,
    pub bound: u32,
    pub transitions: Vec<Transition>,
    pub mutation: Option<Mutation>,
}

impl fmt::Debug for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Resource")
            .field("name", &self.name)
            .field("bound", &self.bound)
            .field("mutation", &self.mutation)
            .finish()
    }
}

/// The ticket-lock resource over `tickets(B)`.
pub fn resource_tl(bound: u32) -> Resource {
    Resource {
        name: format!("TL({bound})"),
        pcm: pcm_tickets(bound),
        bound,
        transitions: vec![tr_taketx(bound), tr_lock(), tr_unlock()],
        mutation: None,
    }
}

/// The same transitions over the quotient of `tickets(B)` by the lock-ownership relation.
pub fn resource_tl_quotient(bound: u32) -> Result<Resource> {
    let w = quotient(&pcm_tickets(bound), &rel_alpha(bound))?;
    Ok(Resource { name: format!("TL'({bound})"), pcm: w.sub, ..resource_tl(bound) })
}

impl Resource {
    pub fn with_mutation(mut self, m: Mutation) -> Resource {
        let (slot, tr) = match m {
            Mutation::Taketx => (0, tr_taketx_blind(self.bound)),
            Mutation::Lock => (1, tr_lock_unguarded()),
            Mutation::Unlock => (2, tr_unlock_unguarded()),
        };
        self.transitions[slot] = tr;
        self.mutation = Some(m);
        self
    }

    pub fn transition(&self, base_name: &str) -> Option<&Transition> {
        self.transitions
            .iter()
            .find(|t| t.base_name() == base_name || t.base_name().starts_with(&format!("{base_name}[")))
    }

    /// The transitions followed by their transpositions.
    pub fn all_transitions(&self) -> Vec<Transition> {
        let mut out = self.transitions.clone();
        out.extend(self.transitions.iter().map(Transition::transpose));
        out
    }

    /// Components separate in the carrier.
    pub fn separate(&self, a: &TicketMap, b: &TicketMap) -> bool {
        self.pcm.is_separate(&a.to_element(), &b.to_element()).unwrap_or(false)
    }

    /// `self ⊥ other ∧ ordered(ŝ) ∧ no_gaps(ŝ)`.
    pub fn in_statespace(&self, s: &TlState) -> bool {
        self.separate(&s.self_, &s.other) && s.joint().is_some_and(|j| j.ordered() && j.no_gaps())
    }

    /// Every state of the state space, in carrier order.
    pub fn states(&self) -> Vec<TlState> {
        let maps: Vec<TicketMap> = self
            .pcm
            .elements()
            .iter()
            .filter_map(|x| TicketMap::from_element(x).ok())
            .collect();
        let mut out = Vec::new();
        for a in &maps {
            for b in &maps {
                let s = TlState::new(a.clone(), b.clone());
                if self.in_statespace(&s) {
                    out.push(s);
                }
            }
        }
        out
    }
}

fn alpha_sep(s: &TlState) -> bool {
    s.joint().is_some() && s.self_.count(Label::Serve) + s.other.count(Label::Serve) <= 1
}

/// Each transition and its transposition keeps `ordered`, `no_gaps` and
/// separation of the components.
pub fn check_statespace_preservation(r: &Resource) -> LawReport {
    let mut rep = LawReport::new(format!("state-space preservation: {}", r.name));
    let states = r.states();
    for tr in r.all_transitions() {
        let first = |bad: &dyn Fn(&TlState) -> bool| {
            states
                .iter()
                .find(|s| tr.step(s).is_some_and(|s2| bad(&s2)))
                .map(TlState::witness)
        };
        let ordered = first(&|s2| !s2.joint().is_some_and(|j| j.ordered()));
        let gaps = first(&|s2| !s2.joint().is_some_and(|j| j.no_gaps()));
        let sep = first(&|s2| !r.separate(&s2.self_, &s2.other));
        let name = tr.name();
        rep.record(format!("ordered preserved by {name}"), ordered);
        rep.record(format!("no_gaps preserved by {name}"), gaps);
        rep.record(format!("separation preserved by {name}"), sep);
    }
    rep.stat("states", states.len() as u64);
    rep
}

fn alpha_preservation(r: &Resource, rep: &mut LawReport, states: &[TlState]) {
    for tr in r.all_transitions() {
        let bad = states
            .iter()
            .filter(|s| alpha_sep(s))
            .find(|s| tr.step(s).is_some_and(|s2| !alpha_sep(&s2)))
            .map(TlState::witness);
        rep.record(format!("alpha-separation preserved by {}", tr.name()), bad);
    }
}

/// Closure of `s` under transposed transitions; returns the first reached
/// state violating `keep`, if any.
fn interference_breaks(r: &Resource, s: &TlState, keep: &dyn Fn(&TlState) -> bool) -> Option<TlState> {
    let others: Vec<Transition> = r.transitions.iter().map(Transition::transpose).collect();
    let mut seen = HashSet::from([s.clone()]);
    let mut queue = VecDeque::from([s.clone()]);
    while let Some(cur) = queue.pop_front() {
        for tr in &others {
            if let Some(next) = tr.step(&cur) {
                if !keep(&next) {
                    return Some(next);
                }
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    None
}

/// Stability of the proof invariants: lock-ownership separation is kept by
/// every step, and the waiting-ticket and held-display assertions survive any
/// sequence of environment steps.
pub fn check_stability(r: &Resource) -> LawReport {
    let mut rep = LawReport::new(format!("stability: {}", r.name));
    let states = r.states();
    alpha_preservation(r, &mut rep, &states);

    let mut closure_law = |law: &str, holds: &dyn Fn(&TlState, u32) -> bool, tickets: &dyn Fn(&TlState) -> Vec<u32>| {
        let bad = states.iter().find_map(|s| {
            tickets(s).into_iter().filter(|&t| holds(s, t)).find_map(|t| {
                interference_breaks(r, s, &|s2| holds(s2, t)).map(|s2| {
                    let mut w = s.witness();
                    w.extend(s2.witness());
                    w
                })
            })
        });
        rep.record(law, bad);
    };
    closure_law(
        "wait-ticket display bound stable under interference",
        &|s, t| s.self_.get(t) == Some(Label::Wait) && s.display().is_some_and(|d| d <= t),
        &|s| s.self_.keys_with(Label::Wait).collect(),
    );
    closure_law(
        "held display stable under interference",
        &|s, t| s.self_.get(t) == Some(Label::Serve) && s.display() == Some(t),
        &|s| s.self_.keys_with(Label::Serve).collect(),
    );
    rep.stat("states", states.len() as u64);
    rep
}

/// The side condition for rebasing the resource onto the quotient by the
/// lock-ownership relation: every transition and transposition preserves it.
pub fn check_simulation_to_quotient(r: &Resource) -> LawReport {
    let mut rep = LawReport::new(format!("simulation into quotient: {}", r.name));
    let states = r.states();
    alpha_preservation(r, &mut rep, &states);
    if rep.passed() {
        rep.note("alpha-separation is invariant, so its conjunct in the abstract specs can be elided on the quotient");
    }
    rep.stat("states", states.len() as u64);
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tm(entries: &[(u32, Label)]) -> TicketMap {
        TicketMap(entries.iter().copied().collect())
    }

    #[test]
    fn transitions_from_empty() {
        let s = TlState::default();
        let s1 = tr_taketx(3).step(&s).unwrap();
        assert_eq!(s1.self_, tm(&[(1, Label::Wait)]));
        let s2 = tr_lock().step(&s1).unwrap();
        assert_eq!(s2.self_, tm(&[(1, Label::Serve)]));
        let s3 = tr_unlock().step(&s2).unwrap();
        assert_eq!(s3.self_, tm(&[(1, Label::Used)]));
        assert_eq!(s3.display(), Some(2));
        assert!(tr_unlock().step(&s1).is_none());
    }

    #[test]
    fn transposition() {
        let s = TlState::default();
        let t = tr_taketx(3).transpose();
        let s1 = t.step(&s).unwrap();
        assert_eq!(s1.other, tm(&[(1, Label::Wait)]));
        assert!(s1.self_.is_empty());
        let tt = t.transpose();
        assert!(!tt.is_transposed());
        assert_eq!(tt.step(&s), tr_taketx(3).step(&s));
    }

    #[test]
    fn taketx_respects_bound() {
        let s = TlState::new(tm(&[(1, Label::Wait)]), TicketMap::new());
        assert!(tr_taketx(1).step(&s).is_none());
        assert!(tr_taketx(2).step(&s).is_some());
    }

    #[test]
    fn statespace_membership() {
        let r = resource_tl(3);
        assert!(r.in_statespace(&TlState::default()));
        assert!(!r.in_statespace(&TlState::new(tm(&[(2, Label::Wait)]), TicketMap::new())));
        assert!(r.in_statespace(&TlState::new(tm(&[(1, Label::Serve)]), tm(&[(2, Label::Wait)]))));
    }

    #[test]
    fn mutation_parsing() {
        assert_eq!("lock".parse::<Mutation>().unwrap(), Mutation::Lock);
        assert!("spin".parse::<Mutation>().is_err());
    }

    #[test]
    fn unguarded_lock_breaks_statespace() {
        let r = resource_tl(3).with_mutation(Mutation::Lock);
        let rep = check_statespace_preservation(&r);
        assert!(!rep.passed());
        assert!(rep.failed_laws().iter().any(|l| l.starts_with("ordered preserved by lock[unguarded]")));
    }
}
