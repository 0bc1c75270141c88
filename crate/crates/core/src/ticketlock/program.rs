//! Lock and unlock as straight-line programs with a proof-outline assertion
//! attached to every program point.

use std::fmt;
use std::sync::Arc;

use super::{Mutation, Resource, Transition};
use crate::element::Label;
use crate::instances::TicketMap;

/// Thread-local variables, including the logical frame variables of the outlines.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Registers {
    /// Ticket drawn by the lock.
    pub x: u32,
    /// Last display read by the spin loop.
    pub y: u32,
    /// Display snapshot taken by the unlock.
    pub t: u32,
    /// Tickets held when the lock started.
    pub k_lock: TicketMap,
    /// Tickets held besides the served one when the unlock started.
    pub k_unlock: TicketMap,
}

/// What an assertion sees: the thread's subjective state and its registers.
pub struct View<'a> {
    pub self_: &'a TicketMap,
    pub other: &'a TicketMap,
    pub joint: &'a TicketMap,
    pub regs: &'a Registers,
}

impl View<'_> {
    pub fn display(&self) -> u32 {
        self.joint.psi()
    }

    /// The thread holds the lock: it has a ticket labelled `serve`.
    pub fn owns(&self) -> bool {
        self.self_.count(Label::Serve) > 0
    }

    /// Lock-ownership separation: at most one `serve` ticket overall.
    pub fn alpha_separate(&self) -> bool {
        self.joint.count(Label::Serve) <= 1
    }

    fn frame_plus(&self, k: &TicketMap, t: u32, l: Label) -> bool {
        k.join(&TicketMap::singleton(t, l)).as_ref() == Some(self.self_)
    }
}

type Pred = Arc<dyn Fn(&View) -> bool + Send + Sync>;

/// A named predicate over views.
#[derive(Clone)]
pub struct Assertion {
    pub text: String,
    pred: Pred,
}

impl fmt::Debug for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Assertion {
    pub fn new(text: impl Into<String>, pred: impl Fn(&View) -> bool + Send + Sync + 'static) -> Self {
        Assertion { text: text.into(), pred: Arc::new(pred) }
    }

    pub fn holds(&self, v: &View) -> bool {
        (self.pred)(v)
    }

    pub fn and(&self, other: &Assertion) -> Assertion {
        let (a, b) = (self.pred.clone(), other.pred.clone());
        Assertion { text: format!("{} ∧ {}", self.text, other.text), pred: Arc::new(move |v| a(v) && b(v)) }
    }
}

/// The command at a program point.
#[derive(Debug, Clone)]
pub enum Step {
    /// Draw a ticket with the given transition and bind it to `x`.
    Draw(Transition),
    /// `y := ψ(ŝ)`.
    Observe,
    /// Continue when `x = y`, otherwise jump back.
    UntilEqual { back: usize },
    /// Bind `t := ψ(ŝ)` and the unlock frame; a purely logical step.
    Snapshot,
    /// Fire a transition; blocks while its guard is false.
    Atomic(Transition),
}

#[derive(Debug, Clone)]
pub struct Point {
    pub label: String,
    pub step: Step,
    pub assertion: Assertion,
    /// Entering this point records the lock frame `k_lock := self`.
    pub sets_frame: bool,
}

/// Points executed in order, followed by a postcondition at the exit.
#[derive(Debug, Clone)]
pub struct Program {
    pub name: String,
    pub points: Vec<Point>,
    pub post: Assertion,
}

impl Program {
    /// Sequential composition; the first postcondition is conjoined into the
    /// second program's entry assertion.
    pub fn then(&self, next: &Program) -> Program {
        let offset = self.points.len();
        let mut points = self.points.clone();
        for (i, p) in next.points.iter().enumerate() {
            let mut p = p.clone();
            if let Step::UntilEqual { back } = &mut p.step {
                *back += offset;
            }
            if i == 0 {
                p.assertion = self.post.and(&p.assertion);
            }
            points.push(p);
        }
        Program { name: format!("{}; {}", self.name, next.name), points, post: next.post.clone() }
    }

    /// Number of tickets one run draws.
    pub fn draws(&self) -> u32 {
        self.points.iter().filter(|p| matches!(p.step, Step::Draw(_))).count() as u32
    }

    /// The assertion at `pc`, the postcondition past the last point.
    pub fn assertion(&self, pc: usize) -> &Assertion {
        self.points.get(pc).map_or(&self.post, |p| &p.assertion)
    }

    pub fn label(&self, pc: usize) -> &str {
        self.points.get(pc).map_or("done", |p| p.label.as_str())
    }
}

fn lock_entry() -> Assertion {
    Assertion::new("self = k ∧ α(self) = ownbar ∧ self ⊥α other", |v| {
        v.self_ == &v.regs.k_lock && !v.owns() && v.alpha_separate()
    })
}

fn waiting() -> Assertion {
    Assertion::new("self = k ⊎ {x↦wait}", |v| v.frame_plus(&v.regs.k_lock, v.regs.x, Label::Wait))
}

fn lock_post() -> Assertion {
    Assertion::new("self = k ⊎ {ψ↦serve} ∧ α(self) = own ∧ self ⊥α other", |v| {
        v.frame_plus(&v.regs.k_lock, v.display(), Label::Serve) && v.owns() && v.alpha_separate()
    })
}

/// Draw a ticket, spin until the display reaches it, then take the lock.
/// With the lock mutation the spin loop is gone and the unguarded transition
/// fires straight after the draw.
pub fn prog_lock(r: &Resource) -> Program {
    let taketx = r.transition("taketx").expect("resource has taketx").clone();
    let lock = r.transition("lock").expect("resource has lock").clone();
    let draw = Point { label: "L0".into(), step: Step::Draw(taketx), assertion: lock_entry(), sets_frame: true };
    let bound = Assertion::new("ψ ≤ x", |v| v.display() <= v.regs.x);
    let points = if r.mutation == Some(Mutation::Lock) {
        vec![
            draw,
            Point { label: "L1".into(), step: Step::Atomic(lock), assertion: waiting().and(&bound), sets_frame: false },
        ]
    } else {
        vec![
            draw,
            Point { label: "L1".into(), step: Step::Observe, assertion: waiting().and(&bound), sets_frame: false },
            Point {
                label: "L2".into(),
                step: Step::UntilEqual { back: 1 },
                assertion: waiting().and(&Assertion::new("y ≤ ψ ≤ x", |v| {
                    v.regs.y <= v.display() && v.display() <= v.regs.x
                })),
                sets_frame: false,
            },
            Point {
                label: "L3".into(),
                step: Step::Atomic(lock),
                assertion: waiting().and(&Assertion::new("y = ψ = x", |v| {
                    v.regs.y == v.display() && v.display() == v.regs.x
                })),
                sets_frame: false,
            },
        ]
    };
    Program { name: "lock".into(), points, post: lock_post() }
}

/// Snapshot the served ticket, then mark it used.
pub fn prog_unlock(r: &Resource) -> Program {
    let unlock = r.transition("unlock").expect("resource has unlock").clone();
    let entry = Assertion::new(
        "α(self) = own ∧ self(ψ) = serve ∧ serve unique in self ∧ ordered(ŝ) ∧ no_gaps(ŝ) ∧ self ⊥α other",
        |v| {
            v.owns()
                && v.self_.get(v.display()) == Some(Label::Serve)
                && v.self_.count(Label::Serve) == 1
                && v.joint.ordered()
                && v.joint.no_gaps()
                && v.alpha_separate()
        },
    );
    let held = Assertion::new("self = k ⊎ {t↦serve} ∧ t = ψ", |v| {
        v.frame_plus(&v.regs.k_unlock, v.regs.t, Label::Serve) && v.regs.t == v.display()
    });
    let post = Assertion::new(
        "self = k ⊎ {t↦used} ∧ no serve in self ∧ α(self) = ownbar ∧ self ⊥α other",
        |v| {
            v.frame_plus(&v.regs.k_unlock, v.regs.t, Label::Used)
                && v.self_.count(Label::Serve) == 0
                && !v.owns()
                && v.alpha_separate()
        },
    );
    Program {
        name: "unlock".into(),
        points: vec![
            Point { label: "U0".into(), step: Step::Snapshot, assertion: entry, sets_frame: false },
            Point { label: "U1".into(), step: Step::Atomic(unlock), assertion: held, sets_frame: false },
        ],
        post,
    }
}
