//! Breadth-first exploration of all interleavings of a fixed set of threads
//! over a ticket-lock resource, checking safety properties at every
//! reachable configuration.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use super::program::{prog_lock, prog_unlock, Program, Registers, Step, View};
use super::{resource_tl, resource_tl_quotient, Resource, TlState};
use crate::element::{Element, Label};
use crate::error::{PcmError, Result};
use crate::instances::TicketMap;
use crate::report::{LawReport, TraceEntry};

/// A property checked at every reachable configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    /// At most one ticket is being served and at most one thread owns the lock.
    Mutex,
    /// Every thread's view lies in the resource's state space.
    Statespace,
    /// Every thread's view satisfies lock-ownership separation.
    Seprel,
    /// Every thread satisfies the outline assertion at its program point.
    Outline,
}

impl Check {
    pub const ALL: [Check; 4] = [Check::Mutex, Check::Statespace, Check::Seprel, Check::Outline];

    pub fn name(self) -> &'static str {
        match self {
            Check::Mutex => "mutex",
            Check::Statespace => "statespace",
            Check::Seprel => "seprel",
            Check::Outline => "outline",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = PcmError;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| PcmError::Invalid(format!("unknown check `{s}` (expected mutex, statespace, seprel or outline)")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ThreadState {
    pub pc: usize,
    pub regs: Registers,
    pub self_: TicketMap,
}

/// The per-thread program counters, registers and ticket holdings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlobalConfig {
    pub threads: Vec<ThreadState>,
}

impl GlobalConfig {
    fn initial(n: usize) -> GlobalConfig {
        GlobalConfig { threads: vec![ThreadState::default(); n] }
    }

    /// `ŝ`, `None` when two threads hold the same ticket.
    pub fn joint(&self) -> Option<TicketMap> {
        self.threads.iter().try_fold(TicketMap::new(), |acc, t| acc.join(&t.self_))
    }

    /// The union of every other thread's tickets.
    pub fn other_of(&self, i: usize) -> Option<TicketMap> {
        self.threads
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .try_fold(TicketMap::new(), |acc, (_, t)| acc.join(&t.self_))
    }

    pub fn view_of(&self, i: usize) -> Option<TlState> {
        Some(TlState::new(self.threads[i].self_.clone(), self.other_of(i)?))
    }

    /// Threads currently holding a `serve` ticket.
    pub fn owners(&self) -> usize {
        self.threads.iter().filter(|t| t.self_.count(Label::Serve) > 0).count()
    }

    fn witness(&self) -> Vec<Element> {
        self.threads.iter().map(|t| t.self_.to_element()).collect()
    }
}

impl fmt::Display for GlobalConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.threads.iter().enumerate() {
            write!(f, "T{i}[pc={} x={} y={} t={} self={}] ", t.pc, t.regs.x, t.regs.y, t.regs.t, t.self_)?;
        }
        match self.joint() {
            Some(j) => write!(f, "dsp={} tdr={}", j.psi(), j.0.len()),
            None => f.write_str("ŝ=top"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// `None` for the initial configuration.
    pub thread: Option<usize>,
    pub step: String,
    pub config: GlobalConfig,
}

/// The first configuration, in breadth-first order, that breaks a check.
#[derive(Debug, Clone)]
pub struct Violation {
    pub check: Check,
    pub detail: String,
    /// A shortest run from the initial configuration to the violation.
    pub trace: Vec<TraceStep>,
}

#[derive(Debug, Clone)]
pub struct ExplorationResult {
    pub resource: String,
    pub checks: Vec<Check>,
    /// At most one violation per check, ordered by discovery.
    pub violations: Vec<Violation>,
    /// Reachable configurations in breadth-first order.
    pub configs: Vec<GlobalConfig>,
    pub edges: u64,
    /// Configurations without successors.
    pub terminal: Vec<usize>,
    /// Terminal configurations where some thread has not finished.
    pub blocked: u64,
}

impl ExplorationResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn states(&self) -> usize {
        self.configs.len()
    }

    /// The earliest violation found.
    pub fn violated(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub fn violation(&self, c: Check) -> Option<&Violation> {
        self.violations.iter().find(|v| v.check == c)
    }

    pub fn to_report(&self) -> LawReport {
        let mut rep = LawReport::new(format!("explore: {}", self.resource));
        for &c in &self.checks {
            let v = self.violation(c);
            rep.record(c.name(), v.map(|v| v.trace.last().expect("non-empty trace").config.witness()));
            if let Some(v) = v {
                rep.note(format!("{c}: {}", v.detail));
            }
        }
        if let Some(v) = self.violated() {
            rep.trace = Some(
                v.trace
                    .iter()
                    .map(|s| TraceEntry { thread: s.thread, step: s.step.clone(), state: s.config.to_string() })
                    .collect(),
            );
        }
        rep.stat("states", self.states() as u64);
        rep.stat("edges", self.edges);
        rep.stat("terminal", self.terminal.len() as u64);
        rep.stat("blocked", self.blocked);
        rep
    }
}

/// `rounds` repetitions of lock followed by unlock.
pub fn thread_program(r: &Resource, rounds: u32) -> Result<Program> {
    if rounds == 0 {
        return Err(PcmError::Invalid("a thread needs at least one round".into()));
    }
    let once = prog_lock(r).then(&prog_unlock(r));
    let mut p = once.clone();
    for _ in 1..rounds {
        p = p.then(&once);
    }
    Ok(p)
}

/// One step of thread `i`, `None` when it has finished or is blocked.
fn step_thread(prog: &Program, cfg: &GlobalConfig, i: usize) -> Option<(GlobalConfig, String)> {
    let th = &cfg.threads[i];
    let point = prog.points.get(th.pc)?;
    let s = cfg.view_of(i)?;
    let display = s.display()?;
    let mut next = th.clone();
    next.pc = th.pc + 1;
    let desc = match &point.step {
        Step::Draw(tr) => {
            let s2 = tr.step(&s)?;
            next.regs.x = s2.self_.0.keys().copied().find(|k| !s.self_.0.contains_key(k))?;
            next.self_ = s2.self_;
            format!("{} x:={}", tr.name(), next.regs.x)
        }
        Step::Observe => {
            next.regs.y = display;
            format!("observe y:={display}")
        }
        Step::UntilEqual { back } => {
            if th.regs.x == th.regs.y {
                "until exit".to_string()
            } else {
                next.pc = *back;
                "until retry".to_string()
            }
        }
        Step::Snapshot => {
            next.regs.t = display;
            let mut k = th.self_.clone();
            k.0.remove(&display);
            next.regs.k_unlock = k;
            format!("snapshot t:={display}")
        }
        Step::Atomic(tr) => {
            next.self_ = tr.step(&s)?.self_;
            tr.name()
        }
    };
    if prog.points.get(next.pc).is_some_and(|p| p.sets_frame) {
        next.regs.k_lock = next.self_.clone();
    }
    let mut out = cfg.clone();
    out.threads[i] = next;
    Some((out, format!("{} {desc}", prog.label(th.pc))))
}

fn evaluate(r: &Resource, threads: &[Program], cfg: &GlobalConfig, c: Check) -> Option<String> {
    let joint = cfg.joint();
    match c {
        Check::Mutex => {
            let serving: usize = cfg.threads.iter().map(|t| t.self_.count(Label::Serve)).sum();
            (serving > 1 || cfg.owners() > 1).then(|| format!("{serving} tickets served by {} threads", cfg.owners()))
        }
        Check::Statespace => {
            let Some(_) = joint else { return Some("two threads hold the same ticket".into()) };
            (0..threads.len())
                .find(|&i| !cfg.view_of(i).is_some_and(|s| r.in_statespace(&s)))
                .map(|i| format!("view of T{i} leaves the state space"))
        }
        Check::Seprel => {
            let Some(j) = joint else { return Some("two threads hold the same ticket".into()) };
            (j.count(Label::Serve) > 1).then(|| "more than one serve ticket".to_string())
        }
        Check::Outline => {
            let j = joint?;
            (0..threads.len()).find_map(|i| {
                let th = &cfg.threads[i];
                let other = cfg.other_of(i)?;
                let v = View { self_: &th.self_, other: &other, joint: &j, regs: &th.regs };
                let a = threads[i].assertion(th.pc);
                (!a.holds(&v)).then(|| format!("T{i} at {}: {}", threads[i].label(th.pc), a.text))
            })
        }
    }
}

fn trace_to(configs: &[GlobalConfig], parent: &[Option<(usize, usize, String)>], mut at: usize) -> Vec<TraceStep> {
    let mut out = Vec::new();
    loop {
        match &parent[at] {
            Some((p, t, step)) => {
                out.push(TraceStep { thread: Some(*t), step: step.clone(), config: configs[at].clone() });
                at = *p;
            }
            None => {
                out.push(TraceStep { thread: None, step: "init".into(), config: configs[at].clone() });
                break;
            }
        }
    }
    out.reverse();
    out
}

/// Explores every interleaving of `threads` over `r` and reports, for each
/// requested check, the first violating configuration with a shortest trace.
pub fn explore(r: &Resource, threads: &[Program], checks: &[Check]) -> Result<ExplorationResult> {
    if threads.is_empty() {
        return Err(PcmError::Invalid("at least one thread is required".into()));
    }
    let requested: u32 = threads.iter().map(Program::draws).sum();
    if requested > r.bound {
        return Err(PcmError::BoundExceeded { bound: r.bound, requested });
    }
    let checks: Vec<Check> = checks.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();

    let mut configs = vec![GlobalConfig::initial(threads.len())];
    let mut parent: Vec<Option<(usize, usize, String)>> = vec![None];
    let mut index = HashMap::from([(configs[0].clone(), 0usize)]);
    let mut found: Vec<(usize, Check, String)> = Vec::new();
    let (mut edges, mut terminal, mut blocked) = (0u64, Vec::new(), 0u64);

    let mut cur = 0;
    while cur < configs.len() {
        let cfg = configs[cur].clone();
        for &c in &checks {
            if found.iter().any(|(_, fc, _)| *fc == c) {
                continue;
            }
            if let Some(detail) = evaluate(r, threads, &cfg, c) {
                found.push((cur, c, detail));
            }
        }
        let mut any = false;
        if cfg.joint().is_some() {
            for (i, prog) in threads.iter().enumerate() {
                if let Some((next, step)) = step_thread(prog, &cfg, i) {
                    any = true;
                    edges += 1;
                    if !index.contains_key(&next) {
                        index.insert(next.clone(), configs.len());
                        configs.push(next);
                        parent.push(Some((cur, i, step)));
                    }
                }
            }
        }
        if !any {
            terminal.push(cur);
            if cfg.threads.iter().zip(threads).any(|(t, p)| t.pc < p.points.len()) {
                blocked += 1;
            }
        }
        cur += 1;
    }

    let violations = found
        .into_iter()
        .map(|(at, check, detail)| Violation { check, detail, trace: trace_to(&configs, &parent, at) })
        .collect();
    Ok(ExplorationResult { resource: r.name.clone(), checks, violations, configs, edges, terminal, blocked })
}

/// Re-executes a trace step by step and returns its final configuration;
/// fails if any recorded configuration does not match.
pub fn replay(threads: &[Program], trace: &[TraceStep]) -> Result<GlobalConfig> {
    let mut cfg = GlobalConfig::initial(threads.len());
    let mismatch = |k: usize| PcmError::Invalid(format!("trace diverges at step {k}"));
    let first = trace.first().ok_or_else(|| PcmError::Invalid("empty trace".into()))?;
    if first.thread.is_some() || first.config != cfg {
        return Err(mismatch(0));
    }
    for (k, s) in trace.iter().enumerate().skip(1) {
        let i = s.thread.filter(|&i| i < threads.len()).ok_or_else(|| mismatch(k))?;
        let (next, _) = step_thread(&threads[i], &cfg, i).ok_or_else(|| mismatch(k))?;
        if next != s.config {
            return Err(mismatch(k));
        }
        cfg = next;
    }
    Ok(cfg)
}

/// Explores the resource and its rebasing onto the lock-ownership quotient
/// with the same threads; both must reach the same configurations and the
/// same per-thread ownership abstractions.
pub fn compare_with_quotient(bound: u32, threads: usize, rounds: u32) -> Result<LawReport> {
    let r = resource_tl(bound);
    let q = resource_tl_quotient(bound)?;
    let progs = |res: &Resource| -> Result<Vec<Program>> { (0..threads).map(|_| thread_program(res, rounds)).collect() };
    let a = explore(&r, &progs(&r)?, &Check::ALL)?;
    let b = explore(&q, &progs(&q)?, &Check::ALL)?;

    let mut rep = LawReport::new(format!("quotient agreement: {} vs {}", r.name, q.name));
    let set_a: BTreeSet<String> = a.configs.iter().map(|c| c.to_string()).collect();
    let set_b: BTreeSet<String> = b.configs.iter().map(|c| c.to_string()).collect();
    let first_diff = |x: &ExplorationResult, other: &BTreeSet<String>| {
        x.configs.iter().find(|c| !other.contains(&c.to_string())).map(GlobalConfig::witness)
    };
    rep.record("reachable-configs-agree", first_diff(&a, &set_b).or_else(|| first_diff(&b, &set_a)));

    let abstraction = |x: &ExplorationResult| -> BTreeSet<Vec<(usize, bool)>> {
        x.configs
            .iter()
            .map(|c| c.threads.iter().map(|t| (t.pc, t.self_.count(Label::Serve) > 0)).collect())
            .collect()
    };
    let (abs_a, abs_b) = (abstraction(&a), abstraction(&b));
    let diff = abs_a.symmetric_difference(&abs_b).next().map(|v| {
        v.iter().map(|&(_, own)| if own { Element::own() } else { Element::ownbar() }).collect()
    });
    rep.record("abstractions-agree", diff);
    rep.record("resource-safe", a.violated().map(|v| v.trace.last().expect("trace").config.witness()));
    rep.record("quotient-safe", b.violated().map(|v| v.trace.last().expect("trace").config.witness()));
    rep.stat("states", a.states() as u64);
    rep.stat("quotient_states", b.states() as u64);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ticketlock::Mutation;

    #[test]
    fn single_thread_lock_ends_owning() {
        let r = resource_tl(2);
        let res = explore(&r, &[prog_lock(&r)], &Check::ALL).unwrap();
        assert!(res.passed());
        assert_eq!(res.terminal.len(), 1);
        let last = &res.configs[res.terminal[0]];
        assert_eq!(last.owners(), 1);
        assert_eq!(last.threads[0].self_, TicketMap::singleton(1, Label::Serve));
    }

    #[test]
    fn two_threads_are_safe() {
        let r = resource_tl(4);
        let p = thread_program(&r, 1).unwrap();
        let res = explore(&r, &[p.clone(), p], &Check::ALL).unwrap();
        assert!(res.passed(), "{:?}", res.violated());
        assert_eq!(res.blocked, 0);
    }

    #[test]
    fn bound_is_enforced() {
        let r = resource_tl(1);
        let p = thread_program(&r, 1).unwrap();
        let err = explore(&r, &[p.clone(), p], &Check::ALL).unwrap_err();
        assert!(matches!(err, PcmError::BoundExceeded { bound: 1, requested: 2 }));
    }

    #[test]
    fn unguarded_lock_breaks_mutex_and_trace_replays() {
        let r = resource_tl(2).with_mutation(Mutation::Lock);
        let p = thread_program(&r, 1).unwrap();
        let threads = [p.clone(), p];
        let res = explore(&r, &threads, &[Check::Mutex]).unwrap();
        let v = res.violated().unwrap();
        assert_eq!(v.check, Check::Mutex);
        assert_eq!(v.trace.len(), 5);
        let end = replay(&threads, &v.trace).unwrap();
        assert_eq!(&end, &v.trace.last().unwrap().config);
    }

    #[test]
    fn check_names_parse() {
        for c in Check::ALL {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
        }
        assert!("liveness".parse::<Check>().is_err());
    }
}
