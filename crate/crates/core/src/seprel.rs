//! Separating relations: binary predicates that strengthen disjointness.
//!
//! Relations are tabulated over a base carrier. Every constructor forces the
//! relation to be false whenever either argument is undefined, so the
//! definedness half of the laws cannot be broken by a careless predicate.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::element::Element;
use crate::error::{PcmError, Result};
use crate::pcm::{product, Pcm, PcmStructure};
use crate::report::LawReport;
use crate::sweep::{first_pair, first_triple};

#[derive(Clone)]
pub struct SepRel {
    name: String,
    base: Pcm,
    table: Arc<Vec<bool>>,
    notes: Vec<String>,
}

impl fmt::Debug for SepRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SepRel")
            .field("name", &self.name)
            .field("base", &self.base.name())
            .finish()
    }
}

impl SepRel {
    /// Tabulates `pred` over pairs of defined elements; all other pairs are unrelated.
    pub fn from_fn<F>(name: impl Into<String>, base: &Pcm, pred: F) -> SepRel
    where
        F: Fn(&Element, &Element) -> bool + Sync,
    {
        Self::from_idx_fn(name, base, |i, j| pred(base.elem(i), base.elem(j)))
    }

    /// Index form of [`SepRel::from_fn`].
    pub fn from_idx_fn<F>(name: impl Into<String>, base: &Pcm, pred: F) -> SepRel
    where
        F: Fn(usize, usize) -> bool + Sync,
    {
        let n = base.len();
        let table: Vec<bool> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                base.defined_idx(i) && base.defined_idx(j) && pred(i, j)
            })
            .collect();
        SepRel {
            name: name.into(),
            base: base.clone(),
            table: Arc::new(table),
            notes: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &Pcm {
        &self.base
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn renamed(mut self, name: impl Into<String>) -> SepRel {
        self.name = name.into();
        self
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> SepRel {
        self.notes.push(note.into());
        self
    }

    #[inline]
    pub fn holds_idx(&self, i: usize, j: usize) -> bool {
        self.table[i * self.base.len() + j]
    }

    pub fn holds(&self, x: &Element, y: &Element) -> Result<bool> {
        Ok(self.holds_idx(self.base.idx(x)?, self.base.idx(y)?))
    }

    /// `x R y R z`, i.e. `x R y ∧ (x ⊕ y) R z`.
    #[inline]
    pub fn tern_idx(&self, x: usize, y: usize, z: usize) -> bool {
        self.holds_idx(x, y) && self.holds_idx(self.base.join_idx(x, y), z)
    }

    /// First pair (in enumeration order) on which two relations over the same base disagree.
    pub fn first_difference(&self, other: &SepRel) -> Result<Option<(Element, Element)>> {
        self.base.ensure_same(&other.base)?;
        let n = self.base.len();
        Ok(first_pair(n, |i, j| self.holds_idx(i, j) != other.holds_idx(i, j))
            .map(|(i, j)| (self.base.elem(i).clone(), self.base.elem(j).clone())))
    }
}

/// The relation induced by the unit: only `𝟙 R 𝟙`.
pub fn rel_unit(p: &Pcm) -> SepRel {
    let u = p.unit_idx();
    SepRel::from_idx_fn(format!("unit({})", p.name()), p, |i, j| i == u && j == u)
}

/// The largest separating relation, `x ⊥ y`.
pub fn rel_trivial(p: &Pcm) -> SepRel {
    SepRel::from_idx_fn(format!("trivial({})", p.name()), p, |i, j| p.separate_idx(i, j))
}

pub fn rel_intersect(r1: &SepRel, r2: &SepRel) -> Result<SepRel> {
    r1.base.ensure_same(&r2.base)?;
    let mut rel = SepRel::from_idx_fn(format!("{}∧{}", r1.name, r2.name), &r1.base, |i, j| {
        r1.holds_idx(i, j) && r2.holds_idx(i, j)
    });
    rel.notes = r1.notes.iter().chain(&r2.notes).cloned().collect();
    Ok(rel)
}

/// The join relation on `p × p`: `(a1, a2) J (b1, b2)` iff `a1 ⊕ a2 ⊕ b1 ⊕ b2` is defined.
pub fn rel_join(p: &Pcm) -> SepRel {
    let pp = product(p, p);
    let n = p.len();
    let all = |k: usize, l: usize| {
        let a = p.join_idx(k / n, k % n);
        let b = p.join_idx(l / n, l % n);
        p.separate_idx(a, b)
    };
    SepRel::from_idx_fn(format!("join({})", p.name()), &pp, all)
}

/// The lift `x R y ≜ pred(x ⊕ y) ∧ x ⊥ y`.
///
/// This is a separating relation only when `pred` is downward closed and holds
/// of the unit; neither is checked here (see [`check_downward_closed`]).
pub fn rel_lift_downclosed<F>(p: &Pcm, name: impl Into<String>, pred: F) -> SepRel
where
    F: Fn(&Element) -> bool + Sync,
{
    let name = name.into();
    let holds: Vec<bool> = p.elements().par_iter().map(|x| !x.is_top() && pred(x)).collect();
    SepRel::from_idx_fn(name.clone(), p, |i, j| {
        let k = p.join_idx(i, j);
        p.defined_idx(k) && holds[k]
    })
    .with_note(format!("{name}: lift assumes the predicate holds of the unit"))
}

/// Checks that `pred` holds of the unit and that `pred(x ⊕ y) ⇒ pred(x)`.
pub fn check_downward_closed<F>(p: &PcmStructure, name: &str, pred: F) -> LawReport
where
    F: Fn(&Element) -> bool + Sync,
{
    let n = p.len();
    let holds: Vec<bool> = p.elements().par_iter().map(|x| !x.is_top() && pred(x)).collect();
    let mut r = LawReport::new(format!("downward closure: {name}"));
    let u = p.unit_idx();
    r.record("holds-at-unit", (!holds[u]).then(|| vec![p.unit().clone()]));
    let bad = first_pair(n, |i, j| {
        let k = p.join_idx(i, j);
        p.defined_idx(k) && holds[k] && !holds[i]
    });
    r.record(
        "downward-closed",
        bad.map(|(i, j)| vec![p.elem(i).clone(), p.elem(j).clone()]),
    );
    r
}

/// `x R y ∧ (x ⊕ y) R z`.
pub fn tern_holds(r: &SepRel, x: &Element, y: &Element, z: &Element) -> Result<bool> {
    let b = &r.base;
    Ok(r.tern_idx(b.idx(x)?, b.idx(y)?, b.idx(z)?))
}

/// Exhaustively checks the five separating-relation laws and the derived
/// unit closure `x R y ⇒ (x ⊕ y) R 𝟙`.
pub fn check_seprel_laws(r: &SepRel) -> LawReport {
    let p = &r.base;
    let n = p.len();
    let u = p.unit_idx();
    let e = |i: usize| p.elem(i).clone();
    let mut rep = LawReport::new(format!("seprel laws: {}", r.name));

    let defn = first_pair(n, |i, j| r.holds_idx(i, j) && !r.holds_idx(i, u));
    rep.record("definedness", defn.map(|(i, j)| vec![e(i), e(j)]));

    let strg = first_pair(n, |i, j| r.holds_idx(i, j) && !p.separate_idx(i, j));
    rep.record("strengthening", strg.map(|(i, j)| vec![e(i), e(j)]));

    rep.record("unit", (!r.holds_idx(u, u)).then(|| vec![e(u), e(u)]));

    let sym = first_pair(n, |i, j| r.holds_idx(i, j) != r.holds_idx(j, i));
    rep.record("symmetry", sym.map(|(i, j)| vec![e(i), e(j)]));

    let assoc = first_triple(n, |x, y, z| {
        r.tern_idx(x, y, z) && !(r.holds_idx(x, p.join_idx(y, z)) && r.holds_idx(y, z))
    });
    rep.record("associativity", assoc.map(|(x, y, z)| vec![e(x), e(y), e(z)]));

    let closure = first_pair(n, |i, j| r.holds_idx(i, j) && !r.holds_idx(p.join_idx(i, j), u));
    rep.record("unit-closure", closure.map(|(i, j)| vec![e(i), e(j)]));

    rep.stat("elements", n as u64);
    rep.stat("related_pairs", r.table.iter().filter(|&&b| b).count() as u64);
    rep.stat("triples", (n * n * n) as u64);
    for note in &r.notes {
        rep.note(note.clone());
    }
    rep
}

/// Checks `a1 R (a2 ⊕ a') ∧ a2 R (a1 ⊕ a') ⇒ a1 R a2 R a'` over all triples.
pub fn check_invertible_rel(r: &SepRel) -> LawReport {
    let p = &r.base;
    let n = p.len();
    let mut rep = LawReport::new(format!("seprel invertibility: {}", r.name));
    let bad = first_triple(n, |a1, a2, a| {
        r.holds_idx(a1, p.join_idx(a2, a))
            && r.holds_idx(a2, p.join_idx(a1, a))
            && !r.tern_idx(a1, a2, a)
    });
    rep.record(
        "invertibility",
        bad.map(|(a1, a2, a)| vec![p.elem(a1).clone(), p.elem(a2).clone(), p.elem(a).clone()]),
    );
    rep.stat("triples", (n * n * n) as u64);
    rep
}

/// Fails with the first violated law when `r` is not a separating relation.
pub(crate) fn ensure_seprel(r: &SepRel) -> Result<()> {
    let rep = check_seprel_laws(r);
    match rep.failed_laws().first() {
        None => Ok(()),
        Some(law) => Err(PcmError::NotSeparatingRelation {
            relation: r.name.clone(),
            law: (*law).to_string(),
        }),
    }
}
