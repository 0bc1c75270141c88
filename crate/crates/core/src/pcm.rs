//! Topped partial commutative monoids over finite carriers.
//!
//! A [`PcmStructure`] tabulates a total join over an ordered enumeration of
//! elements that always contains the absorbing undefined element `top`.
//! Partiality is expressed only through the defined-set; there is no
//! option-returning join.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::element::Element;
use crate::error::{PcmError, Result};
use crate::report::LawReport;
use crate::sweep::{first_index, first_pair, first_triple};

/// Shared handle to a carrier. Structures are immutable once built.
pub type Pcm = Arc<PcmStructure>;

pub struct PcmStructure {
    name: String,
    elements: Vec<Element>,
    index: HashMap<Element, usize>,
    table: Vec<u32>,
    defined: Vec<bool>,
    unit: usize,
    top: usize,
    factors: Option<(Pcm, Pcm)>,
    splits: OnceLock<Vec<Vec<(u32, u32)>>>,
}

impl fmt::Debug for PcmStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PcmStructure")
            .field("name", &self.name)
            .field("elements", &self.elements.len())
            .finish()
    }
}

fn build_index(name: &str, elements: &[Element]) -> Result<HashMap<Element, usize>> {
    let mut index = HashMap::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        if index.insert(e.clone(), i).is_some() {
            return Err(PcmError::Invalid(format!("duplicate element `{e}` in `{name}`")));
        }
    }
    Ok(index)
}

impl PcmStructure {
    /// Tabulates `join` over `elements`.
    ///
    /// Validates that the carrier has no duplicates, contains `top` and `unit`,
    /// and is closed under `join`. The algebraic laws are deliberately left to
    /// [`check_pcm_laws`] so that broken structures can be built and tested.
    pub fn from_fn<J, D>(
        name: impl Into<String>,
        elements: Vec<Element>,
        unit: &Element,
        defined: D,
        join: J,
    ) -> Result<Pcm>
    where
        J: Fn(&Element, &Element) -> Element + Sync,
        D: Fn(&Element) -> bool,
    {
        let name = name.into();
        let index = build_index(&name, &elements)?;
        let n = elements.len();
        let rows: Vec<std::result::Result<Vec<u32>, String>> = elements
            .par_iter()
            .map(|x| {
                elements
                    .iter()
                    .map(|y| {
                        let z = join(x, y);
                        index.get(&z).map(|&i| i as u32).ok_or_else(|| z.to_string())
                    })
                    .collect()
            })
            .collect();
        let mut table = Vec::with_capacity(n * n);
        for (x, row) in elements.iter().zip(rows) {
            let row = row.map_err(|_| PcmError::NotClosed {
                pcm: name.clone(),
                element: x.to_string(),
            })?;
            table.extend(row);
        }
        let defined = elements.iter().map(defined).collect();
        Self::from_parts(name, elements, index, table, defined, unit, None)
    }

    fn from_parts(
        name: String,
        elements: Vec<Element>,
        index: HashMap<Element, usize>,
        table: Vec<u32>,
        defined: Vec<bool>,
        unit: &Element,
        factors: Option<(Pcm, Pcm)>,
    ) -> Result<Pcm> {
        let top = *index.get(&Element::Top).ok_or_else(|| {
            PcmError::Invalid(format!("carrier of `{name}` lacks top"))
        })?;
        let unit = *index.get(unit).ok_or_else(|| PcmError::NotInCarrier {
            pcm: name.clone(),
            element: unit.to_string(),
        })?;
        Ok(Arc::new(PcmStructure {
            name,
            elements,
            index,
            table,
            defined,
            unit,
            top,
            factors,
            splits: OnceLock::new(),
        }))
    }

    /// Builds a structure from an already-indexed join table.
    pub(crate) fn from_table(
        name: String,
        elements: Vec<Element>,
        table: Vec<u32>,
        defined: Vec<bool>,
        unit: &Element,
    ) -> Result<Pcm> {
        let index = build_index(&name, &elements)?;
        Self::from_parts(name, elements, index, table, defined, unit, None)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn unit(&self) -> &Element {
        &self.elements[self.unit]
    }

    pub fn top(&self) -> &Element {
        &self.elements[self.top]
    }

    pub fn unit_idx(&self) -> usize {
        self.unit
    }

    pub fn top_idx(&self) -> usize {
        self.top
    }

    /// The two factor structures when this is a product.
    pub fn factors(&self) -> Option<(&Pcm, &Pcm)> {
        self.factors.as_ref().map(|(p, q)| (p, q))
    }

    pub fn elem(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn idx(&self, x: &Element) -> Result<usize> {
        self.index.get(x).copied().ok_or_else(|| PcmError::NotInCarrier {
            pcm: self.name.clone(),
            element: x.to_string(),
        })
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.index.contains_key(x)
    }

    #[inline]
    pub fn join_idx(&self, i: usize, j: usize) -> usize {
        self.table[i * self.elements.len() + j] as usize
    }

    #[inline]
    pub fn defined_idx(&self, i: usize) -> bool {
        self.defined[i]
    }

    #[inline]
    pub fn separate_idx(&self, i: usize, j: usize) -> bool {
        self.defined[self.join_idx(i, j)]
    }

    pub fn join(&self, x: &Element, y: &Element) -> Result<Element> {
        let (i, j) = (self.idx(x)?, self.idx(y)?);
        Ok(self.elements[self.join_idx(i, j)].clone())
    }

    pub fn is_defined(&self, x: &Element) -> Result<bool> {
        Ok(self.defined[self.idx(x)?])
    }

    pub fn is_separate(&self, x: &Element, y: &Element) -> Result<bool> {
        Ok(self.separate_idx(self.idx(x)?, self.idx(y)?))
    }

    /// True when `top` is the only undefined element.
    pub fn is_normal(&self) -> bool {
        self.undefined_besides_top().next().is_none()
    }

    fn undefined_besides_top(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| i != self.top && !self.defined[i])
    }

    /// Structural identity: the same handle, or the same name over the same carrier.
    pub fn same_as(&self, other: &PcmStructure) -> bool {
        std::ptr::eq(self, other) || (self.name == other.name && self.elements == other.elements)
    }

    pub(crate) fn ensure_same(&self, other: &PcmStructure) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(PcmError::CarrierMismatch {
                expected: self.name.clone(),
                found: other.name.clone(),
            })
        }
    }

    /// All ordered pairs `(a1, a2)` with `a1 ⊕ a2 = x`, for defined `x`, in index order.
    pub fn splits_idx(&self, x: usize) -> &[(u32, u32)] {
        let splits = self.splits.get_or_init(|| {
            let n = self.len();
            let mut out = vec![Vec::new(); n];
            for i in 0..n {
                for j in 0..n {
                    let k = self.join_idx(i, j);
                    if self.defined[k] {
                        out[k].push((i as u32, j as u32));
                    }
                }
            }
            out
        });
        &splits[x]
    }
}

/// `x ⊕ y`, total on the carrier.
pub fn join(p: &PcmStructure, x: &Element, y: &Element) -> Result<Element> {
    p.join(x, y)
}

/// `x ⊥ y`: the join is defined.
pub fn is_separate(p: &PcmStructure, x: &Element, y: &Element) -> Result<bool> {
    p.is_separate(x, y)
}

/// Pointwise product. The defined set is `D_p × D_q`, so pairs with one
/// undefined component are undefined yet distinct from the product's top.
pub fn product(p: &Pcm, q: &Pcm) -> Pcm {
    let (np, nq) = (p.len(), q.len());
    let mut elements = Vec::with_capacity(np * nq);
    let mut defined = Vec::with_capacity(np * nq);
    for i in 0..np {
        for j in 0..nq {
            elements.push(Element::pair(p.elem(i).clone(), q.elem(j).clone()));
            defined.push(p.defined_idx(i) && q.defined_idx(j));
        }
    }
    let n = np * nq;
    let mut table = Vec::with_capacity(n * n);
    for a in 0..n {
        let (i, j) = (a / nq, a % nq);
        for b in 0..n {
            let (k, l) = (b / nq, b % nq);
            table.push((p.join_idx(i, k) * nq + q.join_idx(j, l)) as u32);
        }
    }
    let unit = Element::pair(p.unit().clone(), q.unit().clone());
    let name = format!("{}×{}", p.name(), q.name());
    let index = build_index(&name, &elements).expect("product of duplicate-free carriers");
    PcmStructure::from_parts(
        name,
        elements,
        index,
        table,
        defined,
        &unit,
        Some((p.clone(), q.clone())),
    )
    .expect("product carrier contains its top and unit")
}

/// A thread's view: its own state and the combined state of its environment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubjState {
    pub self_: Element,
    pub other: Element,
}

impl SubjState {
    /// Builds a state whose components are separate.
    pub fn new(p: &PcmStructure, self_: Element, other: Element) -> Result<Self> {
        if !p.is_separate(&self_, &other)? {
            return Err(PcmError::Invalid(format!(
                "subjective state components {self_} and {other} are not separate"
            )));
        }
        Ok(SubjState { self_, other })
    }

    /// `ŝ = self ⊕ other`.
    pub fn joint(&self, p: &PcmStructure) -> Result<Element> {
        p.join(&self.self_, &self.other)
    }

    pub fn swap(&self) -> SubjState {
        SubjState { self_: self.other.clone(), other: self.self_.clone() }
    }
}

impl fmt::Display for SubjState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(self {}, other {})", self.self_, self.other)
    }
}

/// All decompositions `s = s1 ⋆ s2`: for every split `self = a1 ⊕ a2`,
/// `s1 = (a1, a2 ⊕ other)` and `s2 = (a2, a1 ⊕ other)`.
pub fn star_split(p: &PcmStructure, s: &SubjState) -> Result<Vec<(SubjState, SubjState)>> {
    let (a, o) = (p.idx(&s.self_)?, p.idx(&s.other)?);
    if !p.separate_idx(a, o) {
        return Err(PcmError::Invalid(format!("subjective state {s} is not well-formed")));
    }
    Ok(star_split_idx(p, a, o)
        .map(|(a1, o1, a2, o2)| {
            (
                SubjState { self_: p.elem(a1).clone(), other: p.elem(o1).clone() },
                SubjState { self_: p.elem(a2).clone(), other: p.elem(o2).clone() },
            )
        })
        .collect())
}

/// Index form of [`star_split`], yielding `(a1, a2 ⊕ o, a2, a1 ⊕ o)`.
pub(crate) fn star_split_idx(
    p: &PcmStructure,
    a: usize,
    o: usize,
) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
    p.splits_idx(a).iter().map(move |&(a1, a2)| {
        let (a1, a2) = (a1 as usize, a2 as usize);
        (a1, p.join_idx(a2, o), a2, p.join_idx(a1, o))
    })
}

/// Exhaustively checks the topped-PCM laws; each failing law records the
/// first counterexample in enumeration order.
pub fn check_pcm_laws(p: &PcmStructure) -> LawReport {
    let n = p.len();
    let e = |i: usize| p.elem(i).clone();
    let mut r = LawReport::new(format!("pcm laws: {}", p.name()));

    let comm = first_pair(n, |i, j| p.join_idx(i, j) != p.join_idx(j, i));
    r.record("commutativity", comm.map(|(i, j)| vec![e(i), e(j)]));

    let assoc = first_triple(n, |i, j, k| {
        p.join_idx(p.join_idx(i, j), k) != p.join_idx(i, p.join_idx(j, k))
    });
    r.record("associativity", assoc.map(|(i, j, k)| vec![e(i), e(j), e(k)]));

    let u = p.unit_idx();
    let unit = first_index(n, |i| p.join_idx(i, u) != i || p.join_idx(u, i) != i);
    r.record("unit", unit.map(|i| vec![e(i)]));

    let t = p.top_idx();
    r.record("top-undefined", p.defined_idx(t).then(|| vec![e(t)]));
    r.record("unit-defined", (!p.defined_idx(u)).then(|| vec![e(u)]));

    let down = first_pair(n, |i, j| {
        p.separate_idx(i, j) && !(p.defined_idx(i) && p.defined_idx(j))
    });
    r.record("defined-downward", down.map(|(i, j)| vec![e(i), e(j)]));

    let absorb = first_index(n, |i| p.join_idx(i, t) != t || p.join_idx(t, i) != t);
    r.record("top-absorbing", absorb.map(|i| vec![e(i)]));

    let extra: Vec<usize> = p.undefined_besides_top().collect();
    r.stat("elements", n as u64);
    r.stat("defined", (0..n).filter(|&i| p.defined_idx(i)).count() as u64);
    r.stat("undefined_besides_top", extra.len() as u64);
    if let Some(&first) = extra.first() {
        r.note(format!(
            "not normal: {} undefined elements besides top, first {}",
            extra.len(),
            p.elem(first)
        ));
    }
    r
}
