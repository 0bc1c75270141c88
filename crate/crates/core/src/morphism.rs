//! Partial PCM morphisms.
//!
//! A morphism is a total function between carriers bundled with a separating
//! relation on its source; it only has to distribute over joins of related
//! pairs. Maps are tabulated by index.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::element::Element;
use crate::error::{PcmError, Result};
use crate::pcm::{product, star_split_idx, Pcm, PcmStructure};
use crate::report::LawReport;
use crate::seprel::{check_invertible_rel, check_seprel_laws, rel_intersect, rel_join, rel_trivial, SepRel};
use crate::sweep::{first_index, first_pair, first_pair_map, first_triple};

#[derive(Clone)]
pub struct Morphism {
    name: String,
    source: Pcm,
    target: Pcm,
    map: Arc<Vec<usize>>,
    seprel: SepRel,
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Morphism({}: {} → {})", self.name, self.source.name(), self.target.name())
    }
}

impl Morphism {
    /// Tabulates `f` over the source carrier. Fails if `f` leaves the target
    /// carrier or if `seprel` lives on a different carrier.
    pub fn new<F>(name: impl Into<String>, source: &Pcm, target: &Pcm, f: F, seprel: SepRel) -> Result<Morphism>
    where
        F: Fn(&Element) -> Element,
    {
        let map = source
            .elements()
            .iter()
            .map(|x| target.idx(&f(x)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_idx(name, source, target, map, seprel)
    }

    /// A morphism whose seprel is the trivial relation of the source.
    pub fn total<F>(name: impl Into<String>, source: &Pcm, target: &Pcm, f: F) -> Result<Morphism>
    where
        F: Fn(&Element) -> Element,
    {
        Self::new(name, source, target, f, rel_trivial(source))
    }

    pub(crate) fn from_idx(
        name: impl Into<String>,
        source: &Pcm,
        target: &Pcm,
        map: Vec<usize>,
        seprel: SepRel,
    ) -> Result<Morphism> {
        source.ensure_same(seprel.base())?;
        debug_assert_eq!(map.len(), source.len());
        Ok(Morphism {
            name: name.into(),
            source: source.clone(),
            target: target.clone(),
            map: Arc::new(map),
            seprel,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Pcm {
        &self.source
    }

    pub fn target(&self) -> &Pcm {
        &self.target
    }

    pub fn seprel(&self) -> &SepRel {
        &self.seprel
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Morphism {
        self.name = name.into();
        self
    }

    /// The same map paired with a different relation on the source.
    pub fn with_seprel(&self, seprel: SepRel) -> Result<Morphism> {
        self.source.ensure_same(seprel.base())?;
        Ok(Morphism { seprel, ..self.clone() })
    }

    #[inline]
    pub fn apply_idx(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        Ok(self.target.elem(self.map[self.source.idx(x)?]).clone())
    }

    /// First point where two parallel morphisms differ: `(x)` for maps,
    /// `(x, y)` for seprels.
    pub fn first_difference(&self, other: &Morphism) -> Result<Option<Vec<Element>>> {
        self.source.ensure_same(&other.source)?;
        self.target.ensure_same(&other.target)?;
        if let Some(i) = first_index(self.source.len(), |i| self.map[i] != other.map[i]) {
            return Ok(Some(vec![self.source.elem(i).clone()]));
        }
        Ok(self.seprel.first_difference(&other.seprel)?.map(|(x, y)| vec![x, y]))
    }
}

pub fn apply(m: &Morphism, x: &Element) -> Result<Element> {
    m.apply(x)
}

pub fn identity(p: &Pcm) -> Morphism {
    Morphism::from_idx(format!("id({})", p.name()), p, p, (0..p.len()).collect(), rel_trivial(p))
        .expect("identity seprel lives on its source")
}

/// The always-unit morphism, sending only `top` to `top`.
pub fn const_unit(p: &Pcm, q: &Pcm) -> Morphism {
    let map = (0..p.len())
        .map(|i| if i == p.top_idx() { q.top_idx() } else { q.unit_idx() })
        .collect();
    Morphism::from_idx(format!("unit({}→{})", p.name(), q.name()), p, q, map, rel_trivial(p))
        .expect("trivial seprel lives on its source")
}

fn factors_of(pq: &Pcm) -> Result<(Pcm, Pcm)> {
    pq.factors()
        .map(|(p, q)| (p.clone(), q.clone()))
        .ok_or_else(|| PcmError::Invalid(format!("`{}` is not a product", pq.name())))
}

pub fn proj_first(pq: &Pcm) -> Result<Morphism> {
    let (p, q) = factors_of(pq)?;
    let nq = q.len();
    let map = (0..pq.len()).map(|k| k / nq).collect();
    Morphism::from_idx(format!("π1({})", pq.name()), pq, &p, map, rel_trivial(pq))
}

pub fn proj_second(pq: &Pcm) -> Result<Morphism> {
    let (_, q) = factors_of(pq)?;
    let nq = q.len();
    let map = (0..pq.len()).map(|k| k % nq).collect();
    Morphism::from_idx(format!("π2({})", pq.name()), pq, &q, map, rel_trivial(pq))
}

/// `(a, b) ↦ a ⊕ b` from `p × p` to `p`, with the join relation as its seprel.
pub fn join_morphism(p: &Pcm) -> Morphism {
    let j = rel_join(p);
    let pp = j.base().clone();
    let n = p.len();
    let map = (0..pp.len()).map(|k| p.join_idx(k / n, k % n)).collect();
    Morphism::from_idx(format!("join({})", p.name()), &pp, p, map, j).expect("join seprel lives on p×p")
}

/// `a ∘ b`, with seprel `x ⊥_b y ∧ b(x) ⊥_a b(y)`.
pub fn compose(a: &Morphism, b: &Morphism) -> Result<Morphism> {
    a.source.ensure_same(&b.target)?;
    let map = (0..b.source.len()).map(|i| a.map[b.map[i]]).collect();
    let rel = SepRel::from_idx_fn(
        format!("{}∘{}", a.seprel.name(), b.seprel.name()),
        &b.source,
        |i, j| b.seprel.holds_idx(i, j) && a.seprel.holds_idx(b.map[i], b.map[j]),
    );
    Morphism::from_idx(format!("{}∘{}", a.name, b.name), &b.source, &a.target, map, rel)
}

/// `x ↦ (a x, b x)`, with the intersection of both seprels.
pub fn tensor(a: &Morphism, b: &Morphism) -> Result<Morphism> {
    a.source.ensure_same(&b.source)?;
    let target = product(&a.target, &b.target);
    let nq = b.target.len();
    let map = (0..a.source.len()).map(|i| a.map[i] * nq + b.map[i]).collect();
    let rel = rel_intersect(&a.seprel, &b.seprel)?;
    Morphism::from_idx(format!("{}⊗{}", a.name, b.name), &a.source, &target, map, rel)
}

/// `(x, y) ↦ (a x, b y)`, related componentwise.
pub fn arrow_product(a: &Morphism, b: &Morphism) -> Result<Morphism> {
    let source = product(&a.source, &b.source);
    let target = product(&a.target, &b.target);
    let (ns, nt) = (b.source.len(), b.target.len());
    let map = (0..source.len())
        .map(|k| a.map[k / ns] * nt + b.map[k % ns])
        .collect();
    let rel = SepRel::from_idx_fn(
        format!("{}×{}", a.seprel.name(), b.seprel.name()),
        &source,
        |k, l| a.seprel.holds_idx(k / ns, l / ns) && b.seprel.holds_idx(k % ns, l % ns),
    );
    Morphism::from_idx(format!("{}×{}", a.name, b.name), &source, &target, map, rel)
}

/// `m / r`: `m x` where `x R 𝟙`, `top` elsewhere; seprel `⊥_m ∧ R`.
pub fn restrict(m: &Morphism, r: &SepRel) -> Result<Morphism> {
    m.source.ensure_same(r.base())?;
    let u = m.source.unit_idx();
    let map = (0..m.source.len())
        .map(|i| if r.holds_idx(i, u) { m.map[i] } else { m.target.top_idx() })
        .collect();
    let rel = rel_intersect(&m.seprel, r)?;
    Morphism::from_idx(format!("{}/{}", m.name, r.name()), &m.source, &m.target, map, rel)
}

/// `x ⊥_m y ∧ m x = m y = 𝟙`.
pub fn kernel(m: &Morphism) -> SepRel {
    let u = m.target.unit_idx();
    SepRel::from_idx_fn(format!("ker({})", m.name), &m.source, |i, j| {
        m.seprel.holds_idx(i, j) && m.map[i] == u && m.map[j] == u
    })
}

/// `x ⊥_a y ∧ x ⊥_b y ∧ a x = b x ∧ a y = b y`.
pub fn equalizer(a: &Morphism, b: &Morphism) -> Result<SepRel> {
    a.source.ensure_same(&b.source)?;
    a.target.ensure_same(&b.target)?;
    Ok(SepRel::from_idx_fn(format!("eql({}, {})", a.name, b.name), &a.source, |i, j| {
        a.seprel.holds_idx(i, j)
            && b.seprel.holds_idx(i, j)
            && a.map[i] == b.map[i]
            && a.map[j] == b.map[j]
    }))
}

/// Unit and top preservation, distributivity over related pairs, and the
/// seprel laws of the morphism's relation (reported under `seprel/`).
pub fn check_morphism_laws(m: &Morphism) -> LawReport {
    let (s, t) = (&m.source, &m.target);
    let mut r = LawReport::new(format!("morphism laws: {}", m.name));

    let u = s.unit_idx();
    r.record("unit-preservation", (m.map[u] != t.unit_idx()).then(|| vec![s.unit().clone()]));
    let top = s.top_idx();
    r.record("top-preservation", (m.map[top] != t.top_idx()).then(|| vec![s.top().clone()]));

    let bad = first_pair(s.len(), |i, j| {
        if !m.seprel.holds_idx(i, j) {
            return false;
        }
        let (fi, fj) = (m.map[i], m.map[j]);
        !t.separate_idx(fi, fj) || m.map[s.join_idx(i, j)] != t.join_idx(fi, fj)
    });
    r.record("distributivity", bad.map(|(i, j)| vec![s.elem(i).clone(), s.elem(j).clone()]));

    r.absorb("seprel", check_seprel_laws(&m.seprel));
    r
}

/// Seprel invertibility plus the split-lifting property: every defined split
/// `m a = b1 ⊕ b2` of an image of `a ⊥_m 𝟙` is the image of a related split of `a`.
/// A failure is witnessed by `(a, b1, b2)`.
pub fn check_invertible_morph(m: &Morphism) -> LawReport {
    let (s, t) = (&m.source, &m.target);
    let mut r = LawReport::new(format!("morphism invertibility: {}", m.name));
    r.absorb("seprel", check_invertible_rel(&m.seprel));

    let u = s.unit_idx();
    let bad = (0..s.len()).into_par_iter().find_map_first(|a| {
        if !m.seprel.holds_idx(a, u) {
            return None;
        }
        let images: HashSet<(usize, usize)> = s
            .splits_idx(a)
            .iter()
            .map(|&(a1, a2)| (a1 as usize, a2 as usize))
            .filter(|&(a1, a2)| m.seprel.holds_idx(a1, a2))
            .map(|(a1, a2)| (m.map[a1], m.map[a2]))
            .collect();
        t.splits_idx(m.map[a])
            .iter()
            .map(|&(b1, b2)| (b1 as usize, b2 as usize))
            .find(|pair| !images.contains(pair))
            .map(|(b1, b2)| (a, b1, b2))
    });
    r.record(
        "invertibility",
        bad.map(|(a, b1, b2)| vec![s.elem(a).clone(), t.elem(b1).clone(), t.elem(b2).clone()]),
    );
    r
}

/// `a ⊕ b = a ⊕ c ⇒ b = c` whenever both joins are defined.
pub fn check_cancellative(p: &PcmStructure) -> LawReport {
    let mut r = LawReport::new(format!("cancellativity: {}", p.name()));
    let bad = first_triple(p.len(), |a, b, c| {
        b != c && p.separate_idx(a, b) && p.separate_idx(a, c) && p.join_idx(a, b) == p.join_idx(a, c)
    });
    r.record(
        "cancellativity",
        bad.map(|(a, b, c)| vec![p.elem(a).clone(), p.elem(b).clone(), p.elem(c).clone()]),
    );
    r
}

/// The separating-conjunction lemmas, checked over every well-formed
/// subjective state `(a, a')`:
///
/// * `s ↦ self R other` is duplicable, i.e. equivalent to its own `∗`-square;
/// * with `F(b)(s) ≜ m(self) = b ∧ self ⊥_m other`,
///   `F(b1 ⊕ b2) ⟺ F(b1) ∗ F(b2)` for every defined `b1 ⊕ b2`.
///
/// Witnesses are `(a, a')` for duplicability and `(a, a', b1, b2)` for the split.
pub fn check_framing_lemmas(rel: &SepRel, m: &Morphism) -> LawReport {
    let mut r = LawReport::new(format!("framing: {} / {}", rel.name(), m.name));

    let p = rel.base();
    let n = p.len();
    let dup = |fwd: bool| {
        first_pair(n, |a, o| {
            if !p.separate_idx(a, o) {
                return false;
            }
            let lhs = rel.holds_idx(a, o);
            let rhs = star_split_idx(p, a, o)
                .any(|(a1, o1, a2, o2)| rel.holds_idx(a1, o1) && rel.holds_idx(a2, o2));
            if fwd { lhs && !rhs } else { rhs && !lhs }
        })
        .map(|(a, o)| vec![p.elem(a).clone(), p.elem(o).clone()])
    };
    r.record("duplicable ⇒", dup(true));
    r.record("duplicable ⇐", dup(false));

    let (s, t) = (&m.source, &m.target);
    let target_pairs: Vec<(usize, usize)> = (0..t.len())
        .flat_map(|b1| (0..t.len()).map(move |b2| (b1, b2)))
        .filter(|&(b1, b2)| t.separate_idx(b1, b2))
        .collect();
    let split = |fwd: bool| {
        first_pair_map(s.len(), |a, o| {
            if !s.separate_idx(a, o) {
                return None;
            }
            let images: HashSet<(usize, usize)> = star_split_idx(s, a, o)
                .filter(|&(a1, o1, a2, o2)| m.seprel.holds_idx(a1, o1) && m.seprel.holds_idx(a2, o2))
                .map(|(a1, _, a2, _)| (m.map[a1], m.map[a2]))
                .collect();
            let related = m.seprel.holds_idx(a, o);
            target_pairs
                .iter()
                .find(|&&(b1, b2)| {
                    let lhs = related && m.map[a] == t.join_idx(b1, b2);
                    let rhs = images.contains(&(b1, b2));
                    if fwd { lhs && !rhs } else { rhs && !lhs }
                })
                .map(|&(b1, b2)| {
                    vec![s.elem(a).clone(), s.elem(o).clone(), t.elem(b1).clone(), t.elem(b2).clone()]
                })
        })
    };
    r.record("F(b1⊕b2) ⇒ F(b1)∗F(b2)", split(true));
    r.record("F(b1⊕b2) ⇐ F(b1)∗F(b2)", split(false));

    let states = |q: &PcmStructure| {
        (0..q.len())
            .flat_map(|a| (0..q.len()).map(move |o| (a, o)))
            .filter(|&(a, o)| q.separate_idx(a, o))
            .count() as u64
    };
    r.stat("relation_states", states(p));
    r.stat("morphism_states", states(s));
    r
}

/// Identity and associativity laws over all composable chains of `registry`,
/// comparing maps and seprels extensionally.
pub fn check_category_laws(registry: &[Morphism]) -> LawReport {
    let mut r = LawReport::new("category laws");
    let mut left = None;
    let mut right = None;
    for f in registry {
        let id_t = identity(&f.target);
        let id_s = identity(&f.source);
        if left.is_none() {
            left = compose(&id_t, f).ok().and_then(|g| g.first_difference(f).ok().flatten());
            if left.is_some() {
                r.note(format!("id∘{0} differs from {0}", f.name));
            }
        }
        if right.is_none() {
            right = compose(f, &id_s).ok().and_then(|g| g.first_difference(f).ok().flatten());
            if right.is_some() {
                r.note(format!("{0}∘id differs from {0}", f.name));
            }
        }
    }
    r.record("left-identity", left);
    r.record("right-identity", right);

    let mut chains = 0u64;
    let mut assoc = None;
    for f in registry {
        for g in registry.iter().filter(|g| f.source.same_as(&g.target)) {
            for h in registry.iter().filter(|h| g.source.same_as(&h.target)) {
                chains += 1;
                if assoc.is_some() {
                    continue;
                }
                let lhs = compose(&compose(f, g).expect("composable"), h).expect("composable");
                let rhs = compose(f, &compose(g, h).expect("composable")).expect("composable");
                assoc = lhs.first_difference(&rhs).ok().flatten();
                if assoc.is_some() {
                    r.note(format!("({}∘{})∘{} is not associative", f.name, g.name, h.name));
                }
            }
        }
    }
    r.record("associativity", assoc);
    r.stat("morphisms", registry.len() as u64);
    r.stat("composable_triples", chains);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{pcm_o, pcm_natmax};
    use crate::report::Status;

    #[test]
    fn identity_and_const_unit() {
        let o = pcm_o();
        let id = identity(&o);
        assert_eq!(id.apply(&Element::own()).unwrap(), Element::own());
        let c = const_unit(&o, &o);
        assert_eq!(c.apply(&Element::own()).unwrap(), Element::ownbar());
        assert_eq!(c.apply(&Element::Top).unwrap(), Element::Top);
        assert!(check_morphism_laws(&id).passed());
        assert!(check_morphism_laws(&c).passed());
    }

    #[test]
    fn join_morphism_on_o() {
        let o = pcm_o();
        let j = join_morphism(&o);
        let x = Element::pair(Element::own(), Element::ownbar());
        assert_eq!(j.apply(&x).unwrap(), Element::own());
        let rep = check_morphism_laws(&j);
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn projections_need_a_product() {
        let o = pcm_o();
        assert!(proj_first(&o).is_err());
        let oo = product(&o, &o);
        let p1 = proj_first(&oo).unwrap();
        let p2 = proj_second(&oo).unwrap();
        let x = Element::pair(Element::own(), Element::ownbar());
        assert_eq!(p1.apply(&x).unwrap(), Element::own());
        assert_eq!(p2.apply(&x).unwrap(), Element::ownbar());
    }

    #[test]
    fn compose_rejects_mismatch() {
        let o = pcm_o();
        let n = pcm_natmax(3);
        let err = compose(&identity(&o), &identity(&n)).unwrap_err();
        assert!(matches!(err, PcmError::CarrierMismatch { .. }));
    }

    #[test]
    fn cancellativity_of_o_and_natmax() {
        assert!(check_cancellative(&pcm_o()).passed());
        let rep = check_cancellative(&pcm_natmax(5));
        assert_eq!(rep.status("cancellativity"), Some(Status::Fail));
        assert_eq!(
            rep.witness("cancellativity"),
            Some(&[Element::nat(2), Element::nat(1), Element::nat(2)][..])
        );
    }

    #[test]
    fn identity_framing_on_o() {
        let o = pcm_o();
        let rep = check_framing_lemmas(&rel_trivial(&o), &identity(&o));
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn broken_unit_is_reported() {
        let o = pcm_o();
        let bad = Morphism::total("swap", &o, &o, |x| match x {
            Element::Top => Element::Top,
            x if *x == Element::own() => Element::ownbar(),
            _ => Element::own(),
        })
        .unwrap();
        let rep = check_morphism_laws(&bad);
        assert_eq!(rep.witness("unit-preservation"), Some(&[Element::ownbar()][..]));
    }
}
