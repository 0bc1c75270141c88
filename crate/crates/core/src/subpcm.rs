//! Sub-PCMs: the quotient `U/R` of a carrier by a separating relation, with
//! its injection and retraction, and a checker for arbitrary witnesses.

use crate::element::Element;
use crate::error::Result;
use crate::morphism::{check_invertible_morph, check_morphism_laws, compose, identity, Morphism};
use crate::pcm::{check_pcm_laws, Pcm, PcmStructure};
use crate::report::LawReport;
use crate::seprel::{ensure_seprel, rel_trivial, SepRel};
use crate::sweep::{first_index, first_pair};

/// `sub` embedded in `super_` by `inject`, with `retract` as a partial inverse.
#[derive(Debug, Clone)]
pub struct SubPcmWitness {
    pub sub: Pcm,
    pub super_: Pcm,
    pub inject: Morphism,
    pub retract: Morphism,
}

impl SubPcmWitness {
    /// Every carrier is a sub-PCM of itself.
    pub fn identity(p: &Pcm) -> SubPcmWitness {
        SubPcmWitness { sub: p.clone(), super_: p.clone(), inject: identity(p), retract: identity(p) }
    }
}

/// Builds `U/R`: the elements related to the unit plus `top`, joined by
/// `x ⊕ y` when `x R y` and `top` otherwise.
///
/// Refuses relations that fail the separating-relation laws.
pub fn quotient(p: &Pcm, r: &SepRel) -> Result<SubPcmWitness> {
    p.ensure_same(r.base())?;
    ensure_seprel(r)?;
    let u = p.unit_idx();
    let keep: Vec<usize> = (0..p.len()).filter(|&i| r.holds_idx(i, u)).chain([p.top_idx()]).collect();
    let mut pos = vec![usize::MAX; p.len()];
    for (k, &i) in keep.iter().enumerate() {
        pos[i] = k;
    }
    let top = keep.len() - 1;
    let mut table = Vec::with_capacity(keep.len() * keep.len());
    for &i in &keep {
        for &j in &keep {
            let k = if r.holds_idx(i, j) { pos[p.join_idx(i, j)] } else { top };
            table.push(k as u32);
        }
    }
    let elements: Vec<Element> = keep.iter().map(|&i| p.elem(i).clone()).collect();
    let defined = (0..keep.len()).map(|k| k != top).collect();
    let sub = PcmStructure::from_table(format!("{}/{}", p.name(), r.name()), elements, table, defined, p.unit())?;

    let inject_map = keep.clone();
    let inject = Morphism::from_idx("iota", &sub, p, inject_map, rel_trivial(&sub))?;
    let retract_map = (0..p.len()).map(|i| if r.holds_idx(i, u) { pos[i] } else { top }).collect();
    let retract = Morphism::from_idx("rho", p, &sub, retract_map, r.clone())?;
    Ok(SubPcmWitness { sub, super_: p.clone(), inject, retract })
}

/// Checks the four sub-PCM axioms, totality of the injection, the morphism
/// laws of both maps and the PCM laws of the sub-carrier.
pub fn check_subpcm_axioms(w: &SubPcmWitness) -> LawReport {
    let (sub, sup) = (&w.sub, &w.super_);
    let (i, rho) = (&w.inject, &w.retract);
    let mut r = LawReport::new(format!("sub-PCM axioms: {} in {}", sub.name(), sup.name()));

    let ax1 = first_index(sub.len(), |x| rho.apply_idx(i.apply_idx(x)) != x);
    r.record("retract-inject", ax1.map(|x| vec![sub.elem(x).clone()]));

    let su = sup.unit_idx();
    let ax2 = first_index(sup.len(), |u| {
        rho.seprel().holds_idx(u, su) && i.apply_idx(rho.apply_idx(u)) != u
    });
    r.record("inject-retract", ax2.map(|u| vec![sup.elem(u).clone()]));

    let ax3 = first_pair(sup.len(), |u, v| {
        sub.separate_idx(rho.apply_idx(u), rho.apply_idx(v)) && !rho.seprel().holds_idx(u, v)
    });
    r.record("retract-reflects", ax3.map(|(u, v)| vec![sup.elem(u).clone(), sup.elem(v).clone()]));

    let ax4 = first_index(sub.len(), |x| sup.defined_idx(i.apply_idx(x)) && !sub.defined_idx(x));
    r.record("inject-defined", ax4.map(|x| vec![sub.elem(x).clone()]));

    let total = rel_trivial(sub);
    let partial = i.seprel().first_difference(&total).ok().flatten();
    r.record("inject-total", partial.map(|(x, y)| vec![x, y]));

    r.absorb("inject", check_morphism_laws(i));
    r.absorb("retract", check_morphism_laws(rho));
    r.absorb("sub", check_pcm_laws(sub));
    r
}

/// Axioms plus the properties specific to the canonical quotient by `rel`:
/// normality and agreement of separateness with `rel`.
pub fn check_quotient(w: &SubPcmWitness, rel: &SepRel) -> LawReport {
    let mut r = check_subpcm_axioms(w);
    r.suite = format!("quotient: {}", w.sub.name());
    let sub = &w.sub;
    let undefined = first_index(sub.len(), |x| x != sub.top_idx() && !sub.defined_idx(x));
    r.record("normal", undefined.map(|x| vec![sub.elem(x).clone()]));
    let i = &w.inject;
    let differ = first_pair(sub.len(), |x, y| {
        sub.separate_idx(x, y) != rel.holds_idx(i.apply_idx(x), i.apply_idx(y))
    });
    r.record(
        "separateness-matches-relation",
        differ.map(|(x, y)| vec![sub.elem(x).clone(), sub.elem(y).clone()]),
    );
    r.stat("sub_elements", sub.len() as u64);
    r.stat("super_elements", w.super_.len() as u64);
    r
}

/// `m ∘ ι` over the quotient of `m`'s source is an invertible morphism.
pub fn check_inject_invertibility(m: &Morphism, w: &SubPcmWitness) -> Result<LawReport> {
    let composed = compose(m, &w.inject)?;
    let mut r = check_invertible_morph(&composed);
    r.suite = format!("invertibility through injection: {}", composed.name());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Label;
    use crate::error::PcmError;
    use crate::instances::{pcm_o, pcm_tickets, rel_alpha, rel_upsilon};
    use crate::pcm::product;

    #[test]
    fn quotient_by_alpha_joins() {
        let w = quotient(&pcm_tickets(2), &rel_alpha(2)).unwrap();
        let s1 = Element::map([(1, Label::Serve)]);
        let s2 = Element::map([(2, Label::Serve)]);
        let w2 = Element::map([(2, Label::Wait)]);
        assert!(w.sub.join(&s1, &s2).unwrap().is_top());
        assert_eq!(
            w.sub.join(&s1, &w2).unwrap(),
            Element::map([(1, Label::Serve), (2, Label::Wait)])
        );
        assert!(!w.sub.contains(&Element::map([(1, Label::Serve), (2, Label::Serve)])));
    }

    #[test]
    fn quotient_refuses_non_seprel() {
        let err = quotient(&pcm_tickets(3), &rel_upsilon(3)).unwrap_err();
        assert!(matches!(err, PcmError::NotSeparatingRelation { .. }));
    }

    #[test]
    fn identity_witness_passes() {
        let o = pcm_o();
        let rep = check_subpcm_axioms(&SubPcmWitness::identity(&o));
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn trivial_quotient_normalizes_square() {
        let o = pcm_o();
        let oo = product(&o, &o);
        let w = quotient(&oo, &rel_trivial(&oo)).unwrap();
        assert!(w.sub.is_normal());
        assert_eq!(w.sub.len(), 5);
        let rep = check_quotient(&w, &rel_trivial(&oo));
        assert!(rep.passed(), "{rep}");
    }
}
