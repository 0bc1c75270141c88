//! Built-in structures, relations and morphisms, looked up by name.

use pcmorph_core::*;

pub const PCMS: &[&str] = &["o", "natmax", "nat-add", "tickets", "hist", "oxo"];

pub const SEPRELS: &[&str] = &[
    "unit",
    "trivial",
    "alpha",
    "hist",
    "ordered",
    "alpha-ordered",
    "join",
    "kernel-alpha",
    "eql-alpha-unit",
    "eql-serve-wait",
    "top-used",
    "upsilon",
];

pub const MORPHISMS: &[&str] = &[
    "id",
    "id-o",
    "const-unit",
    "proj1",
    "proj2",
    "join",
    "sigma",
    "psi",
    "max-key",
    "filter-wait",
    "filter-serve",
    "filter-used",
    "count",
    "count-serve",
    "alpha",
    "omega",
    "alpha-inject",
    "tensor-alpha",
    "arrow-alpha",
    "alpha-trivial-seprel",
    "psi-top-used",
];

pub const FRAMINGS: &[&str] = &["alpha", "omega", "trivial-o", "psi-top-used"];

/// Every name `laws` accepts.
pub fn law_names() -> Vec<String> {
    let mut out = Vec::new();
    out.extend(PCMS.iter().map(|n| format!("pcm-{n}")));
    out.extend(SEPRELS.iter().map(|n| format!("seprel-{n}")));
    out.extend(MORPHISMS.iter().map(|n| format!("morph-{n}")));
    out.extend(PCMS.iter().map(|n| format!("cancel-{n}")));
    out.push("category".into());
    out.extend(FRAMINGS.iter().map(|n| format!("framing-{n}")));
    out
}

/// Every name `invert` accepts.
pub fn invert_names() -> Vec<String> {
    let mut out: Vec<String> = SEPRELS.iter().map(|n| format!("seprel-{n}")).collect();
    out.extend(MORPHISMS.iter().map(|n| format!("morph-{n}")));
    out
}

pub fn pcm(name: &str, b: u32) -> Option<Pcm> {
    let o = pcm_o();
    Some(match name {
        "o" => o,
        "natmax" => pcm_natmax(b + 2),
        "nat-add" => pcm_nat_add(b),
        "tickets" => pcm_tickets(b),
        "hist" => pcm_hist(b),
        "oxo" => product(&o, &o),
        _ => return None,
    })
}

pub fn seprel(name: &str, b: u32) -> Option<SepRel> {
    let t = pcm_tickets(b);
    Some(match name {
        "unit" => rel_unit(&t),
        "trivial" => rel_trivial(&t),
        "alpha" => rel_alpha(b),
        "hist" => rel_hist(b),
        "ordered" => rel_ordered(b),
        "alpha-ordered" => rel_intersect(&rel_alpha(b), &rel_ordered(b)).ok()?,
        "join" => rel_join(&pcm_o()),
        "kernel-alpha" => kernel(&morph_alpha(b)),
        "eql-alpha-unit" => equalizer(&morph_alpha(b), &const_unit(&t, &pcm_o())).ok()?,
        "eql-serve-wait" => equalizer(&morph_alpha(b), &morph_alpha_label(b, Label::Wait)).ok()?,
        "top-used" => morph_psi_top_used(b).seprel().clone(),
        "upsilon" => rel_upsilon(b),
        _ => return None,
    })
}

pub fn morphism(name: &str, b: u32) -> Option<Morphism> {
    let t = pcm_tickets(b);
    let o = pcm_o();
    let oo = product(&o, &o);
    Some(match name {
        "id" => identity(&t),
        "id-o" => identity(&o),
        "const-unit" => const_unit(&t, &o),
        "proj1" => proj_first(&oo).ok()?,
        "proj2" => proj_second(&oo).ok()?,
        "join" => join_morphism(&o),
        "sigma" => morph_sigma(b),
        "psi" => morph_psi(b),
        "max-key" => morph_max_key(b),
        "filter-wait" => morph_filter(b, Label::Wait),
        "filter-serve" => morph_filter(b, Label::Serve),
        "filter-used" => morph_filter(b, Label::Used),
        "count" => morph_count(b),
        "count-serve" => morph_count_serve(b),
        "alpha" => morph_alpha(b),
        "omega" => morph_hist_own(b),
        "alpha-inject" => {
            let w = quotient(&t, &rel_alpha(b)).ok()?;
            compose(&morph_alpha(b), &w.inject).ok()?
        }
        "tensor-alpha" => tensor(&morph_alpha(b), &morph_alpha(b)).ok()?,
        "arrow-alpha" => arrow_product(&morph_alpha(b), &morph_alpha(b)).ok()?,
        "alpha-trivial-seprel" => morph_alpha_trivial_seprel(b),
        "psi-top-used" => morph_psi_top_used(b),
        _ => return None,
    })
}

pub fn framing(name: &str, b: u32) -> Option<(SepRel, Morphism)> {
    let o = pcm_o();
    Some(match name {
        "alpha" => (rel_alpha(b), morph_alpha(b)),
        "omega" => (rel_hist(b), morph_hist_own(b)),
        "trivial-o" => (rel_trivial(&o), identity(&o)),
        "psi-top-used" => (rel_alpha(b), morph_psi_top_used(b)),
        _ => return None,
    })
}

/// Morphisms on the ticket carrier and into it, for the category laws.
pub fn category_registry(b: u32) -> Vec<Morphism> {
    let t = pcm_tickets(b);
    vec![
        identity(&t),
        morph_sigma(b),
        morph_filter(b, Label::Serve),
        morph_filter(b, Label::Wait),
        morph_count(b),
        morph_alpha(b),
        morph_psi(b),
        const_unit(&t, &pcm_o()),
        identity(&pcm_o()),
    ]
}

/// The morphism whose invertibility through the quotient injection is checked.
pub fn quotient_morphism(rel: &str, p: &Pcm, b: u32) -> Morphism {
    match rel {
        "alpha" | "alpha-ordered" | "kernel-alpha" | "eql-alpha-unit" => morph_alpha(b),
        "hist" => morph_hist_own(b),
        _ => identity(p),
    }
}
