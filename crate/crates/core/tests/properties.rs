//! Randomised properties. Carrier-level laws sample from the finite registry;
//! ticket-map and transition laws run on maps larger than the enumerated carriers.

use proptest::prelude::*;

use pcmorph_core::*;

fn carriers() -> Vec<Pcm> {
    let o = pcm_o();
    vec![o.clone(), pcm_natmax(5), pcm_nat_add(4), pcm_tickets(2), pcm_hist(2), product(&o, &o)]
}

fn seprels() -> Vec<SepRel> {
    let t = pcm_tickets(2);
    let o = pcm_o();
    vec![
        rel_unit(&t),
        rel_trivial(&t),
        rel_alpha(2),
        rel_ordered(2),
        rel_alpha_label(2, Label::Wait),
        kernel(&morph_alpha(2)),
        kernel(&morph_count(2)),
        equalizer(&morph_psi(2), &morph_max_key(2)).unwrap(),
        rel_join(&o),
    ]
}

fn ticket_morphisms() -> Vec<Morphism> {
    let mut ms = vec![
        morph_sigma(2),
        morph_psi(2),
        morph_max_key(2),
        morph_count(2),
        morph_count_serve(2),
        morph_alpha(2),
        morph_alpha_label(2, Label::Wait),
        morph_alpha_label(2, Label::Used),
    ];
    ms.extend(Label::ALL.map(|l| morph_filter(2, l)));
    ms
}

/// The transitions alone: a carrier at this bound would be far too large to enumerate.
fn transitions() -> Vec<Transition> {
    vec![tr_taketx(16), tr_lock(), tr_unlock()]
}

fn label() -> impl Strategy<Value = Label> {
    prop_oneof![Just(Label::Wait), Just(Label::Serve), Just(Label::Used)]
}

fn ticket_map(max_key: u32) -> impl Strategy<Value = TicketMap> {
    proptest::collection::btree_map(1..=max_key, label(), 0..=max_key as usize).prop_map(TicketMap)
}

/// A state-space member: `u` used, at most one serve, then waits, split
/// between self and other by a bitmask.
fn statespace_state() -> impl Strategy<Value = TlState> {
    (0u32..4, any::<bool>(), 0u32..4, any::<u16>()).prop_map(|(used, serve, wait, mask)| {
        let mut labels = vec![Label::Used; used as usize];
        if serve {
            labels.push(Label::Serve);
        }
        labels.extend(std::iter::repeat_n(Label::Wait, wait as usize));
        let (mut a, mut b) = (TicketMap::new(), TicketMap::new());
        for (i, l) in labels.into_iter().enumerate() {
            let side = if mask >> i & 1 == 1 { &mut a } else { &mut b };
            side.0.insert(i as u32 + 1, l);
        }
        TlState::new(a, b)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn defined_iff_separate_from_unit(c in 0..6usize, i in any::<prop::sample::Index>()) {
        let p = &carriers()[c];
        let x = i.get(p.elements());
        prop_assert_eq!(p.is_defined(x).unwrap(), p.is_separate(x, p.unit()).unwrap());
    }

    #[test]
    fn join_is_commutative_and_associative(
        c in 0..6usize,
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
        k in any::<prop::sample::Index>(),
    ) {
        let p = &carriers()[c];
        let (x, y, z) = (i.get(p.elements()), j.get(p.elements()), k.get(p.elements()));
        prop_assert_eq!(p.join(x, y).unwrap(), p.join(y, x).unwrap());
        let l = p.join(&p.join(x, y).unwrap(), z).unwrap();
        let r = p.join(x, &p.join(y, z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn star_splits_reconstruct(c in 0..6usize, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let p = &carriers()[c];
        let (a, o) = (i.get(p.elements()), j.get(p.elements()));
        prop_assume!(p.is_separate(a, o).unwrap());
        let s = SubjState::new(p, a.clone(), o.clone()).unwrap();
        for (l, r) in star_split(p, &s).unwrap() {
            prop_assert_eq!(&p.join(&l.self_, &r.self_).unwrap(), a);
            prop_assert_eq!(l.other, p.join(&r.self_, o).unwrap());
            prop_assert_eq!(r.other, p.join(&l.self_, o).unwrap());
        }
    }

    #[test]
    fn seprels_strengthen_and_close_under_unit(r in 0..9usize, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let r = &seprels()[r];
        let p = r.base();
        let (x, y) = (i.get(p.elements()), j.get(p.elements()));
        if r.holds(x, y).unwrap() {
            prop_assert!(p.is_defined(x).unwrap() && p.is_defined(y).unwrap());
            prop_assert!(p.is_separate(x, y).unwrap());
            prop_assert!(r.holds(&p.join(x, y).unwrap(), p.unit()).unwrap());
        }
    }

    #[test]
    fn intersections_are_seprels(a in 0..8usize, b in 0..8usize) {
        let rels = seprels();
        let r = rel_intersect(&rels[a], &rels[b]).unwrap();
        prop_assert!(check_seprel_laws(&r).passed());
    }

    #[test]
    fn morphisms_preserve_unit_and_top(m in 0..11usize) {
        let m = &ticket_morphisms()[m];
        prop_assert_eq!(&m.apply(m.source().unit()).unwrap(), m.target().unit());
        prop_assert_eq!(&m.apply(m.source().top()).unwrap(), m.target().top());
    }

    #[test]
    fn kernels_equalizers_and_restrictions_are_lawful(a in 0..11usize, b in 0..11usize, r in 0..8usize) {
        let ms = ticket_morphisms();
        let (ma, mb) = (&ms[a], &ms[b]);
        prop_assert!(check_seprel_laws(&kernel(ma)).passed());
        if let Ok(e) = equalizer(ma, mb) {
            prop_assert!(check_seprel_laws(&e).passed());
            if check_cancellative(ma.target()).passed() {
                prop_assert!(check_invertible_rel(&e).passed());
            }
        }
        let rel = &seprels()[r];
        let restricted = restrict(ma, rel).unwrap();
        prop_assert!(check_morphism_laws(&restricted).passed());
    }

    #[test]
    fn quotients_are_normal_pcms(r in 0..8usize) {
        let rel = &seprels()[r];
        let w = quotient(rel.base(), rel).unwrap();
        prop_assert!(w.sub.is_normal());
        let rep = check_quotient(&w, rel);
        prop_assert!(rep.passed(), "{}", rep);
    }

    #[test]
    fn display_distributes_as_max(x in ticket_map(8), y in ticket_map(8)) {
        if let Some(j) = x.join(&y) {
            prop_assert_eq!(j.psi(), x.psi().max(y.psi()));
        }
    }

    #[test]
    fn fresh_is_max_plus_one_without_gaps(n in 0u32..10, l in label()) {
        let m = TicketMap((1..=n).map(|k| (k, l)).collect());
        prop_assert!(m.no_gaps());
        prop_assert_eq!(m.fresh(), n + 1);
    }

    #[test]
    fn ordered_is_downward_closed(x in ticket_map(8), y in ticket_map(8)) {
        if let Some(j) = x.join(&y) {
            if j.ordered() {
                prop_assert!(x.ordered() && y.ordered());
            }
        }
    }

    #[test]
    fn transitions_touch_only_self(s in statespace_state()) {
        for tr in transitions() {
            if let Some(s2) = tr.step(&s) {
                prop_assert_eq!(&s2.other, &s.other);
            }
            if let Some(s2) = tr.transpose().step(&s) {
                prop_assert_eq!(&s2.self_, &s.self_);
            }
            prop_assert_eq!(tr.transpose().transpose().step(&s), tr.step(&s));
        }
    }

    #[test]
    fn transitions_preserve_statespace_and_alpha(s in statespace_state()) {
        prop_assert!(s.joint().is_some_and(|j| j.ordered() && j.no_gaps()));
        for tr in transitions() {
            for s2 in [tr.step(&s), tr.transpose().step(&s)].into_iter().flatten() {
                let j = s2.joint().unwrap();
                prop_assert!(j.ordered() && j.no_gaps());
                prop_assert!(j.count(Label::Serve) <= 1);
            }
        }
    }

    #[test]
    fn failures_carry_witnesses(m in prop_oneof![Just(Mutation::Lock), Just(Mutation::Unlock), Just(Mutation::Taketx)]) {
        let r = resource_tl(3).with_mutation(m);
        for rep in [check_statespace_preservation(&r), check_stability(&r)] {
            for c in &rep.checks {
                prop_assert_eq!(c.status == Status::Fail, c.witness.is_some());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reachable_configs_are_disjoint_and_agree_on_display(
        threads in 1usize..=3,
        mutation in prop::option::of(prop_oneof![Just(Mutation::Lock), Just(Mutation::Unlock)]),
    ) {
        let base = resource_tl(3);
        let r = match mutation { Some(m) => base.with_mutation(m), None => base };
        let p = thread_program(&r, 1).unwrap();
        let progs = vec![p; threads];
        let res = explore(&r, &progs, &Check::ALL).unwrap();
        if mutation.is_none() {
            prop_assert!(res.passed());
        }
        for cfg in &res.configs {
            let joint = cfg.joint();
            prop_assert!(joint.is_some());
            let d = joint.unwrap().psi();
            for i in 0..threads {
                prop_assert_eq!(cfg.view_of(i).unwrap().display(), Some(d));
            }
        }
        for v in &res.violations {
            let end = replay(&progs, &v.trace).unwrap();
            prop_assert_eq!(&end, &v.trace.last().unwrap().config);
        }
    }
}
