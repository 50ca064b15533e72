//! Worked examples for tubes, lamps, exclusive areas, lit sets, and their
//! interaction with nested forks.

use lamplab_core::diagram::Diagram;
use lamplab_core::geom::{rat, rat_frac, Pt};
use lamplab_core::lamps::{
    all_exclusive_areas, classify_tubes, consecutive_secondary_triples, exclusive_areas,
    lamp_poset, lamps, LampKind, TubeKind,
};
use lamplab_core::lattice::jir_con_poset;
use lamplab_core::order::is_isomorphic;
use lamplab_core::photon::{
    geom_relation, litset_poset, litsets, GeomRel, GeomRelError, SetKind,
};

fn s7() -> Diagram {
    let g = Diagram::grid(1, 1);
    let cell = g.cells()[0].clone();
    g.insert_fork(&cell).unwrap()
}

fn k3() -> Diagram {
    let g = Diagram::grid(1, 1);
    let cell = g.cells()[0].clone();
    g.insert_multifork(&cell, 3).unwrap()
}

/// grid(1,2) with a fork in its top cell, then a fork into the fresh cell
/// inside the first lamp's lit set: the two internal lamps form a chain.
fn nested() -> Diagram {
    let g = Diagram::grid(1, 2);
    let top_cell = g.find_cell_by_bottom(&Pt::of(0, 1)).unwrap();
    let d = g.insert_multifork(&top_cell, 1).unwrap();
    let inner = d.find_cell_by_bottom(&Pt::new(rat_frac(1, 2), rat(0))).unwrap();
    d.insert_multifork(&inner, 1).unwrap()
}

#[test]
fn nested_lamps_form_a_chain_and_match_the_oracle() {
    let d = nested();
    let (_, lamp_list) = lamps(&d);
    assert_eq!(lamp_list.len(), 5, "3 boundary + 2 internal");
    let lp = lamp_poset(&d);
    let con = jir_con_poset(&d.lattice());
    assert!(is_isomorphic(&lp, &con).is_some());
    // the two internal lamps are comparable: a 2-chain under the boundary
    let internals: Vec<usize> = lamp_list
        .iter()
        .enumerate()
        .filter(|(_, l)| l.kind == LampKind::Internal)
        .map(|(i, _)| i)
        .collect();
    assert_eq!(internals.len(), 2);
    let (i, j) = (internals[0], internals[1]);
    let li = format!("L{i}");
    let lj = format!("L{j}");
    assert!(lp.le(&li, &lj) || lp.le(&lj, &li), "nested lamps must be comparable");
}

#[test]
fn host_tube_over_nested_foot_is_primary() {
    let d = nested();
    let (tubes, lamp_list) = lamps(&d);
    let primary = classify_tubes(&d);
    // the upper internal lamp's tube hosts the nested foot
    let upper = lamp_list
        .iter()
        .find(|l| l.kind == LampKind::Internal && d.pt(l.peak) == &Pt::of(1, 2))
        .expect("first fork's lamp");
    assert!(upper.tubes.iter().any(|&ti| primary[ti]));
    let _ = &tubes;
}

#[test]
fn exclusive_area_examples() {
    // grid boundary tube: one side positive, the other degenerate
    let g = Diagram::grid(2, 2);
    let (tubes, lamp_list) = lamps(&g);
    let left_lamp = lamp_list
        .iter()
        .find(|l| l.kind == LampKind::LeftBoundary)
        .unwrap();
    let (lea, rea) = exclusive_areas(&g, &tubes, left_lamp, 0);
    assert!(!lea.has_area());
    assert!(rea.has_area());

    // the single tube of the first fork is leftmost and rightmost at once;
    // with the host cell on the boundary both carved areas are degenerate
    let d = s7();
    let (tubes, lamp_list) = lamps(&d);
    let internal = lamp_list.iter().find(|l| l.kind == LampKind::Internal).unwrap();
    let (lea, rea) = exclusive_areas(&d, &tubes, internal, 0);
    assert!(!lea.has_area() && !rea.has_area());

    // middle tube of a 3-fold multifork: bounded rectangles between the
    // neighbouring floors
    let d = k3();
    let (tubes, lamp_list) = lamps(&d);
    let lamp = lamp_list.iter().find(|l| l.tubes.len() == 3).unwrap();
    let (lea, rea) = exclusive_areas(&d, &tubes, lamp, 1);
    assert!(lea.has_area() && rea.has_area());
    let left_nb = &tubes[lamp.tubes[0]];
    let right_nb = &tubes[lamp.tubes[2]];
    assert_eq!(lea.u1, d.pt(left_nb.foot).u);
    assert_eq!(lea.v1, d.pt(left_nb.foot).v);
    assert_eq!(rea.u1, d.pt(right_nb.foot).u);
    assert_eq!(rea.v1, d.pt(right_nb.foot).v);
}

#[test]
fn area_interiors_of_one_lamp_are_disjoint() {
    let d = k3();
    let (_, lamp_list) = lamps(&d);
    let areas = all_exclusive_areas(&d);
    let lamp = lamp_list.iter().find(|l| l.tubes.len() == 3).unwrap();
    for (i, &a) in lamp.tubes.iter().enumerate() {
        for &b in lamp.tubes.iter().skip(i + 1) {
            let (la, ra) = &areas[a];
            let (lb, rb) = &areas[b];
            let overlap = |x: &lamplab_core::geom::UvRect, y: &lamplab_core::geom::UvRect| {
                x.has_area() && y.has_area() && x.u0 < y.u1 && y.u0 < x.u1 && x.v0 < y.v1 && y.v0 < x.v1
            };
            assert!(!overlap(la, lb));
            assert!(!overlap(ra, rb));
        }
    }
}

#[test]
fn nested_fork_inside_a_middle_area_blocks_the_triple() {
    let d = k3();
    assert_eq!(consecutive_secondary_triples(&d).len(), 1);
    // fork into the strip cell wholly inside the middle tube's left area
    let cell = d
        .find_cell_by_bottom(&Pt::new(rat_frac(3, 4), rat(0)))
        .expect("strip cell between the lanes");
    let e = d.insert_fork(&cell).unwrap();
    assert!(consecutive_secondary_triples(&e).is_empty());
    // and the middle tube is now primary
    let (tubes, lamp_list) = lamps(&e);
    let primary = classify_tubes(&e);
    let lamp = lamp_list.iter().find(|l| l.tubes.len() == 3).unwrap();
    let mid = lamp.tubes[1];
    assert!(primary[mid]);
    assert_eq!(tubes[mid].kind, TubeKind::Internal);
}

#[test]
fn lit_membership_examples() {
    let d = s7();
    let sets = litsets(&d);
    let (_, lamp_list) = lamps(&d);
    let internal = lamp_list.iter().position(|l| l.kind == LampKind::Internal).unwrap();
    let left = lamp_list.iter().position(|l| l.kind == LampKind::LeftBoundary).unwrap();
    let foot = Pt::new(rat_frac(1, 2), rat_frac(1, 2));
    // the internal foot is lit by the left boundary lamp, interior included
    assert!(sets[left].contains(&foot, false));
    assert!(sets[left].contains(&foot, true));
    // a point on the internal lamp's own floor: contained, not interior
    let on_floor = Pt::new(rat_frac(1, 2), rat_frac(1, 4));
    assert!(sets[internal].contains(&on_floor, false));
    assert!(!sets[internal].contains(&on_floor, true));
    // the bottom vertex is lit by a boundary stripe that reaches the corner
    let origin = Pt::of(0, 0);
    assert!(sets[left].contains(&origin, false));
}

#[test]
fn s7_quadruple_and_relations() {
    let d = s7();
    let sets = litsets(&d);
    let internal = sets.iter().find(|s| s.kind == SetKind::AShape).unwrap();
    let q = &internal.quadruple;
    assert!(q.p < q.q && q.q < q.r && q.r < q.s);
    for s in &sets {
        if s.lamp == internal.lamp {
            assert!(matches!(
                geom_relation(internal, s),
                Err(GeomRelError::SamePair)
            ));
            continue;
        }
        let rel = geom_relation(internal, s).unwrap();
        assert!(
            matches!(rel, GeomRel::Bl | GeomRel::Br | GeomRel::Bm),
            "internal lamp sits between the boundary arms, got {rel:?}"
        );
    }
}

#[test]
fn litset_poset_matches_lamp_poset_on_samples() {
    for d in [Diagram::grid(2, 3), s7(), k3(), nested()] {
        assert!(is_isomorphic(&litset_poset(&d), &lamp_poset(&d)).is_some());
    }
}

#[test]
fn removal_roundtrip_reinserts_isomorphically() {
    let d = k3();
    let triples = consecutive_secondary_triples(&d);
    let removed = d.remove_tube(triples[0].1, false).unwrap();
    // re-insert a fork under the same peak: the vacated cell is the one
    // between the two remaining tubes
    let (tubes, lamp_list) = lamps(&removed);
    let lamp = lamp_list.iter().find(|l| l.tubes.len() == 2).unwrap();
    let left_foot = tubes[lamp.tubes[1]].foot;
    let cell = removed
        .cells()
        .iter()
        .find(|c| c.top == lamp.peak && c.left == left_foot)
        .cloned()
        .unwrap();
    let back = removed.insert_fork(&cell).unwrap();
    assert!(is_isomorphic(&back.to_poset(), &d.to_poset()).is_some());
}

#[test]
fn safe_removal_rejected_without_triples() {
    let d = s7();
    let (tubes, _) = lamps(&d);
    let foot = tubes.iter().find(|t| t.kind == TubeKind::Internal).unwrap().foot;
    assert!(d.remove_tube(foot, false).is_err());
    // override works and the result is the base grid
    let forced = d.remove_tube(foot, true).unwrap();
    assert!(is_isomorphic(&forced.to_poset(), &Diagram::grid(1, 1).to_poset()).is_some());
}

#[test]
fn minimal_witnesses_respect_the_tube_bound() {
    use lamplab_core::repr::{decide, DecideBudget, Outcome, Target, Witness};
    let y = lamplab_core::order::Poset::from_relation(
        vec!["0".into(), "c".into(), "a".into(), "b".into()],
        vec![
            ("0".to_string(), "c".to_string()),
            ("c".to_string(), "a".to_string()),
            ("c".to_string(), "b".to_string()),
        ],
    )
    .unwrap();
    for (target, n) in [(lamplab_core::order::Poset::antichain(2), 2usize), (y, 4)] {
        let v = decide(&Target::JirPoset(target), &DecideBudget::default()).unwrap();
        let Outcome::Representable(Witness::Script(s)) = v.outcome else {
            panic!("expected script witness");
        };
        let d = lamplab_core::diagram::replay(&s).unwrap();
        let (_, lamp_list) = lamps(&d);
        let bound = (3 * n).saturating_sub(4).max(1);
        for l in &lamp_list {
            assert!(l.tubes.len() <= bound, "lamp exceeds the tube bound");
        }
    }
}
