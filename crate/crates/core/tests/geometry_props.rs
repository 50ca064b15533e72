//! Property tests for the exact polygon layer and a deeper randomized shake
//! of the whole invariant suite beyond the lengths the acceptance suite pins.

use proptest::prelude::*;

use lamplab_core::geom::{
    point_in_union_interior, rat, union_subset_by_area, Poly, Pt, UvRect,
};

fn rect_strategy() -> impl Strategy<Value = UvRect> {
    (0i64..6, 0i64..6, 1i64..6, 1i64..6).prop_map(|(u0, v0, du, dv)| {
        UvRect::closed(rat(u0), rat(v0), rat(u0 + du), rat(v0 + dv))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intersection_area_is_monotone(a in rect_strategy(), b in rect_strategy()) {
        let pa = a.as_poly();
        let pb = b.as_poly();
        let inter = pa.intersect(&pb);
        prop_assert!(inter.area2() <= pa.area2());
        prop_assert!(inter.area2() <= pb.area2());
        // intersection is inside both
        if !inter.is_empty() {
            prop_assert!(union_subset_by_area(&[inter.clone()], &[pa.clone()]));
            prop_assert!(union_subset_by_area(&[inter], &[pb.clone()]));
        }
        // a rectangle is covered by itself split along any interior line
        prop_assert!(union_subset_by_area(&[pa.clone()], &[pa.clone()]));
    }

    #[test]
    fn interior_points_are_contained(r in rect_strategy(), du in 1i64..7, dv in 1i64..7) {
        let poly = r.as_poly();
        // a strictly interior rational point
        let p = Pt::new(
            &r.u0 + (&r.u1 - &r.u0) * rat(du) / rat(8),
            &r.v0 + (&r.v1 - &r.v0) * rat(dv) / rat(8),
        );
        prop_assert!(poly.contains(&p));
        prop_assert!(point_in_union_interior(&p, &[poly.clone()]));
        // corners are not interior
        let corner = Pt::new(r.u0.clone(), r.v0.clone());
        prop_assert!(!point_in_union_interior(&corner, &[poly]));
    }

    #[test]
    fn split_union_interior_heals_the_seam(r in rect_strategy(), k in 1i64..7) {
        // split the rectangle along a vertical seam; seam-interior points are
        // interior to the union but corners stay boundary
        let cut = &r.u0 + (&r.u1 - &r.u0) * rat(k) / rat(8);
        let left = UvRect::closed(r.u0.clone(), r.v0.clone(), cut.clone(), r.v1.clone());
        let right = UvRect::closed(cut.clone(), r.v0.clone(), r.u1.clone(), r.v1.clone());
        let mid = Pt::new(cut.clone(), (&r.v0 + &r.v1) / rat(2));
        let polys = [left.as_poly(), right.as_poly()];
        prop_assert!(point_in_union_interior(&mid, &polys));
        let seam_end = Pt::new(cut, r.v0.clone());
        prop_assert!(!point_in_union_interior(&seam_end, &polys));
        prop_assert!(union_subset_by_area(&polys, &[r.as_poly()]));
        prop_assert!(union_subset_by_area(&[r.as_poly()], &polys));
    }
}

#[test]
fn grid_congruence_lattices_are_boolean() {
    use lamplab_core::diagram::Diagram;
    use lamplab_core::lattice::{con_lattice, jir_con_poset};
    for (c, d) in [(1u32, 1u32), (1, 2), (2, 2), (1, 3), (2, 3)] {
        let l = Diagram::grid(c, d).lattice();
        let con = jir_con_poset(&l);
        assert_eq!(con.len(), (c + d) as usize);
        assert!(con.covers_idx().is_empty(), "grid congruences are independent");
        let cl = con_lattice(&l, 100_000).unwrap();
        assert_eq!(cl.len(), 1usize << (c + d));
    }
}

#[test]
fn deep_random_diagrams_pass_the_suite() {
    use lamplab_core::diagram::random_diagram;
    use lamplab_core::suite::run_invariant_suite;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    for i in 0..12 {
        let d = random_diagram(&mut rng, 12);
        let report = run_invariant_suite(&d);
        assert!(
            report.pass(),
            "deep random diagram {i} ({:?}): {:?}",
            d.script(),
            report.failures().iter().map(|c| (&c.name, &c.detail)).collect::<Vec<_>>()
        );
    }
}
