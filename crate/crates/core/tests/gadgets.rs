//! Independence of the two gadget families and the separation from the
//! older three-pendant three-crown property.

use lamplab_core::forbidden::{
    cde, cde_emeralds, ctf, has_cde_property, has_ctf_property, property_report,
    PropertyVerdict,
};
use lamplab_core::order::{find_morphism, MorphismSpec, Poset};

#[test]
fn report_on_ctf4_fails_only_its_own_order() {
    let p = ctf(4).unwrap();
    for row in property_report(&p, 4, None).unwrap() {
        if row.property == "CTF" && row.n == 4 {
            assert!(matches!(row.verdict, PropertyVerdict::Fails(_)));
        } else {
            assert!(row.verdict.holds(), "{} {} unexpectedly fails", row.property, row.n);
        }
    }
}

#[test]
fn report_on_cde4_fails_only_its_own_order() {
    let p = cde(4).unwrap();
    for row in property_report(&p, 4, None).unwrap() {
        if row.property == "CDE" && row.n == 4 {
            assert!(matches!(row.verdict, PropertyVerdict::Fails(_)));
        } else {
            assert!(row.verdict.holds(), "{} {} unexpectedly fails", row.property, row.n);
        }
    }
}

#[test]
fn families_are_mutually_independent() {
    // crowns with fences pass every diamonds-and-emeralds property and
    // conversely, at every feasible order
    for j in 2..=4u32 {
        let p = ctf(j).unwrap();
        for n in 3..=4u32 {
            assert!(
                has_cde_property(&p, n, None).unwrap().holds(),
                "ctf({j}) should satisfy the CDE_{n} property"
            );
        }
    }
    for k in 3..=4u32 {
        let p = cde(k).unwrap();
        for n in 2..=4u32 {
            assert!(
                has_ctf_property(&p, n, None).unwrap().holds(),
                "cde({k}) should satisfy the CTF_{n} property"
            );
        }
    }
}

#[test]
fn cde_property_is_stronger_than_the_pendant_crown_property() {
    // older property: no cover-preserving embedding of the gadget obtained
    // from cde(3) by deleting the emeralds
    let base = cde(3).unwrap();
    let emeralds = cde_emeralds(3);
    let keep: Vec<usize> = (0..base.len())
        .filter(|&i| !emeralds.contains(base.label(i)))
        .collect();
    let pendant_crown = base.restrict(&keep);
    assert_eq!(pendant_crown.len(), 9);
    let old_spec = MorphismSpec {
        injective: true,
        reflect_order: true,
        cover_preserving: true,
        ..Default::default()
    };

    // extension of cde(3): subdivide every cover from a diamond or emerald
    // into an atom, leaving the coatomic edges intact
    let mut labels: Vec<String> = base.labels().to_vec();
    let mut rel: Vec<(String, String)> = Vec::new();
    for a in 0..base.len() {
        for b in 0..base.len() {
            if base.lt_idx(a, b) {
                rel.push((base.label(a).to_string(), base.label(b).to_string()));
            }
        }
    }
    let mut extra = 0;
    for (lo, hi) in base.cover_pairs() {
        let lower_is_gem = lo.starts_with('d') || lo.starts_with('e');
        if lower_is_gem && hi.starts_with('b') {
            let z = format!("z{extra}");
            extra += 1;
            labels.push(z.clone());
            rel.push((lo.clone(), z.clone()));
            rel.push((z.clone(), hi.clone()));
        }
    }
    let extended = Poset::from_relation(labels, rel).unwrap();

    // the extension still fails the diamonds-and-emeralds property ...
    let v = has_cde_property(&extended, 3, None).unwrap();
    assert!(matches!(v, PropertyVerdict::Fails(_)), "got {v:?}");
    // ... but satisfies the older cover-preserving property
    let old = find_morphism(&pendant_crown, &extended, &old_spec, None).unwrap();
    assert!(old.is_none(), "pendant crown embeds cover-preservingly: {old:?}");
}
