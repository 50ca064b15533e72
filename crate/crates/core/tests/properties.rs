//! Property-based invariant suites over randomly generated posets and build
//! scripts.

use proptest::prelude::*;

use lamplab_core::diagram::Diagram;
use lamplab_core::lattice::{downset_lattice, is_distributive, jir, jir_con_poset};
use lamplab_core::order::{canonical_form, is_isomorphic, order_of, Poset};
use lamplab_core::suite::run_invariant_suite;

fn poset_strategy(max_n: usize) -> impl Strategy<Value = Poset> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(proptest::bool::weighted(0.3), pairs).prop_map(move |bits| {
            let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let mut rel = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if bits[k] {
                        rel.push((format!("v{i}"), format!("v{j}")));
                    }
                    k += 1;
                }
            }
            Poset::from_relation(labels, rel).expect("forward edges are acyclic")
        })
    })
}

/// A short random multifork script applied to a small grid, encoded as
/// abstract choices resolved against the current diagram.
fn script_strategy() -> impl Strategy<Value = Diagram> {
    (
        1..=2u32,
        1..=2u32,
        proptest::collection::vec((any::<u16>(), 1..=3u32), 0..=3),
    )
        .prop_map(|(c, d, steps)| {
            let mut diagram = Diagram::grid(c, d);
            for (pick, k) in steps {
                if diagram.length() + k as usize > 9 {
                    break;
                }
                let cells = diagram.distributive_cells();
                if cells.is_empty() {
                    break;
                }
                let cell = cells[pick as usize % cells.len()].clone();
                diagram = diagram.insert_multifork(&cell, k).expect("distributive cell");
            }
            diagram
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn order_of_is_a_partial_order(p in poset_strategy(7)) {
        let rel = order_of(&p);
        for l in p.labels() {
            prop_assert!(rel.contains(&(l.clone(), l.clone())));
        }
        for (a, b) in &rel {
            for (c, d) in &rel {
                if b == c {
                    prop_assert!(rel.contains(&(a.clone(), d.clone())));
                }
                if a == d && b == c && a != b {
                    prop_assert!(false, "antisymmetry violated");
                }
            }
        }
    }

    #[test]
    fn canonical_form_is_an_isomorphism_invariant(p in poset_strategy(7), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut names: Vec<usize> = (0..p.len()).collect();
        names.shuffle(&mut rng);
        let q = p.relabel(|l| format!("w{}", names[l[1..].parse::<usize>().unwrap()]));
        prop_assert_eq!(canonical_form(&p), canonical_form(&q));
        prop_assert!(is_isomorphic(&p, &q).is_some());
    }

    #[test]
    fn downset_lattices_are_distributive_and_recover_the_poset(p in poset_strategy(6)) {
        let dl = downset_lattice(&p, 100_000).unwrap();
        prop_assert!(is_distributive(&dl));
        let back = dl.poset().restrict(&jir(&dl));
        prop_assert!(is_isomorphic(&back, &p).is_some());
    }

    #[test]
    fn scripted_diagrams_pass_the_invariant_suite(d in script_strategy()) {
        let report = run_invariant_suite(&d);
        prop_assert!(
            report.pass(),
            "failures {:?} on {:?}",
            report.failures().iter().map(|c| (&c.name, &c.detail)).collect::<Vec<_>>(),
            d.script()
        );
    }

    #[test]
    fn lamp_count_equals_oracle_size(d in script_strategy()) {
        let (_, lamp_list) = lamplab_core::lamps::lamps(&d);
        prop_assert_eq!(lamp_list.len(), jir_con_poset(&d.lattice()).len());
    }
}
