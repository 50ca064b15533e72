//! The decision procedure against a brute-force census sweep on every
//! 4-element target, with sound one-sided comparisons: a completed rejection
//! must agree with the sweep, a witness must re-verify through the oracle,
//! and truncated runs may only say so.

use lamplab_core::diagram::replay;
use lamplab_core::order::{canonical_form, Poset};
use lamplab_core::repr::{
    brute_force_representable, decide, verify_witness, DecideBudget, Outcome, Target, Witness,
};

fn all_posets(n: usize) -> Vec<Poset> {
    // every labeled DAG on forward edges, deduplicated by canonical form
    let labels: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let mut out: Vec<Poset> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        let rel: Vec<(String, String)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &(i, j))| (labels[i].clone(), labels[j].clone()))
            .collect();
        let p = Poset::from_relation(labels.clone(), rel).unwrap();
        if seen.insert(canonical_form(&p)) {
            out.push(p);
        }
    }
    out
}

#[test]
fn four_element_targets_agree_with_the_sweep() {
    let targets = all_posets(4);
    assert_eq!(targets.len(), 16, "iso classes of 4-element posets");
    let budget = DecideBudget { max_length: 9, node_budget: 2_000_000, ..Default::default() };
    let mut representable = 0;
    let mut rejected = 0;
    let mut inconclusive = 0;
    for p in &targets {
        let v = decide(&Target::JirPoset(p.clone()), &budget).unwrap();
        match &v.outcome {
            Outcome::Representable(Witness::Script(s)) => {
                representable += 1;
                assert!(verify_witness(p, s).unwrap());
                let len = replay(s).unwrap().length();
                // the sweep at the witness length must also see it
                assert!(
                    brute_force_representable(p, len),
                    "sweep misses a verified witness of length {len}"
                );
            }
            Outcome::Representable(Witness::TrivialChain(_)) => unreachable!("4 elements"),
            Outcome::NotRepresentable(_) => {
                rejected += 1;
                assert!(
                    !brute_force_representable(p, 7),
                    "decide rejected {:?} but the sweep finds a witness",
                    p.cover_pairs()
                );
            }
            Outcome::Inconclusive(_) => {
                inconclusive += 1;
            }
        }
    }
    println!(
        "4-element targets: {representable} representable, {rejected} rejected, \
         {inconclusive} inconclusive"
    );
    assert!(representable >= 2, "the diamond-free shapes are realizable");
    assert_eq!(representable + rejected + inconclusive, 16);
}
