//! The invariant suite run over corpus diagrams: structural checks, the
//! lamp/congruence correspondence, the ten-alternative position catalog,
//! the shadow lemmas, exclusive-area disjointness, cell factorization, and
//! the removal checks.  Each check reports a pass flag plus details, so
//! counterexamples surface itemized.


use crate::diagram::{replay, BuildScript, Diagram};
use crate::geom::{union_subset_by_area, Pt};
use crate::lamps::{
    all_exclusive_areas, cell_factorization_check, classify_tubes,
    consecutive_secondary_triples, exclusive_areas, lamp_poset, lamps, verify_neon_tube_lemma,
    LampKind,
};
use crate::lattice::{is_rectangular, is_semimodular, is_slim, jir_con_poset, length, mir};
use crate::order::is_isomorphic;
use crate::photon::{
    below_roof, geom_relation, litset_poset, litsets, roof_shadow_polys, GeomRel,
};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn ok(name: &str) -> Check {
        Check { name: name.to_string(), pass: true, detail: String::new() }
    }

    fn fail(name: &str, detail: String) -> Check {
        Check { name: name.to_string(), pass: false, detail }
    }

    fn of(name: &str, pass: bool, detail: String) -> Check {
        Check { name: name.to_string(), pass, detail }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Runs every per-diagram invariant.
pub fn run_invariant_suite(d: &Diagram) -> SuiteReport {
    let mut checks = Vec::new();

    match d.validate() {
        Ok(()) => checks.push(Check::ok("structure")),
        Err(e) => {
            // the remaining checks presuppose a structurally sound diagram
            checks.push(Check::fail("structure", e.to_string()));
            return SuiteReport { checks };
        }
    }

    let lattice = match crate::lattice::lattice_from_covers(&d.to_poset()) {
        Ok(l) => l,
        Err(e) => {
            checks.push(Check::fail("lattice", e.to_string()));
            return SuiteReport { checks };
        }
    };
    checks.push(Check::of(
        "slim-semimodular-rectangular",
        is_slim(&lattice) && is_semimodular(&lattice) && is_rectangular(&lattice),
        String::new(),
    ));

    let (tubes, lamp_list) = lamps(d);
    checks.push(Check::of(
        "length-equals-tube-count",
        length(&lattice) == mir(&lattice).len() && mir(&lattice).len() == tubes.len(),
        format!("length {} mir {} tubes {}", length(&lattice), mir(&lattice).len(), tubes.len()),
    ));

    // every element is the join of its two boundary coordinates
    let join_coords = (0..d.n()).all(|x| {
        if x == d.bottom() {
            return true;
        }
        d.join(d.ljc(x), d.rjc(x)) == Some(x)
    });
    checks.push(Check::of("join-coordinates", join_coords, String::new()));

    // leg intervals of internal tubes are chains
    let mut legs_ok = true;
    for t in &tubes {
        if t.kind != crate::lamps::TubeKind::Internal {
            continue;
        }
        for lo in [d.ljc(t.foot), d.rjc(t.foot)] {
            let members: Vec<usize> =
                (0..d.n()).filter(|&x| d.le(lo, x) && d.le(x, t.foot)).collect();
            for &a in &members {
                for &b in &members {
                    if !d.le(a, b) && !d.le(b, a) {
                        legs_ok = false;
                    }
                }
            }
        }
    }
    checks.push(Check::of("leg-chains", legs_ok, String::new()));

    // lamp feet are pairwise distinct
    let mut feet: Vec<usize> = lamp_list.iter().map(|l| l.foot).collect();
    feet.sort();
    feet.dedup();
    checks.push(Check::of("foot-injectivity", feet.len() == lamp_list.len(), String::new()));

    let ntl = verify_neon_tube_lemma(d);
    checks.push(Check::of("six-relations-equal", ntl.six_equal, ntl.failures.join("; ")));
    checks.push(Check::of("lamp-poset-vs-oracle", ntl.order_iso, ntl.failures.join("; ")));
    checks.push(Check::of("covers-generate", ntl.covers_in_alg, ntl.failures.join("; ")));

    let lposet = lamp_poset(d);
    let lsets = litsets(d);
    checks.push(Check::of(
        "litset-poset-matches",
        is_isomorphic(&litset_poset(d), &lposet).is_some(),
        String::new(),
    ));
    checks.push(Check::of(
        "oracle-poset-matches",
        is_isomorphic(&jir_con_poset(&lattice), &lposet).is_some(),
        String::new(),
    ));

    // quadruples: stripes exactly for boundary lamps, strict arms inside
    let mut quad_ok = true;
    for s in &lsets {
        let q = &s.quadruple;
        let stripe = q.p == q.q || q.r == q.s;
        if stripe != s.is_stripe() {
            quad_ok = false;
        }
        if !(q.p <= q.q && q.q <= q.r && q.r <= q.s) {
            quad_ok = false;
        }
        if !s.is_stripe() && !(q.p < q.q && q.r < q.s) {
            quad_ok = false;
        }
    }
    checks.push(Check::of("quadruple-shape", quad_ok, String::new()));

    // ten alternatives: exactly one per pair, and incomparable pairs only in
    // the first four
    let mut rel_table: Vec<Vec<Option<GeomRel>>> =
        vec![vec![None; lamp_list.len()]; lamp_list.len()];
    let mut tri_ok = true;
    let mut tri_detail = String::new();
    for i in 0..lamp_list.len() {
        for j in 0..lamp_list.len() {
            if i == j {
                continue;
            }
            match geom_relation(&lsets[i], &lsets[j]) {
                Ok(r) => rel_table[i][j] = Some(r),
                Err(e) => {
                    tri_ok = false;
                    tri_detail = format!("lamps ({i}, {j}): {e}");
                }
            }
        }
    }
    checks.push(Check::of("ten-alternatives", tri_ok, tri_detail));
    if tri_ok {
        let mut incomp_ok = true;
        for i in 0..lamp_list.len() {
            for j in 0..lamp_list.len() {
                if i == j {
                    continue;
                }
                let li = format!("L{i}");
                let lj = format!("L{j}");
                let comparable = lposet.le(&li, &lj) || lposet.le(&lj, &li);
                if !comparable && !rel_table[i][j].unwrap().is_side_or_under() {
                    incomp_ok = false;
                }
            }
        }
        checks.push(Check::of("incomparable-first-four", incomp_ok, String::new()));

        // left-of and under are irreflexive and transitive
        let mut order_like = true;
        let n_l = lamp_list.len();
        for rel in [GeomRel::LeftOf, GeomRel::Under] {
            for a in 0..n_l {
                for b in 0..n_l {
                    if a == b || rel_table[a][b] != Some(rel) {
                        continue;
                    }
                    for c in 0..n_l {
                        if c != a && c != b && rel_table[b][c] == Some(rel) {
                            if rel_table[a][c] != Some(rel) {
                                order_like = false;
                            }
                        }
                    }
                }
            }
        }
        checks.push(Check::of("side-relations-transitive", order_like, String::new()));

        // mirror invariance of the catalog
        let md = d.mirror();
        let msets = litsets(&md);
        let mut mirror_ok = true;
        for i in 0..lamp_list.len() {
            // match lamps across the mirror by swapped foot coordinates
            let fi = &lsets[i].foot;
            let mi = msets
                .iter()
                .position(|s| s.foot == Pt::new(fi.v.clone(), fi.u.clone()))
                .expect("mirrored lamp");
            for j in 0..lamp_list.len() {
                if i == j {
                    continue;
                }
                let fj = &lsets[j].foot;
                let mj = msets
                    .iter()
                    .position(|s| s.foot == Pt::new(fj.v.clone(), fj.u.clone()))
                    .expect("mirrored lamp");
                let orig = rel_table[i][j].unwrap();
                match geom_relation(&msets[mi], &msets[mj]) {
                    Ok(r) => {
                        if r != orig.mirrored() {
                            mirror_ok = false;
                        }
                    }
                    Err(_) => mirror_ok = false,
                }
            }
        }
        checks.push(Check::of("mirror-invariance", mirror_ok, String::new()));

        // shadow lemma suite over the relation table
        let delta = |i: usize, j: usize| rel_table[i][j] == Some(GeomRel::Under);
        let lam = |i: usize, j: usize| rel_table[i][j] == Some(GeomRel::LeftOf);
        let le = |i: usize, j: usize| lposet.le(&format!("L{i}"), &format!("L{j}"));
        let covers = |i: usize, j: usize| {
            lposet.is_cover(
                lposet.idx(&format!("L{i}")).unwrap(),
                lposet.idx(&format!("L{j}")).unwrap(),
            )
        };
        let n = lamp_list.len();
        let mut s5 = true;
        let mut s5_detail = String::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                // (a) geometrically under excludes covering
                if delta(i, j) && covers(i, j) {
                    s5 = false;
                    s5_detail = format!("(a) fails at ({i}, {j})");
                }
                // (b) strictly below implies nested roof shadows
                if i != j && le(i, j) {
                    let si = roof_shadow_polys(&lsets[i].peak, d.u_max(), d.v_max());
                    let sj = roof_shadow_polys(&lsets[j].peak, d.u_max(), d.v_max());
                    if !union_subset_by_area(&si, &sj) {
                        s5 = false;
                        s5_detail = format!("(b) fails at ({i}, {j})");
                    }
                    // pointwise double check on element points
                    for x in 0..d.n() {
                        if below_roof(d.pt(x), &lsets[i].peak)
                            && !below_roof(d.pt(x), &lsets[j].peak)
                        {
                            s5 = false;
                            s5_detail = format!("(b) point check fails at ({i}, {j})");
                        }
                    }
                }
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    // (c) nothing below a lamp that is under J covers J
                    if delta(i, j) && le(k, i) && covers(k, j) {
                        s5 = false;
                        s5_detail = format!("(c) fails at ({i}, {j}, {k})");
                    }
                    // (d) under propagates down
                    if delta(j, k) && le(i, j) && i != j && !delta(i, k) && i != k {
                        s5 = false;
                        s5_detail = format!("(d) fails at ({i}, {j}, {k})");
                    }
                }
            }
        }
        // (e) a common lower cover of the outer two of a left-of chain is
        // geometrically under the middle one
        for a0 in 0..n {
            for a1 in 0..n {
                for a2 in 0..n {
                    if a0 == a1 || a1 == a2 || a0 == a2 || !lam(a0, a1) || !lam(a1, a2) {
                        continue;
                    }
                    for b in 0..n {
                        if b != a0 && b != a1 && b != a2 && covers(b, a0) && covers(b, a2) {
                            if !delta(b, a1) {
                                s5 = false;
                                s5_detail = format!("(e) fails at ({a0}, {a1}, {a2}, {b})");
                            }
                        }
                    }
                }
            }
        }
        checks.push(Check::of("shadow-lemmas", s5, s5_detail));
    }

    // exclusive areas of distinct tubes of one lamp have disjoint interiors
    let areas = all_exclusive_areas(d);
    let mut disjoint = true;
    for lamp in &lamp_list {
        for (ai, &ta) in lamp.tubes.iter().enumerate() {
            for &tb in lamp.tubes.iter().skip(ai + 1) {
                let overlap = |x: &crate::geom::UvRect, y: &crate::geom::UvRect| {
                    x.has_area()
                        && y.has_area()
                        && x.u0 < y.u1
                        && y.u0 < x.u1
                        && x.v0 < y.v1
                        && y.v0 < x.v1
                };
                if overlap(&areas[ta].0, &areas[tb].0) || overlap(&areas[ta].1, &areas[tb].1) {
                    disjoint = false;
                }
            }
        }
    }
    checks.push(Check::of("exclusive-area-disjointness", disjoint, String::new()));

    // secondary/primary equivalence: interior-foot form versus the
    // rectangle-containment form
    let primary = classify_tubes(d);
    let mut equiv_ok = true;
    for (ti, _) in tubes.iter().enumerate() {
        let by_rect = lamp_list.iter().filter(|l| l.kind == LampKind::Internal).any(|l| {
            let cr = crate::lamps::circ_rect(d, l);
            let lo = Pt::new(cr.u0.clone(), cr.v0.clone());
            let hi = Pt::new(cr.u1.clone(), cr.v1.clone());
            areas[ti].0.contains_rect(&lo, &hi) || areas[ti].1.contains_rect(&lo, &hi)
        });
        if by_rect != primary[ti] {
            equiv_ok = false;
        }
    }
    checks.push(Check::of("primary-definitions-agree", equiv_ok, String::new()));

    let fact = cell_factorization_check(d);
    checks.push(Check::of("cell-factorization", fact.ok, fact.failures.join("; ")));

    SuiteReport { checks }
}

/// Safe-removal checks on every consecutive-secondary middle tube: slim
/// rectangular result, one fewer tube, congruences preserved (these are
/// enforced inside `remove_tube`), plus pointwise preservation of the
/// exclusive areas of primary tubes.
pub fn run_removal_suite(d: &Diagram) -> SuiteReport {
    let mut checks = Vec::new();
    let triples = consecutive_secondary_triples(d);
    for &(_, mid, _) in &triples {
        match d.remove_tube(mid, false) {
            Err(e) => {
                checks.push(Check::fail("removal", format!("middle foot {mid}: {e}")));
            }
            Ok(after) => {
                checks.push(Check::ok("removal"));
                // primary tubes keep their exclusive areas, matched by foot
                let (tubes_b, lamps_b) = lamps(d);
                let primary_b = classify_tubes(d);
                let (tubes_a, lamps_a) = lamps(&after);
                let mut stable = true;
                for lamp in &lamps_b {
                    for (pos, &ti) in lamp.tubes.iter().enumerate() {
                        if !primary_b[ti] {
                            continue;
                        }
                        let foot_pt = d.pt(tubes_b[ti].foot);
                        let before = exclusive_areas(d, &tubes_b, lamp, pos);
                        let found = lamps_a.iter().find_map(|la| {
                            la.tubes.iter().enumerate().find_map(|(pa, &ta)| {
                                if after.pt(tubes_a[ta].foot) == foot_pt {
                                    Some(exclusive_areas(&after, &tubes_a, la, pa))
                                } else {
                                    None
                                }
                            })
                        });
                        match found {
                            Some(after_areas) => {
                                if after_areas != before {
                                    stable = false;
                                }
                            }
                            None => stable = false,
                        }
                    }
                }
                checks.push(Check::of("primary-areas-stable", stable, String::new()));
            }
        }
    }
    SuiteReport { checks }
}

/// Verifies the per-step size and length bookkeeping of a script replay.
pub fn check_size_formulas(script: &BuildScript) -> Result<bool, crate::diagram::DiagramError> {
    let mut d = Diagram::grid(script.grid.0, script.grid.1);
    for step in &script.steps {
        let cell = d
            .find_cell_by_bottom(&step.point())
            .ok_or(crate::diagram::DiagramError::InvalidCell)?;
        let h = d.height(cell.top);
        let k = step.k as usize;
        let before_n = d.n();
        let before_len = d.length();
        d = d.insert_multifork(&cell, step.k)?;
        if d.n() != before_n + k * h + k * (k + 1) / 2 {
            return Ok(false);
        }
        if d.length() != before_len + k {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convenience: replay and run both suites.
pub fn verify_script(script: &BuildScript) -> Result<SuiteReport, crate::diagram::DiagramError> {
    let d = replay(script)?;
    let mut report = run_invariant_suite(&d);
    report.checks.extend(run_removal_suite(&d).checks);
    report.checks.push(Check::of(
        "size-formulas",
        check_size_formulas(script)?,
        String::new(),
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_small_diagrams() {
        for d in [
            Diagram::grid(1, 1),
            Diagram::grid(2, 2),
            {
                let g = Diagram::grid(1, 1);
                let c = g.cells()[0].clone();
                g.insert_fork(&c).unwrap()
            },
            {
                let g = Diagram::grid(1, 1);
                let c = g.cells()[0].clone();
                g.insert_multifork(&c, 3).unwrap()
            },
        ] {
            let report = run_invariant_suite(&d);
            assert!(
                report.pass(),
                "failures: {:?}",
                report.failures().iter().map(|c| (&c.name, &c.detail)).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn removal_suite_on_triple() {
        let g = Diagram::grid(1, 1);
        let c = g.cells()[0].clone();
        let d = g.insert_multifork(&c, 3).unwrap();
        let report = run_removal_suite(&d);
        assert!(!report.checks.is_empty());
        assert!(report.pass(), "{:?}", report.failures());
    }
}
