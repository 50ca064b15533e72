//! Neon tubes and lamps of a diagram, the six lamp relations, the lamp
//! poset, primary/secondary classification, exclusive areas, and the checks
//! tying all of it to the congruence oracle.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::diagram::{Cell, Diagram};
use crate::geom::{edge_slope, union_equal_by_area, EdgeSlope, Poly, Pt, Rat, UvRect};
use crate::lattice::{jir_con_poset_with_map, principal_congruence};
use crate::order::Poset;
use crate::photon::{litsets, LitSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TubeKind {
    LeftBoundary,
    RightBoundary,
    Internal,
}

/// An edge `[foot, cov(foot)]` for a meet-irreducible foot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeonTube {
    pub foot: usize,
    pub peak: usize,
    pub kind: TubeKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LampKind {
    LeftBoundary,
    RightBoundary,
    Internal,
}

/// A boundary tube, or the group of internal tubes sharing a peak.  The foot
/// is the meet of the tube feet; `tubes` are indices into the tube list
/// ordered left to right by drawing abscissa.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lamp {
    pub peak: usize,
    pub foot: usize,
    pub kind: LampKind,
    pub tubes: Vec<usize>,
}

/// One tube per meet-irreducible element.
pub fn neon_tubes(d: &Diagram) -> Vec<NeonTube> {
    let mut out = Vec::new();
    for f in 0..d.n() {
        let ups = d.upper_covers(f);
        if ups.len() != 1 {
            continue;
        }
        let peak = ups[0];
        let kind = match edge_slope(d.pt(f), d.pt(peak)) {
            EdgeSlope::NormalUp => TubeKind::LeftBoundary,
            EdgeSlope::NormalDown => TubeKind::RightBoundary,
            EdgeSlope::Precipitous => TubeKind::Internal,
            EdgeSlope::Invalid => panic!("illegal edge slope in diagram"),
        };
        out.push(NeonTube { foot: f, peak, kind });
    }
    out.sort_by_key(|t| t.foot);
    out
}

/// Tubes plus lamps.  Lamps are sorted by their foot coordinate, so the
/// numbering is stable for a given diagram.
pub fn lamps(d: &Diagram) -> (Vec<NeonTube>, Vec<Lamp>) {
    let tubes = neon_tubes(d);
    let mut internal_by_peak: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut lamps: Vec<Lamp> = Vec::new();
    for (i, t) in tubes.iter().enumerate() {
        match t.kind {
            TubeKind::Internal => internal_by_peak.entry(t.peak).or_default().push(i),
            TubeKind::LeftBoundary => lamps.push(Lamp {
                peak: t.peak,
                foot: t.foot,
                kind: LampKind::LeftBoundary,
                tubes: vec![i],
            }),
            TubeKind::RightBoundary => lamps.push(Lamp {
                peak: t.peak,
                foot: t.foot,
                kind: LampKind::RightBoundary,
                tubes: vec![i],
            }),
        }
    }
    for (peak, mut tube_idxs) in internal_by_peak {
        // left to right: ascending drawing abscissa of the feet
        tube_idxs.sort_by(|&a, &b| {
            d.pt(tubes[a].foot).draw_x().cmp(&d.pt(tubes[b].foot).draw_x())
        });
        let mut foot = tubes[tube_idxs[0]].foot;
        for &ti in &tube_idxs[1..] {
            foot = d.meet(foot, tubes[ti].foot).expect("diagram is a lattice");
        }
        lamps.push(Lamp { peak, foot, kind: LampKind::Internal, tubes: tube_idxs });
    }
    lamps.sort_by(|a, b| d.pt(a.foot).cmp(d.pt(b.foot)));
    (tubes, lamps)
}

/// Circumscribed rectangle of an internal lamp: from the meet of the lower
/// covers of its foot up to its peak.  This is the cell its multifork
/// entered, so it is a geometric rectangle.
pub fn circ_rect(d: &Diagram, lamp: &Lamp) -> UvRect {
    let lows = d.lower_covers(lamp.foot);
    let mut w = lows[0];
    for &x in &lows[1..] {
        w = d.meet(w, x).expect("diagram is a lattice");
    }
    UvRect::closed(
        d.pt(w).u.clone(),
        d.pt(w).v.clone(),
        d.pt(lamp.peak).u.clone(),
        d.pt(lamp.peak).v.clone(),
    )
}

/// Left and right exclusive areas of a tube.
///
/// For a tube with a same-lamp neighbour, the area on that side is the
/// closed rectangle between the two floors down to the boundary.  For an
/// extreme tube of an internal lamp it is what remains of the tube's own lit
/// set after carving out the lamp's circumscribed rectangle.  For a boundary
/// lamp the lit stripe itself serves; the off side is degenerate.
pub fn exclusive_areas(d: &Diagram, tubes: &[NeonTube], lamp: &Lamp, pos: usize) -> (UvRect, UvRect) {
    let ti = lamp.tubes[pos];
    let t = &tubes[ti];
    let f = d.pt(t.foot);
    let pk = d.pt(t.peak);
    match lamp.kind {
        LampKind::LeftBoundary => {
            // lit from the right is the degenerate boundary segment
            let lea = UvRect::closed(f.u.clone(), f.v.clone(), pk.u.clone(), pk.v.clone());
            let rea = UvRect::closed(Rat::zero(), f.v.clone(), pk.u.clone(), pk.v.clone());
            (lea, rea)
        }
        LampKind::RightBoundary => {
            let lea = UvRect::closed(f.u.clone(), Rat::zero(), pk.u.clone(), pk.v.clone());
            let rea = UvRect::closed(f.u.clone(), f.v.clone(), pk.u.clone(), pk.v.clone());
            (lea, rea)
        }
        LampKind::Internal => {
            let cr = circ_rect(d, lamp);
            let lea = if pos == 0 {
                // leftmost: closure of the lit strip left of the lamp after
                // carving out the host cell
                UvRect::closed(f.u.clone(), Rat::zero(), pk.u.clone(), cr.v0.clone())
            } else {
                let nb = &tubes[lamp.tubes[pos - 1]];
                let nf = d.pt(nb.foot);
                UvRect::closed(f.u.clone(), Rat::zero(), nf.u.clone(), nf.v.clone())
            };
            let rea = if pos + 1 == lamp.tubes.len() {
                UvRect::closed(Rat::zero(), f.v.clone(), cr.u0.clone(), pk.v.clone())
            } else {
                let nb = &tubes[lamp.tubes[pos + 1]];
                let nf = d.pt(nb.foot);
                UvRect::closed(Rat::zero(), f.v.clone(), nf.u.clone(), nf.v.clone())
            };
            (lea, rea)
        }
    }
}

/// Per-tube exclusive areas for the whole diagram, indexed by tube.
pub fn all_exclusive_areas(d: &Diagram) -> Vec<(UvRect, UvRect)> {
    let (tubes, lamp_list) = lamps(d);
    let mut out: Vec<Option<(UvRect, UvRect)>> = vec![None; tubes.len()];
    for lamp in &lamp_list {
        for pos in 0..lamp.tubes.len() {
            out[lamp.tubes[pos]] = Some(exclusive_areas(d, &tubes, lamp, pos));
        }
    }
    out.into_iter().map(|x| x.expect("every tube belongs to a lamp")).collect()
}

/// A tube is primary when some lamp's foot lies in the open interior of one
/// of its exclusive areas.
pub fn classify_tubes(d: &Diagram) -> Vec<bool> {
    let (tubes, lamp_list) = lamps(d);
    let areas = all_exclusive_areas(d);
    (0..tubes.len())
        .map(|ti| {
            lamp_list.iter().any(|l| {
                let fp = d.pt(l.foot);
                areas[ti].0.contains_interior(fp) || areas[ti].1.contains_interior(fp)
            })
        })
        .collect()
}

/// Triples `(left, middle, right)` of feet of geometrically consecutive
/// secondary tubes within one lamp.
pub fn consecutive_secondary_triples(d: &Diagram) -> Vec<(usize, usize, usize)> {
    let (tubes, lamp_list) = lamps(d);
    let primary = classify_tubes(d);
    let mut out = Vec::new();
    for lamp in &lamp_list {
        for w in lamp.tubes.windows(3) {
            if w.iter().all(|&ti| !primary[ti]) {
                out.push((tubes[w[0]].foot, tubes[w[1]].foot, tubes[w[2]].foot));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LampRelKind {
    Alg,
    Foot,
    InFoot,
    Body,
    NuInFoot,
    NuCircR,
}

pub const ALL_RELATIONS: [LampRelKind; 6] = [
    LampRelKind::Alg,
    LampRelKind::Foot,
    LampRelKind::InFoot,
    LampRelKind::Body,
    LampRelKind::NuInFoot,
    LampRelKind::NuCircR,
];

/// Cells whose four corners all lie in the interval `[foot, peak]`; their
/// regions make up the body of the lamp.
fn body_polys(d: &Diagram, lamp: &Lamp) -> Vec<Poly> {
    d.cells()
        .iter()
        .filter(|c| d.le(lamp.foot, c.bottom) && d.le(c.top, lamp.peak))
        .map(|c| cell_poly(d, c))
        .collect()
}

pub fn cell_poly(d: &Diagram, c: &Cell) -> Poly {
    Poly::from_pts(vec![
        d.pt(c.bottom).clone(),
        d.pt(c.left).clone(),
        d.pt(c.top).clone(),
        d.pt(c.right).clone(),
    ])
}

/// Exact test for a segment inside a union of convex polygons, by interval
/// covering along the segment parameter.
fn segment_in_union(a: &Pt, b: &Pt, polys: &[Poly]) -> bool {
    // collect, per polygon, the parameter interval of the clipped segment
    let mut intervals: Vec<(Rat, Rat)> = Vec::new();
    for poly in polys {
        if poly.pts.len() < 3 {
            continue;
        }
        // clip the parametric segment a + t (b - a), t in [0, 1]
        let mut lo = Rat::zero();
        let mut hi = crate::geom::rat(1);
        let n = poly.pts.len();
        let mut empty = false;
        for i in 0..n {
            let p = &poly.pts[i];
            let q = &poly.pts[(i + 1) % n];
            // inside: cross(p, q, x) >= 0
            let du = &q.u - &p.u;
            let dv = &q.v - &p.v;
            let f0 = &du * (&a.v - &p.v) - &dv * (&a.u - &p.u);
            let f1 = &du * (&b.v - &p.v) - &dv * (&b.u - &p.u);
            let delta = &f1 - &f0;
            if delta.is_zero() {
                if f0.is_negative() {
                    empty = true;
                    break;
                }
            } else if delta.is_positive() {
                // f(t) >= 0 for t >= -f0/delta
                let t = -&f0 / &delta;
                if t > lo {
                    lo = t;
                }
            } else {
                let t = -&f0 / &delta;
                if t < hi {
                    hi = t;
                }
            }
        }
        if !empty && lo <= hi {
            intervals.push((lo, hi));
        }
    }
    intervals.sort();
    let mut covered = Rat::zero();
    let one = crate::geom::rat(1);
    for (lo, hi) in intervals {
        if lo > covered {
            return false;
        }
        if hi > covered {
            covered = hi;
        }
        if covered >= one {
            return true;
        }
    }
    covered >= one
}

/// One of the six relations, as an explicit set of ordered lamp-index pairs.
pub fn lamp_relation(d: &Diagram, which: LampRelKind) -> BTreeSet<(usize, usize)> {
    let (_, lamp_list) = lamps(d);
    let sets: Vec<LitSet> = litsets(d);
    let areas = all_exclusive_areas(d);
    let mut out = BTreeSet::new();
    for (i, li) in lamp_list.iter().enumerate() {
        for (j, lj) in lamp_list.iter().enumerate() {
            if i == j {
                continue;
            }
            let related = match which {
                LampRelKind::Alg => {
                    li.kind == LampKind::Internal
                        && d.le(li.peak, lj.peak)
                        && !d.le(li.foot, lj.foot)
                }
                LampRelKind::Foot => {
                    li.kind == LampKind::Internal && sets[j].contains(d.pt(li.foot), false)
                }
                LampRelKind::InFoot => {
                    li.kind == LampKind::Internal && sets[j].contains(d.pt(li.foot), true)
                }
                LampRelKind::Body => {
                    if li.kind != LampKind::Internal {
                        false
                    } else {
                        let body = body_polys(d, li);
                        let cover = sets[j].polys();
                        if body.is_empty() {
                            segment_in_union(d.pt(li.foot), d.pt(li.peak), &cover)
                        } else {
                            crate::geom::union_subset_by_area(&body, &cover)
                        }
                    }
                }
                LampRelKind::NuInFoot => {
                    li.kind == LampKind::Internal
                        && lj.tubes.iter().any(|&ti| {
                            let fp = d.pt(li.foot);
                            areas[ti].0.contains_interior(fp)
                                || areas[ti].1.contains_interior(fp)
                        })
                }
                LampRelKind::NuCircR => {
                    if li.kind != LampKind::Internal {
                        false
                    } else {
                        let cr = circ_rect(d, li);
                        let lo = Pt::new(cr.u0.clone(), cr.v0.clone());
                        let hi = Pt::new(cr.u1.clone(), cr.v1.clone());
                        lj.tubes.iter().any(|&ti| {
                            areas[ti].0.contains_rect(&lo, &hi)
                                || areas[ti].1.contains_rect(&lo, &hi)
                        })
                    }
                }
            };
            if related {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Poset of lamps: reflexive transitive closure of the order-theoretic
/// relation (peak below peak, internal, foot not below foot).
pub fn lamp_poset(d: &Diagram) -> Poset {
    let (_, lamp_list) = lamps(d);
    let rel = lamp_relation(d, LampRelKind::Alg);
    let labels: Vec<String> = (0..lamp_list.len()).map(|i| format!("L{i}")).collect();
    let pairs: Vec<(String, String)> =
        rel.iter().map(|&(a, b)| (format!("L{a}"), format!("L{b}"))).collect();
    Poset::from_relation(labels, pairs).expect("lamp relation generates a partial order")
}

/// Trajectory-wing areas used by the cell factorization: the cells swept by
/// the descent on one side of a tube.
pub fn left_wing_cells(d: &Diagram, tube: &NeonTube) -> Vec<usize> {
    let mut out = Vec::new();
    let mut edge = (tube.foot, tube.peak);
    loop {
        let Some((ci, cell)) = d
            .cells()
            .iter()
            .enumerate()
            .find(|(_, c)| c.right == edge.0 && c.top == edge.1)
        else {
            return out;
        };
        out.push(ci);
        let nxt = (cell.bottom, cell.left);
        if d.pt(nxt.0).v.is_zero() {
            return out;
        }
        edge = nxt;
    }
}

pub fn right_wing_cells(d: &Diagram, tube: &NeonTube) -> Vec<usize> {
    let mut out = Vec::new();
    let mut edge = (tube.foot, tube.peak);
    loop {
        let Some((ci, cell)) = d
            .cells()
            .iter()
            .enumerate()
            .find(|(_, c)| c.left == edge.0 && c.top == edge.1)
        else {
            return out;
        };
        out.push(ci);
        let nxt = (cell.bottom, cell.right);
        if d.pt(nxt.0).u.is_zero() {
            return out;
        }
        edge = nxt;
    }
}

/// Climbs a constant-v edge to the top edge of its trajectory.
fn trajectory_top_from_lower_left(d: &Diagram, mut edge: (usize, usize)) -> Option<usize> {
    loop {
        if d.upper_covers(edge.0).len() == 1 {
            return Some(edge.0); // tube foot
        }
        let cell = d.cells().iter().find(|c| c.bottom == edge.0 && c.left == edge.1)?;
        edge = (cell.right, cell.top);
    }
}

/// Climbs a constant-u edge to the top edge of its trajectory.
fn trajectory_top_from_lower_right(d: &Diagram, mut edge: (usize, usize)) -> Option<usize> {
    loop {
        if d.upper_covers(edge.0).len() == 1 {
            return Some(edge.0);
        }
        let cell = d.cells().iter().find(|c| c.bottom == edge.0 && c.right == edge.1)?;
        edge = (cell.left, cell.top);
    }
}

#[derive(Clone, Debug)]
pub struct FactorizationReport {
    pub ok: bool,
    pub failures: Vec<String>,
}

/// Every 4-cell is the intersection of the left wing of one tube with the
/// right wing of another, for exactly one tube pair.
pub fn cell_factorization_check(d: &Diagram) -> FactorizationReport {
    let tubes = neon_tubes(d);
    let tube_of_foot: BTreeMap<usize, usize> =
        tubes.iter().enumerate().map(|(i, t)| (t.foot, i)).collect();
    let lwings: Vec<BTreeSet<usize>> =
        tubes.iter().map(|t| left_wing_cells(d, t).into_iter().collect()).collect();
    let rwings: Vec<BTreeSet<usize>> =
        tubes.iter().map(|t| right_wing_cells(d, t).into_iter().collect()).collect();
    let mut failures = Vec::new();
    for (ci, cell) in d.cells().iter().enumerate() {
        // upper-right edge ascends to the left-wing tube, upper-left to the
        // right-wing tube
        let n = trajectory_top_from_lower_left(d, (cell.right, cell.top))
            .and_then(|f| tube_of_foot.get(&f).copied());
        let m = trajectory_top_from_lower_right(d, (cell.left, cell.top))
            .and_then(|f| tube_of_foot.get(&f).copied());
        let (Some(n), Some(m)) = (n, m) else {
            failures.push(format!("cell {ci}: trajectory top not found"));
            continue;
        };
        // exactly one pair shares exactly this cell
        let mut count = 0;
        for a in 0..tubes.len() {
            for b in 0..tubes.len() {
                let shared: Vec<usize> = lwings[a].intersection(&rwings[b]).copied().collect();
                if shared == vec![ci] {
                    count += 1;
                    if (a, b) != (n, m) {
                        failures.push(format!(
                            "cell {ci}: factored by unexpected pair ({a}, {b})"
                        ));
                    }
                }
            }
        }
        if count != 1 {
            failures.push(format!("cell {ci}: {count} factoring pairs"));
            continue;
        }
        // geometric equality of the designated intersection with the cell
        let inter: Vec<Poly> = lwings[n]
            .iter()
            .flat_map(|&c1| {
                rwings[m]
                    .iter()
                    .map(move |&c2| (c1, c2))
                    .collect::<Vec<_>>()
            })
            .map(|(c1, c2)| cell_poly(d, &d.cells()[c1]).intersect(&cell_poly(d, &d.cells()[c2])))
            .filter(|p| !p.is_empty())
            .collect();
        if !union_equal_by_area(&inter, &[cell_poly(d, cell)]) {
            failures.push(format!("cell {ci}: wing intersection differs from the cell"));
        }
    }
    FactorizationReport { ok: failures.is_empty(), failures }
}

#[derive(Clone, Debug)]
pub struct NtlReport {
    pub six_equal: bool,
    pub order_iso: bool,
    pub covers_in_alg: bool,
    pub failures: Vec<String>,
}

impl NtlReport {
    pub fn pass(&self) -> bool {
        self.six_equal && self.order_iso && self.covers_in_alg
    }
}

/// Checks, for one diagram: the six relations coincide as pair sets, the
/// lamp poset is isomorphic to the poset of join-irreducible congruences
/// under the map sending a lamp to the congruence collapsing it, and every
/// cover of the lamp poset is already in the generating relation.
pub fn verify_neon_tube_lemma(d: &Diagram) -> NtlReport {
    let mut failures = Vec::new();
    let reference = lamp_relation(d, LampRelKind::Alg);
    let mut six_equal = true;
    for kind in ALL_RELATIONS {
        let rel = lamp_relation(d, kind);
        if rel != reference {
            six_equal = false;
            let missing: Vec<_> = reference.difference(&rel).collect();
            let extra: Vec<_> = rel.difference(&reference).collect();
            failures.push(format!(
                "{kind:?} differs from Alg: missing {missing:?}, extra {extra:?}"
            ));
        }
    }

    let (_, lamp_list) = lamps(d);
    let lposet = lamp_poset(d);
    let lattice = d.lattice();
    let (con_poset, _) = jir_con_poset_with_map(&lattice);
    let mut order_iso = true;
    if lamp_list.len() != con_poset.len() {
        order_iso = false;
        failures.push(format!(
            "{} lamps vs {} join-irreducible congruences",
            lamp_list.len(),
            con_poset.len()
        ));
    } else {
        // the prescribed map: lamp [foot, peak] -> con(foot, peak)
        let congruences: Vec<_> = lamp_list
            .iter()
            .map(|l| principal_congruence(&lattice, l.foot, l.peak).expect("foot below peak"))
            .collect();
        for i in 0..lamp_list.len() {
            for j in 0..lamp_list.len() {
                if i == j {
                    continue;
                }
                if congruences[i] == congruences[j] {
                    order_iso = false;
                    failures.push(format!("lamps {i} and {j} collapse to one congruence"));
                }
                let lamp_le = lposet.le(&format!("L{i}"), &format!("L{j}"));
                let con_le = congruences[i].leq(&congruences[j]);
                if lamp_le != con_le {
                    order_iso = false;
                    failures.push(format!(
                        "order mismatch at lamps ({i}, {j}): lamp {lamp_le}, congruence {con_le}"
                    ));
                }
            }
        }
    }

    let mut covers_in_alg = true;
    for &(a, b) in lposet.covers_idx() {
        let ia: usize = lposet.label(a)[1..].parse().unwrap();
        let ib: usize = lposet.label(b)[1..].parse().unwrap();
        if !reference.contains(&(ia, ib)) {
            covers_in_alg = false;
            failures.push(format!("lamp cover ({ia}, {ib}) is not a generating pair"));
        }
    }

    NtlReport { six_equal, order_iso, covers_in_alg, failures }
}
