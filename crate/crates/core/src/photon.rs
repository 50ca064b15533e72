//! Illuminated-set geometry.
//!
//! Photons leave a neon tube downward along the two normal directions.  In
//! diamond coordinates a point is lit from the left by a tube when moving it
//! in the `+u` direction meets the tube segment, and lit from the right when
//! moving in the `+v` direction does.  The set lit by a boundary lamp is a
//! stripe; the set lit by an internal lamp is an A-shape.  Every predicate
//! is exact.

use num_traits::Zero;
use thiserror::Error;

use crate::diagram::Diagram;
use crate::geom::{point_in_union_interior, Poly, Pt, Rat};
use crate::lamps::{lamps, LampKind};
use crate::order::Poset;

/// Positions along the lower boundary path (left corner -> bottom -> right
/// corner) cut out by an illuminated set: `p <= q <= r <= s` with `p` and `s`
/// the outer marks of the two arms and `q`, `r` the floor marks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Quadruple {
    pub p: Rat,
    pub q: Rat,
    pub r: Rat,
    pub s: Rat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SetKind {
    LeftStripe,
    RightStripe,
    AShape,
}

/// Foot and peak of one tube, as geometry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TubeGeom {
    pub foot: Pt,
    pub peak: Pt,
}

impl TubeGeom {
    /// Lit from the left: the `+u` ray from `pt` meets the tube segment at a
    /// point other than the bare peak.  A ray grazing only the peak endpoint
    /// of an ascending tube illuminates nothing: otherwise a lamp foot lying
    /// on the lane through a nested peak would be counted, contradicting the
    /// order-theoretic relation.
    pub fn rlit_contains(&self, pt: &Pt) -> bool {
        let (f, k) = (&self.foot, &self.peak);
        if f.v == k.v {
            return pt.v == f.v && pt.u <= k.u;
        }
        if pt.v < f.v || pt.v >= k.v {
            return false;
        }
        // u <= interpolated tube abscissa at height v
        (&pt.u - &f.u) * (&k.v - &f.v) <= (&k.u - &f.u) * (&pt.v - &f.v)
    }

    /// Lit from the right: the `+v` ray from `pt` meets the tube segment at
    /// a point other than the bare peak.
    pub fn llit_contains(&self, pt: &Pt) -> bool {
        let (f, k) = (&self.foot, &self.peak);
        if f.u == k.u {
            return pt.u == f.u && pt.v <= k.v;
        }
        if pt.u < f.u || pt.u >= k.u {
            return false;
        }
        (&pt.v - &f.v) * (&k.u - &f.u) <= (&k.v - &f.v) * (&pt.u - &f.u)
    }

    pub fn rlit_poly(&self) -> Option<Poly> {
        let (f, k) = (&self.foot, &self.peak);
        if f.v >= k.v {
            return None;
        }
        Some(Poly::from_pts(vec![
            Pt::new(Rat::zero(), f.v.clone()),
            Pt::new(f.u.clone(), f.v.clone()),
            Pt::new(k.u.clone(), k.v.clone()),
            Pt::new(Rat::zero(), k.v.clone()),
        ]))
    }

    pub fn llit_poly(&self) -> Option<Poly> {
        let (f, k) = (&self.foot, &self.peak);
        if f.u >= k.u {
            return None;
        }
        Some(Poly::from_pts(vec![
            Pt::new(f.u.clone(), Rat::zero()),
            Pt::new(f.u.clone(), f.v.clone()),
            Pt::new(k.u.clone(), k.v.clone()),
            Pt::new(k.u.clone(), Rat::zero()),
        ]))
    }
}

/// The illuminated set of one lamp, with exact membership predicates.
#[derive(Clone, Debug)]
pub struct LitSet {
    /// index of the lamp in the diagram's lamp list
    pub lamp: usize,
    pub kind: SetKind,
    pub tubes: Vec<TubeGeom>,
    pub foot: Pt,
    pub peak: Pt,
    pub quadruple: Quadruple,
}

impl LitSet {
    pub fn contains(&self, pt: &Pt, interior: bool) -> bool {
        if interior {
            let polys = self.polys();
            point_in_union_interior(pt, &polys)
        } else {
            self.tubes.iter().any(|t| t.rlit_contains(pt) || t.llit_contains(pt))
        }
    }

    pub fn polys(&self) -> Vec<Poly> {
        let mut out = Vec::new();
        for t in &self.tubes {
            if let Some(p) = t.llit_poly() {
                out.push(p);
            }
            if let Some(p) = t.rlit_poly() {
                out.push(p);
            }
        }
        out
    }

    pub fn is_stripe(&self) -> bool {
        self.kind != SetKind::AShape
    }
}

fn quadruple_of(foot: &Pt, peak: &Pt, u_max: &Rat) -> Quadruple {
    Quadruple {
        p: u_max - &peak.u,
        q: u_max - &foot.u,
        r: u_max + &foot.v,
        s: u_max + &peak.v,
    }
}

/// Illuminated sets of all lamps of a diagram, indexed like `lamps(d)`.
pub fn litsets(d: &Diagram) -> Vec<LitSet> {
    let (tubes, lamp_list) = lamps(d);
    lamp_list
        .iter()
        .enumerate()
        .map(|(li, lamp)| {
            let tg: Vec<TubeGeom> = lamp
                .tubes
                .iter()
                .map(|&ti| TubeGeom {
                    foot: d.pt(tubes[ti].foot).clone(),
                    peak: d.pt(tubes[ti].peak).clone(),
                })
                .collect();
            let foot = d.pt(lamp.foot).clone();
            let peak = d.pt(lamp.peak).clone();
            let kind = match lamp.kind {
                LampKind::LeftBoundary => SetKind::LeftStripe,
                LampKind::RightBoundary => SetKind::RightStripe,
                LampKind::Internal => SetKind::AShape,
            };
            LitSet {
                lamp: li,
                kind,
                tubes: tg,
                quadruple: quadruple_of(&foot, &peak, d.u_max()),
                foot,
                peak,
            }
        })
        .collect()
}

pub fn lit(d: &Diagram, lamp_index: usize) -> LitSet {
    litsets(d).swap_remove(lamp_index)
}

pub fn quadruple(d: &Diagram, lamp_index: usize) -> Quadruple {
    lit(d, lamp_index).quadruple
}

/// The ten mutually exclusive geometric positions of two illuminated sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeomRel {
    LeftOf,
    RightOf,
    Under,
    Over,
    Bm,
    BmFlip,
    Bl,
    BlFlip,
    Br,
    BrFlip,
}

impl GeomRel {
    pub fn as_str(&self) -> &'static str {
        match self {
            GeomRel::LeftOf => "left_of",
            GeomRel::RightOf => "right_of",
            GeomRel::Under => "under",
            GeomRel::Over => "over",
            GeomRel::Bm => "bm",
            GeomRel::BmFlip => "bm_flip",
            GeomRel::Bl => "bl",
            GeomRel::BlFlip => "bl_flip",
            GeomRel::Br => "br",
            GeomRel::BrFlip => "br_flip",
        }
    }

    /// How the alternative renames under a left-right mirror of the diagram.
    pub fn mirrored(&self) -> GeomRel {
        match self {
            GeomRel::LeftOf => GeomRel::RightOf,
            GeomRel::RightOf => GeomRel::LeftOf,
            GeomRel::Under => GeomRel::Under,
            GeomRel::Over => GeomRel::Over,
            GeomRel::Bm => GeomRel::Bm,
            GeomRel::BmFlip => GeomRel::BmFlip,
            GeomRel::Bl => GeomRel::Br,
            GeomRel::BlFlip => GeomRel::BrFlip,
            GeomRel::Br => GeomRel::Bl,
            GeomRel::BrFlip => GeomRel::BlFlip,
        }
    }

    /// The first four alternatives are the only ones possible for
    /// incomparable pairs.
    pub fn is_side_or_under(&self) -> bool {
        matches!(self, GeomRel::LeftOf | GeomRel::RightOf | GeomRel::Under | GeomRel::Over)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomRelError {
    #[error("the two sets coincide or are compared with themselves")]
    SamePair,
    #[error("trichotomy violation: {0} alternatives matched")]
    Trichotomy(usize),
}

/// Decides the unique geometric alternative for an ordered pair of
/// illuminated sets given by kind and quadruple.
///
/// Boundary stripes on the same side are ordered along their boundary; only
/// the left/right alternative applies to them (their formal clauses
/// degenerate to `p = q` or `r = s` on both sides).
pub fn geom_relation_kq(
    gk: SetKind,
    g: &Quadruple,
    hk: SetKind,
    h: &Quadruple,
) -> Result<GeomRel, GeomRelError> {
    if gk == hk && g == h {
        return Err(GeomRelError::SamePair);
    }
    if gk != SetKind::AShape && gk == hk {
        // same-side stripes tile the side; order by the tiling
        let (ga, ha) = match gk {
            SetKind::LeftStripe => ((&g.r, &g.s), (&h.r, &h.s)),
            SetKind::RightStripe => ((&g.p, &g.q), (&h.p, &h.q)),
            SetKind::AShape => unreachable!(),
        };
        // interval entirely below interval means further left, on both sides
        return if ga.1 <= ha.0 {
            Ok(GeomRel::LeftOf)
        } else if ha.1 <= ga.0 {
            Ok(GeomRel::RightOf)
        } else {
            Err(GeomRelError::Trichotomy(0))
        };
    }
    let internal = |k: SetKind| k == SetKind::AShape;
    let mut hits: Vec<GeomRel> = Vec::new();
    if g.q <= h.p && g.s <= h.r {
        hits.push(GeomRel::LeftOf);
    }
    if h.q <= g.p && h.s <= g.r {
        hits.push(GeomRel::RightOf);
    }
    if h.q <= g.p && g.s <= h.r {
        hits.push(GeomRel::Under);
    }
    if g.q <= h.p && h.s <= g.r {
        hits.push(GeomRel::Over);
    }
    if h.p < g.p && g.p < g.q && g.q < h.q && h.q < h.r && h.r < g.r && g.r < g.s && g.s < h.s {
        hits.push(GeomRel::Bm);
    }
    if g.p < h.p && h.p < h.q && h.q < g.q && g.q < g.r && g.r < h.r && h.r < h.s && h.s < g.s {
        hits.push(GeomRel::BmFlip);
    }
    if internal(gk) && h.p <= g.p && g.p < g.q && g.q < h.q && g.s <= h.r {
        hits.push(GeomRel::Bl);
    }
    if internal(hk) && g.p <= h.p && h.p < h.q && h.q < g.q && h.s <= g.r {
        hits.push(GeomRel::BlFlip);
    }
    if internal(gk) && h.q <= g.p && h.r < g.r && g.r < g.s && g.s <= h.s {
        hits.push(GeomRel::Br);
    }
    if internal(hk) && g.q <= h.p && g.r < h.r && h.r < h.s && h.s <= g.s {
        hits.push(GeomRel::BrFlip);
    }
    if hits.len() == 1 {
        Ok(hits[0])
    } else {
        Err(GeomRelError::Trichotomy(hits.len()))
    }
}

pub fn geom_relation(g: &LitSet, h: &LitSet) -> Result<GeomRel, GeomRelError> {
    geom_relation_kq(g.kind, &g.quadruple, h.kind, &h.quadruple)
}

/// True when the vertical (drawing) up-ray from `pt` meets one of the two
/// normal-slope roof rays descending from `peak` to the lower sides.
pub fn below_roof(pt: &Pt, peak: &Pt) -> bool {
    let left = pt.u <= peak.u && (&pt.v - &pt.u) <= (&peak.v - &peak.u);
    let right = pt.v <= peak.v && (&pt.u - &pt.v) <= (&peak.u - &peak.v);
    left || right
}

/// Roof shadow of a lamp peak, clipped to the full rectangle: the union of
/// two convex quadrilaterals.
pub fn roof_shadow_polys(peak: &Pt, u_max: &Rat, v_max: &Rat) -> Vec<Poly> {
    let big = Poly::from_pts(vec![
        Pt::new(Rat::zero(), Rat::zero()),
        Pt::new(u_max.clone(), Rat::zero()),
        Pt::new(u_max.clone(), v_max.clone()),
        Pt::new(Rat::zero(), v_max.clone()),
    ]);
    let one = crate::geom::rat(1);
    // {u <= peak.u} ∩ {v - u <= peak.v - peak.u}
    let a = big
        .clip_halfplane(&one, &Rat::zero(), &peak.u)
        .clip_halfplane(&-one.clone(), &one, &(&peak.v - &peak.u));
    // {v <= peak.v} ∩ {u - v <= peak.u - peak.v}
    let b = big
        .clip_halfplane(&Rat::zero(), &one, &peak.v)
        .clip_halfplane(&one, &-one.clone(), &(&peak.u - &peak.v));
    vec![a, b]
}

/// Poset of the illuminated sets under the reflexive transitive closure of
/// interior foot containment.
pub fn litset_poset(d: &Diagram) -> Poset {
    let sets = litsets(d);
    let labels: Vec<String> = sets.iter().map(|s| format!("H{}", s.lamp)).collect();
    let mut rel = Vec::new();
    for a in &sets {
        for b in &sets {
            if a.lamp != b.lamp && b.contains(&a.foot, true) {
                rel.push((format!("H{}", a.lamp), format!("H{}", b.lamp)));
            }
        }
    }
    Poset::from_relation(labels, rel).expect("foot containment generates a partial order")
}

// ---------------------------------------------------------------------------
// abstract illuminated systems
// ---------------------------------------------------------------------------

/// One abstract illuminated set: a stripe or a single-chord A-shape given by
/// its quadruple over an ambient rectangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractEntry {
    pub kind: SetKind,
    pub quad: Quadruple,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractSystem {
    pub u_max: Rat,
    pub v_max: Rat,
    pub entries: Vec<AbstractEntry>,
}

impl AbstractSystem {
    /// Geometric realization of an entry as a one-tube illuminated set.
    pub fn realize(&self, i: usize) -> LitSet {
        let e = &self.entries[i];
        let q = &e.quad;
        let foot = Pt::new(&self.u_max - &q.q, &q.r - &self.u_max);
        let peak = Pt::new(&self.u_max - &q.p, &q.s - &self.u_max);
        LitSet {
            lamp: i,
            kind: e.kind,
            tubes: vec![TubeGeom { foot: foot.clone(), peak: peak.clone() }],
            foot,
            peak,
            quadruple: q.clone(),
        }
    }

    /// The induced poset: reflexive transitive closure of interior foot
    /// containment.  `None` when the generator is cyclic (no valid system).
    pub fn poset(&self) -> Option<Poset> {
        let sets: Vec<LitSet> = (0..self.entries.len()).map(|i| self.realize(i)).collect();
        let labels: Vec<String> = (0..sets.len()).map(|i| format!("S{i}")).collect();
        let mut rel = Vec::new();
        for a in 0..sets.len() {
            for b in 0..sets.len() {
                if a != b && sets[b].contains(&sets[a].foot, true) {
                    rel.push((format!("S{a}"), format!("S{b}")));
                }
            }
        }
        Poset::from_relation(labels, rel).ok()
    }
}

/// Extracts the abstract system of a diagram: kinds and quadruples of its
/// lamps over its rectangle.
pub fn system_of_diagram(d: &Diagram) -> AbstractSystem {
    let sets = litsets(d);
    AbstractSystem {
        u_max: d.u_max().clone(),
        v_max: d.v_max().clone(),
        entries: sets
            .into_iter()
            .map(|s| AbstractEntry { kind: s.kind, quad: s.quadruple })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PluginStatus {
    Skipped,
    Passed,
    Failed(usize),
}

#[derive(Clone, Debug)]
pub struct SystemReport {
    /// stripes tile their sides
    pub stripes_partition: bool,
    /// every pair lands in exactly one of the ten alternatives
    pub trichotomy: Result<(), (usize, usize, GeomRelError)>,
    /// closed and interior foot-containment generators agree
    pub foot_generators_agree: bool,
    /// external side condition for boundary stripes, if a plugin was given
    pub plugin: PluginStatus,
}

impl SystemReport {
    pub fn is_valid(&self) -> bool {
        self.stripes_partition
            && self.trichotomy.is_ok()
            && !matches!(self.plugin, PluginStatus::Failed(_))
    }
}

pub type BoundaryPlugin<'a> = &'a dyn Fn(&AbstractSystem, usize) -> bool;

/// Validates an abstract system: tiling of the boundary stripes, pairwise
/// trichotomy, agreement of the two foot generators, and an optional plugin
/// predicate evaluated on each boundary entry.
pub fn validate_system(s: &AbstractSystem, plugin: Option<BoundaryPlugin>) -> SystemReport {
    let mut left: Vec<(Rat, Rat)> = s
        .entries
        .iter()
        .filter(|e| e.kind == SetKind::LeftStripe)
        .map(|e| (e.quad.r.clone(), e.quad.s.clone()))
        .collect();
    left.sort();
    let mut right: Vec<(Rat, Rat)> = s
        .entries
        .iter()
        .filter(|e| e.kind == SetKind::RightStripe)
        .map(|e| (e.quad.p.clone(), e.quad.q.clone()))
        .collect();
    right.sort();
    let tiles = |iv: &[(Rat, Rat)], lo: &Rat, hi: &Rat| -> bool {
        if iv.is_empty() {
            return true;
        }
        if &iv[0].0 != lo || &iv[iv.len() - 1].1 != hi {
            return false;
        }
        iv.windows(2).all(|w| w[0].1 == w[1].0)
    };
    let upper = &s.u_max + &s.v_max;
    let stripes_partition =
        tiles(&left, &s.u_max, &upper) && tiles(&right, &Rat::zero(), &s.u_max);

    let mut trichotomy = Ok(());
    'outer: for i in 0..s.entries.len() {
        for j in (i + 1)..s.entries.len() {
            let (a, b) = (&s.entries[i], &s.entries[j]);
            if let Err(e) = geom_relation_kq(a.kind, &a.quad, b.kind, &b.quad) {
                trichotomy = Err((i, j, e));
                break 'outer;
            }
        }
    }

    let sets: Vec<LitSet> = (0..s.entries.len()).map(|i| s.realize(i)).collect();
    let mut foot_generators_agree = true;
    for a in &sets {
        for b in &sets {
            if a.lamp == b.lamp || a.kind != SetKind::AShape {
                continue;
            }
            if b.contains(&a.foot, false) != b.contains(&a.foot, true) {
                foot_generators_agree = false;
            }
        }
    }

    let plugin_status = match plugin {
        None => PluginStatus::Skipped,
        Some(f) => {
            let mut failed = None;
            for (i, e) in s.entries.iter().enumerate() {
                if e.kind != SetKind::AShape && !f(s, i) {
                    failed = Some(i);
                    break;
                }
            }
            match failed {
                None => PluginStatus::Passed,
                Some(i) => PluginStatus::Failed(i),
            }
        }
    };

    SystemReport {
        stripes_partition,
        trichotomy,
        foot_generators_agree,
        plugin: plugin_status,
    }
}

/// Relation table of a system: for each ordered pair, its alternative.
fn relation_table(s: &AbstractSystem) -> Option<Vec<Vec<Option<GeomRel>>>> {
    let n = s.entries.len();
    let mut t = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (a, b) = (&s.entries[i], &s.entries[j]);
            match geom_relation_kq(a.kind, &a.quad, b.kind, &b.quad) {
                Ok(r) => t[i][j] = Some(r),
                Err(_) => return None,
            }
        }
    }
    Some(t)
}

/// Similarity: a kind-preserving bijection preserving all five relations in
/// both directions.
pub fn similar(s1: &AbstractSystem, s2: &AbstractSystem) -> Option<Vec<usize>> {
    let n = s1.entries.len();
    if n != s2.entries.len() {
        return None;
    }
    let t1 = relation_table(s1)?;
    let t2 = relation_table(s2)?;
    let mut assign: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        n: usize,
        s1: &AbstractSystem,
        s2: &AbstractSystem,
        t1: &[Vec<Option<GeomRel>>],
        t2: &[Vec<Option<GeomRel>>],
        assign: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || s1.entries[i].kind != s2.entries[j].kind {
                continue;
            }
            let ok = (0..i).all(|k| {
                let fk = assign[k].unwrap();
                t1[i][k] == t2[j][fk] && t1[k][i] == t2[fk][j]
            });
            if !ok {
                continue;
            }
            assign[i] = Some(j);
            used[j] = true;
            if rec(i + 1, n, s1, s2, t1, t2, assign, used) {
                return true;
            }
            assign[i] = None;
            used[j] = false;
        }
        false
    }
    if rec(0, n, s1, s2, &t1, &t2, &mut assign, &mut used) {
        Some(assign.into_iter().map(|x| x.unwrap()).collect())
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(AbstractSystem),
    /// the full grid space was exhausted: no system realizes the target
    Exhausted,
    /// the node budget ran out before exhausting the space
    BudgetExceeded,
}

/// Searches for an abstract illuminated system whose induced poset is
/// isomorphic to `target`, over an integer value grid (`0..=2n` positions per
/// side; up to similarity only the order of values matters).
///
/// `Exhausted` is a sound negative: no abstract system realizes the target,
/// hence no slim rectangular lattice does.
pub fn system_search(target: &Poset, node_budget: u64) -> SearchOutcome {
    let n = target.len();
    if n == 0 {
        return SearchOutcome::Exhausted;
    }
    let maximal = target.maximal_idx().len();
    if maximal < 2 || maximal > n {
        return SearchOutcome::Exhausted;
    }
    let internal_count = n - maximal;
    let side = 2 * n as i64;
    let u_max = crate::geom::rat(side);
    let v_max = crate::geom::rat(side);
    let mut nodes: u64 = 0;

    // candidate internal quadruples over the grid, lexicographically ordered
    let mut quads: Vec<Quadruple> = Vec::new();
    for p in 0..side {
        for q in (p + 1)..=side {
            for r in side..(2 * side) {
                for s in (r + 1)..=(2 * side) {
                    quads.push(Quadruple {
                        p: crate::geom::rat(p),
                        q: crate::geom::rat(q),
                        r: crate::geom::rat(r),
                        s: crate::geom::rat(s),
                    });
                }
            }
        }
    }

    for a in 1..maximal {
        let b = maximal - a;
        let left_cuts = choose_cuts(side, 2 * side, a);
        let right_cuts = choose_cuts(0, side, b);
        for lc in &left_cuts {
            for rc in &right_cuts {
                let mut entries: Vec<AbstractEntry> = Vec::new();
                for w in lc.windows(2) {
                    entries.push(AbstractEntry {
                        kind: SetKind::LeftStripe,
                        quad: Quadruple {
                            p: Rat::zero(),
                            q: Rat::zero(),
                            r: crate::geom::rat(w[0]),
                            s: crate::geom::rat(w[1]),
                        },
                    });
                }
                for w in rc.windows(2) {
                    entries.push(AbstractEntry {
                        kind: SetKind::RightStripe,
                        quad: Quadruple {
                            p: crate::geom::rat(w[0]),
                            q: crate::geom::rat(w[1]),
                            r: &u_max + &v_max,
                            s: &u_max + &v_max,
                        },
                    });
                }
                match grow(
                    &mut entries,
                    internal_count,
                    0,
                    &quads,
                    &u_max,
                    &v_max,
                    target,
                    &mut nodes,
                    node_budget,
                ) {
                    GrowResult::Found(sys) => return SearchOutcome::Found(sys),
                    GrowResult::Budget => return SearchOutcome::BudgetExceeded,
                    GrowResult::NotHere => {}
                }
            }
        }
    }
    SearchOutcome::Exhausted
}

fn choose_cuts(lo: i64, hi: i64, tiles: usize) -> Vec<Vec<i64>> {
    // ascending cut sequences lo = c0 < c1 < ... < c_tiles = hi
    fn rec(cur: &mut Vec<i64>, hi: i64, tiles: usize, out: &mut Vec<Vec<i64>>) {
        if cur.len() == tiles {
            if *cur.last().unwrap() < hi {
                let mut full = cur.clone();
                full.push(hi);
                out.push(full);
            }
            return;
        }
        let last = *cur.last().unwrap();
        for next in (last + 1)..hi {
            cur.push(next);
            rec(cur, hi, tiles, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![lo];
    rec(&mut cur, hi, tiles, &mut out);
    out
}

enum GrowResult {
    Found(AbstractSystem),
    NotHere,
    Budget,
}

#[allow(clippy::too_many_arguments)]
fn grow(
    entries: &mut Vec<AbstractEntry>,
    remaining: usize,
    min_quad: usize,
    quads: &[Quadruple],
    u_max: &Rat,
    v_max: &Rat,
    target: &Poset,
    nodes: &mut u64,
    budget: u64,
) -> GrowResult {
    if remaining == 0 {
        // a completed candidate costs a full poset extraction plus an
        // isomorphism test, so it weighs much more than a grid step
        *nodes += 500;
        if *nodes > budget {
            return GrowResult::Budget;
        }
        let sys = AbstractSystem {
            u_max: u_max.clone(),
            v_max: v_max.clone(),
            entries: entries.clone(),
        };
        if let Some(poset) = sys.poset() {
            if crate::order::is_isomorphic(&poset, target).is_some() {
                return GrowResult::Found(sys);
            }
        }
        return GrowResult::NotHere;
    }
    for qi in min_quad..quads.len() {
        *nodes += 1;
        if *nodes > budget {
            return GrowResult::Budget;
        }
        let cand = AbstractEntry { kind: SetKind::AShape, quad: quads[qi].clone() };
        let ok = entries
            .iter()
            .all(|e| geom_relation_kq(e.kind, &e.quad, cand.kind, &cand.quad).is_ok());
        if !ok {
            continue;
        }
        entries.push(cand);
        match grow(entries, remaining - 1, qi + 1, quads, u_max, v_max, target, nodes, budget) {
            GrowResult::NotHere => {}
            other => return other,
        }
        entries.pop();
    }
    GrowResult::NotHere
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Diagram;
    use crate::geom::rat;

    #[test]
    fn grid11_quadruples() {
        let d = Diagram::grid(1, 1);
        let sets = litsets(&d);
        assert_eq!(sets.len(), 2);
        let left = sets.iter().find(|s| s.kind == SetKind::LeftStripe).unwrap();
        let right = sets.iter().find(|s| s.kind == SetKind::RightStripe).unwrap();
        assert_eq!(left.quadruple, Quadruple { p: rat(0), q: rat(0), r: rat(1), s: rat(2) });
        assert_eq!(right.quadruple, Quadruple { p: rat(0), q: rat(1), r: rat(2), s: rat(2) });
        assert_eq!(geom_relation(left, right).unwrap(), GeomRel::LeftOf);
        assert_eq!(geom_relation(right, left).unwrap(), GeomRel::RightOf);
    }

    #[test]
    fn roof_membership() {
        let peak = Pt::of(1, 1);
        assert!(below_roof(&peak, &peak));
        assert!(below_roof(&Pt::of(0, 0), &peak));
        assert!(!below_roof(&Pt::of(2, 2), &peak));
    }

    #[test]
    fn litset_poset_of_grid_is_antichain() {
        let d = Diagram::grid(2, 3);
        let p = litset_poset(&d);
        assert_eq!(p.len(), 5);
        assert!(p.covers_idx().is_empty());
    }

    #[test]
    fn same_side_stripes_are_ordered() {
        let d = Diagram::grid(1, 2);
        let sets = litsets(&d);
        let lefts: Vec<&LitSet> = sets.iter().filter(|s| s.kind == SetKind::LeftStripe).collect();
        assert_eq!(lefts.len(), 2);
        let r = geom_relation(lefts[0], lefts[1]).unwrap();
        assert!(r == GeomRel::LeftOf || r == GeomRel::RightOf);
    }

    #[test]
    fn search_finds_two_antichain_and_v() {
        let two = Poset::antichain(2);
        assert!(matches!(system_search(&two, 100_000), SearchOutcome::Found(_)));
        let v = Poset::from_relation(
            vec!["i".into(), "a".into(), "b".into()],
            vec![("i".to_string(), "a".to_string()), ("i".to_string(), "b".to_string())],
        )
        .unwrap();
        match system_search(&v, 2_000_000) {
            SearchOutcome::Found(sys) => {
                let rep = validate_system(&sys, None);
                assert!(rep.is_valid());
            }
            other => panic!("expected a system for the V poset, got {other:?}"),
        }
    }

    #[test]
    fn rescaled_system_is_similar() {
        let d = Diagram::grid(1, 1);
        let s1 = system_of_diagram(&d);
        let mut s2 = s1.clone();
        let two = rat(2);
        s2.u_max = &s2.u_max * &two;
        s2.v_max = &s2.v_max * &two;
        for e in s2.entries.iter_mut() {
            e.quad.p = &e.quad.p * &two;
            e.quad.q = &e.quad.q * &two;
            e.quad.r = &e.quad.r * &two;
            e.quad.s = &e.quad.s * &two;
        }
        assert!(similar(&s1, &s2).is_some());
        let bigger = system_of_diagram(&Diagram::grid(1, 2));
        assert!(similar(&s1, &bigger).is_none());
    }
}
