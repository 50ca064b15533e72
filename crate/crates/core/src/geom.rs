//! Exact rational plane geometry in diamond coordinates.
//!
//! Every element of a diagram carries a pair `(u, v)` of nonnegative
//! rationals.  The drawing map is `x = v - u`, `y = u + v`, so lines of
//! constant `u` have drawing slope pi/4, lines of constant `v` have slope
//! 3pi/4, and an edge with both coordinates strictly increasing is
//! precipitous (drawing angle strictly between pi/4 and 3pi/4).
//!
//! All predicates here are exact; no floating point is involved anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn half(x: &Rat) -> Rat {
    x / rat(2)
}

/// A point in diamond coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pt {
    pub u: Rat,
    pub v: Rat,
}

impl Pt {
    pub fn new(u: Rat, v: Rat) -> Self {
        Pt { u, v }
    }

    pub fn of(u: i64, v: i64) -> Self {
        Pt::new(rat(u), rat(v))
    }

    /// Componentwise order; in a diagram this coincides with the lattice order.
    pub fn leq(&self, other: &Pt) -> bool {
        self.u <= other.u && self.v <= other.v
    }

    /// Drawing abscissa `x = v - u`; increases to the right.
    pub fn draw_x(&self) -> Rat {
        &self.v - &self.u
    }

    /// Drawing ordinate `y = u + v`; increases upward.
    pub fn draw_y(&self) -> Rat {
        &self.u + &self.v
    }
}

/// Cross product of `(b - a)` and `(c - a)`.
pub fn cross(a: &Pt, b: &Pt, c: &Pt) -> Rat {
    let abu = &b.u - &a.u;
    let abv = &b.v - &a.v;
    let acu = &c.u - &a.u;
    let acv = &c.v - &a.v;
    &abu * &acv - &abv * &acu
}

/// Classification of an edge by its drawing slope.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeSlope {
    /// Constant `u`: drawing slope pi/4.
    NormalUp,
    /// Constant `v`: drawing slope 3pi/4.
    NormalDown,
    /// Both coordinates strictly increase.
    Precipitous,
    /// Anything else; never occurs in a valid diagram.
    Invalid,
}

pub fn edge_slope(lo: &Pt, hi: &Pt) -> EdgeSlope {
    let du = &hi.u - &lo.u;
    let dv = &hi.v - &lo.v;
    if du.is_zero() && dv.is_positive() {
        EdgeSlope::NormalUp
    } else if dv.is_zero() && du.is_positive() {
        EdgeSlope::NormalDown
    } else if du.is_positive() && dv.is_positive() {
        EdgeSlope::Precipitous
    } else {
        EdgeSlope::Invalid
    }
}

/// Closed axis-aligned rectangle in `(u, v)`, possibly degenerate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UvRect {
    pub u0: Rat,
    pub v0: Rat,
    pub u1: Rat,
    pub v1: Rat,
}

impl UvRect {
    pub fn closed(u0: Rat, v0: Rat, u1: Rat, v1: Rat) -> Self {
        UvRect { u0, v0, u1, v1 }
    }

    pub fn has_area(&self) -> bool {
        self.u0 < self.u1 && self.v0 < self.v1
    }

    pub fn contains(&self, p: &Pt) -> bool {
        p.u >= self.u0 && p.u <= self.u1 && p.v >= self.v0 && p.v <= self.v1
    }

    pub fn contains_interior(&self, p: &Pt) -> bool {
        p.u > self.u0 && p.u < self.u1 && p.v > self.v0 && p.v < self.v1
    }

    /// Containment of a closed rectangle `[lo, hi]`.
    pub fn contains_rect(&self, lo: &Pt, hi: &Pt) -> bool {
        lo.u >= self.u0 && hi.u <= self.u1 && lo.v >= self.v0 && hi.v <= self.v1
    }

    pub fn as_poly(&self) -> Poly {
        Poly::from_pts(vec![
            Pt::new(self.u0.clone(), self.v0.clone()),
            Pt::new(self.u1.clone(), self.v0.clone()),
            Pt::new(self.u1.clone(), self.v1.clone()),
            Pt::new(self.u0.clone(), self.v1.clone()),
        ])
    }
}

/// Convex polygon with rational vertices, stored counterclockwise in `(u, v)`.
/// Degenerate polygons (empty or zero area) are allowed and report area 0.
#[derive(Clone, Debug)]
pub struct Poly {
    pub pts: Vec<Pt>,
}

impl Poly {
    /// Builds a polygon and normalizes the orientation to counterclockwise.
    pub fn from_pts(mut pts: Vec<Pt>) -> Self {
        pts.dedup();
        if pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        let mut p = Poly { pts };
        if p.signed_area2().is_negative() {
            p.pts.reverse();
        }
        p
    }

    pub fn is_empty(&self) -> bool {
        self.pts.len() < 3 || self.signed_area2().is_zero()
    }

    /// Twice the signed area (shoelace).
    pub fn signed_area2(&self) -> Rat {
        let n = self.pts.len();
        if n < 3 {
            return Rat::zero();
        }
        let mut acc = Rat::zero();
        for i in 0..n {
            let a = &self.pts[i];
            let b = &self.pts[(i + 1) % n];
            acc += &a.u * &b.v - &b.u * &a.v;
        }
        acc
    }

    pub fn area2(&self) -> Rat {
        self.signed_area2().abs()
    }

    /// Clips by the halfplane `a*u + b*v <= c` (Sutherland-Hodgman step).
    pub fn clip_halfplane(&self, a: &Rat, b: &Rat, c: &Rat) -> Poly {
        let n = self.pts.len();
        if n == 0 {
            return Poly { pts: vec![] };
        }
        let side = |p: &Pt| -> Rat { a * &p.u + b * &p.v - c };
        let mut out: Vec<Pt> = Vec::new();
        for i in 0..n {
            let cur = &self.pts[i];
            let nxt = &self.pts[(i + 1) % n];
            let sc = side(cur);
            let sn = side(nxt);
            if !sc.is_positive() {
                out.push(cur.clone());
            }
            if (sc.is_positive() && sn.is_negative()) || (sc.is_negative() && sn.is_positive()) {
                // exact intersection of the segment with the boundary line
                let t = &sc / (&sc - &sn);
                let u = &cur.u + &t * (&nxt.u - &cur.u);
                let v = &cur.v + &t * (&nxt.v - &cur.v);
                out.push(Pt::new(u, v));
            }
        }
        let mut dedup: Vec<Pt> = Vec::new();
        for p in out {
            if dedup.last() != Some(&p) {
                dedup.push(p);
            }
        }
        if dedup.len() > 1 && dedup.first() == dedup.last() {
            dedup.pop();
        }
        Poly { pts: dedup }
    }

    /// Exact intersection with another convex polygon.
    pub fn intersect(&self, other: &Poly) -> Poly {
        let n = other.pts.len();
        if n < 3 || self.pts.len() < 3 {
            return Poly { pts: vec![] };
        }
        let mut cur = self.clone();
        for i in 0..n {
            let p = &other.pts[i];
            let q = &other.pts[(i + 1) % n];
            // inner side of directed edge p->q (CCW polygon): cross(p,q,x) >= 0,
            // i.e. dv*u - du*v <= dv*p.u - du*p.v
            let du = &q.u - &p.u;
            let dv = &q.v - &p.v;
            let a = dv.clone();
            let b = -du.clone();
            let c = &dv * &p.u - &du * &p.v;
            cur = cur.clip_halfplane(&a, &b, &c);
            if cur.pts.len() < 3 {
                return Poly { pts: vec![] };
            }
        }
        cur
    }

    /// Closed point membership.
    pub fn contains(&self, p: &Pt) -> bool {
        let n = self.pts.len();
        if n < 3 {
            return false;
        }
        for i in 0..n {
            if cross(&self.pts[i], &self.pts[(i + 1) % n], p).is_negative() {
                return false;
            }
        }
        true
    }

    /// Directions of the local cone of the polygon at `p`, used by the
    /// interior-of-union test.  Returns `None` when `p` is strictly inside
    /// (full circle) and `Some(constraints)` with the inward normals of the
    /// edges through `p` otherwise.  Callers must have checked `contains(p)`.
    fn active_normals(&self, p: &Pt) -> Option<Vec<(Rat, Rat)>> {
        let n = self.pts.len();
        let mut normals = Vec::new();
        for i in 0..n {
            let a = &self.pts[i];
            let b = &self.pts[(i + 1) % n];
            if cross(a, b, p).is_zero() {
                // inward normal of CCW edge a->b is (-(dv), du) rotated: for
                // cross(a,b,x) >= 0 the gradient in (u,v) is (-(b.v-a.v), b.u-a.u)
                normals.push((-(&b.v - &a.v), &b.u - &a.u));
            }
        }
        if normals.is_empty() {
            None
        } else {
            Some(normals)
        }
    }
}

/// Exact comparison of directions (du, dv) by counterclockwise angle from the
/// positive u-axis.  Zero vectors are not allowed.
fn dir_quadrant(d: &(Rat, Rat)) -> u8 {
    let (du, dv) = d;
    if dv.is_zero() {
        if du.is_positive() {
            0
        } else {
            2
        }
    } else if dv.is_positive() {
        if du.is_positive() {
            0
        } else if du.is_zero() {
            1
        } else {
            1
        }
    } else if du.is_negative() {
        2
    } else if du.is_zero() {
        3
    } else {
        3
    }
}

fn dir_cmp(a: &(Rat, Rat), b: &(Rat, Rat)) -> std::cmp::Ordering {
    let qa = dir_quadrant(a);
    let qb = dir_quadrant(b);
    if qa != qb {
        return qa.cmp(&qb);
    }
    // same quadrant: compare by cross product
    let cr = &a.0 * &b.1 - &a.1 * &b.0;
    if cr.is_positive() {
        std::cmp::Ordering::Less
    } else if cr.is_negative() {
        std::cmp::Ordering::Greater
    } else {
        std::cmp::Ordering::Equal
    }
}

fn rot90ccw(d: &(Rat, Rat)) -> (Rat, Rat) {
    (-d.1.clone(), d.0.clone())
}

fn rot90cw(d: &(Rat, Rat)) -> (Rat, Rat) {
    (d.1.clone(), -d.0.clone())
}

fn neg_dir(d: &(Rat, Rat)) -> (Rat, Rat) {
    (-d.0.clone(), -d.1.clone())
}

/// Closed angular arc from `start` counterclockwise to `end`; span is at most
/// pi for the arcs produced here.
#[derive(Clone, Debug)]
struct Arc {
    start: (Rat, Rat),
    end: (Rat, Rat),
}

fn dir_in_arc(d: &(Rat, Rat), arc: &Arc) -> bool {
    // d lies in [start, end] going CCW.  All arcs have span <= pi, so d is in
    // the arc iff cross(start, d) >= 0 and cross(d, end) >= 0, unless the arc
    // is a single direction.
    let c1 = &arc.start.0 * &d.1 - &arc.start.1 * &d.0;
    let c2 = &d.0 * &arc.end.1 - &d.1 * &arc.end.0;
    let span = &arc.start.0 * &arc.end.1 - &arc.start.1 * &arc.end.0;
    let dot_span = &arc.start.0 * &arc.end.0 + &arc.start.1 * &arc.end.1;
    if span.is_zero() && !dot_span.is_negative() {
        // zero-length arc
        let c = &arc.start.0 * &d.1 - &arc.start.1 * &d.0;
        let dot = &arc.start.0 * &d.0 + &arc.start.1 * &d.1;
        return c.is_zero() && dot.is_positive();
    }
    !c1.is_negative() && !c2.is_negative()
}

/// Decides whether `p` lies in the topological interior (relative to the
/// plane) of the union of the given convex polygons.
///
/// Works by local cone coverage: each polygon containing `p` contributes the
/// cone of directions leading into it; `p` is interior iff the cones cover a
/// full circle of directions.
pub fn point_in_union_interior(p: &Pt, polys: &[Poly]) -> bool {
    let mut arcs: Vec<Arc> = Vec::new();
    for poly in polys {
        if poly.is_empty() || !poly.contains(p) {
            continue;
        }
        match poly.active_normals(p) {
            None => return true, // strictly inside one piece
            Some(normals) => {
                if let Some(arc) = cone_arc(&normals) {
                    arcs.push(arc);
                }
            }
        }
    }
    if arcs.is_empty() {
        return false;
    }
    cover_circle(&arcs)
}

fn same_dir(a: &(Rat, Rat), b: &(Rat, Rat)) -> bool {
    let cr = &a.0 * &b.1 - &a.1 * &b.0;
    let dot = &a.0 * &b.0 + &a.1 * &b.1;
    cr.is_zero() && dot.is_positive()
}

fn dot_nonneg(d: &(Rat, Rat), n: &(Rat, Rat)) -> bool {
    !(&d.0 * &n.0 + &d.1 * &n.1).is_negative()
}

/// Cone `{d : d . n >= 0 for all normals}` as a closed arc of span at most
/// pi, or `None` when the cone has empty interior (a single ray or nothing):
/// such cones cannot help cover any open sector.
fn cone_arc(normals: &[(Rat, Rat)]) -> Option<Arc> {
    let mut distinct: Vec<(Rat, Rat)> = Vec::new();
    for n in normals {
        if (n.0.is_zero() && n.1.is_zero()) || distinct.iter().any(|m| same_dir(m, n)) {
            continue;
        }
        distinct.push(n.clone());
    }
    match distinct.len() {
        0 => None,
        1 => {
            let n = &distinct[0];
            Some(Arc { start: rot90cw(n), end: rot90ccw(n) })
        }
        _ => {
            // boundary rays of the cone are perpendiculars of the normals
            let valid = |d: &(Rat, Rat)| -> bool { distinct.iter().all(|n| dot_nonneg(d, n)) };
            let start = distinct.iter().map(rot90cw).find(|d| valid(d))?;
            let end = distinct.iter().map(rot90ccw).find(|d| valid(d))?;
            let cr = &start.0 * &end.1 - &start.1 * &end.0;
            let dot = &start.0 * &end.0 + &start.1 * &end.1;
            // reject empty or ray-only cones
            if cr.is_negative() || (cr.is_zero() && !dot.is_positive()) {
                return None;
            }
            if same_dir(&start, &end) && distinct.len() > 1 {
                // span-zero wedge
                return None;
            }
            Some(Arc { start, end })
        }
    }
}

/// Checks whether the closed arcs jointly cover the full circle.
fn cover_circle(arcs: &[Arc]) -> bool {
    // Event directions: all arc endpoints and their negations, sorted by angle.
    let mut dirs: Vec<(Rat, Rat)> = Vec::new();
    for a in arcs {
        dirs.push(a.start.clone());
        dirs.push(a.end.clone());
        dirs.push(neg_dir(&a.start));
        dirs.push(neg_dir(&a.end));
    }
    dirs.sort_by(dir_cmp);
    dirs.dedup_by(|a, b| dir_cmp(a, b) == std::cmp::Ordering::Equal);
    let k = dirs.len();
    if k == 0 {
        return false;
    }
    // Each boundary direction and each open sector between consecutive
    // directions must be covered by some arc.  Sample sectors by midpoint
    // (sum of unit-free direction vectors normalized by magnitude is not
    // rational, so use the angle-bisector trick on the raw vectors scaled to
    // equal cross-norms; summing after scaling to equal length squared is not
    // rational either, so instead sample with the rotation trick below).
    for i in 0..k {
        let d = &dirs[i];
        if !arcs.iter().any(|a| dir_in_arc(d, a)) {
            return false;
        }
        let e = &dirs[(i + 1) % k];
        // sector sample: direction strictly between d and e.  Since both are
        // rational rays, d scaled by |e|^2 plus e scaled by |d|^2 gives a
        // rational direction strictly inside whenever the sector is < pi,
        // which holds because negations of all endpoints are present.
        let nd = &d.0 * &d.0 + &d.1 * &d.1;
        let ne = &e.0 * &e.0 + &e.1 * &e.1;
        // cross-scale so the two contributions have equal "weight": use
        // mid = d * ne_norm_factor + e * nd_norm_factor with the factors the
        // full squared norms of the other vector; the result lies strictly
        // inside the sector (it is a positive combination of both).
        let mid = (&d.0 * &ne + &e.0 * &nd, &d.1 * &ne + &e.1 * &nd);
        if mid.0.is_zero() && mid.1.is_zero() {
            // antipodal endpoints: sample by rotating d slightly is not
            // rational-exact; instead use the perpendicular which lies in one
            // of the two sectors; check both perpendiculars.
            let p1 = rot90ccw(d);
            if !arcs.iter().any(|a| dir_in_arc(&p1, a)) {
                // the sector from d CCW to e=-d spans exactly pi; p1 is its
                // midpoint, so failure here is failure to cover.
                return false;
            }
            continue;
        }
        if !arcs.iter().any(|a| dir_in_arc(&mid, a)) {
            return false;
        }
    }
    true
}

/// Area of `piece ∩ (union of polys)` via inclusion-exclusion.  Intended for
/// small unions; `polys` should be pre-filtered to those meeting `piece`.
pub fn area2_intersection_with_union(piece: &Poly, polys: &[Poly]) -> Rat {
    let relevant: Vec<&Poly> = polys
        .iter()
        .filter(|q| !q.is_empty() && !piece.intersect(q).is_empty())
        .collect();
    let m = relevant.len();
    let mut total = Rat::zero();
    // inclusion-exclusion over nonempty subsets
    for mask in 1u32..(1u32 << m) {
        let mut cur = piece.clone();
        let mut bits = 0;
        for (i, q) in relevant.iter().enumerate() {
            if mask & (1 << i) != 0 {
                bits += 1;
                cur = cur.intersect(q);
                if cur.is_empty() {
                    break;
                }
            }
        }
        let a = cur.area2();
        if bits % 2 == 1 {
            total += a;
        } else {
            total -= a;
        }
    }
    total
}

/// Exact test: is the closed region `pieces` (pairwise interior-disjoint
/// convex polygons) contained in the closed union of `cover`?
///
/// Valid for regions that are closures of their interiors: containment of
/// closed sets is then equivalent to the covered area being the full area.
pub fn union_subset_by_area(pieces: &[Poly], cover: &[Poly]) -> bool {
    for piece in pieces {
        if piece.is_empty() {
            continue;
        }
        // fast path: piece inside a single cover polygon
        let mut inside_one = false;
        for q in cover {
            if q.is_empty() {
                continue;
            }
            if piece.pts.iter().all(|p| q.contains(p)) {
                inside_one = true;
                break;
            }
        }
        if inside_one {
            continue;
        }
        if piece.pts.iter().any(|p| !cover.iter().any(|q| q.contains(p))) {
            return false;
        }
        let covered = area2_intersection_with_union(piece, cover);
        if covered != piece.area2() {
            return false;
        }
    }
    true
}

/// Exact region equality for unions of interior-disjoint convex polygons.
pub fn union_equal_by_area(a: &[Poly], b: &[Poly]) -> bool {
    union_subset_by_area(a, b) && union_subset_by_area(b, a)
}
