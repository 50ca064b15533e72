//! Planar diagrams of slim rectangular lattices with exact rational
//! coordinates, built from grids by multifork insertion.
//!
//! Elements live at diamond coordinates `(u, v)`; the bottom sits at
//! `(0, 0)` and the two corners at `(u_max, 0)` and `(0, v_max)`.  Normal
//! edges keep one coordinate constant; the only edges with both coordinates
//! strictly increasing are the internal neon tubes created by forks.
//! Insertion never moves an existing element.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{edge_slope, half, EdgeSlope, Pt, Rat};
use crate::lattice::{
    is_rectangular, is_semimodular, is_slim, jir_con_poset, lattice_from_covers, mir, Lattice,
    LatticeError,
};
use crate::order::{canonical_form, is_isomorphic, OrderError, Poset};

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("invalid cell reference")]
    InvalidCell,
    #[error("cell is not distributive")]
    NotDistributive,
    #[error("script step {0} refers to a stale or unknown cell")]
    StaleCell(usize),
    #[error("element is not the foot of an internal neon tube")]
    NotInternal,
    #[error("tube is not the middle of a consecutive secondary triple; pass the unsafe override to remove it anyway")]
    RemovalNotSafe,
    #[error("diagram lost its build script (tube removal); it cannot be rescripted")]
    Unscripted,
    #[error("integrity violation after an operation: {0}")]
    Integrity(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// A cover-preserving 4-element boolean sublattice, by element ids.
/// `left` is the cover of `bottom` with the larger `u` coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub bottom: usize,
    pub left: usize,
    pub right: usize,
    pub top: usize,
}

/// Replayable identity of a scripted diagram: a base grid plus an ordered
/// list of multifork insertions addressed by cell-bottom coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildScript {
    pub grid: (u32, u32),
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub cell_bottom: (String, String),
    pub k: u32,
}

impl Step {
    pub fn new(p: &Pt, k: u32) -> Step {
        Step { cell_bottom: (p.u.to_string(), p.v.to_string()), k }
    }

    pub fn point(&self) -> Pt {
        Pt::new(
            self.cell_bottom.0.parse().expect("rational"),
            self.cell_bottom.1.parse().expect("rational"),
        )
    }
}

#[derive(Clone, Debug)]
pub struct Diagram {
    pts: Vec<Pt>,
    covers: Vec<(usize, usize)>,
    script: Option<BuildScript>,
    le: Vec<Vec<bool>>,
    cells: Vec<Cell>,
    cell_distrib: Vec<bool>,
    left_chain: Vec<usize>,
    right_chain: Vec<usize>,
    u_max: Rat,
    v_max: Rat,
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        self.pts == other.pts && self.covers == other.covers
    }
}

impl Diagram {
    /// Direct product of two chains of lengths `c` and `d`, on integer points.
    pub fn grid(c: u32, d: u32) -> Diagram {
        assert!(c >= 1 && d >= 1, "grid sides must be positive");
        let (c, d) = (c as i64, d as i64);
        let mut pts = Vec::new();
        for i in 0..=c {
            for j in 0..=d {
                pts.push(Pt::of(i, j));
            }
        }
        let id = |i: i64, j: i64| (i * (d + 1) + j) as usize;
        let mut covers = Vec::new();
        for i in 0..=c {
            for j in 0..=d {
                if i < c {
                    covers.push((id(i, j), id(i + 1, j)));
                }
                if j < d {
                    covers.push((id(i, j), id(i, j + 1)));
                }
            }
        }
        Diagram::finish(
            pts,
            covers,
            Some(BuildScript { grid: (c as u32, d as u32), steps: Vec::new() }),
        )
    }

    /// Reassembles a diagram from raw points and covers, e.g. from a
    /// diagram document.  Run `validate` afterwards; documents may carry
    /// inconsistent data.
    pub fn from_parts(
        pts: Vec<Pt>,
        covers: Vec<(usize, usize)>,
        script: Option<BuildScript>,
    ) -> Diagram {
        Diagram::finish(pts, covers, script)
    }

    fn finish(
        pts: Vec<Pt>,
        mut covers: Vec<(usize, usize)>,
        script: Option<BuildScript>,
    ) -> Diagram {
        covers.sort();
        covers.dedup();
        let n = pts.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in &covers {
            le[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i][k] {
                    for j in 0..n {
                        if le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        let u_max = pts.iter().map(|p| p.u.clone()).max().unwrap();
        let v_max = pts.iter().map(|p| p.v.clone()).max().unwrap();
        // boundary chains run bottom -> corner -> top
        let mut lower_left: Vec<usize> = (0..n).filter(|&i| pts[i].v.is_zero()).collect();
        lower_left.sort_by(|&a, &b| pts[a].u.cmp(&pts[b].u));
        let mut upper_left: Vec<usize> =
            (0..n).filter(|&i| pts[i].u == u_max && !pts[i].v.is_zero()).collect();
        upper_left.sort_by(|&a, &b| pts[a].v.cmp(&pts[b].v));
        let mut left_chain = lower_left;
        left_chain.extend(upper_left);
        let mut lower_right: Vec<usize> = (0..n).filter(|&i| pts[i].u.is_zero()).collect();
        lower_right.sort_by(|&a, &b| pts[a].v.cmp(&pts[b].v));
        let mut upper_right: Vec<usize> =
            (0..n).filter(|&i| pts[i].v == v_max && !pts[i].u.is_zero()).collect();
        upper_right.sort_by(|&a, &b| pts[a].u.cmp(&pts[b].u));
        let mut right_chain = lower_right;
        right_chain.extend(upper_right);

        let mut d = Diagram {
            pts,
            covers,
            script,
            le,
            cells: Vec::new(),
            cell_distrib: Vec::new(),
            left_chain,
            right_chain,
            u_max,
            v_max,
        };
        d.cells = d.compute_cells();
        d.cell_distrib = d.compute_cell_flags();
        d
    }

    fn compute_cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for w in 0..self.n() {
            let ups = self.upper_covers(w);
            for i in 0..ups.len() {
                for j in (i + 1)..ups.len() {
                    let (x, y) = (ups[i], ups[j]);
                    if let Some(t) = self.join(x, y) {
                        if self.is_cover(x, t) && self.is_cover(y, t) {
                            let (left, right) =
                                if self.pts[x].u > self.pts[y].u { (x, y) } else { (y, x) };
                            cells.push(Cell { bottom: w, left, right, top: t });
                        }
                    }
                }
            }
        }
        cells.sort_by(|a, b| {
            (self.pts[a.bottom].clone(), self.pts[a.top].clone())
                .cmp(&(self.pts[b.bottom].clone(), self.pts[b.top].clone()))
        });
        cells
    }

    fn compute_cell_flags(&self) -> Vec<bool> {
        let mut memo: BTreeMap<usize, bool> = BTreeMap::new();
        self.cells
            .iter()
            .map(|c| {
                *memo.entry(c.top).or_insert_with(|| {
                    let ideal: Vec<usize> =
                        (0..self.n()).filter(|&x| self.le[x][c.top]).collect();
                    let sub = self.sub_poset(&ideal);
                    match lattice_from_covers(&sub) {
                        Ok(l) => crate::lattice::is_distributive(&l),
                        Err(_) => false,
                    }
                })
            })
            .collect()
    }

    fn sub_poset(&self, keep: &[usize]) -> Poset {
        let labels: Vec<String> = keep.iter().map(|&i| format!("e{i}")).collect();
        let mut rel = Vec::new();
        for &a in keep {
            for &b in keep {
                if a != b && self.le[a][b] {
                    rel.push((format!("e{a}"), format!("e{b}")));
                }
            }
        }
        Poset::from_relation(labels, rel).expect("induced order is acyclic")
    }

    pub fn n(&self) -> usize {
        self.pts.len()
    }

    pub fn pt(&self, i: usize) -> &Pt {
        &self.pts[i]
    }

    pub fn points(&self) -> &[Pt] {
        &self.pts
    }

    pub fn cover_pairs(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le[a][b]
    }

    pub fn is_cover(&self, a: usize, b: usize) -> bool {
        self.covers.binary_search(&(a, b)).is_ok()
    }

    pub fn upper_covers(&self, a: usize) -> Vec<usize> {
        self.covers.iter().filter(|&&(x, _)| x == a).map(|&(_, y)| y).collect()
    }

    pub fn lower_covers(&self, a: usize) -> Vec<usize> {
        self.covers.iter().filter(|&&(_, y)| y == a).map(|&(x, _)| x).collect()
    }

    pub fn bottom(&self) -> usize {
        (0..self.n()).find(|&i| self.pts[i] == Pt::of(0, 0)).expect("bottom at origin")
    }

    pub fn top(&self) -> usize {
        (0..self.n())
            .find(|&i| self.pts[i].u == self.u_max && self.pts[i].v == self.v_max)
            .expect("top element")
    }

    pub fn u_max(&self) -> &Rat {
        &self.u_max
    }

    pub fn v_max(&self) -> &Rat {
        &self.v_max
    }

    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        let ubs: Vec<usize> = (0..self.n()).filter(|&c| self.le[a][c] && self.le[b][c]).collect();
        ubs.iter().copied().find(|&c| ubs.iter().all(|&d| self.le[c][d]))
    }

    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        let lbs: Vec<usize> = (0..self.n()).filter(|&c| self.le[c][a] && self.le[c][b]).collect();
        lbs.iter().copied().find(|&c| lbs.iter().all(|&d| self.le[d][c]))
    }

    pub fn height(&self, x: usize) -> usize {
        let mut h = vec![0usize; self.n()];
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by_key(|&i| self.pts[i].u.clone() + self.pts[i].v.clone());
        for &i in &order {
            for &j in &self.upper_covers(i) {
                h[j] = h[j].max(h[i] + 1);
            }
        }
        h[x]
    }

    pub fn length(&self) -> usize {
        self.height(self.top())
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// All 4-cells together with their distributivity flags (true when the
    /// principal ideal of the cell top is distributive).
    pub fn four_cells(&self) -> Vec<(Cell, bool)> {
        self.cells.iter().cloned().zip(self.cell_distrib.iter().copied()).collect()
    }

    pub fn cell_is_distributive(&self, cell: &Cell) -> bool {
        self.cells
            .iter()
            .position(|c| c == cell)
            .map(|i| self.cell_distrib[i])
            .unwrap_or(false)
    }

    pub fn distributive_cells(&self) -> Vec<Cell> {
        self.cells
            .iter()
            .zip(&self.cell_distrib)
            .filter(|(_, &f)| f)
            .map(|(c, _)| c.clone())
            .collect()
    }

    pub fn find_cell_by_bottom(&self, p: &Pt) -> Option<Cell> {
        self.cells.iter().find(|c| &self.pts[c.bottom] == p).cloned()
    }

    pub fn left_chain(&self) -> &[usize] {
        &self.left_chain
    }

    pub fn right_chain(&self) -> &[usize] {
        &self.right_chain
    }

    /// Largest element of the left boundary chain below or equal to `a`.
    pub fn ljc(&self, a: usize) -> usize {
        *self
            .left_chain
            .iter()
            .filter(|&&x| self.le[x][a])
            .last()
            .expect("bottom is on the left chain")
    }

    /// Largest element of the right boundary chain below or equal to `a`.
    pub fn rjc(&self, a: usize) -> usize {
        *self
            .right_chain
            .iter()
            .filter(|&&x| self.le[x][a])
            .last()
            .expect("bottom is on the right chain")
    }

    pub fn script(&self) -> Result<&BuildScript, DiagramError> {
        self.script.as_ref().ok_or(DiagramError::Unscripted)
    }

    pub fn to_poset(&self) -> Poset {
        let labels: Vec<String> = (0..self.n()).map(|i| format!("e{i}")).collect();
        let covers: Vec<(String, String)> =
            self.covers.iter().map(|&(a, b)| (format!("e{a}"), format!("e{b}"))).collect();
        Poset::new(labels, covers).expect("diagram covers form a reduced order")
    }

    pub fn lattice(&self) -> Lattice {
        lattice_from_covers(&self.to_poset()).expect("diagram is a lattice")
    }

    /// Swaps the two diamond coordinates; the mirror image presents the same
    /// abstract lattice.
    pub fn mirror(&self) -> Diagram {
        let pts: Vec<Pt> =
            self.pts.iter().map(|p| Pt::new(p.v.clone(), p.u.clone())).collect();
        let script = self.script.as_ref().map(|s| BuildScript {
            grid: (s.grid.1, s.grid.0),
            steps: s
                .steps
                .iter()
                .map(|st| Step {
                    cell_bottom: (st.cell_bottom.1.clone(), st.cell_bottom.0.clone()),
                    k: st.k,
                })
                .collect(),
        });
        Diagram::finish(pts, self.covers.clone(), script)
    }

    fn left_trajectory(&self, cell: &Cell) -> Result<Vec<(usize, usize)>, DiagramError> {
        let mut traj = Vec::new();
        let mut e = (cell.bottom, cell.left);
        loop {
            if self.pts[e.0].v != self.pts[e.1].v {
                return Err(DiagramError::Integrity(
                    "lower-left trajectory edge is not of constant v".to_string(),
                ));
            }
            traj.push(e);
            if self.pts[e.0].v.is_zero() {
                return Ok(traj);
            }
            let below =
                self.cells.iter().find(|c| c.right == e.0 && c.top == e.1).ok_or_else(|| {
                    DiagramError::Integrity("missing cell below a left trajectory".to_string())
                })?;
            e = (below.bottom, below.left);
        }
    }

    fn right_trajectory(&self, cell: &Cell) -> Result<Vec<(usize, usize)>, DiagramError> {
        let mut traj = Vec::new();
        let mut e = (cell.bottom, cell.right);
        loop {
            if self.pts[e.0].u != self.pts[e.1].u {
                return Err(DiagramError::Integrity(
                    "lower-right trajectory edge is not of constant u".to_string(),
                ));
            }
            traj.push(e);
            if self.pts[e.0].u.is_zero() {
                return Ok(traj);
            }
            let below =
                self.cells.iter().find(|c| c.left == e.0 && c.top == e.1).ok_or_else(|| {
                    DiagramError::Integrity("missing cell below a right trajectory".to_string())
                })?;
            e = (below.bottom, below.right);
        }
    }

    fn insert_fork_raw(&self, cell: &Cell) -> Result<(Diagram, usize), DiagramError> {
        if !self.cells.contains(cell) {
            return Err(DiagramError::InvalidCell);
        }
        let ltraj = self.left_trajectory(cell)?;
        let rtraj = self.right_trajectory(cell)?;
        let w = &self.pts[cell.bottom];
        let s_l = ltraj.iter().map(|&(_, y)| self.pts[y].u.clone()).min().unwrap();
        let s_r = rtraj.iter().map(|&(_, y)| self.pts[y].v.clone()).min().unwrap();
        // bisect toward the top of the free range until the lane value is
        // new; sharing a lane with an unrelated part of the diagram would
        // create accidental boundary degeneracies in the lit-set geometry
        let used_u: BTreeSet<Rat> = self.pts.iter().map(|p| p.u.clone()).collect();
        let used_v: BTreeSet<Rat> = self.pts.iter().map(|p| p.v.clone()).collect();
        let mut u_m = half(&(&w.u + &s_l));
        while used_u.contains(&u_m) {
            u_m = half(&(&u_m + &s_l));
        }
        let mut v_m = half(&(&w.v + &s_r));
        while used_v.contains(&v_m) {
            v_m = half(&(&v_m + &s_r));
        }

        let mut pts = self.pts.clone();
        let mut covers: BTreeSet<(usize, usize)> = self.covers.iter().copied().collect();
        let foot = pts.len();
        pts.push(Pt::new(u_m.clone(), v_m.clone()));
        covers.insert((foot, cell.top));

        let mut prev = foot;
        for &(x, y) in &ltraj {
            let leg = pts.len();
            pts.push(Pt::new(u_m.clone(), self.pts[x].v.clone()));
            covers.remove(&(x, y));
            covers.insert((x, leg));
            covers.insert((leg, y));
            covers.insert((leg, prev));
            prev = leg;
        }
        let mut prev = foot;
        for &(x, y) in &rtraj {
            let leg = pts.len();
            pts.push(Pt::new(self.pts[x].u.clone(), v_m.clone()));
            covers.remove(&(x, y));
            covers.insert((x, leg));
            covers.insert((leg, y));
            covers.insert((leg, prev));
            prev = leg;
        }
        let mut script = self.script.clone();
        if let Some(s) = script.as_mut() {
            s.steps.push(Step::new(w, 1));
        }
        Ok((Diagram::finish(pts, covers.into_iter().collect(), script), foot))
    }

    /// Inserts a single fork into any 4-cell.  The foot lands at the midpoint
    /// of the free lane range; legs subdivide the two lower trajectories down
    /// to the boundary.
    pub fn insert_fork(&self, cell: &Cell) -> Result<Diagram, DiagramError> {
        Ok(self.insert_fork_raw(cell)?.0)
    }

    /// Inserts a `k`-fold multifork into a distributive 4-cell: `k` forks
    /// sharing the cell's top, each successive fork entering the cell
    /// immediately left of the previous foot.
    pub fn insert_multifork(&self, cell: &Cell, k: u32) -> Result<Diagram, DiagramError> {
        if k == 0 || !self.cells.contains(cell) {
            return Err(DiagramError::InvalidCell);
        }
        if !self.cell_is_distributive(cell) {
            return Err(DiagramError::NotDistributive);
        }
        let top = cell.top;
        let bottom_pt = self.pts[cell.bottom].clone();
        let mut cur = self.clone();
        let mut cur_cell = cell.clone();
        for i in 0..k {
            let (next, foot) = cur.insert_fork_raw(&cur_cell)?;
            cur = next;
            // drop the per-fork step; one multifork step is recorded below
            if let Some(s) = cur.script.as_mut() {
                s.steps.pop();
            }
            if i + 1 < k {
                cur_cell = cur
                    .cells
                    .iter()
                    .find(|c| c.top == top && c.right == foot)
                    .cloned()
                    .ok_or(DiagramError::InvalidCell)?;
            }
        }
        if let Some(s) = cur.script.as_mut() {
            s.steps.push(Step::new(&bottom_pt, k));
        }
        Ok(cur)
    }

    /// Removes an internal neon tube together with its two leg chains.
    ///
    /// In safe mode the tube must be the middle of three geometrically
    /// consecutive secondary tubes of one lamp, and the congruence structure
    /// is validated to be unchanged.  The shared peak always survives: the
    /// other tubes of its lamp keep it as their cover.
    pub fn remove_tube(
        &self,
        foot: usize,
        unsafe_override: bool,
    ) -> Result<Diagram, DiagramError> {
        let ups = self.upper_covers(foot);
        if ups.len() != 1 {
            return Err(DiagramError::NotInternal);
        }
        let peak = ups[0];
        if edge_slope(&self.pts[foot], &self.pts[peak]) != EdgeSlope::Precipitous {
            return Err(DiagramError::NotInternal);
        }
        if !unsafe_override {
            let triples = crate::lamps::consecutive_secondary_triples(self);
            if !triples.iter().any(|t| t.1 == foot) {
                return Err(DiagramError::RemovalNotSafe);
            }
        }
        let lj = self.ljc(foot);
        let rj = self.rjc(foot);
        let mut doomed: BTreeSet<usize> = BTreeSet::new();
        for x in 0..self.n() {
            if (self.le[lj][x] || self.le[rj][x]) && self.le[x][foot] {
                doomed.insert(x);
            }
        }
        // the two removed intervals must be chains
        for &lo in &[lj, rj] {
            let members: Vec<usize> =
                (0..self.n()).filter(|&x| self.le[lo][x] && self.le[x][foot]).collect();
            for &a in &members {
                for &b in &members {
                    if !self.le[a][b] && !self.le[b][a] {
                        return Err(DiagramError::Integrity(
                            "leg interval is not a chain".to_string(),
                        ));
                    }
                }
            }
        }
        let keep: Vec<usize> = (0..self.n()).filter(|i| !doomed.contains(i)).collect();
        let pts: Vec<Pt> = keep.iter().map(|&i| self.pts[i].clone()).collect();
        let mut pairs = Vec::new();
        for (a_new, &a) in keep.iter().enumerate() {
            for (b_new, &b) in keep.iter().enumerate() {
                if a_new == b_new || !self.le[a][b] {
                    continue;
                }
                let is_cover =
                    !keep.iter().any(|&c| c != a && c != b && self.le[a][c] && self.le[c][b]);
                if is_cover {
                    pairs.push((a_new, b_new));
                }
            }
        }
        let before_tubes = mir(&self.lattice()).len();
        let before_con = jir_con_poset(&self.lattice());
        let out = Diagram::finish(pts, pairs, None);
        let l = lattice_from_covers(&out.to_poset())?;
        if !(is_slim(&l) && is_semimodular(&l) && is_rectangular(&l)) {
            return Err(DiagramError::Integrity(
                "removal result is not slim rectangular".to_string(),
            ));
        }
        if mir(&l).len() + 1 != before_tubes {
            return Err(DiagramError::Integrity("tube count did not drop by one".to_string()));
        }
        if !unsafe_override {
            let after_con = jir_con_poset(&l);
            if is_isomorphic(&before_con, &after_con).is_none() {
                return Err(DiagramError::Integrity(
                    "congruence poset changed under safe removal".to_string(),
                ));
            }
        }
        Ok(out)
    }

    /// Structural sanity check: coordinate order matches the cover-generated
    /// order, every edge has a legal slope, precipitous edges are exactly the
    /// internal meet-irreducible edges, and no element has three upper covers.
    pub fn validate(&self) -> Result<(), DiagramError> {
        let n = self.n();
        for a in 0..n {
            for b in 0..n {
                let coord = self.pts[a].leq(&self.pts[b]);
                if coord != self.le[a][b] {
                    return Err(DiagramError::Integrity(format!(
                        "coordinate order and cover order disagree at ({a}, {b})"
                    )));
                }
            }
        }
        for &(a, b) in &self.covers {
            match edge_slope(&self.pts[a], &self.pts[b]) {
                EdgeSlope::Invalid => {
                    return Err(DiagramError::Integrity(format!(
                        "edge ({a}, {b}) has an illegal slope"
                    )));
                }
                EdgeSlope::Precipitous => {
                    let interior = self.upper_covers(a).len() == 1
                        && !self.pts[a].u.is_zero()
                        && !self.pts[a].v.is_zero()
                        && self.pts[a].u != self.u_max
                        && self.pts[a].v != self.v_max;
                    if !interior {
                        return Err(DiagramError::Integrity(format!(
                            "precipitous edge ({a}, {b}) is not an internal tube"
                        )));
                    }
                }
                _ => {}
            }
        }
        for a in 0..n {
            if self.upper_covers(a).len() > 2 {
                return Err(DiagramError::Integrity(format!(
                    "element {a} has more than two upper covers"
                )));
            }
        }
        Ok(())
    }
}

/// Replays a build script deterministically.  Each step must address an
/// existing distributive cell by its bottom coordinate.
pub fn replay(script: &BuildScript) -> Result<Diagram, DiagramError> {
    let mut d = Diagram::grid(script.grid.0, script.grid.1);
    for (i, step) in script.steps.iter().enumerate() {
        let cell = d.find_cell_by_bottom(&step.point()).ok_or(DiagramError::StaleCell(i))?;
        if !d.cell_is_distributive(&cell) {
            return Err(DiagramError::StaleCell(i));
        }
        d = d.insert_multifork(&cell, step.k)?;
    }
    Ok(d)
}

pub fn script_of(d: &Diagram) -> Result<BuildScript, DiagramError> {
    Ok(d.script()?.clone())
}

/// Census of an exhaustive enumeration run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Census {
    /// isomorphism classes per length
    pub counts: BTreeMap<usize, usize>,
    pub total: usize,
}

/// Visits every slim rectangular lattice of length at most `max_len` exactly
/// once up to isomorphism (mirror images present the same lattice), generated
/// as scripts rooted at grids.
pub fn enumerate_diagrams<F: FnMut(&Diagram)>(max_len: usize, mut visitor: F) -> Census {
    let mut census = Census::default();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut stack: Vec<Diagram> = Vec::new();
    for c in 1..=(max_len.saturating_sub(1) as u32) {
        for dd in c..=((max_len as u32).saturating_sub(c)) {
            stack.push(Diagram::grid(c, dd));
        }
    }
    stack.reverse();
    while let Some(d) = stack.pop() {
        let len = d.length();
        if len > max_len {
            continue;
        }
        let form = canonical_form(&d.to_poset());
        if !seen.insert(form) {
            continue;
        }
        *census.counts.entry(len).or_insert(0) += 1;
        census.total += 1;
        visitor(&d);
        let budget = max_len - len;
        if budget == 0 {
            continue;
        }
        for cell in d.distributive_cells() {
            for k in 1..=budget as u32 {
                let child =
                    d.insert_multifork(&cell, k).expect("distributive cell accepts a multifork");
                stack.push(child);
            }
        }
    }
    census
}

/// Seeded random build: geometric number of insertions, uniform distributive
/// cell choice, fork multiplicity weighted toward 1..3.
pub fn random_diagram<R: Rng>(rng: &mut R, max_len: usize) -> Diagram {
    let max_len = max_len.max(2);
    let c = rng.gen_range(1..=2u32);
    let dmax = (max_len as u32).saturating_sub(c).max(1);
    let dd = rng.gen_range(1..=2u32.min(dmax));
    let mut d = Diagram::grid(c, dd);
    loop {
        let remaining = max_len.saturating_sub(d.length());
        if remaining == 0 || rng.gen_bool(0.35) {
            return d;
        }
        let cells = d.distributive_cells();
        if cells.is_empty() {
            return d;
        }
        let cell = cells[rng.gen_range(0..cells.len())].clone();
        let weights = [1u32, 1, 1, 2, 2, 3];
        let k = weights[rng.gen_range(0..weights.len())].min(remaining as u32);
        d = d.insert_multifork(&cell, k).expect("distributive cell accepts a multifork");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rat, rat_frac};

    fn s7() -> Diagram {
        let g = Diagram::grid(1, 1);
        let cell = g.cells()[0].clone();
        g.insert_fork(&cell).unwrap()
    }

    #[test]
    fn grid_counts() {
        let g = Diagram::grid(2, 3);
        assert_eq!(g.n(), 12);
        assert_eq!(g.length(), 5);
        assert_eq!(Diagram::grid(1, 1).n(), 4);
        assert_eq!(Diagram::grid(1, 1).length(), 2);
    }

    #[test]
    fn grid_mirrors_are_isomorphic() {
        let a = Diagram::grid(1, 2).to_poset();
        let b = Diagram::grid(2, 1).to_poset();
        assert!(is_isomorphic(&a, &b).is_some());
    }

    #[test]
    fn s7_shape() {
        let d = s7();
        assert_eq!(d.n(), 7);
        assert_eq!(d.length(), 3);
        d.validate().unwrap();
        let l = d.lattice();
        assert!(is_slim(&l) && is_semimodular(&l) && is_rectangular(&l));
        assert!(!crate::lattice::is_distributive(&l));
        assert_eq!(mir(&l).len(), 3);
    }

    #[test]
    fn fork_into_s7_left_top_cell_gives_eleven() {
        let d = s7();
        let top = d.top();
        let foot = (0..d.n())
            .find(|&i| {
                d.upper_covers(i) == vec![top]
                    && edge_slope(d.pt(i), d.pt(top)) == EdgeSlope::Precipitous
            })
            .unwrap();
        let cell =
            d.cells().iter().find(|c| c.top == top && c.right == foot).cloned().unwrap();
        // this cell shares the lamp's top; its ideal is not distributive
        assert!(!d.cell_is_distributive(&cell));
        let e = d.insert_fork(&cell).unwrap();
        assert_eq!(e.n(), 11);
        assert_eq!(e.length(), 4);
        e.validate().unwrap();
    }

    #[test]
    fn multifork_size_formula_landmarks() {
        let g = Diagram::grid(1, 1);
        let cell = g.cells()[0].clone();
        let d1 = g.insert_multifork(&cell, 1).unwrap();
        assert_eq!(d1.n(), 7);
        let d2 = g.insert_multifork(&cell, 2).unwrap();
        assert_eq!(d2.n(), 11);
        assert_eq!(d2.length(), 4);
        d2.validate().unwrap();
        let g22 = Diagram::grid(2, 2);
        let top_cell = g22.find_cell_by_bottom(&Pt::of(1, 1)).unwrap();
        let d3 = g22.insert_multifork(&top_cell, 3).unwrap();
        assert_eq!(d3.n(), 27);
        assert_eq!(d3.length(), 7);
        d3.validate().unwrap();
    }

    #[test]
    fn left_and_right_multifork_rules_agree_up_to_iso() {
        // manual right-rule 2-fold multifork: second fork into the cell
        // immediately right of the first foot
        let g = Diagram::grid(1, 1);
        let cell = g.cells()[0].clone();
        let top = cell.top;
        let (after1, foot1) = g.insert_fork_raw(&cell).unwrap();
        let right_cell =
            after1.cells.iter().find(|c| c.top == top && c.left == foot1).cloned().unwrap();
        let right_rule = after1.insert_fork(&right_cell).unwrap();
        let left_rule = g.insert_multifork(&cell, 2).unwrap();
        assert!(is_isomorphic(&right_rule.to_poset(), &left_rule.to_poset()).is_some());
    }

    #[test]
    fn replay_is_exact() {
        let g = Diagram::grid(1, 1);
        let cell = g.cells()[0].clone();
        let d = g.insert_multifork(&cell, 2).unwrap();
        let s = script_of(&d).unwrap();
        let r = replay(&s).unwrap();
        assert_eq!(r, d);
        let empty = replay(&BuildScript { grid: (2, 3), steps: vec![] }).unwrap();
        assert_eq!(empty, Diagram::grid(2, 3));
    }

    #[test]
    fn ljc_examples() {
        let d = s7();
        let top = d.top();
        assert_eq!(d.pt(d.ljc(top)), &Pt::of(1, 1));
        let foot = (0..d.n())
            .find(|&i| d.upper_covers(i) == vec![top] && d.pt(i).u == rat_frac(1, 2))
            .unwrap();
        let lj = d.ljc(foot);
        assert_eq!(d.pt(lj), &Pt::new(rat_frac(1, 2), rat(0)));
        // grid element (i, j) has ljc at (i, 0)
        let g = Diagram::grid(2, 3);
        let e = (0..g.n()).find(|&i| g.pt(i) == &Pt::of(1, 2)).unwrap();
        assert_eq!(g.pt(g.ljc(e)), &Pt::of(1, 0));
    }

    #[test]
    fn enumerate_small_lengths() {
        let census = enumerate_diagrams(3, |_| {});
        assert_eq!(census.counts.get(&2), Some(&1));
        assert_eq!(census.counts.get(&3), Some(&2));
    }

    #[test]
    fn permuted_disjoint_steps_give_isomorphic_lattices() {
        // the left and the right cell of grid(2,2) stay distributive under
        // each other's insertion, so the two step orders commute
        let g = Diagram::grid(2, 2);
        let c1 = g.find_cell_by_bottom(&Pt::of(1, 0)).unwrap();
        let d1 = g.insert_multifork(&c1, 1).unwrap();
        let c2 = d1.find_cell_by_bottom(&Pt::of(0, 1)).unwrap();
        let a = d1.insert_multifork(&c2, 1).unwrap();
        let c2b = g.find_cell_by_bottom(&Pt::of(0, 1)).unwrap();
        let d2 = g.insert_multifork(&c2b, 1).unwrap();
        let c1b = d2.find_cell_by_bottom(&Pt::of(1, 0)).unwrap();
        let b = d2.insert_multifork(&c1b, 1).unwrap();
        assert!(is_isomorphic(&a.to_poset(), &b.to_poset()).is_some());
    }
}
