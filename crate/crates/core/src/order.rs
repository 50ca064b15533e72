//! Finite posets over opaque string labels, with a constrained morphism
//! search engine, canonical forms, and downset (Birkhoff) lattices.
//!
//! Labels are kept as strings externally; everything internal runs on dense
//! integer indices.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("cover relation contains a cycle")]
    Cycle,
    #[error("cover ({0}, {1}) is transitively implied and not a cover")]
    NotReduced(String, String),
    #[error("cover ({0}, {0}) is reflexive")]
    ReflexiveCover(String),
    #[error("size guard exceeded: {0}")]
    Budget(String),
    #[error("inconsistent morphism spec: {0}")]
    BadSpec(String),
}

/// A finite poset given by its cover relation (transitive reduction).
#[derive(Clone, Debug)]
pub struct Poset {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    covers: Vec<(usize, usize)>,
    le: Vec<Vec<bool>>,
}

impl Poset {
    /// Builds a poset from labels and cover pairs.  The pairs must be exactly
    /// the transitive reduction of the order they generate.
    pub fn new<L, P>(labels: L, covers: P) -> Result<Poset, OrderError>
    where
        L: IntoIterator<Item = String>,
        P: IntoIterator<Item = (String, String)>,
    {
        let labels: Vec<String> = labels.into_iter().collect();
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(OrderError::DuplicateLabel(l.clone()));
            }
        }
        let mut pairs = Vec::new();
        for (a, b) in covers {
            let ia = *index.get(&a).ok_or_else(|| OrderError::UnknownLabel(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| OrderError::UnknownLabel(b.clone()))?;
            if ia == ib {
                return Err(OrderError::ReflexiveCover(a));
            }
            pairs.push((ia, ib));
        }
        pairs.sort();
        pairs.dedup();
        let n = labels.len();
        let le = closure(n, &pairs)?;
        // reject covers that are not covers of the generated order
        for &(a, b) in &pairs {
            for c in 0..n {
                if c != a && c != b && le[a][c] && le[c][b] {
                    return Err(OrderError::NotReduced(
                        labels[a].clone(),
                        labels[b].clone(),
                    ));
                }
            }
        }
        Ok(Poset { labels, index, covers: pairs, le })
    }

    /// Builds a poset from an arbitrary acyclic relation by closing it and
    /// taking the transitive reduction.
    pub fn from_relation<L, P>(labels: L, pairs: P) -> Result<Poset, OrderError>
    where
        L: IntoIterator<Item = String>,
        P: IntoIterator<Item = (String, String)>,
    {
        let labels: Vec<String> = labels.into_iter().collect();
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(OrderError::DuplicateLabel(l.clone()));
            }
        }
        let mut raw = Vec::new();
        for (a, b) in pairs {
            let ia = *index.get(&a).ok_or_else(|| OrderError::UnknownLabel(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| OrderError::UnknownLabel(b.clone()))?;
            if ia != ib {
                raw.push((ia, ib));
            }
        }
        let n = labels.len();
        let le = closure(n, &raw)?;
        let covers = reduction(n, &le);
        Ok(Poset { labels, index, covers, le })
    }

    pub fn chain(k: usize) -> Poset {
        let labels: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
        let covers: Vec<(String, String)> =
            (0..k.saturating_sub(1)).map(|i| (format!("c{i}"), format!("c{}", i + 1))).collect();
        Poset::new(labels, covers).unwrap()
    }

    pub fn antichain(k: usize) -> Poset {
        let labels: Vec<String> = (0..k).map(|i| format!("a{i}")).collect();
        Poset::new(labels, Vec::new()).unwrap()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn idx(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn le_idx(&self, a: usize, b: usize) -> bool {
        self.le[a][b]
    }

    pub fn lt_idx(&self, a: usize, b: usize) -> bool {
        a != b && self.le[a][b]
    }

    pub fn le(&self, a: &str, b: &str) -> bool {
        self.le_idx(self.idx(a).unwrap(), self.idx(b).unwrap())
    }

    pub fn covers_idx(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn cover_pairs(&self) -> Vec<(String, String)> {
        self.covers
            .iter()
            .map(|&(a, b)| (self.labels[a].clone(), self.labels[b].clone()))
            .collect()
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

    pub fn maximal_idx(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.le[i][j]))
            .collect()
    }

    pub fn minimal_idx(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.le[j][i]))
            .collect()
    }

    /// Length of a longest chain ending at `i` (bottom elements have height 0).
    pub fn height_idx(&self, i: usize) -> usize {
        let mut memo = vec![usize::MAX; self.len()];
        self.height_rec(i, &mut memo)
    }

    fn height_rec(&self, i: usize, memo: &mut Vec<usize>) -> usize {
        if memo[i] != usize::MAX {
            return memo[i];
        }
        let mut h = 0;
        for l in self.lower_covers(i) {
            h = h.max(1 + self.height_rec(l, memo));
        }
        memo[i] = h;
        h
    }

    pub fn heights(&self) -> Vec<usize> {
        let mut memo = vec![usize::MAX; self.len()];
        (0..self.len()).map(|i| self.height_rec(i, &mut memo)).collect()
    }

    /// Induced subposet on the given indices, keeping labels.
    pub fn restrict(&self, keep: &[usize]) -> Poset {
        let keep_set: BTreeSet<usize> = keep.iter().copied().collect();
        let labels: Vec<String> = keep_set.iter().map(|&i| self.labels[i].clone()).collect();
        let mut pairs = Vec::new();
        for &a in &keep_set {
            for &b in &keep_set {
                if a != b && self.le[a][b] {
                    pairs.push((self.labels[a].clone(), self.labels[b].clone()));
                }
            }
        }
        Poset::from_relation(labels, pairs).expect("induced order is acyclic")
    }

    /// All up-sets (upward closed subsets) as sorted index vectors.
    pub fn up_sets(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        assert!(n <= 63, "up-set enumeration limited to 63 elements");
        let mut result = Vec::new();
        // grow upward: a set is an up-set iff with every element it has all
        // elements above it
        let mut stack: Vec<u64> = vec![0];
        let mut seen: BTreeSet<u64> = BTreeSet::new();
        seen.insert(0);
        while let Some(mask) = stack.pop() {
            result.push(mask);
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    continue;
                }
                // adding i keeps up-closure iff everything above i is in
                let ok = (0..n).all(|j| !self.lt_idx(i, j) || mask & (1 << j) != 0);
                if ok {
                    let m2 = mask | (1 << i);
                    if seen.insert(m2) {
                        stack.push(m2);
                    }
                }
            }
        }
        result
            .into_iter()
            .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect())
            .collect()
    }

    /// Relabels every element, producing an isomorphic poset.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Poset {
        let labels: Vec<String> = self.labels.iter().map(|l| f(l)).collect();
        let covers = self
            .covers
            .iter()
            .map(|&(a, b)| (f(&self.labels[a]), f(&self.labels[b])))
            .collect::<Vec<_>>();
        Poset::new(labels, covers).expect("relabeling preserves structure")
    }
}

fn closure(n: usize, pairs: &[(usize, usize)]) -> Result<Vec<Vec<bool>>, OrderError> {
    let mut le = vec![vec![false; n]; n];
    for i in 0..n {
        le[i][i] = true;
    }
    for &(a, b) in pairs {
        le[a][b] = true;
    }
    // Floyd-Warshall style reachability
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
    for i in 0..n {
        for j in 0..n {
            if i != j && le[i][j] && le[j][i] {
                return Err(OrderError::Cycle);
            }
        }
    }
    Ok(le)
}

fn reduction(n: usize, le: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let mut covers = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b || !le[a][b] {
                continue;
            }
            let mut is_cover = true;
            for c in 0..n {
                if c != a && c != b && le[a][c] && le[c][b] {
                    is_cover = false;
                    break;
                }
            }
            if is_cover {
                covers.push((a, b));
            }
        }
    }
    covers.sort();
    covers
}

/// Full order relation of `p` as label pairs, reflexive pairs included.
pub fn order_of(p: &Poset) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for a in 0..p.len() {
        for b in 0..p.len() {
            if p.le_idx(a, b) {
                out.insert((p.label(a).to_string(), p.label(b).to_string()));
            }
        }
    }
    out
}

/// Elements with empty strict up-set.
pub fn maximal_elements(p: &Poset) -> BTreeSet<String> {
    p.maximal_idx().iter().map(|&i| p.label(i).to_string()).collect()
}

/// A map between posets, by label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub map: BTreeMap<String, String>,
}

/// Constraint set for `find_morphism`.  The base requirement, always on, is
/// order preservation: `x <= y` implies `phi(x) <= phi(y)`.
#[derive(Clone, Debug, Default)]
pub struct MorphismSpec {
    pub injective: bool,
    /// Order reflection: `phi(x) <= phi(y)` implies `x <= y`.  Together with
    /// `injective` this is an order embedding.
    pub reflect_order: bool,
    /// Covers map to covers and conversely: `x ≺ y` iff `phi(x) ≺ phi(y)`.
    pub cover_preserving: bool,
    /// Maximal elements of the source map to maximal elements of the target.
    pub maximum_preserving: bool,
    /// Source covers that must map to covers of the target.
    pub coatomic_edges: Option<BTreeSet<(String, String)>>,
    /// Disjoint element families inside which identification is permitted:
    /// for each family `C`, the restriction of the map to the complement of
    /// `C` must be injective and order reflecting.
    pub collapse_classes: Option<Vec<BTreeSet<String>>>,
}

impl MorphismSpec {
    pub fn embedding() -> Self {
        MorphismSpec { injective: true, reflect_order: true, ..Default::default() }
    }

    fn validate(&self, src: &Poset) -> Result<(), OrderError> {
        if let Some(classes) = &self.collapse_classes {
            for (i, c) in classes.iter().enumerate() {
                for l in c {
                    if src.idx(l).is_none() {
                        return Err(OrderError::UnknownLabel(l.clone()));
                    }
                }
                for d in classes.iter().skip(i + 1) {
                    if c.intersection(d).next().is_some() {
                        return Err(OrderError::BadSpec(
                            "collapse classes overlap".to_string(),
                        ));
                    }
                }
            }
        }
        if let Some(edges) = &self.coatomic_edges {
            for (a, b) in edges {
                let ia = src.idx(a).ok_or_else(|| OrderError::UnknownLabel(a.clone()))?;
                let ib = src.idx(b).ok_or_else(|| OrderError::UnknownLabel(b.clone()))?;
                if !src.is_cover(ia, ib) {
                    return Err(OrderError::BadSpec(format!(
                        "coatomic edge ({a}, {b}) is not a cover of the source"
                    )));
                }
            }
        }
        Ok(())
    }
}

struct SearchCtx<'a> {
    src: &'a Poset,
    dst: &'a Poset,
    spec: &'a MorphismSpec,
    order: Vec<usize>,
    dst_maximal: Vec<bool>,
    src_maximal: Vec<bool>,
    coatomic: BTreeSet<(usize, usize)>,
    /// pair_constrained[a][b]: injectivity and reflection apply to (a, b)
    /// because some collapse-class complement contains both.
    pair_constrained: Vec<Vec<bool>>,
    up_count_src: Vec<usize>,
    down_count_src: Vec<usize>,
    up_count_dst: Vec<usize>,
    down_count_dst: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
}

/// Searches for a morphism satisfying `spec`.  The search is a complete
/// backtracking enumeration: `Ok(None)` means no morphism exists, unless a
/// node budget was given and exhausted, which is reported as an error.
pub fn find_morphism(
    src: &Poset,
    dst: &Poset,
    spec: &MorphismSpec,
    budget: Option<u64>,
) -> Result<Option<Morphism>, OrderError> {
    spec.validate(src)?;
    let ns = src.len();
    if ns == 0 {
        return Ok(Some(Morphism { map: BTreeMap::new() }));
    }
    if dst.is_empty() {
        return Ok(None);
    }

    // processing order: most-constrained first, then grow along comparabilities
    let mut order: Vec<usize> = Vec::with_capacity(ns);
    let mut placed = vec![false; ns];
    let degree = |i: usize| -> usize {
        (0..ns).filter(|&j| j != i && (src.le_idx(i, j) || src.le_idx(j, i))).count()
    };
    while order.len() < ns {
        let mut best: Option<(usize, usize, usize)> = None; // (linked, degree, idx) max
        for i in 0..ns {
            if placed[i] {
                continue;
            }
            let linked = order
                .iter()
                .filter(|&&j| src.le_idx(i, j) || src.le_idx(j, i))
                .count();
            let key = (linked, degree(i));
            let better = match best {
                None => true,
                Some((bl, bd, bi)) => {
                    (key.0, key.1, std::cmp::Reverse(src.label(i)))
                        > (bl, bd, std::cmp::Reverse(src.label(bi)))
                }
            };
            if better {
                best = Some((key.0, key.1, i));
            }
        }
        let (_, _, pick) = best.unwrap();
        placed[pick] = true;
        order.push(pick);
    }

    let classes_idx: Vec<BTreeSet<usize>> = spec
        .collapse_classes
        .as_ref()
        .map(|cs| {
            cs.iter()
                .map(|c| c.iter().map(|l| src.idx(l).unwrap()).collect())
                .collect()
        })
        .unwrap_or_default();
    let mut pair_constrained = vec![vec![false; ns]; ns];
    if spec.collapse_classes.is_some() {
        for a in 0..ns {
            for b in 0..ns {
                pair_constrained[a][b] = classes_idx
                    .iter()
                    .any(|c| !c.contains(&a) && !c.contains(&b));
            }
        }
    }

    let coatomic: BTreeSet<(usize, usize)> = spec
        .coatomic_edges
        .as_ref()
        .map(|es| {
            es.iter()
                .map(|(a, b)| (src.idx(a).unwrap(), src.idx(b).unwrap()))
                .collect()
        })
        .unwrap_or_default();

    let strict_up = |p: &Poset, i: usize| (0..p.len()).filter(|&j| p.lt_idx(i, j)).count();
    let strict_down = |p: &Poset, i: usize| (0..p.len()).filter(|&j| p.lt_idx(j, i)).count();

    let mut ctx = SearchCtx {
        src,
        dst,
        spec,
        order,
        dst_maximal: {
            let mx = dst.maximal_idx();
            let mut v = vec![false; dst.len()];
            for i in mx {
                v[i] = true;
            }
            v
        },
        src_maximal: {
            let mx = src.maximal_idx();
            let mut v = vec![false; ns];
            for i in mx {
                v[i] = true;
            }
            v
        },
        coatomic,
        pair_constrained,
        up_count_src: (0..ns).map(|i| strict_up(src, i)).collect(),
        down_count_src: (0..ns).map(|i| strict_down(src, i)).collect(),
        up_count_dst: (0..dst.len()).map(|i| strict_up(dst, i)).collect(),
        down_count_dst: (0..dst.len()).map(|i| strict_down(dst, i)).collect(),
        nodes: 0,
        budget,
    };

    let mut assign: Vec<Option<usize>> = vec![None; ns];
    let mut used = vec![false; dst.len()];
    let found = search(&mut ctx, 0, &mut assign, &mut used)?;
    if !found {
        return Ok(None);
    }
    let map = assign
        .iter()
        .enumerate()
        .map(|(i, y)| (src.label(i).to_string(), dst.label(y.unwrap()).to_string()))
        .collect();
    Ok(Some(Morphism { map }))
}

fn search(
    ctx: &mut SearchCtx,
    depth: usize,
    assign: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
) -> Result<bool, OrderError> {
    if depth == ctx.order.len() {
        return Ok(true);
    }
    let x = ctx.order[depth];
    // candidates sorted by label for deterministic witnesses
    let mut cands: Vec<usize> = (0..ctx.dst.len()).collect();
    cands.sort_by(|&a, &b| ctx.dst.label(a).cmp(ctx.dst.label(b)));
    for y in cands {
        if let Some(b) = ctx.budget {
            ctx.nodes += 1;
            if ctx.nodes > b {
                return Err(OrderError::Budget(format!(
                    "morphism search exceeded {b} node expansions"
                )));
            }
        }
        if !candidate_ok(ctx, x, y, assign, used) {
            continue;
        }
        assign[x] = Some(y);
        let was_used = used[y];
        used[y] = true;
        if search(ctx, depth + 1, assign, used)? {
            return Ok(true);
        }
        assign[x] = None;
        used[y] = was_used;
    }
    Ok(false)
}

fn candidate_ok(
    ctx: &SearchCtx,
    x: usize,
    y: usize,
    assign: &[Option<usize>],
    used: &[bool],
) -> bool {
    let spec = ctx.spec;
    let src = ctx.src;
    let dst = ctx.dst;
    if spec.injective && used[y] {
        return false;
    }
    if spec.maximum_preserving && ctx.src_maximal[x] && !ctx.dst_maximal[y] {
        return false;
    }
    // cardinality pruning, valid whenever the map must be globally injective
    if spec.injective
        && (ctx.up_count_dst[y] < ctx.up_count_src[x]
            || ctx.down_count_dst[y] < ctx.down_count_src[x])
    {
        return false;
    }
    for (z, fz) in assign.iter().enumerate() {
        let fz = match fz {
            Some(f) => *f,
            None => continue,
        };
        // base order preservation
        if src.le_idx(x, z) && !dst.le_idx(y, fz) {
            return false;
        }
        if src.le_idx(z, x) && !dst.le_idx(fz, y) {
            return false;
        }
        if spec.reflect_order {
            if dst.le_idx(y, fz) && !src.le_idx(x, z) {
                return false;
            }
            if dst.le_idx(fz, y) && !src.le_idx(z, x) {
                return false;
            }
        }
        if spec.cover_preserving {
            if src.is_cover(x, z) != dst.is_cover(y, fz) {
                return false;
            }
            if src.is_cover(z, x) != dst.is_cover(fz, y) {
                return false;
            }
        }
        if ctx.coatomic.contains(&(x, z)) && !dst.is_cover(y, fz) {
            return false;
        }
        if ctx.coatomic.contains(&(z, x)) && !dst.is_cover(fz, y) {
            return false;
        }
        if spec.collapse_classes.is_some() && ctx.pair_constrained[x][z] {
            if y == fz {
                return false;
            }
            if dst.le_idx(y, fz) && !src.le_idx(x, z) {
                return false;
            }
            if dst.le_idx(fz, y) && !src.le_idx(z, x) {
                return false;
            }
        }
    }
    true
}

/// Direct constraint verification of a finished morphism; a separate code
/// path from the search, used to re-check witnesses.
pub fn check_morphism(src: &Poset, dst: &Poset, spec: &MorphismSpec, m: &Morphism) -> bool {
    if spec.validate(src).is_err() {
        return false;
    }
    let ns = src.len();
    let mut img = vec![usize::MAX; ns];
    for (k, v) in &m.map {
        let (Some(i), Some(j)) = (src.idx(k), dst.idx(v)) else {
            return false;
        };
        img[i] = j;
    }
    if img.iter().any(|&j| j == usize::MAX) {
        return false;
    }
    let classes_idx: Vec<BTreeSet<usize>> = spec
        .collapse_classes
        .as_ref()
        .map(|cs| cs.iter().map(|c| c.iter().map(|l| src.idx(l).unwrap()).collect()).collect())
        .unwrap_or_default();
    for a in 0..ns {
        if spec.maximum_preserving {
            let src_max = (0..ns).all(|j| j == a || !src.lt_idx(a, j));
            let dst_max = (0..dst.len()).all(|j| j == img[a] || !dst.lt_idx(img[a], j));
            if src_max && !dst_max {
                return false;
            }
        }
        for b in 0..ns {
            if a == b {
                continue;
            }
            if src.le_idx(a, b) && !dst.le_idx(img[a], img[b]) {
                return false;
            }
            if spec.reflect_order && dst.le_idx(img[a], img[b]) && !src.le_idx(a, b) {
                return false;
            }
            if spec.injective && img[a] == img[b] {
                return false;
            }
            if spec.cover_preserving && src.is_cover(a, b) != dst.is_cover(img[a], img[b]) {
                return false;
            }
            if let Some(edges) = &spec.coatomic_edges {
                if edges.contains(&(src.label(a).to_string(), src.label(b).to_string()))
                    && !dst.is_cover(img[a], img[b])
                {
                    return false;
                }
            }
            if spec.collapse_classes.is_some() {
                let constrained =
                    classes_idx.iter().any(|c| !c.contains(&a) && !c.contains(&b));
                if constrained {
                    if img[a] == img[b] {
                        return false;
                    }
                    if dst.le_idx(img[a], img[b]) && !src.le_idx(a, b) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Order isomorphism test; returns a witness bijection when one exists.
pub fn is_isomorphic(p: &Poset, q: &Poset) -> Option<Morphism> {
    if p.len() != q.len() {
        return None;
    }
    if p.covers_idx().len() != q.covers_idx().len() {
        return None;
    }
    if canonical_form(p) != canonical_form(q) {
        return None;
    }
    let spec = MorphismSpec { injective: true, reflect_order: true, ..Default::default() };
    find_morphism(p, q, &spec, None).expect("no budget set")
}

/// Canonical form of a poset: equal outputs exactly for isomorphic posets.
///
/// Iterative partition refinement on (in-degree, out-degree, height/depth)
/// followed by a backtracking minimization over the remaining symmetry.
pub fn canonical_form(p: &Poset) -> Vec<u64> {
    let n = p.len();
    if n == 0 {
        return vec![0];
    }
    let heights = p.heights();
    let depths = {
        // height in the dual
        let mut memo = vec![usize::MAX; n];
        fn depth_rec(p: &Poset, i: usize, memo: &mut Vec<usize>) -> usize {
            if memo[i] != usize::MAX {
                return memo[i];
            }
            let mut d = 0;
            for u in p.upper_covers(i) {
                d = d.max(1 + depth_rec(p, u, memo));
            }
            memo[i] = d;
            d
        }
        (0..n).map(|i| depth_rec(p, i, &mut memo)).collect::<Vec<_>>()
    };
    let init: Vec<(usize, usize, usize, usize)> = (0..n)
        .map(|i| (heights[i], depths[i], p.lower_covers(i).len(), p.upper_covers(i).len()))
        .collect();
    let colors = refine_colors(p, &rank_by(&init));
    let mut best: Option<Vec<u64>> = None;
    canon_search(p, &colors, &mut best);
    best.unwrap()
}

fn rank_by<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).unwrap())
        .collect()
}

fn refine_colors(p: &Poset, colors: &[usize]) -> Vec<usize> {
    let n = p.len();
    let mut cur = colors.to_vec();
    loop {
        let keys: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..n)
            .map(|i| {
                let mut up: Vec<usize> = p.upper_covers(i).iter().map(|&j| cur[j]).collect();
                let mut dn: Vec<usize> = p.lower_covers(i).iter().map(|&j| cur[j]).collect();
                up.sort();
                dn.sort();
                (cur[i], up, dn)
            })
            .collect();
        let next = rank_by(&keys);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn canon_search(p: &Poset, colors: &[usize], best: &mut Option<Vec<u64>>) {
    let n = p.len();
    // find the smallest non-singleton color class
    let mut class_of: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in colors.iter().enumerate() {
        class_of.entry(c).or_default().push(i);
    }
    let target = class_of.iter().find(|(_, v)| v.len() > 1).map(|(c, v)| (*c, v.clone()));
    match target {
        None => {
            // discrete: colors give the permutation (color = position)
            let mut perm = vec![0usize; n]; // element -> position
            for (i, &c) in colors.iter().enumerate() {
                perm[i] = c;
            }
            let sig = signature(p, &perm);
            if best.is_none() || sig < *best.as_ref().unwrap() {
                *best = Some(sig);
            }
        }
        Some((_, members)) => {
            // branch once per twin class: swapping cover-twins is an
            // automorphism, so their branches yield identical signatures
            let mut reps: Vec<usize> = Vec::new();
            for &m in &members {
                if !reps.iter().any(|&r| cover_twins(p, r, m)) {
                    reps.push(m);
                }
            }
            for &m in &reps {
                let mut next = colors.to_vec();
                // individualize m: split it off its class, keeping class order
                for v in next.iter_mut() {
                    *v *= 2;
                }
                next[m] += 1;
                let next = refine_colors(p, &rank_by(&next));
                canon_search(p, &next, best);
            }
        }
    }
}

/// The transposition of `a` and `b` is an automorphism of the cover digraph.
fn cover_twins(p: &Poset, a: usize, b: usize) -> bool {
    if p.is_cover(a, b) || p.is_cover(b, a) {
        return false;
    }
    for z in 0..p.len() {
        if z == a || z == b {
            continue;
        }
        if p.is_cover(a, z) != p.is_cover(b, z) || p.is_cover(z, a) != p.is_cover(z, b) {
            return false;
        }
    }
    true
}

fn signature(p: &Poset, perm: &[usize]) -> Vec<u64> {
    let n = p.len();
    let words = n.div_ceil(64);
    let mut sig = vec![0u64; 1 + n * words];
    sig[0] = n as u64;
    for &(a, b) in p.covers_idx() {
        let (pa, pb) = (perm[a], perm[b]);
        sig[1 + pa * words + pb / 64] |= 1 << (pb % 64);
    }
    sig
}

/// Exhaustive reference mapper used to validate `find_morphism`; tries every
/// possible assignment and filters with `check_morphism`.
pub fn brute_force_morphism(src: &Poset, dst: &Poset, spec: &MorphismSpec) -> Option<Morphism> {
    let ns = src.len();
    let nd = dst.len();
    if ns == 0 {
        return Some(Morphism { map: BTreeMap::new() });
    }
    if nd == 0 {
        return None;
    }
    let mut idx = vec![0usize; ns];
    loop {
        let m = Morphism {
            map: (0..ns)
                .map(|i| (src.label(i).to_string(), dst.label(idx[i]).to_string()))
                .collect(),
        };
        if check_morphism(src, dst, spec, &m) {
            return Some(m);
        }
        // increment
        let mut i = 0;
        loop {
            if i == ns {
                return None;
            }
            idx[i] += 1;
            if idx[i] < nd {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_chain() -> Poset {
        Poset::new(
            vec!["a".into(), "b".into()],
            vec![("a".to_string(), "b".to_string())],
        )
        .unwrap()
    }

    #[test]
    fn order_of_two_chain() {
        let p = two_chain();
        let o = order_of(&p);
        assert_eq!(o.len(), 3);
        assert!(o.contains(&("a".to_string(), "b".to_string())));
    }

    #[test]
    fn order_of_antichain() {
        let p = Poset::antichain(2);
        assert_eq!(order_of(&p).len(), 2);
    }

    #[test]
    fn rejects_cycle_and_non_reduced() {
        let labels: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let cyc = Poset::from_relation(
            labels.clone(),
            vec![
                ("a".to_string(), "b".to_string()),
                ("b".to_string(), "c".to_string()),
                ("c".to_string(), "a".to_string()),
            ],
        );
        assert!(matches!(cyc, Err(OrderError::Cycle)));
        let red = Poset::new(
            labels,
            vec![
                ("a".to_string(), "b".to_string()),
                ("b".to_string(), "c".to_string()),
                ("a".to_string(), "c".to_string()),
            ],
        );
        assert!(matches!(red, Err(OrderError::NotReduced(_, _))));
    }

    #[test]
    fn maximal_of_chain() {
        let p = two_chain();
        let m = maximal_elements(&p);
        assert_eq!(m.into_iter().collect::<Vec<_>>(), vec!["b".to_string()]);
    }

    #[test]
    fn iso_reflexive_and_mirror() {
        let p = two_chain();
        assert!(is_isomorphic(&p, &p).is_some());
        let q = Poset::antichain(2);
        assert!(is_isomorphic(&p, &q).is_none());
    }

    #[test]
    fn canonical_form_on_relabelings() {
        let y = Poset::new(
            vec!["0".into(), "c".into(), "a".into(), "b".into()],
            vec![
                ("0".to_string(), "c".to_string()),
                ("c".to_string(), "a".to_string()),
                ("c".to_string(), "b".to_string()),
            ],
        )
        .unwrap();
        let y2 = y.relabel(|l| format!("zz_{l}"));
        assert_eq!(canonical_form(&y), canonical_form(&y2));
        assert_ne!(canonical_form(&two_chain()), canonical_form(&Poset::antichain(2)));
    }

    #[test]
    fn monotone_injection_into_longer_chain() {
        let c3 = Poset::chain(3);
        let c4 = Poset::chain(4);
        let spec = MorphismSpec { reflect_order: true, ..Default::default() };
        let m = find_morphism(&c3, &c4, &spec, None).unwrap();
        assert!(m.is_some());
        assert!(check_morphism(&c3, &c4, &spec, &m.unwrap()));
    }
}
