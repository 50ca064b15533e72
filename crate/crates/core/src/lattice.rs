//! Finite lattices: join/meet tables, structural predicates, and the
//! congruence machinery used as the independent oracle for the lamp
//! calculus.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::order::{canonical_form, OrderError, Poset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("not a lattice: {0}")]
    NotALattice(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("size guard exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// A finite lattice carrying its poset plus join and meet tables.
#[derive(Clone, Debug)]
pub struct Lattice {
    poset: Poset,
    join: Vec<Vec<usize>>,
    meet: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
}

impl Lattice {
    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.poset.le_idx(a, b)
    }

    pub fn label(&self, a: usize) -> &str {
        self.poset.label(a)
    }
}

/// Builds the lattice on a poset, computing join and meet tables; errors when
/// some pair lacks a least upper or greatest lower bound.
pub fn lattice_from_covers(p: &Poset) -> Result<Lattice, LatticeError> {
    let n = p.len();
    if n == 0 {
        return Err(LatticeError::NotALattice("empty poset".to_string()));
    }
    let tops = p.maximal_idx();
    if tops.len() != 1 {
        return Err(LatticeError::NotALattice(format!(
            "{} maximal elements",
            tops.len()
        )));
    }
    let bottoms = p.minimal_idx();
    if bottoms.len() != 1 {
        return Err(LatticeError::NotALattice(format!(
            "{} minimal elements",
            bottoms.len()
        )));
    }
    let mut join = vec![vec![0usize; n]; n];
    let mut meet = vec![vec![0usize; n]; n];
    for a in 0..n {
        for b in a..n {
            let uppers: Vec<usize> =
                (0..n).filter(|&c| p.le_idx(a, c) && p.le_idx(b, c)).collect();
            let least = uppers
                .iter()
                .copied()
                .find(|&c| uppers.iter().all(|&d| p.le_idx(c, d)));
            let Some(least) = least else {
                return Err(LatticeError::NotALattice(format!(
                    "elements {} and {} have no least upper bound",
                    p.label(a),
                    p.label(b)
                )));
            };
            join[a][b] = least;
            join[b][a] = least;
            let lowers: Vec<usize> =
                (0..n).filter(|&c| p.le_idx(c, a) && p.le_idx(c, b)).collect();
            let greatest = lowers
                .iter()
                .copied()
                .find(|&c| lowers.iter().all(|&d| p.le_idx(d, c)));
            let Some(greatest) = greatest else {
                return Err(LatticeError::NotALattice(format!(
                    "elements {} and {} have no greatest lower bound",
                    p.label(a),
                    p.label(b)
                )));
            };
            meet[a][b] = greatest;
            meet[b][a] = greatest;
        }
    }
    Ok(Lattice { poset: p.clone(), join, meet, bottom: bottoms[0], top: tops[0] })
}

/// Join of all upper covers of `u`; the unique cover when `u` is
/// meet-irreducible.  Errors for the top element.
pub fn cov_star(l: &Lattice, u: usize) -> Result<usize, LatticeError> {
    if u == l.top() {
        return Err(LatticeError::Domain(
        "cov* is undefined at the top element".to_string(),
    ));
    }
    let mut acc: Option<usize> = None;
    for c in l.poset().upper_covers(u) {
        acc = Some(match acc {
            None => c,
            Some(a) => l.join(a, c),
        });
    }
    Ok(acc.expect("non-top element has an upper cover"))
}

/// Nonzero join-irreducible elements: exactly one lower cover.
pub fn jir(l: &Lattice) -> Vec<usize> {
    (0..l.len()).filter(|&x| l.poset().lower_covers(x).len() == 1).collect()
}

/// Non-unit meet-irreducible elements: exactly one upper cover.
pub fn mir(l: &Lattice) -> Vec<usize> {
    (0..l.len()).filter(|&x| l.poset().upper_covers(x).len() == 1).collect()
}

pub fn height(l: &Lattice, x: usize) -> usize {
    l.poset().height_idx(x)
}

pub fn length(l: &Lattice) -> usize {
    height(l, l.top())
}

/// Semimodularity: `a ∧ b ≺ a` implies `b ≺ a ∨ b`.
pub fn is_semimodular(l: &Lattice) -> bool {
    let n = l.len();
    for a in 0..n {
        for b in 0..n {
            let m = l.meet(a, b);
            if l.poset().is_cover(m, a) && !l.poset().is_cover(b, l.join(a, b)) {
                return false;
            }
        }
    }
    true
}

/// Distributivity via the triple scan `x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z)`.
pub fn is_distributive(l: &Lattice) -> bool {
    let n = l.len();
    for x in 0..n {
        for y in 0..n {
            for z in y..n {
                let lhs = l.meet(x, l.join(y, z));
                let rhs = l.join(l.meet(x, y), l.meet(x, z));
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// Slimness: the join-irreducible elements form a union of two chains.
/// Tested as minimum chain cover <= 2 on the Jir subposet, computed by
/// bipartite matching.
pub fn is_slim(l: &Lattice) -> bool {
    let els = jir(l);
    min_chain_cover(l.poset(), &els) <= 2
}

/// Minimum number of chains covering the induced subposet on `els`
/// (Dilworth via maximum bipartite matching on the comparability graph).
fn min_chain_cover(p: &Poset, els: &[usize]) -> usize {
    let k = els.len();
    if k == 0 {
        return 0;
    }
    // edges a -> b whenever els[a] < els[b]
    let adj: Vec<Vec<usize>> = (0..k)
        .map(|a| (0..k).filter(|&b| p.lt_idx(els[a], els[b])).collect())
        .collect();
    let mut match_r = vec![usize::MAX; k];
    let mut matched = 0;
    for a in 0..k {
        let mut seen = vec![false; k];
        if augment(a, &adj, &mut match_r, &mut seen) {
            matched += 1;
        }
    }
    k - matched
}

fn augment(a: usize, adj: &[Vec<usize>], match_r: &mut [usize], seen: &mut [bool]) -> bool {
    for &b in &adj[a] {
        if seen[b] {
            continue;
        }
        seen[b] = true;
        if match_r[b] == usize::MAX || augment(match_r[b], adj, match_r, seen) {
            match_r[b] = a;
            return true;
        }
    }
    false
}

/// Corners: doubly irreducible elements (in Jir ∩ Mir).
pub fn corners(l: &Lattice) -> Vec<usize> {
    let j: BTreeSet<usize> = jir(l).into_iter().collect();
    mir(l).into_iter().filter(|x| j.contains(x)).collect()
}

/// Rectangularity: exactly two corners and they are complementary.
pub fn is_rectangular(l: &Lattice) -> bool {
    let c = corners(l);
    if c.len() != 2 {
        return false;
    }
    l.meet(c[0], c[1]) == l.bottom() && l.join(c[0], c[1]) == l.top()
}

/// Patch property: rectangular with both corners coatoms.
pub fn is_patch(l: &Lattice) -> bool {
    if !is_rectangular(l) {
        return false;
    }
    corners(l).iter().all(|&c| l.poset().is_cover(c, l.top()))
}

/// A cover-preserving diamond: `o ≺ x, y, z ≺ i` with three middle elements.
pub fn has_cover_preserving_m3(l: &Lattice) -> bool {
    let n = l.len();
    for o in 0..n {
        let ups = l.poset().upper_covers(o);
        if ups.len() < 3 {
            continue;
        }
        for i in 0..n {
            if !l.poset().lt_idx(o, i) {
                continue;
            }
            let mid = ups.iter().filter(|&&x| l.poset().is_cover(x, i)).count();
            if mid >= 3 {
                return true;
            }
        }
    }
    false
}

/// A partition of the element set compatible with join and meet.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CongruencePartition {
    /// class representative (smallest member index) per element
    pub class_of: Vec<usize>,
}

impl CongruencePartition {
    fn from_uf(mut uf: UnionFind) -> Self {
        let n = uf.parent.len();
        let mut min_of = vec![usize::MAX; n];
        for i in 0..n {
            let r = uf.find(i);
            min_of[r] = min_of[r].min(i);
        }
        let class_of = (0..n).map(|i| min_of[uf.find(i)]).collect();
        CongruencePartition { class_of }
    }

    pub fn identity(n: usize) -> Self {
        CongruencePartition { class_of: (0..n).collect() }
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    pub fn blocks(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &c) in self.class_of.iter().enumerate() {
            out.entry(c).or_default().push(i);
        }
        out
    }

    pub fn block_count(&self) -> usize {
        self.blocks().len()
    }

    /// Refinement order: every block of `self` is inside a block of `other`.
    pub fn leq(&self, other: &CongruencePartition) -> bool {
        let n = self.class_of.len();
        (0..n).all(|i| other.same(i, self.class_of[i]))
    }

    /// Substitution property: merging respects both operations.
    pub fn is_congruence(&self, l: &Lattice) -> bool {
        let n = l.len();
        for a in 0..n {
            for b in (a + 1)..n {
                if !self.same(a, b) {
                    continue;
                }
                for c in 0..n {
                    if !self.same(l.join(a, c), l.join(b, c))
                        || !self.same(l.meet(a, c), l.meet(b, c))
                    {
                        return false;
                    }
                }
            }
        }
        true
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            None
        } else {
            self.parent[ra] = rb;
            Some((ra, rb))
        }
    }
}

/// Least congruence collapsing `a <= b`: iterates the unary translations
/// `x -> x ∨ c` and `x -> x ∧ c` over merged pairs until a fixpoint.
pub fn principal_congruence(
    l: &Lattice,
    a: usize,
    b: usize,
) -> Result<CongruencePartition, LatticeError> {
    if !l.le(a, b) {
        return Err(LatticeError::Domain(format!(
            "principal congruence requires {} <= {}",
            l.label(a),
            l.label(b)
        )));
    }
    let n = l.len();
    let mut uf = UnionFind::new(n);
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    if uf.union(a, b).is_some() {
        queue.push_back((a, b));
    }
    while let Some((x, y)) = queue.pop_front() {
        for c in 0..n {
            let (jx, jy) = (l.join(x, c), l.join(y, c));
            if uf.find(jx) != uf.find(jy) {
                uf.union(jx, jy);
                queue.push_back((jx, jy));
            }
            let (mx, my) = (l.meet(x, c), l.meet(y, c));
            if uf.find(mx) != uf.find(my) {
                uf.union(mx, my);
                queue.push_back((mx, my));
            }
        }
    }
    Ok(CongruencePartition::from_uf(uf))
}

/// The poset of nonzero join-irreducible congruences, realized as the
/// distinct principal congruences of covers ordered by refinement.
///
/// Also returns, per cover pair, the index of its congruence in the poset.
pub fn jir_con_poset_with_map(
    l: &Lattice,
) -> (Poset, BTreeMap<(usize, usize), usize>) {
    let mut distinct: Vec<CongruencePartition> = Vec::new();
    let mut gen_pair: Vec<(usize, usize)> = Vec::new();
    let mut cover_map: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &(a, b) in l.poset().covers_idx() {
        let theta = principal_congruence(l, a, b).expect("covers are comparable");
        let pos = distinct.iter().position(|t| *t == theta);
        let idx = match pos {
            Some(i) => i,
            None => {
                distinct.push(theta);
                gen_pair.push((a, b));
                distinct.len() - 1
            }
        };
        cover_map.insert((a, b), idx);
    }
    let labels: Vec<String> = gen_pair
        .iter()
        .map(|&(a, b)| format!("con({},{})", l.label(a), l.label(b)))
        .collect();
    let mut pairs = Vec::new();
    for i in 0..distinct.len() {
        for j in 0..distinct.len() {
            if i != j && distinct[i].leq(&distinct[j]) {
                pairs.push((labels[i].clone(), labels[j].clone()));
            }
        }
    }
    let poset = Poset::from_relation(labels, pairs).expect("refinement is a partial order");
    (poset, cover_map)
}

pub fn jir_con_poset(l: &Lattice) -> Poset {
    jir_con_poset_with_map(l).0
}

/// Lattice of all downsets of `p`, ordered by inclusion.
pub fn downset_lattice(p: &Poset, cap: usize) -> Result<Lattice, LatticeError> {
    let n = p.len();
    if n > 63 {
        return Err(LatticeError::Budget(format!(
            "downset lattice of a {n}-element poset"
        )));
    }
    let mut masks: Vec<u64> = Vec::new();
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut stack = vec![0u64];
    seen.insert(0);
    while let Some(m) = stack.pop() {
        masks.push(m);
        if masks.len() > cap {
            return Err(LatticeError::Budget(format!(
                "more than {cap} downsets"
            )));
        }
        for i in 0..n {
            if m & (1 << i) != 0 {
                continue;
            }
            let ok = (0..n).all(|j| !p.lt_idx(j, i) || m & (1 << j) != 0);
            if ok {
                let m2 = m | (1 << i);
                if seen.insert(m2) {
                    stack.push(m2);
                }
            }
        }
    }
    masks.sort();
    let label_of = |m: u64| -> String {
        let mut members: Vec<&str> = (0..n).filter(|&i| m & (1 << i) != 0).map(|i| p.label(i)).collect();
        members.sort();
        format!("{{{}}}", members.join(","))
    };
    let labels: Vec<String> = masks.iter().map(|&m| label_of(m)).collect();
    let mut pairs = Vec::new();
    for (i, &mi) in masks.iter().enumerate() {
        for (j, &mj) in masks.iter().enumerate() {
            if i != j && mi & mj == mi {
                pairs.push((labels[i].clone(), labels[j].clone()));
            }
        }
    }
    let poset = Poset::from_relation(labels, pairs)?;
    lattice_from_covers(&poset)
}

/// The congruence lattice, up to isomorphism, via downsets of the
/// join-irreducible congruence poset.
pub fn con_lattice(l: &Lattice, cap: usize) -> Result<Lattice, LatticeError> {
    downset_lattice(&jir_con_poset(l), cap)
}

/// Exhaustive enumeration of all congruences as compatible partitions.
/// A deliberately independent oracle; guarded to small lattices.
pub fn congruences_exhaustive(l: &Lattice) -> Result<Vec<CongruencePartition>, LatticeError> {
    let n = l.len();
    if n > 12 {
        return Err(LatticeError::Budget(format!(
            "exhaustive congruence enumeration on {n} > 12 elements"
        )));
    }
    let mut out = Vec::new();
    // enumerate set partitions by restricted growth strings
    let mut rgs = vec![0usize; n];
    loop {
        let part = CongruencePartition {
            class_of: {
                let mut rep = vec![usize::MAX; n];
                let mut class_of = vec![0usize; n];
                for i in 0..n {
                    if rep[rgs[i]] == usize::MAX {
                        rep[rgs[i]] = i;
                    }
                    class_of[i] = rep[rgs[i]];
                }
                class_of
            },
        };
        if part.is_congruence(l) {
            out.push(part);
        }
        if !next_rgs(&mut rgs) {
            out.sort();
            return Ok(out);
        }
    }
}

fn next_rgs(rgs: &mut [usize]) -> bool {
    let n = rgs.len();
    let mut i = n;
    while i > 1 {
        i -= 1;
        let max_prefix = rgs[..i].iter().copied().max().unwrap();
        if rgs[i] <= max_prefix {
            rgs[i] += 1;
            for v in rgs[i + 1..].iter_mut() {
                *v = 0;
            }
            return true;
        }
    }
    false
}

/// Canonical form of the lattice's underlying poset; used for isomorphism
/// deduplication during enumeration.
pub fn lattice_canonical_form(l: &Lattice) -> Vec<u64> {
    canonical_form(l.poset())
}
