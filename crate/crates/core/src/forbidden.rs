//! The crown-with-two-fences and crown-with-diamonds-and-emeralds gadget
//! posets, and the corresponding forbidden-subposet properties of candidate
//! congruence posets.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::order::{
    check_morphism, find_morphism, Morphism, MorphismSpec, OrderError, Poset,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForbiddenError {
    #[error("gadget order must be at least {0}")]
    OrderTooSmall(usize),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Half-integer indices modulo `n`: the values `0, 0.5, ..., n - 0.5` with
/// addition mod `n`, stored as doubled integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfIndex {
    /// twice the value, in `0..2n`
    pub doubled: u32,
    pub modulus: u32,
}

impl HalfIndex {
    pub fn new_int(i: i64, n: u32) -> Self {
        HalfIndex { doubled: (2 * i).rem_euclid(2 * n as i64) as u32, modulus: n }
    }

    pub fn new_half(doubled: i64, n: u32) -> Self {
        HalfIndex { doubled: doubled.rem_euclid(2 * n as i64) as u32, modulus: n }
    }

    pub fn add(&self, other: HalfIndex) -> HalfIndex {
        assert_eq!(self.modulus, other.modulus);
        HalfIndex::new_half(self.doubled as i64 + other.doubled as i64, self.modulus)
    }

    pub fn sub(&self, other: HalfIndex) -> HalfIndex {
        assert_eq!(self.modulus, other.modulus);
        HalfIndex::new_half(self.doubled as i64 - other.doubled as i64, self.modulus)
    }

    pub fn label(&self) -> String {
        if self.doubled % 2 == 0 {
            format!("{}", self.doubled / 2)
        } else {
            format!("{}.5", self.doubled / 2)
        }
    }
}

/// Crown with two fences of order `n`: elements `a_i, b_i, c_i, d_i` for
/// `i` mod `n` and `x_j, y_j` for `j` in `0..n-1`, with `6n - 2` elements.
pub fn ctf(n: u32) -> Result<Poset, ForbiddenError> {
    if n < 2 {
        return Err(ForbiddenError::OrderTooSmall(2));
    }
    let nn = n as usize;
    let mut labels = Vec::new();
    for f in ["a", "b", "c", "d"] {
        for i in 0..nn {
            labels.push(format!("{f}{i}"));
        }
    }
    for f in ["x", "y"] {
        for j in 0..nn - 1 {
            labels.push(format!("{f}{j}"));
        }
    }
    let mut covers = Vec::new();
    for i in 0..nn {
        let i1 = (i + 1) % nn;
        covers.push((format!("c{i}"), format!("a{i}")));
        covers.push((format!("c{i}"), format!("b{i}")));
        covers.push((format!("d{i}"), format!("b{i}")));
        covers.push((format!("d{i}"), format!("a{i1}")));
    }
    for j in 0..nn - 1 {
        covers.push((format!("x{j}"), format!("c{j}")));
        covers.push((format!("x{j}"), format!("c{}", j + 1)));
        covers.push((format!("y{j}"), format!("d{j}")));
        covers.push((format!("y{j}"), format!("d{}", j + 1)));
    }
    Ok(Poset::new(labels, covers)?)
}

/// Crown with diamonds and emeralds of order `n`, on `4n` elements over the
/// half-integer index group mod `n`: maximal elements `a_i`, atoms
/// `b_{i+0.5}`, diamonds `d_{i,i+1.5}`, emeralds `e_{i,i-1.5}`.
pub fn cde(n: u32) -> Result<Poset, ForbiddenError> {
    if n < 3 {
        return Err(ForbiddenError::OrderTooSmall(3));
    }
    let b_label = |h: HalfIndex| format!("b{}", h.label());
    let mut labels = Vec::new();
    let mut covers = Vec::new();
    for i in 0..n as i64 {
        labels.push(format!("a{i}"));
        let half = HalfIndex::new_half(2 * i + 1, n); // i + 0.5
        labels.push(b_label(half));
        labels.push(format!("d{i}_{}", HalfIndex::new_half(2 * i + 3, n).label()));
        labels.push(format!("e{i}_{}", HalfIndex::new_half(2 * i - 3, n).label()));
    }
    for i in 0..n as i64 {
        let lo = HalfIndex::new_half(2 * i - 1, n); // i - 0.5
        let hi = HalfIndex::new_half(2 * i + 1, n); // i + 0.5
        let dtag = HalfIndex::new_half(2 * i + 3, n); // i + 1.5
        let etag = HalfIndex::new_half(2 * i - 3, n); // i - 1.5
        covers.push((b_label(lo), format!("a{i}")));
        covers.push((b_label(hi), format!("a{i}")));
        covers.push((format!("d{i}_{}", dtag.label()), format!("a{i}")));
        covers.push((format!("d{i}_{}", dtag.label()), b_label(dtag)));
        covers.push((format!("e{i}_{}", etag.label()), format!("a{i}")));
        covers.push((format!("e{i}_{}", etag.label()), b_label(etag)));
    }
    Ok(Poset::new(labels, covers)?)
}

pub fn cde_diamonds(n: u32) -> BTreeSet<String> {
    (0..n as i64)
        .map(|i| format!("d{i}_{}", HalfIndex::new_half(2 * i + 3, n).label()))
        .collect()
}

pub fn cde_emeralds(n: u32) -> BTreeSet<String> {
    (0..n as i64)
        .map(|i| format!("e{i}_{}", HalfIndex::new_half(2 * i - 3, n).label()))
        .collect()
}

/// Source covers whose upper end is a maximal element `a_i`.
pub fn cde_coatomic_edges(n: u32) -> BTreeSet<(String, String)> {
    let p = cde(n).expect("n >= 3");
    p.cover_pairs()
        .into_iter()
        .filter(|(_, up)| up.starts_with('a'))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropertyVerdict {
    /// no forbidden map exists
    Holds,
    /// the gadget is too large to map into the poset at all
    HoldsTrivially,
    Fails(Morphism),
    /// the search budget ran out
    Inconclusive,
}

impl PropertyVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PropertyVerdict::Holds | PropertyVerdict::HoldsTrivially)
    }
}

fn spec_ctf() -> MorphismSpec {
    MorphismSpec {
        injective: true,
        reflect_order: true,
        cover_preserving: true,
        maximum_preserving: true,
        ..Default::default()
    }
}

fn spec_cde(n: u32) -> MorphismSpec {
    MorphismSpec {
        collapse_classes: Some(vec![cde_diamonds(n), cde_emeralds(n)]),
        coatomic_edges: Some(cde_coatomic_edges(n)),
        ..Default::default()
    }
}

/// The crown-with-two-fences property: no cover-preserving and
/// maximum-preserving embedding of `ctf(n)` into `p`.  A returned witness is
/// re-checked by the standalone verifier before it is reported.
pub fn has_ctf_property(
    p: &Poset,
    n: u32,
    budget: Option<u64>,
) -> Result<PropertyVerdict, ForbiddenError> {
    let gadget = ctf(n)?;
    if gadget.len() > p.len() {
        return Ok(PropertyVerdict::HoldsTrivially);
    }
    let spec = spec_ctf();
    match find_morphism(&gadget, p, &spec, budget) {
        Ok(None) => Ok(PropertyVerdict::Holds),
        Ok(Some(m)) => {
            assert!(
                check_morphism(&gadget, p, &spec, &m),
                "witness failed independent re-check"
            );
            Ok(PropertyVerdict::Fails(m))
        }
        Err(OrderError::Budget(_)) => Ok(PropertyVerdict::Inconclusive),
        Err(e) => Err(e.into()),
    }
}

/// The crown-with-diamonds-and-emeralds property: no order-preserving map of
/// `cde(n)` into `p` whose restrictions away from the diamonds and away from
/// the emeralds are order embeddings and which maps coatomic edges to covers.
pub fn has_cde_property(
    p: &Poset,
    n: u32,
    budget: Option<u64>,
) -> Result<PropertyVerdict, ForbiddenError> {
    let gadget = cde(n)?;
    // restrictions to non-diamonds (3n elements) must be injective
    if 3 * (n as usize) > p.len() {
        return Ok(PropertyVerdict::HoldsTrivially);
    }
    let spec = spec_cde(n);
    match find_morphism(&gadget, p, &spec, budget) {
        Ok(None) => Ok(PropertyVerdict::Holds),
        Ok(Some(m)) => {
            assert!(
                check_morphism(&gadget, p, &spec, &m),
                "witness failed independent re-check"
            );
            Ok(PropertyVerdict::Fails(m))
        }
        Err(OrderError::Budget(_)) => Ok(PropertyVerdict::Inconclusive),
        Err(e) => Err(e.into()),
    }
}

#[derive(Clone, Debug)]
pub struct PropertyRow {
    pub property: &'static str,
    pub n: u32,
    pub verdict: PropertyVerdict,
}

/// Evaluates the two property families for all feasible orders up to
/// `n_max`; infeasibly large gadgets are reported as holding trivially.
pub fn property_report(
    p: &Poset,
    n_max: u32,
    budget: Option<u64>,
) -> Result<Vec<PropertyRow>, ForbiddenError> {
    let mut rows = Vec::new();
    for n in 2..=n_max {
        rows.push(PropertyRow { property: "CTF", n, verdict: has_ctf_property(p, n, budget)? });
    }
    for n in 3..=n_max {
        rows.push(PropertyRow { property: "CDE", n, verdict: has_cde_property(p, n, budget)? });
    }
    Ok(rows)
}
