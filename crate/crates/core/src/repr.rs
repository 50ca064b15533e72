//! The representability pipeline: size bounds, the cost estimate for the
//! naive sweep, necessary-condition filters, and a budget-bounded exhaustive
//! script search deciding whether a finite poset is the join-irreducible
//! congruence poset of a slim rectangular lattice.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::diagram::{enumerate_diagrams, replay, BuildScript, Diagram, DiagramError};
use crate::forbidden::{has_cde_property, has_ctf_property, ForbiddenError, PropertyVerdict};
use crate::lamps::lamp_poset;
use crate::lattice::{is_distributive, jir, jir_con_poset, Lattice};
use crate::order::{canonical_form, is_isomorphic, Poset};
use crate::photon::{system_search, SearchOutcome};

#[derive(Debug, Error)]
pub enum ReprError {
    #[error("target lattice is not distributive")]
    NotDistributive,
    #[error(transparent)]
    Forbidden(#[from] ForbiddenError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("search found a lamp poset the oracle disagrees with; this falsifies the calculus")]
    OracleDisagreement,
}

/// Worst-case bounds for a target with `n` join-irreducible congruences.
/// Values are reported raw, without clamping, so small `n` can go negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub length_bound: i64,
    pub size_bound: i64,
    pub tubes_per_lamp: i64,
    pub tubes_total: i64,
}

pub fn bounds(n: u32) -> Bounds {
    let n = n as i64;
    Bounds {
        length_bound: 3 * n * n,
        size_bound: 9 * n * n * n * n,
        tubes_per_lamp: 3 * n - 4,
        tubes_total: 3 * n * n - 9 * n + 8,
    }
}

/// Magnitude of the number of slim rectangular lattices the naive sweep
/// would visit: `(e^2 / 2) * sum of (k - 2)! for k = 2 .. 3 n^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Magnitude {
    /// normalized into `[1, 10)`
    pub mantissa: f64,
    pub exp10: i64,
}

impl Magnitude {
    /// Scientific display with the given significant digits, e.g. `1.67e106`.
    pub fn display_sci(&self, sig: usize) -> String {
        format!("{:.*}e{}", sig.saturating_sub(1), self.mantissa, self.exp10)
    }

    /// Leading-zero display with the given mantissa digits, e.g.
    /// `0.167e107`.
    pub fn display_shifted(&self, sig: usize) -> String {
        let scaled = self.mantissa / 10.0;
        format!("{:.*}e{}", sig, scaled, self.exp10 + 1)
    }
}

const E_SQUARED_HALF: f64 = 3.694_528_049_465_325;

pub fn estimate_x(n: u32) -> Magnitude {
    let top = 3 * (n as u64) * (n as u64);
    let mut sum = BigUint::ZERO;
    let mut fact = BigUint::one();
    // sum of j! for j = 0 .. top - 2
    for j in 0..=(top.saturating_sub(2)) {
        if j > 0 {
            fact *= BigUint::from(j);
        }
        sum += &fact;
    }
    let digits = sum.to_string();
    let lead: f64 = digits[..digits.len().min(17)].parse::<f64>().unwrap();
    let lead_mag = digits.len().min(17) as i64 - 1;
    // sum = lead * 10^(digits.len() - 1 - lead_mag) with lead in [1, 10)
    let mut mantissa = (lead / 10f64.powi(lead_mag as i32)) * E_SQUARED_HALF;
    let mut exp10 = digits.len() as i64 - 1;
    while mantissa >= 10.0 {
        mantissa /= 10.0;
        exp10 += 1;
    }
    while mantissa < 1.0 {
        mantissa *= 10.0;
        exp10 -= 1;
    }
    Magnitude { mantissa, exp10 }
}

/// A representability target: a finite distributive lattice or directly a
/// candidate join-irreducible congruence poset.
pub enum Target {
    Lattice(Lattice),
    JirPoset(Poset),
}

impl Target {
    pub fn jir_poset(&self) -> Result<Poset, ReprError> {
        match self {
            Target::JirPoset(p) => Ok(p.clone()),
            Target::Lattice(l) => {
                if !is_distributive(l) {
                    return Err(ReprError::NotDistributive);
                }
                Ok(l.poset().restrict(&jir(l)))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct FilterResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct FilterOptions {
    /// run the abstract-system necessity search (off by default: the search
    /// only checks the pairwise-position condition, and only a fully
    /// exhausted run may reject)
    pub enable_system_filter: bool,
    pub system_budget: u64,
}

pub type PosetPlugin<'a> = (&'a str, &'a dyn Fn(&Poset) -> bool);

/// Applies the necessary-condition filters in order; each failure names its
/// filter.  All verdicts here are sound rejections.
pub fn filters(p: &Poset, opts: &FilterOptions, plugins: &[PosetPlugin]) -> Vec<FilterResult> {
    let mut out = Vec::new();
    let n = p.len();
    let max_count = p.maximal_idx().len();
    if n >= 2 {
        out.push(FilterResult {
            name: "two-boundary-lamps".to_string(),
            passed: max_count >= 2,
            detail: format!("{max_count} maximal elements"),
        });
    }
    let mut ng = 2;
    while 6 * ng - 2 <= n as u32 {
        let v = has_ctf_property(p, ng, Some(50_000_000)).unwrap_or(PropertyVerdict::Inconclusive);
        out.push(FilterResult {
            name: format!("CTF_{ng}"),
            passed: !matches!(v, PropertyVerdict::Fails(_)),
            detail: format!("{v:?}").chars().take(40).collect(),
        });
        ng += 1;
    }
    let mut ng = 3;
    while 3 * ng <= n as u32 {
        let v = has_cde_property(p, ng, Some(50_000_000)).unwrap_or(PropertyVerdict::Inconclusive);
        out.push(FilterResult {
            name: format!("CDE_{ng}"),
            passed: !matches!(v, PropertyVerdict::Fails(_)),
            detail: format!("{v:?}").chars().take(40).collect(),
        });
        ng += 1;
    }
    if opts.enable_system_filter {
        let outcome = system_search(p, opts.system_budget);
        let (passed, detail) = match outcome {
            SearchOutcome::Found(_) => (true, "system found".to_string()),
            SearchOutcome::BudgetExceeded => (true, "search truncated; no verdict".to_string()),
            SearchOutcome::Exhausted => (false, "no abstract system exists".to_string()),
        };
        out.push(FilterResult { name: "abstract-system".to_string(), passed, detail });
    }
    for (name, f) in plugins {
        out.push(FilterResult {
            name: format!("plugin:{name}"),
            passed: f(p),
            detail: String::new(),
        });
    }
    out
}

#[derive(Clone, Debug)]
pub enum Witness {
    /// chains of the given element count; they are slim planar semimodular
    /// but not rectangular (a rectangular witness needs two boundary lamps)
    TrivialChain(usize),
    Script(BuildScript),
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Representable(Witness),
    NotRepresentable(String),
    Inconclusive(String),
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub filter_log: Vec<FilterResult>,
    pub nodes_used: u64,
}

#[derive(Clone, Debug)]
pub struct DecideBudget {
    pub max_length: usize,
    pub node_budget: u64,
    pub filter_options: FilterOptions,
}

impl Default for DecideBudget {
    fn default() -> Self {
        DecideBudget {
            max_length: 12,
            node_budget: 10_000_000,
            filter_options: FilterOptions::default(),
        }
    }
}

struct SearchState<'a> {
    target: &'a Poset,
    up_sets: Vec<Vec<usize>>,
    insertions_total: usize,
    max_length: usize,
    tubes_per_lamp: u32,
    node_budget: u64,
    nodes: u64,
    truncated: bool,
    seen: std::collections::BTreeSet<Vec<u64>>,
}

/// Decides representability.
///
/// Trivial targets are answered with chain witnesses.  Otherwise the filters
/// run first, then an exhaustive search over build scripts: one grid split
/// per partition of the maximal elements, growing with one multifork per
/// missing element while the running lamp poset stays isomorphic to an
/// up-closed subset of the target.  With an unconstrained budget the search
/// space is finite and a negative answer is a completed-search certificate.
pub fn decide(t: &Target, budget: &DecideBudget) -> Result<Verdict, ReprError> {
    let p = t.jir_poset()?;
    let n = p.len();
    if n == 0 {
        return Ok(Verdict {
            outcome: Outcome::Representable(Witness::TrivialChain(1)),
            filter_log: vec![],
            nodes_used: 0,
        });
    }
    if n == 1 {
        return Ok(Verdict {
            outcome: Outcome::Representable(Witness::TrivialChain(2)),
            filter_log: vec![],
            nodes_used: 0,
        });
    }
    let log = filters(&p, &budget.filter_options, &[]);
    if let Some(f) = log.iter().find(|f| !f.passed) {
        return Ok(Verdict {
            outcome: Outcome::NotRepresentable(format!("filter {}: {}", f.name, f.detail)),
            filter_log: log,
            nodes_used: 0,
        });
    }
    if n > 40 {
        return Ok(Verdict {
            outcome: Outcome::Inconclusive(format!(
                "target with {n} elements is beyond the script search scale"
            )),
            filter_log: log,
            nodes_used: 0,
        });
    }
    let m = p.maximal_idx().len();
    let b = bounds(n as u32);
    let structural_bound = m + (n - m) * (b.tubes_per_lamp.max(1) as usize);
    let effective_length = budget.max_length.min(structural_bound.max(m));
    let mut st = SearchState {
        target: &p,
        up_sets: p.up_sets(),
        insertions_total: n - m,
        max_length: effective_length,
        tubes_per_lamp: b.tubes_per_lamp.max(1) as u32,
        node_budget: budget.node_budget,
        nodes: 0,
        truncated: effective_length < structural_bound,
        seen: std::collections::BTreeSet::new(),
    };
    let mut found: Option<BuildScript> = None;
    for c in 1..=(m / 2).max(1) as u32 {
        let dd = m as u32 - c;
        if dd < c {
            break;
        }
        if (c + dd) as usize > st.max_length {
            st.truncated = true;
            continue;
        }
        let g = Diagram::grid(c, dd);
        if let Some(script) = search(&g, 0, &mut st)? {
            found = Some(script);
            break;
        }
    }
    let nodes_used = st.nodes;
    if let Some(script) = found {
        return Ok(Verdict {
            outcome: Outcome::Representable(Witness::Script(script)),
            filter_log: log,
            nodes_used,
        });
    }
    if st.truncated {
        Ok(Verdict {
            outcome: Outcome::Inconclusive(format!(
                "search truncated at length {} / {} nodes; structural bound {} not exhausted",
                st.max_length, st.nodes, structural_bound
            )),
            filter_log: log,
            nodes_used,
        })
    } else {
        Ok(Verdict {
            outcome: Outcome::NotRepresentable(
                "completed script search found no witness".to_string(),
            ),
            filter_log: log,
            nodes_used,
        })
    }
}

fn search(
    d: &Diagram,
    depth: usize,
    st: &mut SearchState,
) -> Result<Option<BuildScript>, ReprError> {
    st.nodes += 1;
    if st.nodes > st.node_budget {
        st.truncated = true;
        return Ok(None);
    }
    let lp = lamp_poset(d);
    let fits_upset = st
        .up_sets
        .iter()
        .filter(|u| u.len() == lp.len())
        .any(|u| is_isomorphic(&lp, &st.target.restrict(u)).is_some());
    if !fits_upset {
        return Ok(None);
    }
    if depth == st.insertions_total {
        if is_isomorphic(&lp, st.target).is_some() {
            let script = d.script().expect("search diagrams are scripted").clone();
            if !verify_witness(st.target, &script)? {
                return Err(ReprError::OracleDisagreement);
            }
            return Ok(Some(script));
        }
        return Ok(None);
    }
    let remaining_len = st.max_length.saturating_sub(d.length());
    if remaining_len == 0 {
        st.truncated = true;
        return Ok(None);
    }
    for cell in d.distributive_cells() {
        for k in 1..=st.tubes_per_lamp.min(remaining_len as u32) {
            let child = d.insert_multifork(&cell, k)?;
            let form = canonical_form(&child.to_poset());
            if !st.seen.insert(form) {
                continue;
            }
            if let Some(s) = search(&child, depth + 1, st)? {
                return Ok(Some(s));
            }
        }
        if st.tubes_per_lamp > remaining_len as u32 {
            st.truncated = true;
        }
    }
    Ok(None)
}

/// Independent re-check of a witness: replay the script, run the congruence
/// oracle, and compare with the target poset.  No lamp geometry is involved.
pub fn verify_witness(target: &Poset, script: &BuildScript) -> Result<bool, ReprError> {
    let d = replay(script)?;
    let con = jir_con_poset(&d.lattice());
    Ok(is_isomorphic(&con, target).is_some())
}

/// Reference sweep for small targets: enumerate every slim rectangular
/// lattice up to `max_len` and ask the oracle directly.
pub fn brute_force_representable(target: &Poset, max_len: usize) -> bool {
    let mut found = false;
    enumerate_diagrams(max_len, |d| {
        if !found {
            let con = jir_con_poset(&d.lattice());
            if is_isomorphic(&con, target).is_some() {
                found = true;
            }
        }
    });
    found
}
