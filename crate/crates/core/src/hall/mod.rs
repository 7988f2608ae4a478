//! Hall's condition, its strengthened form with expansion `1 + ε` above a
//! size floor, and the maximum-matching oracle both rest on.

pub(crate) mod connected;
mod cover;

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, PartialMatching, Side, VertexId};
use crate::rational::{self, Rational};

use connected::{search, SearchParams, SetSpace};
pub use cover::cover_matching;
pub(crate) use cover::cover_mates;

pub(crate) const NONE: usize = usize::MAX;

/// Sets examined before the canonical witness search for plain Hall falls
/// back to the alternating-path witness.
const WITNESS_SEARCH_BUDGET: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub side: Side,
    pub f_set: Vec<VertexId>,
    #[serde(with = "rational::serde_str")]
    pub required: Rational,
    pub actual: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallReport {
    pub satisfied: bool,
    pub witness: Option<Witness>,
}

impl HallReport {
    pub fn ok() -> Self {
        HallReport {
            satisfied: true,
            witness: None,
        }
    }

    pub fn violated(w: Witness) -> Self {
        HallReport {
            satisfied: false,
            witness: Some(w),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionParams {
    pub epsilon: Rational,
    pub size_floor: usize,
}

impl ExpansionParams {
    pub fn new(epsilon: Rational, size_floor: usize) -> Result<Self> {
        if epsilon.is_negative() {
            return Err(Error::Parse(format!("epsilon must be >= 0, got {}", rational::format(&epsilon))));
        }
        if size_floor == 0 {
            return Err(Error::Parse("size floor must be at least 1".into()));
        }
        Ok(ExpansionParams { epsilon, size_floor })
    }

    /// `(1 + ε)·k` as an exact rational.
    pub fn required(&self, k: usize) -> Rational {
        (Rational::one() + &self.epsilon) * Rational::from_integer(BigInt::from(k))
    }

    fn violates(&self, size: usize, nsize: usize) -> bool {
        Rational::from_integer(BigInt::from(nsize)) < self.required(size)
    }

    /// Smallest neighbourhood size that satisfies every set of size <= cap.
    fn prune_threshold(&self, cap: usize) -> usize {
        let r = self.required(cap);
        let ceil = r.ceil().to_integer();
        ceil.to_usize().unwrap_or(usize::MAX)
    }
}

/// Hopcroft–Karp on dense indices; `mate[v]` is the partner index or `NONE`.
/// Deterministic: neighbours are scanned in ascending id order.
pub(crate) fn hopcroft_karp(g: &BipartiteGraph, left: &[usize], usable: &dyn Fn(usize) -> bool) -> Vec<usize> {
    let mut mate = vec![NONE; g.len()];
    hopcroft_karp_from(g, left, usable, &mut mate);
    mate
}

/// Grows an existing matching; vertices already matched stay matched.
pub(crate) fn hopcroft_karp_from(
    g: &BipartiteGraph,
    left: &[usize],
    usable: &dyn Fn(usize) -> bool,
    mate: &mut [usize],
) {
    let n = g.len();
    let mut dist = vec![u32::MAX; n];
    loop {
        let mut queue = VecDeque::new();
        for &u in left {
            if mate[u] == NONE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if !usable(v) {
                    continue;
                }
                let w = mate[v];
                if w == NONE {
                    found = true;
                } else if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; n];
        for &u in left {
            if mate[u] == NONE {
                augment(g, u, mate, &mut dist, &mut it, usable);
            }
        }
    }
}

fn augment(
    g: &BipartiteGraph,
    root: usize,
    mate: &mut [usize],
    dist: &mut [u32],
    it: &mut [usize],
    usable: &dyn Fn(usize) -> bool,
) -> bool {
    // iterative DFS over layered graph
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        let nbrs = g.neighbors(u);
        let mut advanced = false;
        while it[u] < nbrs.len() {
            let v = nbrs[it[u]];
            it[u] += 1;
            if !usable(v) {
                continue;
            }
            let w = mate[v];
            if w == NONE {
                // flip the path root .. u, v
                let mut v = v;
                while let Some(u) = stack.pop() {
                    let next = mate[u];
                    mate[u] = v;
                    mate[v] = u;
                    v = next;
                }
                return true;
            }
            if dist[w] == dist[u] + 1 {
                stack.push(w);
                advanced = true;
                break;
            }
        }
        if !advanced {
            dist[u] = u32::MAX;
            stack.pop();
        }
    }
    false
}

pub(crate) fn mates_to_matching(g: &BipartiteGraph, mate: &[usize]) -> PartialMatching {
    let mut m = PartialMatching::new();
    for (u, &v) in mate.iter().enumerate() {
        if v != NONE && u < v {
            m.insert(g.id(u), g.id(v)).expect("mate array is a matching");
        }
    }
    m
}

/// A maximum-cardinality matching.
pub fn max_matching(g: &BipartiteGraph) -> PartialMatching {
    let left = g.side_indices(Side::Zero);
    mates_to_matching(g, &hopcroft_karp(g, &left, &|_| true))
}

/// `max_F |F| - |N(F)|` over subsets of `side`, via `|side| - ν(G)`.
pub fn deficiency(g: &BipartiteGraph, side: Side) -> usize {
    g.side_count(side) - max_matching(g).len()
}

struct FiniteSpace<'a>(&'a BipartiteGraph);

impl SetSpace for FiniteSpace<'_> {
    fn universe(&self) -> usize {
        self.0.len()
    }

    fn base_neighbors(&self, v: usize, out: &mut Vec<usize>) {
        out.extend_from_slice(self.0.neighbors(v));
    }
}

fn witness_from(g: &BipartiteGraph, set: &[usize], actual: usize, required: Rational) -> Witness {
    Witness {
        side: g.side(set[0]),
        f_set: set.iter().map(|&v| g.id(v)).collect(),
        required,
        actual,
    }
}

/// Vertices of `side` reachable by alternating paths from vertices of
/// `side` that a maximum matching leaves uncovered. Their distance-2
/// classes have disjoint neighbourhoods and at least one of them violates
/// Hall's condition.
fn alternating_violator(g: &BipartiteGraph, side: Side) -> Option<Vec<usize>> {
    let left = g.side_indices(Side::Zero);
    let mate = hopcroft_karp(g, &left, &|_| true);
    let mut seen = vec![false; g.len()];
    let mut queue = VecDeque::new();
    for v in g.side_indices(side) {
        if mate[v] == NONE {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    if queue.is_empty() {
        return None;
    }
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                let m = mate[w];
                if m != NONE && !seen[m] {
                    seen[m] = true;
                    queue.push_back(m);
                }
            }
        }
    }
    let zs: std::collections::BTreeSet<VertexId> = g
        .side_indices(side)
        .into_iter()
        .filter(|&v| seen[v])
        .map(|v| g.id(v))
        .collect();
    let classes = g.g2_connected_components(&zs).ok()?;
    classes
        .into_iter()
        .filter(|c| g.neighborhood(c).map(|n| n.len() < c.len()).unwrap_or(false))
        .map(|c| c.into_iter().map(|id| g.index_of(id).unwrap()).collect::<Vec<_>>())
        .min_by(|a, b| (a.len(), a).cmp(&(b.len(), b)))
}

/// Hall's condition from both sides. On failure the witness is the least
/// violating distance-2-connected single-sided set, ordered by size and
/// then lexicographically by ids.
pub fn check_hall(g: &BipartiteGraph) -> HallReport {
    let nu = max_matching(g).len();
    let failing: Vec<Side> = [Side::Zero, Side::One]
        .into_iter()
        .filter(|&s| g.side_count(s) > nu)
        .collect();
    if failing.is_empty() {
        return HallReport::ok();
    }
    // a violator of this size is known to exist; search no further
    let fallback = failing
        .iter()
        .filter_map(|&s| alternating_violator(g, s))
        .min_by(|a, b| (a.len(), a).cmp(&(b.len(), b)))
        .expect("positive deficiency has a violating class");
    let cap = fallback.len();
    let roots: Vec<usize> = (0..g.len()).filter(|&v| failing.contains(&g.side(v))).collect();
    let violates = |size: usize, nsize: usize| nsize < size;
    let out = search(
        &FiniteSpace(g),
        &roots,
        &|_| true,
        &SearchParams {
            cap,
            floor: 1,
            violates: &violates,
            prune_at: cap,
            budget: Some(WITNESS_SEARCH_BUDGET),
        },
    );
    let (set, actual) = match out.best {
        Some(best) if !out.exhausted_budget => best,
        _ => {
            let actual = neighborhood_size(g, &fallback);
            (fallback, actual)
        }
    };
    let required = BigRational::from_integer(BigInt::from(set.len()));
    HallReport::violated(witness_from(g, &set, actual, required))
}

fn neighborhood_size(g: &BipartiteGraph, set: &[usize]) -> usize {
    let mut n: Vec<usize> = set.iter().flat_map(|&v| g.neighbors(v).iter().copied()).collect();
    n.sort_unstable();
    n.dedup();
    n.len()
}

/// Hall's condition (exact) plus `|N(F)| >= (1+ε)|F|` for every
/// distance-2-connected single-sided `F` with `floor <= |F| <= size_cap`.
pub fn check_hall_eps_n(g: &BipartiteGraph, p: &ExpansionParams, size_cap: usize) -> Result<HallReport> {
    if size_cap < p.size_floor {
        return Err(Error::BadCap {
            cap: size_cap,
            floor: p.size_floor,
        });
    }
    let plain = check_hall(g);
    if !plain.satisfied {
        return Ok(plain);
    }
    Ok(expansion_search(g, p, size_cap))
}

/// Only the expansion half of `check_hall_eps_n`.
pub(crate) fn expansion_search(g: &BipartiteGraph, p: &ExpansionParams, size_cap: usize) -> HallReport {
    if p.epsilon.is_zero() {
        // |N(F)| >= |F| already follows from Hall's condition
        return HallReport::ok();
    }
    let roots: Vec<usize> = (0..g.len()).collect();
    let violates = |size: usize, nsize: usize| p.violates(size, nsize);
    let out = search(
        &FiniteSpace(g),
        &roots,
        &|_| true,
        &SearchParams {
            cap: size_cap,
            floor: p.size_floor,
            violates: &violates,
            prune_at: p.prune_threshold(size_cap),
            budget: None,
        },
    );
    match out.best {
        None => HallReport::ok(),
        Some((set, actual)) => {
            let required = p.required(set.len());
            HallReport::violated(witness_from(g, &set, actual, required))
        }
    }
}

/// Slow independent oracle: every subset of each side up to `cap`, with
/// no connectivity restriction.
pub fn brute_force_expansion(g: &BipartiteGraph, p: &ExpansionParams, cap: usize) -> bool {
    for side in [Side::Zero, Side::One] {
        let verts = g.side_indices(side);
        assert!(verts.len() <= 24, "brute force limited to 24 vertices per side");
        for mask in 1u32..(1u32 << verts.len()) {
            let size = mask.count_ones() as usize;
            if size > cap {
                continue;
            }
            let set: Vec<usize> = (0..verts.len()).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
            let n = neighborhood_size(g, &set);
            if n < size {
                return false;
            }
            if size >= p.size_floor && p.violates(size, n) {
                return false;
            }
        }
    }
    true
}
