//! Matchings that cover a prescribed vertex set on both sides at once.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, PartialMatching, Side, VertexId};

use super::{hopcroft_karp, hopcroft_karp_from, mates_to_matching, NONE};

/// A matching covering every vertex of `required`. Exists exactly when
/// each side of `required` can be covered separately.
pub fn cover_matching(g: &BipartiteGraph, required: &BTreeSet<VertexId>) -> Result<PartialMatching> {
    let mut mask = vec![false; g.len()];
    for &id in required {
        mask[g.require(id)?] = true;
    }
    Ok(mates_to_matching(g, &cover_mates(g, &mask)?))
}

pub(crate) fn cover_mates(g: &BipartiteGraph, required: &[bool]) -> Result<Vec<usize>> {
    let req_one: Vec<usize> = g.side_indices(Side::One).into_iter().filter(|&v| required[v]).collect();
    let mut mate = hopcroft_karp(g, &req_one, &|_| true);
    if let Some(&v) = req_one.iter().find(|&&v| mate[v] == NONE) {
        return Err(Error::HallViolated(format!("required vertex {} cannot be covered", g.id(v))));
    }
    let req_zero: Vec<usize> = g.side_indices(Side::Zero).into_iter().filter(|&v| required[v]).collect();
    hopcroft_karp_from(g, &req_zero, &|_| true, &mut mate);

    let mut parent = vec![NONE; g.len()];
    let mut stamp = vec![NONE; g.len()];
    for &u in &req_zero {
        if mate[u] != NONE {
            continue;
        }
        if !steal_path(g, u, required, &mut mate, &mut parent, &mut stamp) {
            return Err(Error::HallViolated(format!("required vertex {} cannot be covered", g.id(u))));
        }
    }
    Ok(mate)
}

/// Alternating search from an unmatched side-0 vertex `u` ending at a free
/// side-1 vertex or at a side-1 vertex whose mate is not required; in the
/// second case that mate is released.
fn steal_path(
    g: &BipartiteGraph,
    u: usize,
    required: &[bool],
    mate: &mut [usize],
    parent: &mut [usize],
    stamp: &mut [usize],
) -> bool {
    let mut queue = VecDeque::from([u]);
    stamp[u] = u;
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if stamp[y] == u {
                continue;
            }
            stamp[y] = u;
            parent[y] = x;
            let w = mate[y];
            if w == NONE || !required[w] {
                if w != NONE {
                    mate[w] = NONE;
                }
                let mut y = y;
                loop {
                    let x = parent[y];
                    let next = mate[x];
                    mate[x] = y;
                    mate[y] = x;
                    if x == u {
                        return true;
                    }
                    y = next;
                }
            }
            if stamp[w] != u {
                stamp[w] = u;
                queue.push_back(w);
            }
        }
    }
    false
}
