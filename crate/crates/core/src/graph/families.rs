//! Small named graph families and random generators used by tests, the
//! acceptance suite and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{BipartiteGraph, Side, VertexId};

fn side_of_parity(i: u64) -> Side {
    if i % 2 == 0 {
        Side::Zero
    } else {
        Side::One
    }
}

/// Path `0 – 1 – … – (n-1)`, sides alternating from side 0.
pub fn path(n: u64) -> BipartiteGraph {
    BipartiteGraph::new(
        (0..n).map(|i| (i, side_of_parity(i))),
        (1..n).map(|i| (i - 1, i)),
    )
    .expect("path is bipartite")
}

/// Cycle on `n` vertices; `n` must be even and at least 4.
pub fn cycle(n: u64) -> BipartiteGraph {
    assert!(n >= 4 && n % 2 == 0, "bipartite cycles need even length >= 4");
    BipartiteGraph::new(
        (0..n).map(|i| (i, side_of_parity(i))),
        (0..n).map(|i| (i, (i + 1) % n)),
    )
    .expect("even cycle is bipartite")
}

/// Star with centre 0 on side 0 and leaves `1..=k` on side 1.
pub fn star(k: u64) -> BipartiteGraph {
    BipartiteGraph::new(
        std::iter::once((0, Side::Zero)).chain((1..=k).map(|i| (i, Side::One))),
        (1..=k).map(|i| (0, i)),
    )
    .expect("star is bipartite")
}

/// `K_{a,b}` with side 0 = `0..a` and side 1 = `a..a+b`.
pub fn complete_bipartite(a: u64, b: u64) -> BipartiteGraph {
    let edges: Vec<(VertexId, VertexId)> = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))).collect();
    BipartiteGraph::new(
        (0..a).map(|i| (i, Side::Zero)).chain((a..a + b).map(|i| (i, Side::One))),
        edges,
    )
    .expect("complete bipartite graph")
}

/// Disjoint union; ids of `h` are shifted past the largest id of `g`.
pub fn disjoint_union(g: &BipartiteGraph, h: &BipartiteGraph) -> BipartiteGraph {
    let shift = g.ids().last().map_or(0, |&m| m + 1);
    BipartiteGraph::new(
        g.vertices().chain(h.vertices().map(|(id, s)| (id + shift, s))),
        g.edges().chain(h.edges().map(|(u, v)| (u + shift, v + shift))),
    )
    .expect("union of bipartite graphs")
}

/// Erdős–Rényi style bipartite graph with `a` + `b` vertices and edge
/// probability `p`.
pub fn random_bipartite<R: Rng>(rng: &mut R, a: u64, b: u64, p: f64) -> BipartiteGraph {
    let mut edges = Vec::new();
    for u in 0..a {
        for v in a..a + b {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    BipartiteGraph::new(
        (0..a).map(|i| (i, Side::Zero)).chain((a..a + b).map(|i| (i, Side::One))),
        edges,
    )
    .expect("random bipartite graph")
}

/// Union of `d` uniformly random perfect matchings between two sides of
/// size `k` (parallel edges collapse, so degrees are at most `d`). Vertex ids
/// are randomly interleaved so id order carries no side information.
pub fn random_regularish<R: Rng>(rng: &mut R, k: u64, d: usize) -> BipartiteGraph {
    let mut labels: Vec<VertexId> = (0..2 * k).collect();
    labels.shuffle(rng);
    let left = &labels[..k as usize];
    let right = &labels[k as usize..];
    let mut edges = std::collections::BTreeSet::new();
    for _ in 0..d {
        let mut perm: Vec<usize> = (0..k as usize).collect();
        perm.shuffle(rng);
        for (i, &j) in perm.iter().enumerate() {
            edges.insert((left[i], right[j]));
        }
    }
    BipartiteGraph::new(
        left.iter()
            .map(|&i| (i, Side::Zero))
            .chain(right.iter().map(|&i| (i, Side::One))),
        edges,
    )
    .expect("regular-ish bipartite graph")
}
