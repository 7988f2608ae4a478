use super::{ball, BipartiteGraph, VertexId};

/// Adjacency rules derived from graph distance. Never stored densely;
/// neighbours are computed per query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerMode {
    /// `1 <= d(x, y) <= n`
    Leq(usize),
    /// `d(x, y) == n`
    Exact(usize),
    /// joined by a path of odd length at most `2n - 1`
    OddPaths(usize),
}

impl PowerMode {
    fn radius(self) -> usize {
        match self {
            PowerMode::Leq(n) | PowerMode::Exact(n) => n,
            PowerMode::OddPaths(n) => (2 * n).saturating_sub(1),
        }
    }

    fn admits(self, d: usize) -> bool {
        match self {
            PowerMode::Leq(n) => d >= 1 && d <= n,
            PowerMode::Exact(n) => d == n,
            // In a bipartite graph every path between x and y has the parity
            // of d(x, y), so an odd path of length <= 2n-1 exists iff the
            // shortest one qualifies.
            PowerMode::OddPaths(n) => d % 2 == 1 && d < 2 * n,
        }
    }
}

impl BipartiteGraph {
    /// Neighbours of `v` in the power graph, ascending.
    pub fn power_neighbors(&self, v: usize, mode: PowerMode) -> Vec<usize> {
        let mut out: Vec<usize> = ball(self, v, mode.radius())
            .into_iter()
            .filter(|&(_, d)| mode.admits(d))
            .map(|(w, _)| w)
            .collect();
        out.sort_unstable();
        out
    }

    /// Edge list of the power graph, `(u, v)` with `u < v`.
    pub fn power_edges(&self, mode: PowerMode) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for v in 0..self.len() {
            for w in self.power_neighbors(v, mode) {
                if w > v {
                    out.push((self.id(v), self.id(w)));
                }
            }
        }
        out
    }

    /// `G_n`: same vertices and sides, `x ~ y` iff an odd path of length at
    /// most `2n - 1` joins them. Stays bipartite.
    pub fn odd_path_graph(&self, n: usize) -> BipartiteGraph {
        let adj = (0..self.len())
            .map(|v| self.power_neighbors(v, PowerMode::OddPaths(n)))
            .collect();
        BipartiteGraph::from_parts(self.ids().to_vec(), self.sides.clone(), adj)
    }
}
