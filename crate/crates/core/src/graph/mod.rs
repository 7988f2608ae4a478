//! Finite bipartite graphs and the graph operations every other module
//! builds on.
//!
//! Vertices carry opaque `u64` ids. Internally they are stored sorted by id,
//! so the dense index order coincides with the id order that all tie-breaks
//! in this crate use.

pub mod families;
pub mod io;
mod matching;
mod power;

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{from_json_str, to_dot, to_json_value, GraphJson, VertexJson};
pub use matching::PartialMatching;
pub use power::PowerMode;

pub type VertexId = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Side {
    Zero,
    One,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::Zero => 0,
            Side::One => 1,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Zero => Side::One,
            Side::One => Side::Zero,
        }
    }
}

impl From<Side> for u8 {
    fn from(s: Side) -> u8 {
        s.index()
    }
}

impl TryFrom<u8> for Side {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Side::Zero),
            1 => Ok(Side::One),
            _ => Err(format!("side must be 0 or 1, got {v}")),
        }
    }
}

/// Shortest-path length, with a distinguished value for different components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    /// `self > bound`, with `Infinite` exceeding every bound.
    pub fn exceeds(self, bound: u64) -> bool {
        match self {
            Distance::Finite(d) => d as u64 > bound,
            Distance::Infinite => true,
        }
    }
}

/// Dense-index adjacency, shared by bipartite graphs and forest windows so
/// the breadth-first and layering code is written once.
pub trait Adjacency {
    fn vertex_count(&self) -> usize;
    fn adjacent(&self, v: usize) -> &[usize];
    fn vertex_id(&self, v: usize) -> VertexId;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    ids: Vec<VertexId>,
    sides: Vec<Side>,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Adjacency for BipartiteGraph {
    fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    fn adjacent(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    fn vertex_id(&self, v: usize) -> VertexId {
        self.ids[v]
    }
}

impl BipartiteGraph {
    pub fn empty() -> Self {
        BipartiteGraph {
            ids: Vec::new(),
            sides: Vec::new(),
            adj: Vec::new(),
            edge_count: 0,
        }
    }

    /// Builds a graph, rejecting duplicate ids, unknown endpoints, self-loops,
    /// same-side edges and duplicate edges. Messages name the offending
    /// `vertices[i]` / `edges[i]` entry.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = (VertexId, Side)>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut verts: Vec<(VertexId, Side, usize)> = vertices
            .into_iter()
            .enumerate()
            .map(|(i, (id, side))| (id, side, i))
            .collect();
        verts.sort_unstable_by_key(|v| v.0);
        for w in verts.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidGraph(format!(
                    "vertices[{}]: duplicate vertex id {}",
                    w[1].2.max(w[0].2),
                    w[0].0
                )));
            }
        }
        let ids: Vec<VertexId> = verts.iter().map(|v| v.0).collect();
        let sides: Vec<Side> = verts.iter().map(|v| v.1).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        let mut edge_count = 0;
        let lookup = |id: VertexId| ids.binary_search(&id).ok();
        for (i, (u, v)) in edges.into_iter().enumerate() {
            let a = lookup(u).ok_or_else(|| {
                Error::InvalidGraph(format!("edges[{i}]: unknown vertex id {u}"))
            })?;
            let b = lookup(v).ok_or_else(|| {
                Error::InvalidGraph(format!("edges[{i}]: unknown vertex id {v}"))
            })?;
            if a == b {
                return Err(Error::InvalidGraph(format!("edges[{i}]: self-loop at {u}")));
            }
            if sides[a] == sides[b] {
                return Err(Error::InvalidGraph(format!(
                    "edges[{i}]: {u} and {v} are both on side {}",
                    sides[a].index()
                )));
            }
            adj[a].push(b);
            adj[b].push(a);
            edge_count += 1;
        }
        for (a, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "edges: duplicate edge {{{}, {}}}",
                    ids[a], ids[w[0]]
                )));
            }
        }
        Ok(BipartiteGraph {
            ids,
            sides,
            adj,
            edge_count,
        })
    }

    /// Construction from already-validated dense data; `adj` lists must be
    /// sorted and symmetric.
    pub(crate) fn from_parts(ids: Vec<VertexId>, sides: Vec<Side>, adj: Vec<Vec<usize>>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        BipartiteGraph {
            ids,
            sides,
            adj,
            edge_count,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> VertexId {
        self.ids[v]
    }

    pub fn side(&self, v: usize) -> Side {
        self.sides[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn index_of(&self, id: VertexId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn require(&self, id: VertexId) -> Result<usize> {
        self.index_of(id).ok_or(Error::UnknownVertex(id))
    }

    pub fn contains(&self, id: VertexId) -> bool {
        self.index_of(id).is_some()
    }

    pub fn side_of(&self, id: VertexId) -> Result<Side> {
        Ok(self.sides[self.require(id)?])
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        match (self.index_of(u), self.index_of(v)) {
            (Some(a), Some(b)) => self.adj[a].binary_search(&b).is_ok(),
            _ => false,
        }
    }

    /// Dense indices of the vertices on `side`, ascending.
    pub fn side_indices(&self, side: Side) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.sides[v] == side).collect()
    }

    pub fn side_count(&self, side: Side) -> usize {
        self.sides.iter().filter(|&&s| s == side).count()
    }

    /// Edges as `(u, v)` id pairs with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.len()).flat_map(move |a| {
            self.adj[a]
                .iter()
                .filter(move |&&b| b > a)
                .map(move |&b| (self.ids[a], self.ids[b]))
        })
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, Side)> + '_ {
        self.ids.iter().copied().zip(self.sides.iter().copied())
    }

    pub fn distance(&self, x: VertexId, y: VertexId) -> Result<Distance> {
        let a = self.require(x)?;
        let b = self.require(y)?;
        Ok(index_distance(self, a, b))
    }

    /// Induced subgraph on the given ids (unknown ids are ignored).
    pub fn induced<I: IntoIterator<Item = VertexId>>(&self, keep: I) -> Self {
        let mut mask = vec![false; self.len()];
        for id in keep {
            if let Some(v) = self.index_of(id) {
                mask[v] = true;
            }
        }
        self.induced_by_mask(&mask)
    }

    pub(crate) fn induced_by_mask(&self, keep: &[bool]) -> Self {
        let mut remap = vec![usize::MAX; self.len()];
        let mut ids = Vec::new();
        let mut sides = Vec::new();
        for v in 0..self.len() {
            if keep[v] {
                remap[v] = ids.len();
                ids.push(self.ids[v]);
                sides.push(self.sides[v]);
            }
        }
        let adj = (0..self.len())
            .filter(|&v| keep[v])
            .map(|v| {
                self.adj[v]
                    .iter()
                    .filter(|&&w| keep[w])
                    .map(|&w| remap[w])
                    .collect()
            })
            .collect();
        BipartiteGraph::from_parts(ids, sides, adj)
    }

    /// The graph `G − M`: removes every vertex covered by `m`.
    pub fn remove_matched(&self, m: &PartialMatching) -> Result<Self> {
        m.validate_in(self)?;
        let mut keep = vec![true; self.len()];
        for id in m.covered() {
            keep[self.require(id)?] = false;
        }
        Ok(self.induced_by_mask(&keep))
    }

    /// `N_G(F)`: neighbours of `F` that are not themselves in `F`.
    pub fn neighborhood(&self, f_set: &BTreeSet<VertexId>) -> Result<BTreeSet<VertexId>> {
        let idx: Vec<usize> = f_set.iter().map(|&id| self.require(id)).collect::<Result<_>>()?;
        let mut out = BTreeSet::new();
        for &v in &idx {
            for &w in &self.adj[v] {
                let id = self.ids[w];
                if !f_set.contains(&id) {
                    out.insert(id);
                }
            }
        }
        Ok(out)
    }

    /// Vertices at distance exactly two from `v` (necessarily on `v`'s side).
    pub fn g2_neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.adj[v]
            .iter()
            .flat_map(|&w| self.adj[w].iter().copied())
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Splits a single-sided subset into its classes under distance-2
    /// adjacency in the whole graph. Classes are listed by least member.
    pub fn g2_connected_components(&self, subset: &BTreeSet<VertexId>) -> Result<Vec<BTreeSet<VertexId>>> {
        let idx: Vec<usize> = subset.iter().map(|&id| self.require(id)).collect::<Result<_>>()?;
        if let Some(&first) = idx.first() {
            if idx.iter().any(|&v| self.sides[v] != self.sides[first]) {
                return Err(Error::MixedSides);
            }
        }
        let members: HashMap<usize, usize> = idx.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut seen = vec![false; idx.len()];
        let mut classes = Vec::new();
        for start in 0..idx.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut class = BTreeSet::new();
            let mut queue = VecDeque::from([idx[start]]);
            while let Some(v) = queue.pop_front() {
                class.insert(self.ids[v]);
                for u in self.g2_neighbors(v) {
                    if let Some(&i) = members.get(&u) {
                        if !seen[i] {
                            seen[i] = true;
                            queue.push_back(u);
                        }
                    }
                }
            }
            classes.push(class);
        }
        Ok(classes)
    }

    /// Connected components (as id sets), listed by least member.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut comp = vec![usize::MAX; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut members = Vec::new();
            comp[s] = c;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                members.push(self.ids[v]);
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = c;
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

/// Breadth-first distances from `source`, cut off after `limit` steps.
/// Returns only the vertices reached.
pub fn ball<G: Adjacency + ?Sized>(g: &G, source: usize, limit: usize) -> HashMap<usize, usize> {
    multi_source_ball(g, std::slice::from_ref(&source), limit)
}

pub fn multi_source_ball<G: Adjacency + ?Sized>(g: &G, sources: &[usize], limit: usize) -> HashMap<usize, usize> {
    let mut dist = HashMap::with_capacity(sources.len() * 4);
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist.insert(s, 0).is_none() {
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == limit {
            continue;
        }
        for &w in g.adjacent(v) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn index_distance<G: Adjacency + ?Sized>(g: &G, a: usize, b: usize) -> Distance {
    if a == b {
        return Distance::Finite(0);
    }
    let mut dist = vec![usize::MAX; g.vertex_count()];
    dist[a] = 0;
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        for &w in g.adjacent(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                if w == b {
                    return Distance::Finite(dist[w]);
                }
                queue.push_back(w);
            }
        }
    }
    Distance::Infinite
}
