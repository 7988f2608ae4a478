use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BipartiteGraph, VertexId};
use crate::error::{Error, Result};

/// A set of pairwise vertex-disjoint edges, stored as a symmetric mate map.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialMatching {
    mate: BTreeMap<VertexId, VertexId>,
}

impl PartialMatching {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rejects edges that share a vertex or are self-loops.
    pub fn from_edges<I: IntoIterator<Item = (VertexId, VertexId)>>(edges: I) -> Result<Self> {
        let mut m = Self::new();
        for (u, v) in edges {
            m.insert(u, v)?;
        }
        Ok(m)
    }

    pub fn insert(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        if u == v {
            return Err(Error::InvalidMatching(format!("self-loop at {u}")));
        }
        for x in [u, v] {
            if let Some(&w) = self.mate.get(&x) {
                return Err(Error::InvalidMatching(format!(
                    "vertex {x} already matched to {w}"
                )));
            }
        }
        self.mate.insert(u, v);
        self.mate.insert(v, u);
        Ok(())
    }

    pub fn remove_vertex(&mut self, u: VertexId) -> Option<VertexId> {
        let v = self.mate.remove(&u)?;
        self.mate.remove(&v);
        Some(v)
    }

    pub fn mate(&self, v: VertexId) -> Option<VertexId> {
        self.mate.get(&v).copied()
    }

    pub fn is_covered(&self, v: VertexId) -> bool {
        self.mate.contains_key(&v)
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.mate.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.mate.is_empty()
    }

    pub fn covered(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.mate.keys().copied()
    }

    /// Edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.mate.iter().filter(|(u, v)| u < v).map(|(&u, &v)| (u, v))
    }

    pub fn union(&self, other: &PartialMatching) -> Result<PartialMatching> {
        let mut out = self.clone();
        for (u, v) in other.edges() {
            out.insert(u, v)?;
        }
        Ok(out)
    }

    /// Every matching edge must be an edge of `g`.
    pub fn validate_in(&self, g: &BipartiteGraph) -> Result<()> {
        for (u, v) in self.edges() {
            if !g.contains(u) {
                return Err(Error::UnknownVertex(u));
            }
            if !g.contains(v) {
                return Err(Error::UnknownVertex(v));
            }
            if !g.has_edge(u, v) {
                return Err(Error::InvalidMatching(format!("{{{u}, {v}}} is not an edge")));
            }
        }
        Ok(())
    }

    pub fn is_perfect_in(&self, g: &BipartiteGraph) -> bool {
        self.validate_in(g).is_ok() && g.ids().iter().all(|&v| self.is_covered(v))
    }
}

impl Serialize for PartialMatching {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.edges().map(|(u, v)| [u, v]))
    }
}

impl<'de> Deserialize<'de> for PartialMatching {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[VertexId; 2]> = Vec::deserialize(d)?;
        PartialMatching::from_edges(pairs.into_iter().map(|[u, v]| (u, v))).map_err(serde::de::Error::custom)
    }
}
