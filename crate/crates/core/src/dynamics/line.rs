//! Matchings on a window of a 2-regular acyclic graph, transferred down from
//! the odd-path graphs `G_n` by a majority vote over `D_n(x)`.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, PartialMatching, Side, VertexId};

/// Segments of a 2-regular acyclic graph, each listed in its linear order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedTwoRegular {
    paths: Vec<Vec<VertexId>>,
    first_side: Vec<Side>,
    pos: HashMap<VertexId, (usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Less,
    Greater,
}

impl OrientedTwoRegular {
    pub fn from_paths(paths: Vec<Vec<VertexId>>, first_side: Vec<Side>) -> Result<Self> {
        if paths.len() != first_side.len() {
            return Err(Error::InvalidGraph("one side per path is required".into()));
        }
        let mut pos = HashMap::new();
        for (c, p) in paths.iter().enumerate() {
            for (i, &v) in p.iter().enumerate() {
                if pos.insert(v, (c, i)).is_some() {
                    return Err(Error::InvalidGraph(format!("vertex {v} appears twice")));
                }
            }
        }
        Ok(OrientedTwoRegular { paths, first_side, pos })
    }

    /// Vertices `0..len` in order, vertex 0 on side zero.
    pub fn line(len: u64) -> Self {
        Self::from_paths(vec![(0..len).collect()], vec![Side::Zero]).expect("distinct ids")
    }

    /// Orders each component of a graph of maximum degree 2 from its
    /// endpoint with the smaller id.
    pub fn from_graph(g: &BipartiteGraph) -> Result<Self> {
        let mut paths = Vec::new();
        let mut sides = Vec::new();
        for comp in g.components() {
            let idx: Vec<usize> = comp.iter().map(|&v| g.index_of(v).unwrap()).collect();
            if idx.iter().any(|&v| g.degree(v) > 2) {
                return Err(Error::InvalidGraph("degree above 2".into()));
            }
            let ends: Vec<usize> = idx.iter().copied().filter(|&v| g.degree(v) < 2).collect();
            let Some(&start) = ends.iter().min_by_key(|&&v| g.id(v)) else {
                return Err(Error::InvalidGraph(format!("component of {} is a cycle", g.id(idx[0]))));
            };
            let mut order = vec![start];
            let mut prev = usize::MAX;
            let mut cur = start;
            while let Some(&next) = g.neighbors(cur).iter().find(|&&w| w != prev) {
                prev = cur;
                cur = next;
                order.push(cur);
            }
            sides.push(g.side(start));
            paths.push(order.into_iter().map(|v| g.id(v)).collect());
        }
        Self::from_paths(paths, sides)
    }

    pub fn paths(&self) -> &[Vec<VertexId>] {
        &self.paths
    }

    pub fn position(&self, v: VertexId) -> Result<(usize, usize)> {
        self.pos.get(&v).copied().ok_or(Error::UnknownVertex(v))
    }

    pub fn side(&self, v: VertexId) -> Result<Side> {
        let (c, i) = self.position(v)?;
        Ok(if i % 2 == 0 { self.first_side[c] } else { self.first_side[c].opposite() })
    }

    pub fn successor(&self, v: VertexId) -> Option<VertexId> {
        let &(c, i) = self.pos.get(&v)?;
        self.paths[c].get(i + 1).copied()
    }

    pub fn predecessor(&self, v: VertexId) -> Option<VertexId> {
        let &(c, i) = self.pos.get(&v)?;
        i.checked_sub(1).map(|j| self.paths[c][j])
    }

    pub fn to_graph(&self) -> BipartiteGraph {
        odd_path_graph(self, 1).expect("n = 1")
    }
}

/// `x G_n y` when a path of odd length at most `2n − 1` joins them.
pub fn odd_path_graph(g: &OrientedTwoRegular, n: usize) -> Result<BipartiteGraph> {
    if n == 0 {
        return Err(Error::InvalidGraph("n must be at least 1".into()));
    }
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for p in &g.paths {
        for (i, &v) in p.iter().enumerate() {
            vertices.push((v, g.side(v)?));
            for d in (1..2 * n).step_by(2) {
                if let Some(&w) = p.get(i + d) {
                    edges.push(if g.side(v)? == Side::Zero { (v, w) } else { (w, v) });
                }
            }
        }
    }
    BipartiteGraph::new(vertices, edges)
}

/// `D_n(x)`: side-zero vertices within distance `2n − 2` of `x`.
pub fn majority_ball(g: &OrientedTwoRegular, x: VertexId, n: usize) -> Result<Vec<VertexId>> {
    if n == 0 {
        return Err(Error::InvalidGraph("n must be at least 1".into()));
    }
    if g.side(x)? != Side::Zero {
        return Err(Error::MixedSides);
    }
    let (c, i) = g.position(x)?;
    let r = 2 * n - 2;
    let p = &g.paths[c];
    if i < r || i + r >= p.len() {
        return Err(Error::BallTruncated { vertex: x, radius: r });
    }
    Ok((i - r..=i + r).step_by(2).map(|j| p[j]).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transfer {
    pub matching: PartialMatching,
    pub handled: usize,
    /// Side-zero vertices whose ball or its matched images leave the window.
    pub truncated: usize,
    pub directions: Vec<Option<Direction>>,
    pub consistent: bool,
}

/// `M′(x)` is the neighbour below `x` exactly when at least `n` points of
/// `M(D_n(x))` lie below `x`.
pub fn transfer_matching(g: &OrientedTwoRegular, m: &PartialMatching, n: usize) -> Result<Transfer> {
    let mut out = Transfer {
        matching: PartialMatching::new(),
        handled: 0,
        truncated: 0,
        directions: vec![None; g.paths.len()],
        consistent: true,
    };
    for (c, p) in g.paths.iter().enumerate() {
        for (i, &x) in p.iter().enumerate() {
            if g.side(x)? != Side::Zero {
                continue;
            }
            let ball = match majority_ball(g, x, n) {
                Ok(b) => b,
                Err(Error::BallTruncated { .. }) => {
                    out.truncated += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let mut below = 0;
            let mut complete = true;
            for z in ball {
                match m.mate(z).and_then(|y| g.pos.get(&y)) {
                    Some(&(cy, j)) if cy == c => below += usize::from(j < i),
                    _ => complete = false,
                }
            }
            let dir = if below >= n { Direction::Less } else { Direction::Greater };
            let target = match dir {
                Direction::Less => g.predecessor(x),
                Direction::Greater => g.successor(x),
            };
            let Some(y) = target.filter(|_| complete) else {
                out.truncated += 1;
                continue;
            };
            out.matching.insert(x, y)?;
            out.handled += 1;
            match out.directions[c] {
                None => out.directions[c] = Some(dir),
                Some(d) if d != dir => out.consistent = false,
                _ => {}
            }
        }
    }
    Ok(out)
}

/// A uniformly branching random perfect matching of `G_n` on a segment of
/// `len` vertices, as partner positions; `None` if the search budget runs
/// out or `len` is odd.
pub fn random_gn_matching<R: Rng>(rng: &mut R, len: usize, n: usize, budget: usize) -> Option<Vec<usize>> {
    if len % 2 == 1 || n == 0 {
        return None;
    }
    let mut mate = vec![usize::MAX; len];
    let mut steps = 0;
    fn go<R: Rng>(rng: &mut R, mate: &mut [usize], n: usize, steps: &mut usize, budget: usize) -> bool {
        let Some(i) = mate.iter().position(|&m| m == usize::MAX) else {
            return true;
        };
        *steps += 1;
        if *steps > budget {
            return false;
        }
        let mut options: Vec<usize> = (1..2 * n)
            .step_by(2)
            .map(|d| i + d)
            .filter(|&j| j < mate.len() && mate[j] == usize::MAX)
            .collect();
        options.shuffle(rng);
        for j in options {
            mate[i] = j;
            mate[j] = i;
            if go(rng, mate, n, steps, budget) {
                return true;
            }
            mate[i] = usize::MAX;
            mate[j] = usize::MAX;
        }
        false
    }
    go(rng, &mut mate, n, &mut steps, budget).then_some(mate)
}

/// Partner positions on one path as a matching of its ids.
pub fn positions_to_matching(path: &[VertexId], mate: &[usize]) -> Result<PartialMatching> {
    PartialMatching::from_edges(
        mate.iter()
            .enumerate()
            .filter(|&(i, &j)| i < j)
            .map(|(i, &j)| (path[i], path[j])),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn odd_path_graph_degrees() {
        let g = OrientedTwoRegular::line(10);
        assert_eq!(odd_path_graph(&g, 1).unwrap(), g.to_graph());
        let g2 = odd_path_graph(&g, 2).unwrap();
        assert_eq!(g2.degree(g2.index_of(5).unwrap()), 4);
        assert!(g2.degree(g2.index_of(0).unwrap()) < 4);
        assert!(g2.has_edge(2, 5));
        assert!(!g2.has_edge(2, 7));
    }

    #[test]
    fn majority_ball_examples() {
        let g = OrientedTwoRegular::line(20);
        assert_eq!(majority_ball(&g, 6, 1).unwrap(), vec![6]);
        assert_eq!(majority_ball(&g, 6, 2).unwrap(), vec![4, 6, 8]);
        assert_eq!(majority_ball(&g, 10, 3).unwrap().len(), 5);
        assert!(matches!(majority_ball(&g, 2, 3), Err(Error::BallTruncated { vertex: 2, radius: 4 })));
        assert!(matches!(majority_ball(&g, 3, 2), Err(Error::MixedSides)));
    }

    #[test]
    fn n_equal_one_is_identity() {
        let g = OrientedTwoRegular::line(12);
        let m = PartialMatching::from_edges((0..6).map(|k| (2 * k + 1, 2 * k + 2)).filter(|&(_, b)| b < 12)).unwrap();
        let t = transfer_matching(&g, &m, 1).unwrap();
        for (x, y) in t.matching.edges() {
            assert_eq!(m.mate(x), Some(y));
        }
        assert_eq!(t.directions, vec![Some(Direction::Less)]);
    }

    #[test]
    fn rightward_g2_matching_goes_right() {
        // every even x matched to x + 3 and x + 1 to x − 2 sends each
        // side-zero vertex upward in G_2
        let g = OrientedTwoRegular::line(20);
        let mut m = PartialMatching::new();
        for x in (0..20u64).step_by(4) {
            m.insert(x, x + 3).unwrap();
            m.insert(x + 2, x + 1).unwrap();
        }
        let t = transfer_matching(&g, &m, 2).unwrap();
        assert!(t.consistent);
        assert_eq!(t.directions, vec![Some(Direction::Greater)]);
        for (x, y) in t.matching.edges() {
            let (x, y) = if x % 2 == 0 { (x, y) } else { (y, x) };
            assert_eq!(y, x + 1);
        }
    }

    #[test]
    fn graph_round_trip() {
        let g = OrientedTwoRegular::line(7);
        let back = OrientedTwoRegular::from_graph(&g.to_graph()).unwrap();
        assert_eq!(back, g);
        let cyc = crate::graph::families::cycle(4);
        assert!(OrientedTwoRegular::from_graph(&cyc).is_err());
    }

    proptest! {
        #[test]
        fn directions_agree(seed in any::<u64>(), half in 3usize..9, n in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let len = 2 * half;
            let g = OrientedTwoRegular::line(len as u64);
            let mate = random_gn_matching(&mut rng, len, n, 100_000).unwrap();
            let m = positions_to_matching(&g.paths()[0], &mate).unwrap();
            let gn = odd_path_graph(&g, n).unwrap();
            prop_assert!(m.is_perfect_in(&gn));
            let t = transfer_matching(&g, &m, n).unwrap();
            prop_assert!(t.consistent);
            prop_assert_eq!(t.handled + t.truncated, half);
            t.matching.validate_in(&g.to_graph()).unwrap();
        }
    }
}
