//! Three injections with disjoint ranges, the unicyclic graph `H` they
//! generate, and cycle surgery turning `H` into a 4-regular forest.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{PartialMatching, VertexId};
use crate::group::{build_doubling, expand_window, square_set, ActionWindow, DoublingGraph, GeneratingSet, WindowKind};
use crate::hall::cover_matching;

pub(crate) const UNDEF: u32 = u32::MAX;

/// `f_0, f_1, f_2` on the points `0..points`, undefined outside their domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleFunctionSystem {
    pub points: usize,
    pub f: [Vec<u32>; 3],
}

impl TripleFunctionSystem {
    /// Checks that every map is injective and that the ranges are disjoint.
    pub fn new(points: usize, f: [Vec<u32>; 3]) -> Result<Self> {
        let mut hit = vec![false; points];
        for (i, fi) in f.iter().enumerate() {
            if fi.len() != points {
                return Err(Error::InvalidGraph(format!("f_{i} has {} entries, expected {points}", fi.len())));
            }
            for (x, &y) in fi.iter().enumerate() {
                if y == UNDEF {
                    continue;
                }
                let y = y as usize;
                if y >= points {
                    return Err(Error::UnknownVertex(y as u64));
                }
                if std::mem::replace(&mut hit[y], true) {
                    return Err(Error::InvalidGraph(format!("{y} has two preimages (one is f_{i}({x}))")));
                }
            }
        }
        Ok(TripleFunctionSystem { points, f })
    }

    /// `f_i(x) = y` when `(i + 1, x)` is matched to `(0, y)` in the
    /// four-copy doubling graph; defined on matched interior points.
    pub fn from_matching(dg: &DoublingGraph<'_>, m: &PartialMatching) -> Result<Self> {
        if dg.copies() != 4 {
            return Err(Error::BadWindow("the forest needs the four-copy doubling graph".into()));
        }
        let n = dg.window().len();
        let mut f = [vec![UNDEF; n], vec![UNDEF; n], vec![UNDEF; n]];
        for x in 0..n {
            for (i, fi) in f.iter_mut().enumerate() {
                let v = dg.id(i + 1, x);
                match m.mate(v) {
                    Some(u) => {
                        let (c, y) = dg.decode(u);
                        if c != 0 {
                            return Err(Error::InvalidMatching(format!("{v} matched outside copy 0")));
                        }
                        fi[x] = y as u32;
                    }
                    None if dg.is_interior_vertex(v as usize) => return Err(Error::NotPerfectOnInterior(v)),
                    None => {}
                }
            }
        }
        Self::new(n, f)
    }

    pub fn get(&self, i: usize, x: usize) -> Option<usize> {
        let y = self.f[i][x];
        (y != UNDEF).then_some(y as usize)
    }

    /// The unique `x` with some `f_i(x) = y`.
    pub fn parents(&self) -> Vec<u32> {
        let mut p = vec![UNDEF; self.points];
        for fi in &self.f {
            for (x, &y) in fi.iter().enumerate() {
                if y != UNDEF {
                    p[y as usize] = x as u32;
                }
            }
        }
        p
    }

    /// Cycles of `H`, each listed from its least point along the maps.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let parent = self.parents();
        let mut state = vec![0u8; self.points];
        let mut out = Vec::new();
        for start in 0..self.points {
            let mut walk = Vec::new();
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                walk.push(v);
                if parent[v] == UNDEF {
                    break;
                }
                v = parent[v] as usize;
            }
            if state[v] == 1 && parent[v] != UNDEF {
                if let Some(k) = walk.iter().position(|&w| w == v) {
                    // the walk runs against the maps; reverse to follow them
                    let mut cyc: Vec<usize> = walk[k..].iter().rev().copied().collect();
                    let least = (0..cyc.len()).min_by_key(|&i| cyc[i]).unwrap();
                    cyc.rotate_left(least);
                    out.push(cyc);
                }
            }
            for w in walk {
                state[w] = 2;
            }
        }
        out.sort();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForestWindow {
    pub adj: Vec<Vec<u32>>,
    /// Points whose `H`-ball of radius `depth_radius` consists of points
    /// with all three maps and a preimage defined.
    pub deep: Vec<bool>,
    pub depth_radius: usize,
    pub cycles: Vec<Vec<usize>>,
    /// Points whose maps were rotated so cycle edges come from `g_0`.
    pub relabeled: usize,
}

impl ForestWindow {
    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(x, ns)| ns.iter().map(move |&y| (x, y as usize)))
            .filter(|&(x, y)| x < y)
    }

    /// A cycle among deep points, if any.
    pub fn deep_cycle(&self) -> Option<(usize, usize)> {
        let mut uf: Vec<usize> = (0..self.len()).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for (x, y) in self.edges() {
            if !(self.deep[x] && self.deep[y]) {
                continue;
            }
            let (a, b) = (find(&mut uf, x), find(&mut uf, y));
            if a == b {
                return Some((x, y));
            }
            uf[a] = b;
        }
        // multi-edges are cycles of length two
        self.adj.iter().enumerate().find_map(|(x, ns)| {
            (self.deep[x] && ns.windows(2).any(|w| w[0] == w[1])).then_some((x, x))
        })
    }
}

fn remove_edge(adj: &mut [Vec<u32>], x: usize, y: usize) {
    for (a, b) in [(x, y), (y, x)] {
        if let Some(k) = adj[a].iter().position(|&v| v as usize == b) {
            adj[a].swap_remove(k);
        }
    }
}

fn add_edge(adj: &mut [Vec<u32>], x: usize, y: usize) {
    adj[x].push(y as u32);
    adj[y].push(x as u32);
}

/// Relabels each cycle point so its cycle edge comes from `g_0`, deletes
/// the cycle edge entering the least point `x_0`, and restores degree 4 at
/// both ends by shifting `g_0`-subtrees one step toward the cycle along the
/// `g_1`-ray of the predecessor of `x_0` and the `g_2`-ray of `x_0`.
pub fn forest_from_paradox(ts: &TripleFunctionSystem) -> ForestWindow {
    let n = ts.points;
    let mut g = ts.f.clone();
    let cycles = ts.cycles();
    let mut relabeled = 0;
    for cyc in &cycles {
        for (k, &x) in cyc.iter().enumerate() {
            let next = cyc[(k + 1) % cyc.len()] as u32;
            let j = (0..3).find(|&j| ts.f[j][x] == next).expect("cycle edge");
            if j != 0 {
                relabeled += 1;
            }
            for (i, gi) in g.iter_mut().enumerate() {
                gi[x] = ts.f[(j + i) % 3][x];
            }
        }
    }
    let mut adj = vec![Vec::new(); n];
    for gi in &g {
        for (x, &y) in gi.iter().enumerate() {
            if y != UNDEF && y as usize != x {
                add_edge(&mut adj, x, y as usize);
            }
        }
    }
    let shift = |adj: &mut Vec<Vec<u32>>, start: usize, along: usize| {
        let mut prev = start;
        let mut cur = g[along][start];
        while cur != UNDEF {
            let c = cur as usize;
            let child = g[0][c];
            if child == UNDEF {
                break;
            }
            remove_edge(adj, c, child as usize);
            add_edge(adj, prev, child as usize);
            prev = c;
            cur = g[along][c];
        }
    };
    for cyc in &cycles {
        let x0 = cyc[0];
        let last = *cyc.last().unwrap();
        if last != x0 {
            remove_edge(&mut adj, last, x0);
        }
        shift(&mut adj, last, 1);
        shift(&mut adj, x0, 2);
    }
    for ns in &mut adj {
        ns.sort_unstable();
    }

    let depth_radius = 2 + cycles.iter().map(Vec::len).max().unwrap_or(0);
    let parent = ts.parents();
    let complete = |x: usize| parent[x] != UNDEF && (0..3).all(|i| ts.f[i][x] != UNDEF);
    let mut dist = vec![usize::MAX; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&x| !complete(x)).collect();
    for &x in &queue {
        dist[x] = 0;
    }
    while let Some(x) = queue.pop_front() {
        let hs = ts.f.iter().map(|fi| fi[x]).chain([parent[x]]);
        for y in hs.filter(|&y| y != UNDEF).map(|y| y as usize) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    let deep = dist.iter().map(|&d| d > depth_radius).collect();
    ForestWindow {
        adj,
        deep,
        depth_radius,
        cycles,
        relabeled,
    }
}

/// Forest edges between points whose labelling words differ by more than
/// `bound` letters.
pub fn lipschitz_violations(forest: &ForestWindow, w: &ActionWindow, bound: usize) -> Vec<(VertexId, VertexId)> {
    forest
        .edges()
        .filter(|&(x, y)| w.word(y).mul(&w.word(x).inverse()).len() > bound)
        .map(|(x, y)| (x as VertexId, y as VertexId))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForestReport {
    pub kind: WindowKind,
    pub radius: usize,
    pub points: usize,
    pub cycles: usize,
    pub longest_cycle: usize,
    pub relabeled: usize,
    pub deep: usize,
    pub degree_violations: usize,
    pub deep_cycle: bool,
    pub lipschitz_bound: usize,
    pub lipschitz_violations: usize,
    pub passed: bool,
}

/// Window, four-copy doubling over `S²`, a matching covering the interior,
/// the maps `f_i`, and the forest after surgery.
pub fn forest_demo(kind: WindowKind, radius: usize) -> Result<(ForestReport, ForestWindow)> {
    let s = GeneratingSet::standard();
    let s2 = square_set(&s);
    let w = expand_window(kind, None, &s, radius, 2 * s2.max_len())?;
    let dg = build_doubling(&w, &s2, 4)?;
    let g = dg.to_bipartite();
    let m = cover_matching(&g, &(0..g.len() as VertexId).filter(|&v| dg.is_interior_vertex(v as usize)).collect())?;
    let ts = TripleFunctionSystem::from_matching(&dg, &m)?;
    let forest = forest_from_paradox(&ts);
    let bound = 2 * s2.max_len();
    let deep: Vec<usize> = (0..forest.len()).filter(|&x| forest.deep[x]).collect();
    let degree_violations = deep.iter().filter(|&&x| forest.adj[x].len() != 4).count();
    let lipschitz = lipschitz_violations(&forest, &w, bound).len();
    let deep_cycle = forest.deep_cycle().is_some();
    let report = ForestReport {
        kind,
        radius,
        points: w.len(),
        cycles: forest.cycles.len(),
        longest_cycle: forest.cycles.iter().map(Vec::len).max().unwrap_or(0),
        relabeled: forest.relabeled,
        deep: deep.len(),
        degree_violations,
        deep_cycle,
        lipschitz_bound: bound,
        lipschitz_violations: lipschitz,
        passed: !deep.is_empty() && degree_violations == 0 && !deep_cycle && lipschitz == 0,
    };
    Ok((report, forest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Cycle `0 → 1 → … → len−1 → 0` through the maps `via`, every other
    /// map opening a complete ternary tree of the given depth.
    fn planted(len: usize, via: &[usize], depth: usize) -> TripleFunctionSystem {
        let mut f: [Vec<u32>; 3] = Default::default();
        let grow = |f: &mut [Vec<u32>; 3]| {
            for fi in f.iter_mut() {
                fi.push(UNDEF);
            }
            f[0].len() - 1
        };
        for _ in 0..len {
            grow(&mut f);
        }
        let mut frontier = Vec::new();
        for k in 0..len {
            f[via[k]][k] = ((k + 1) % len) as u32;
            for i in (0..3).filter(|&i| i != via[k]) {
                let c = grow(&mut f);
                f[i][k] = c as u32;
                frontier.push(c);
            }
        }
        for _ in 1..depth {
            let mut next = Vec::new();
            for x in frontier {
                for i in 0..3 {
                    let c = grow(&mut f);
                    f[i][x] = c as u32;
                    next.push(c);
                }
            }
            frontier = next;
        }
        let n = f[0].len();
        TripleFunctionSystem::new(n, f).unwrap()
    }

    fn check_forest(forest: &ForestWindow) {
        let deep = (0..forest.len()).filter(|&x| forest.deep[x]).count();
        assert!(deep > 0);
        for x in (0..forest.len()).filter(|&x| forest.deep[x]) {
            assert_eq!(forest.adj[x].len(), 4, "degree at {x}");
        }
        assert_eq!(forest.deep_cycle(), None);
    }

    #[test]
    fn planted_three_cycle() {
        let ts = planted(3, &[1, 0, 2], 7);
        assert_eq!(ts.cycles(), vec![vec![0, 1, 2]]);
        let forest = forest_from_paradox(&ts);
        assert_eq!(forest.relabeled, 2);
        assert!(forest.deep[0]);
        check_forest(&forest);
    }

    #[test]
    fn loops_and_two_cycles() {
        for (len, via) in [(1, vec![2]), (2, vec![0, 1])] {
            let forest = forest_from_paradox(&planted(len, &via, 7));
            check_forest(&forest);
        }
    }

    #[test]
    fn cycle_free_is_unchanged() {
        // a ternary tree hanging from point 0, whose preimage is missing
        let mut f: [Vec<u32>; 3] = Default::default();
        let depth = 4;
        let n: usize = (0..=depth).map(|d| 3usize.pow(d)).sum();
        for fi in f.iter_mut() {
            *fi = vec![UNDEF; n];
        }
        for x in 0..n {
            for i in 0..3 {
                let c = 3 * x + i + 1;
                if c < n {
                    f[i][x] = c as u32;
                }
            }
        }
        let ts = TripleFunctionSystem::new(n, f).unwrap();
        let forest = forest_from_paradox(&ts);
        assert!(forest.cycles.is_empty());
        assert_eq!(forest.edges().count(), n - 1);
        for (x, y) in forest.edges() {
            assert!((0..3).any(|i| ts.get(i, x) == Some(y)));
        }
    }

    #[test]
    fn rejects_shared_range() {
        let f = [vec![1, UNDEF], vec![UNDEF, UNDEF], vec![1, UNDEF]];
        assert!(TripleFunctionSystem::new(2, f).is_err());
    }

    #[test]
    fn edges_stay_within_two_steps() {
        let ts = planted(4, &[2, 2, 0, 1], 6);
        let forest = forest_from_paradox(&ts);
        let parent = ts.parents();
        let near = |x: usize| -> Vec<usize> {
            (0..3)
                .filter_map(|i| ts.get(i, x))
                .chain((parent[x] != UNDEF).then(|| parent[x] as usize))
                .collect()
        };
        for (x, y) in forest.edges() {
            assert!(near(x).contains(&y) || near(x).iter().any(|&z| near(z).contains(&y)));
        }
    }

    #[test]
    fn pipeline_forest_is_regular() {
        let (r, _) = forest_demo(WindowKind::F2, 9).unwrap();
        assert!(r.passed && r.deep > 1, "{r:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn random_cycles_become_trees(len in 1usize..6, via in proptest::collection::vec(0usize..3, 6)) {
            let forest = forest_from_paradox(&planted(len, &via[..len], len + 3));
            check_forest(&forest);
        }
    }
}
