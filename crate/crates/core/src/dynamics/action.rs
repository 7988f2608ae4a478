//! Staged construction of two permutations generating a 4-regular forest,
//! grown from sparse layers through shells of partial injections.

use std::collections::VecDeque;

use rand::Rng;
use serde::Serialize;

use super::forest::{ForestWindow, UNDEF};
use crate::error::{Error, Result};
use crate::graph::{Adjacency, VertexId};
use crate::layers::Bfs;

/// The exponents `−2, −1, 1, 2` of the four partial maps, by slot.
pub const SLOTS: [i8; 4] = [-2, -1, 1, 2];

fn inverse_slot(s: usize) -> usize {
    3 - s
}

/// A finite acyclic graph of maximum degree 4; points of degree 4 are its
/// interior.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeWindow {
    adj: Vec<Vec<usize>>,
}

impl Adjacency for TreeWindow {
    fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    fn adjacent(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    fn vertex_id(&self, v: usize) -> VertexId {
        v as VertexId
    }
}

impl TreeWindow {
    pub fn new(mut adj: Vec<Vec<usize>>) -> Result<Self> {
        let n = adj.len();
        let mut edges = 0;
        for (x, ns) in adj.iter_mut().enumerate() {
            ns.sort_unstable();
            if ns.windows(2).any(|w| w[0] == w[1]) || ns.contains(&x) {
                return Err(Error::InvalidGraph(format!("repeated edge or loop at {x}")));
            }
            if ns.len() > 4 {
                return Err(Error::InvalidGraph(format!("degree {} at {x}", ns.len())));
            }
            edges += ns.len();
        }
        for (x, ns) in adj.iter().enumerate() {
            for &y in ns {
                if y >= n || adj[y].binary_search(&x).is_err() {
                    return Err(Error::InvalidGraph(format!("edge {x}-{y} is not symmetric")));
                }
            }
        }
        let t = TreeWindow { adj };
        let comps = t.components();
        if edges / 2 + comps != n {
            return Err(Error::InvalidGraph("graph has a cycle".into()));
        }
        Ok(t)
    }

    /// The forest restricted to its deep points.
    pub fn from_forest(f: &ForestWindow) -> Result<Self> {
        let adj = (0..f.len())
            .map(|x| {
                if !f.deep[x] {
                    return Vec::new();
                }
                let mut ns: Vec<usize> = f.adj[x].iter().map(|&y| y as usize).filter(|&y| f.deep[y]).collect();
                ns.dedup();
                ns
            })
            .collect();
        Self::new(adj)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adj[x]
    }

    pub fn is_interior(&self, x: usize) -> bool {
        self.adj[x].len() == 4
    }

    fn components(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut count = 0;
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in &self.adj[x] {
                    if !std::mem::replace(&mut seen[y], true) {
                        stack.push(y);
                    }
                }
            }
        }
        count
    }

    fn distances_from(&self, sources: &[usize], limit: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(x) = queue.pop_front() {
            if dist[x] >= limit {
                continue;
            }
            for &y in &self.adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Longest shortest path, over all components.
    pub fn diameter(&self) -> usize {
        let mut best = 0;
        let mut seen = vec![false; self.len()];
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let d = self.distances_from(&[s], usize::MAX);
            let far = (0..self.len()).filter(|&x| d[x] != usize::MAX).max_by_key(|&x| d[x]).unwrap();
            for x in (0..self.len()).filter(|&x| d[x] != usize::MAX) {
                seen[x] = true;
            }
            let d2 = self.distances_from(&[far], usize::MAX);
            best = best.max(d2.iter().copied().filter(|&v| v != usize::MAX).max().unwrap_or(0));
        }
        best
    }
}

/// A 4-regular tree window: a spine of `2·radius + 1` points, each with two
/// side branches in which every point keeps branching with probability
/// `p`, up to `depth` levels.
pub fn synthetic_tree<R: Rng>(rng: &mut R, radius: usize, p: f64, depth: usize) -> TreeWindow {
    let spine = 2 * radius + 1;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); spine];
    for i in 1..spine {
        adj[i - 1].push(i);
        adj[i].push(i - 1);
    }
    let mut frontier: Vec<(usize, usize)> = Vec::new();
    for i in 0..spine {
        for _ in 0..2 {
            let c = adj.len();
            adj.push(vec![i]);
            adj[i].push(c);
            frontier.push((c, 1));
        }
    }
    while let Some((x, d)) = frontier.pop() {
        if d >= depth || !rng.gen_bool(p) {
            continue;
        }
        for _ in 0..3 {
            let c = adj.len();
            adj.push(vec![x]);
            adj[x].push(c);
            frontier.push((c, d + 1));
        }
    }
    TreeWindow::new(adj).expect("a tree by construction")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub n: usize,
    pub separation: u64,
    pub layer: usize,
    pub roots: usize,
    pub added: usize,
    pub domain: usize,
    pub shells: usize,
    pub layer_in_domain: bool,
    /// Pairs at distance at most 4 in the domain but not joined inside it.
    pub connect_violations: usize,
    pub max_component_diameter: usize,
    pub diameter_bound: u64,
    pub diameter_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct F2Action {
    /// `maps[s][x] = f_{SLOTS[s]}(x)`.
    pub maps: [Vec<u32>; 4],
    pub covered: Vec<bool>,
    pub coverage: f64,
    pub stages: Vec<StageReport>,
}

impl F2Action {
    pub fn get(&self, s: usize, x: usize) -> Option<usize> {
        let y = self.maps[s][x];
        (y != UNDEF).then_some(y as usize)
    }

    pub fn covered_count(&self) -> usize {
        self.covered.iter().filter(|&&c| c).count()
    }
}

struct Builder<'t> {
    t: &'t TreeWindow,
    maps: [Vec<u32>; 4],
    inv: [Vec<u32>; 4],
    domain: Vec<bool>,
}

impl Builder<'_> {
    fn state(&self, x: usize, vals: &[Option<usize>; 4]) -> String {
        let nb: Vec<String> = self.t.adj[x]
            .iter()
            .map(|&y| {
                let maps: Vec<String> = (0..4)
                    .filter(|&s| self.maps[s][y] != UNDEF)
                    .map(|s| format!("f{}={}", SLOTS[s], self.maps[s][y]))
                    .collect();
                let ranges: Vec<String> = (0..4)
                    .filter(|&s| self.inv[s][y] != UNDEF)
                    .map(|s| format!("f{}({})", SLOTS[s], self.inv[s][y]))
                    .collect();
                format!("{y}[{}; image of {}]", maps.join(","), ranges.join(","))
            })
            .collect();
        format!("assigned {vals:?}; neighbours {}", nb.join(" "))
    }

    fn extend(&mut self, x: usize) -> Result<()> {
        let mut vals: [Option<usize>; 4] = [None; 4];
        for &y in &self.t.adj[x] {
            for s in 0..4 {
                if self.maps[s][y] as usize == x {
                    let i = inverse_slot(s);
                    if vals[i].is_some() || (self.inv[i][y] != UNDEF && self.inv[i][y] as usize != x) {
                        return Err(Error::ExtensionStuck {
                            vertex: x as VertexId,
                            state: self.state(x, &vals),
                        });
                    }
                    vals[i] = Some(y);
                }
            }
        }
        let free_slots: Vec<usize> = (0..4).filter(|&s| vals[s].is_none()).collect();
        let free_nbrs: Vec<usize> = self.t.adj[x]
            .iter()
            .copied()
            .filter(|y| !vals.contains(&Some(*y)))
            .collect();
        let ok = |s: usize, z: usize| self.inv[s][z] == UNDEF;
        let chosen = permutations(free_nbrs.len())
            .into_iter()
            .find(|perm| free_slots.iter().zip(perm).all(|(&s, &k)| ok(s, free_nbrs[k])));
        let Some(perm) = chosen else {
            return Err(Error::ExtensionStuck {
                vertex: x as VertexId,
                state: self.state(x, &vals),
            });
        };
        for (&s, &k) in free_slots.iter().zip(&perm) {
            vals[s] = Some(free_nbrs[k]);
        }
        for (s, v) in vals.iter().enumerate() {
            let y = v.expect("all four slots are assigned");
            self.maps[s][x] = y as u32;
            self.inv[s][y] = x as u32;
        }
        Ok(())
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(k - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, k - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

/// Layers `A_n` with pairwise separation above `16·4ⁿ`; each new layer
/// point not yet covered grows shells of points within distance 3 of the
/// previous domain, and the four partial injections are extended shell by
/// shell. Runs at most `stages` stages, fewer if the separation outgrows
/// the window.
pub fn f2_action_from_forest(t: &TreeWindow, stages: usize) -> Result<F2Action> {
    let diameter = t.diameter();
    if diameter < 2 * 2 * 16 * 4 {
        return Err(Error::WindowTooSmall(format!(
            "diameter {diameter} is below {}, the two-stage minimum",
            2 * 2 * 16 * 4
        )));
    }
    let n = t.len();
    let mut b = Builder {
        t,
        maps: std::array::from_fn(|_| vec![UNDEF; n]),
        inv: std::array::from_fn(|_| vec![UNDEF; n]),
        domain: vec![false; n],
    };
    let mut layered = vec![false; n];
    let mut bfs = Bfs::new(n);
    let mut reports = Vec::new();
    for stage in 0..stages {
        let separation = 16u64 * 4u64.pow(stage as u32);
        if separation >= diameter as u64 {
            break;
        }
        let mut blocked = vec![false; n];
        let mut layer = Vec::new();
        for x in 0..n {
            if layered[x] || blocked[x] || !t.is_interior(x) {
                continue;
            }
            layered[x] = true;
            layer.push(x);
            bfs.run(t, x, separation, |w| {
                blocked[w] = true;
                false
            });
        }

        let old: Vec<usize> = (0..n).filter(|&x| b.domain[x]).collect();
        let near_old = t.distances_from(&old, 3);
        let roots: Vec<usize> = layer.iter().copied().filter(|&x| !b.domain[x]).collect();
        let mut claimed = b.domain.clone();
        let mut owner = vec![usize::MAX; n];
        let mut shells: Vec<Vec<usize>> = vec![roots.clone()];
        for &x in &roots {
            claimed[x] = true;
            owner[x] = x;
        }
        loop {
            let mut next = Vec::new();
            for &v in shells.last().unwrap() {
                for &y in &t.adj[v] {
                    if claimed[y] {
                        if owner[y] != usize::MAX && owner[y] != owner[v] {
                            return Err(Error::ExtensionStuck {
                                vertex: y as VertexId,
                                state: format!("shells of {} and {} meet", owner[y], owner[v]),
                            });
                        }
                        continue;
                    }
                    if near_old[y] <= 3 && t.is_interior(y) {
                        claimed[y] = true;
                        owner[y] = owner[v];
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_unstable();
            shells.push(next);
        }
        for shell in &shells {
            for &x in shell {
                b.extend(x)?;
            }
        }
        let added: usize = shells.iter().map(Vec::len).sum();
        for shell in &shells {
            for &x in shell {
                b.domain[x] = true;
            }
        }
        reports.push(audit_stage(t, &b.domain, stage, separation, &layer, roots.len(), added, shells.len()));
    }
    let covered = b.domain.clone();
    let interior = (0..n).filter(|&x| t.is_interior(x)).count().max(1);
    let coverage = covered.iter().filter(|&&c| c).count() as f64 / interior as f64;
    Ok(F2Action {
        maps: b.maps,
        covered,
        coverage,
        stages: reports,
    })
}

#[allow(clippy::too_many_arguments)]
fn audit_stage(
    t: &TreeWindow,
    domain: &[bool],
    stage: usize,
    separation: u64,
    layer: &[usize],
    roots: usize,
    added: usize,
    shells: usize,
) -> StageReport {
    let n = t.len();
    let members: Vec<usize> = (0..n).filter(|&x| domain[x]).collect();
    let mut uf: Vec<usize> = (0..n).collect();
    for &x in &members {
        for &y in &t.adj[x] {
            if domain[y] {
                let (a, c) = (find(&mut uf, x), find(&mut uf, y));
                uf[a] = c;
            }
        }
    }
    let mut bfs = Bfs::new(n);
    let mut connect_violations = 0;
    let mut close: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &x in &members {
        let mut near = Vec::new();
        bfs.run(t, x, 8, |w| {
            if w != x && domain[w] {
                near.push(w);
            }
            false
        });
        close[x] = near;
    }
    let dist = |x: usize, y: usize| -> usize {
        let d = t.distances_from(&[x], 8);
        d[y]
    };
    for &x in &members {
        for &y in &close[x] {
            if y > x && dist(x, y) <= 4 && find(&mut uf, x) != find(&mut uf, y) {
                connect_violations += 1;
            }
        }
    }

    let bound = 4u64.pow(stage as u32);
    let mut comp = vec![usize::MAX; n];
    let mut max_diameter = 0;
    let mut diameter_violations = 0;
    for &s in &members {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut part = vec![s];
        comp[s] = s;
        let mut k = 0;
        while k < part.len() {
            let x = part[k];
            k += 1;
            for &y in &close[x] {
                if comp[y] == usize::MAX {
                    comp[y] = s;
                    part.push(y);
                }
            }
        }
        let mut diam = 0;
        for &src in &part {
            let mut hop = std::collections::HashMap::from([(src, 0usize)]);
            let mut queue = VecDeque::from([src]);
            while let Some(x) = queue.pop_front() {
                let h = hop[&x];
                diam = diam.max(h);
                for &y in &close[x] {
                    if let std::collections::hash_map::Entry::Vacant(e) = hop.entry(y) {
                        e.insert(h + 1);
                        queue.push_back(y);
                    }
                }
            }
        }
        max_diameter = max_diameter.max(diam);
        if diam as u64 > bound {
            diameter_violations += 1;
        }
    }
    StageReport {
        n: stage,
        separation,
        layer: layer.len(),
        roots,
        added,
        domain: members.len(),
        shells,
        layer_in_domain: layer.iter().all(|&x| domain[x]),
        connect_violations,
        max_component_diameter: max_diameter,
        diameter_bound: bound,
        diameter_violations,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ActionAudit {
    pub covered: usize,
    /// Covered points whose four images are not exactly their neighbours.
    pub image_violations: usize,
    pub inverse_violations: usize,
    pub generated_edges: usize,
    pub forest_edges: usize,
    pub words_checked: u64,
    pub fixed_points: usize,
}

impl ActionAudit {
    pub fn passed(&self) -> bool {
        self.image_violations == 0
            && self.inverse_violations == 0
            && self.generated_edges == self.forest_edges
            && self.fixed_points == 0
    }
}

/// Checks the action on its covered set, including that no nonempty
/// reduced word of length at most `max_word` staying in the covered set
/// fixes a point.
pub fn audit_action(t: &TreeWindow, a: &F2Action, max_word: usize) -> ActionAudit {
    let mut out = ActionAudit::default();
    let cov = |x: usize| a.covered[x];
    let mut generated = std::collections::BTreeSet::new();
    for x in (0..t.len()).filter(|&x| cov(x)) {
        out.covered += 1;
        let mut imgs: Vec<usize> = (0..4).filter_map(|s| a.get(s, x)).collect();
        imgs.sort_unstable();
        if imgs != t.adj[x] {
            out.image_violations += 1;
        }
        for s in 0..4 {
            if let Some(y) = a.get(s, x) {
                if cov(y) {
                    generated.insert((x.min(y), x.max(y)));
                    if a.get(inverse_slot(s), y) != Some(x) {
                        out.inverse_violations += 1;
                    }
                }
            }
        }
        for &y in &t.adj[x] {
            if y > x && cov(y) {
                out.forest_edges += 1;
            }
        }
        let mut stack: Vec<(usize, usize, usize)> = vec![(x, usize::MAX, 0)];
        while let Some((v, last, len)) = stack.pop() {
            if len == max_word {
                continue;
            }
            for s in 0..4 {
                if last != usize::MAX && s == inverse_slot(last) {
                    continue;
                }
                let Some(y) = a.get(s, v).filter(|&y| cov(y)) else { continue };
                out.words_checked += 1;
                if y == x {
                    out.fixed_points += 1;
                }
                stack.push((y, s, len + 1));
            }
        }
    }
    out.generated_edges = generated.len();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn synthetic_tree_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = synthetic_tree(&mut rng, 128, 0.3, 8);
        assert!(t.diameter() >= 256);
        for i in 1..256 {
            assert!(t.is_interior(i));
        }
        assert!(!t.is_interior(0));
    }

    #[test]
    fn rejects_cycles_and_small_windows() {
        let tri = vec![vec![1, 2], vec![0, 2], vec![0, 1]];
        assert!(TreeWindow::new(tri).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = synthetic_tree(&mut rng, 40, 0.3, 4);
        assert!(matches!(f2_action_from_forest(&t, 2), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn permutations_are_ordered() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3)[0], vec![0, 1, 2]);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn covered_points_see_all_neighbours() {
        for seed in 0..4 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = synthetic_tree(&mut rng, 128, 0.3, 8);
            let a = f2_action_from_forest(&t, 3).unwrap();
            assert!(a.stages.len() >= 2);
            assert!(a.covered_count() > 0);
            for r in &a.stages {
                assert!(r.layer_in_domain);
                assert_eq!(r.connect_violations, 0, "{r:?}");
                assert_eq!(r.diameter_violations, 0, "{r:?}");
            }
            let audit = audit_action(&t, &a, 6);
            assert!(audit.passed(), "{audit:?}");
        }
    }

    #[test]
    fn corrupted_action_fails_audit() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = synthetic_tree(&mut rng, 128, 0.3, 8);
        let mut a = f2_action_from_forest(&t, 2).unwrap();
        let x = (0..t.len()).find(|&x| a.covered[x]).unwrap();
        a.maps[2][x] = a.maps[3][x];
        assert!(!audit_action(&t, &a, 6).passed());
    }
}
