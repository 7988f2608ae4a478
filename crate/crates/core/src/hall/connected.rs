//! Enumeration of connected single-sided vertex sets under distance-2
//! adjacency, each set visited exactly once (ESU-style growth from its least
//! member).
//!
//! `|N(F)|` is maintained incrementally. Because `N(F)` only grows when `F`
//! grows, a set whose neighbourhood already meets the largest requirement
//! any superset up to the cap could face is pruned together with its
//! subtree.

/// A graph seen through dense vertex slots. Slot order must agree with the
/// id order used for canonical witnesses.
pub(crate) trait SetSpace {
    fn universe(&self) -> usize;
    /// Neighbours in the underlying bipartite graph.
    fn base_neighbors(&self, v: usize, out: &mut Vec<usize>);
}

pub(crate) struct SearchParams<'a> {
    pub cap: usize,
    /// Sets smaller than this are grown but never reported.
    pub floor: usize,
    /// `violates(|F|, |N(F)|)`
    pub violates: &'a dyn Fn(usize, usize) -> bool,
    /// Subtrees are cut once `|N(F)| >= prune_at`.
    pub prune_at: usize,
    /// Stop after this many sets; `None` is unbounded.
    pub budget: Option<u64>,
}

#[derive(Debug, Default)]
pub(crate) struct SearchOutcome {
    /// Canonical (smallest, then lexicographically least) violator and its
    /// neighbourhood size.
    pub best: Option<(Vec<usize>, usize)>,
    pub examined: u64,
    pub pruned: u64,
    pub exhausted_budget: bool,
}

struct Search<'a, S: SetSpace + ?Sized> {
    space: &'a S,
    allowed: &'a dyn Fn(usize) -> bool,
    params: &'a SearchParams<'a>,
    ncount: Vec<u32>,
    nsize: usize,
    near: Vec<u32>,
    in_sub: Vec<bool>,
    sub: Vec<usize>,
    out: SearchOutcome,
    scratch: Vec<usize>,
}

impl<'a, S: SetSpace + ?Sized> Search<'a, S> {
    fn g2_neighbors(&mut self, v: usize) -> Vec<usize> {
        let mut first = std::mem::take(&mut self.scratch);
        first.clear();
        self.space.base_neighbors(v, &mut first);
        let mut out = Vec::new();
        let mut second = Vec::new();
        for &w in &first {
            second.clear();
            self.space.base_neighbors(w, &mut second);
            out.extend(second.iter().copied().filter(|&u| u != v && (self.allowed)(u)));
        }
        self.scratch = first;
        out.sort_unstable();
        out.dedup();
        out
    }

    fn add(&mut self, v: usize, g2: &[usize]) {
        self.sub.push(v);
        self.in_sub[v] = true;
        let mut nb = Vec::new();
        self.space.base_neighbors(v, &mut nb);
        for w in nb {
            if self.ncount[w] == 0 {
                self.nsize += 1;
            }
            self.ncount[w] += 1;
        }
        for &u in g2 {
            self.near[u] += 1;
        }
    }

    fn remove(&mut self, v: usize, g2: &[usize]) {
        self.sub.pop();
        self.in_sub[v] = false;
        let mut nb = Vec::new();
        self.space.base_neighbors(v, &mut nb);
        for w in nb {
            self.ncount[w] -= 1;
            if self.ncount[w] == 0 {
                self.nsize -= 1;
            }
        }
        for &u in g2 {
            self.near[u] -= 1;
        }
    }

    fn visit(&mut self) -> bool {
        self.out.examined += 1;
        let size = self.sub.len();
        if size >= self.params.floor && (self.params.violates)(size, self.nsize) {
            let mut cand = self.sub.clone();
            cand.sort_unstable();
            let better = match &self.out.best {
                None => true,
                Some((b, _)) => (cand.len(), &cand) < (b.len(), b),
            };
            if better {
                self.out.best = Some((cand, self.nsize));
            }
        }
        if self.nsize >= self.params.prune_at {
            self.out.pruned += 1;
            return false;
        }
        true
    }

    fn extend(&mut self, ext: Vec<usize>, root: usize) -> bool {
        if let Some(b) = self.params.budget {
            if self.out.examined >= b {
                self.out.exhausted_budget = true;
                return false;
            }
        }
        let grow = self.visit();
        if !grow || self.sub.len() >= self.params.cap {
            return true;
        }
        let mut ext = ext;
        while let Some(w) = ext.pop() {
            let g2 = self.g2_neighbors(w);
            let mut next = ext.clone();
            next.extend(
                g2.iter()
                    .copied()
                    .filter(|&u| u > root && !self.in_sub[u] && self.near[u] == 0),
            );
            self.add(w, &g2);
            let keep_going = self.extend(next, root);
            self.remove(w, &g2);
            if !keep_going {
                return false;
            }
        }
        true
    }
}

/// Runs the enumeration from every root (roots must be allowed vertices).
pub(crate) fn search<S: SetSpace + ?Sized>(
    space: &S,
    roots: &[usize],
    allowed: &dyn Fn(usize) -> bool,
    params: &SearchParams<'_>,
) -> SearchOutcome {
    let n = space.universe();
    let mut s = Search {
        space,
        allowed,
        params,
        ncount: vec![0; n],
        nsize: 0,
        near: vec![0; n],
        in_sub: vec![false; n],
        sub: Vec::with_capacity(params.cap),
        out: SearchOutcome::default(),
        scratch: Vec::new(),
    };
    if params.cap == 0 {
        return s.out;
    }
    for &root in roots {
        let g2 = s.g2_neighbors(root);
        let ext: Vec<usize> = g2.iter().copied().filter(|&u| u > root).collect();
        s.add(root, &g2);
        let keep_going = s.extend(ext, root);
        s.remove(root, &g2);
        if !keep_going {
            break;
        }
    }
    s.out
}
