//! Growth schedules `f(n)` and decompositions of a vertex set into layers
//! whose members are pairwise more than `f(n)` apart.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use num_bigint::{BigInt, BigUint};
use num_traits::{Pow, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Adjacency, BipartiteGraph, VertexId};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Shape {
    /// `f(n) = c·rⁿ`
    Geometric { c: BigUint, ratio: u64 },
    /// Listed values, then `last·r, last·r², …`.
    Explicit { values: Vec<BigUint>, ratio: u64 },
}

/// Exact bound on `Σ 8/f(n)` over all `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailCertificate {
    pub head_terms: usize,
    #[serde(serialize_with = "ser_rat")]
    pub head_sum: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub tail_bound: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub total: Rational,
}

fn ser_rat<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    rational::serde_str::serialize(r, s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerSchedule {
    shape: Shape,
    epsilon_budget: Rational,
    certificate: TailCertificate,
}

fn big_rat(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

fn eight_over(n: &BigUint) -> Rational {
    Rational::new(BigInt::from(8), BigInt::from(n.clone()))
}

impl LayerSchedule {
    /// `f(n) = c·rⁿ` with `c` the least `8·r^k` whose full series
    /// `(8/c)·r/(r-1)` is below `epsilon`.
    pub fn geometric(epsilon: Rational, ratio: u64) -> Result<Self> {
        if epsilon <= Rational::zero() {
            return Err(Error::BadSchedule("epsilon must be positive".into()));
        }
        if ratio < 2 {
            return Err(Error::BadSchedule(format!("ratio must be at least 2, got {ratio}")));
        }
        let r = BigUint::from(ratio);
        let factor = Rational::new(BigInt::from(ratio), BigInt::from(ratio - 1));
        let mut c = BigUint::from(8u32);
        while eight_over(&c) * &factor >= epsilon {
            c *= &r;
        }
        let tail = eight_over(&c) * &factor;
        Ok(LayerSchedule {
            shape: Shape::Geometric { c, ratio },
            certificate: TailCertificate {
                head_terms: 0,
                head_sum: Rational::zero(),
                tail_bound: tail.clone(),
                total: tail,
            },
            epsilon_budget: epsilon,
        })
    }

    /// Listed values followed by geometric growth with `ratio`. Requires a
    /// non-decreasing sequence with every term at least 8 and total sum of
    /// `8/f(n)` below `epsilon`.
    pub fn explicit(values: &[u64], ratio: u64, epsilon: Rational) -> Result<Self> {
        let s = Self::unchecked(values, ratio, epsilon)?;
        if let Some(v) = values.iter().find(|&&v| v < 8) {
            return Err(Error::BadSchedule(format!("f(n) = {v} is below 8")));
        }
        if s.certificate.total >= s.epsilon_budget {
            return Err(Error::BadSchedule(format!(
                "sum of 8/f(n) is {} which is not below epsilon {}",
                rational::format(&s.certificate.total),
                rational::format(&s.epsilon_budget)
            )));
        }
        Ok(s)
    }

    /// Like `explicit` without the floor or budget checks; for exercising
    /// small hand-made instances.
    pub fn unchecked(values: &[u64], ratio: u64, epsilon: Rational) -> Result<Self> {
        if values.is_empty() || values[0] == 0 {
            return Err(Error::BadSchedule("need at least one positive value".into()));
        }
        if ratio < 2 {
            return Err(Error::BadSchedule(format!("ratio must be at least 2, got {ratio}")));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::BadSchedule("values must be non-decreasing".into()));
        }
        let values: Vec<BigUint> = values.iter().map(|&v| BigUint::from(v)).collect();
        let head_sum: Rational = values.iter().map(eight_over).sum();
        let last = values.last().unwrap();
        let tail_bound = Rational::new(BigInt::from(8), BigInt::from(last.clone()) * BigInt::from(ratio - 1));
        Ok(LayerSchedule {
            certificate: TailCertificate {
                head_terms: values.len(),
                total: &head_sum + &tail_bound,
                head_sum,
                tail_bound,
            },
            shape: Shape::Explicit { values, ratio },
            epsilon_budget: epsilon,
        })
    }

    pub fn f_big(&self, n: usize) -> BigUint {
        match &self.shape {
            Shape::Geometric { c, ratio } => c * BigUint::from(*ratio).pow(n),
            Shape::Explicit { values, ratio } => match values.get(n) {
                Some(v) => v.clone(),
                None => values.last().unwrap() * BigUint::from(*ratio).pow(n + 1 - values.len()),
            },
        }
    }

    /// `f(n)`, saturated at `u64::MAX` (beyond any graph distance).
    pub fn f(&self, n: usize) -> u64 {
        self.f_big(n).to_u64().unwrap_or(u64::MAX)
    }

    pub fn epsilon_budget(&self) -> &Rational {
        &self.epsilon_budget
    }

    pub fn certificate(&self) -> &TailCertificate {
        &self.certificate
    }

    /// `ε_n = ε − Σ_{i≤n} 8/f(i)`; `n = -1` gives `ε`.
    pub fn epsilon_n(&self, n: isize) -> Rational {
        let mut e = self.epsilon_budget.clone();
        for i in 0..=n {
            e -= eight_over(&self.f_big(i as usize));
        }
        e
    }

    /// `8/f(n)`, the budget spent by stage `n`.
    pub fn stage_cost(&self, n: usize) -> Rational {
        eight_over(&self.f_big(n))
    }

    /// The first `k` values of `f` as exact integers.
    pub fn prefix(&self, k: usize) -> Vec<BigUint> {
        (0..k).map(|n| self.f_big(n)).collect()
    }

    /// `f(n)` as a rational, for exact comparisons with `ε`.
    pub fn f_rational(&self, n: usize) -> Rational {
        big_rat(&self.f_big(n))
    }
}

/// Shorthand for [`LayerSchedule::geometric`].
pub fn geometric_schedule(epsilon: Rational, ratio: u64) -> Result<LayerSchedule> {
    LayerSchedule::geometric(epsilon, ratio)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Layering {
    pub layers: Vec<Vec<VertexId>>,
    /// `f(n)` for each layer, saturated.
    pub f: Vec<u64>,
}

impl Layering {
    pub fn layer_of(&self) -> HashMap<VertexId, usize> {
        let mut out = HashMap::new();
        for (n, layer) in self.layers.iter().enumerate() {
            for &x in layer {
                out.insert(x, n);
            }
        }
        out
    }

    /// Pairs in the same layer at distance `<= f(n)`, at most one per layer.
    pub fn separation_violation<G: Adjacency + ?Sized>(&self, g: &G) -> Option<(usize, VertexId, VertexId)> {
        let index: HashMap<VertexId, usize> = (0..g.vertex_count()).map(|v| (g.vertex_id(v), v)).collect();
        let mut bfs = Bfs::new(g.vertex_count());
        for (n, layer) in self.layers.iter().enumerate() {
            let members: HashSet<usize> = layer.iter().map(|x| index[x]).collect();
            for &x in layer {
                let hit = bfs.run(g, index[&x], self.f[n], |v| v != index[&x] && members.contains(&v));
                if let Some(v) = hit {
                    return Some((n, x, g.vertex_id(v)));
                }
            }
        }
        None
    }
}

/// Reusable bounded breadth-first search with stamp-based reset.
pub(crate) struct Bfs {
    stamp: Vec<u32>,
    dist: Vec<u64>,
    round: u32,
    queue: VecDeque<usize>,
}

impl Bfs {
    pub(crate) fn new(n: usize) -> Self {
        Bfs {
            stamp: vec![0; n],
            dist: vec![0; n],
            round: 0,
            queue: VecDeque::new(),
        }
    }

    /// Visits every vertex within `limit` of `src`; stops early and
    /// returns the first vertex for which `stop` holds.
    pub(crate) fn run<G: Adjacency + ?Sized>(
        &mut self,
        g: &G,
        src: usize,
        limit: u64,
        mut stop: impl FnMut(usize) -> bool,
    ) -> Option<usize> {
        self.round += 1;
        self.queue.clear();
        self.stamp[src] = self.round;
        self.dist[src] = 0;
        self.queue.push_back(src);
        while let Some(v) = self.queue.pop_front() {
            if stop(v) {
                return Some(v);
            }
            if self.dist[v] >= limit {
                continue;
            }
            for &w in g.adjacent(v) {
                if self.stamp[w] != self.round {
                    self.stamp[w] = self.round;
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
            }
        }
        None
    }
}

/// Greedy layering: `A_n` collects, in ascending id order, every still
/// uncovered vertex farther than `f(n)` from the members already chosen.
pub fn greedy_layering<G: Adjacency + ?Sized>(g: &G, schedule: &LayerSchedule) -> Layering {
    let len = g.vertex_count();
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by_key(|&v| g.vertex_id(v));
    let mut covered = vec![false; len];
    let mut blocked = vec![usize::MAX; len];
    let mut remaining = len;
    let mut bfs = Bfs::new(len);
    let mut out = Layering {
        layers: Vec::new(),
        f: Vec::new(),
    };
    let mut n = 0;
    while remaining > 0 {
        let f = schedule.f(n);
        let mut layer = Vec::new();
        for &v in &order {
            if covered[v] || blocked[v] == n {
                continue;
            }
            layer.push(g.vertex_id(v));
            covered[v] = true;
            remaining -= 1;
            bfs.run(g, v, f, |w| {
                blocked[w] = n;
                false
            });
        }
        out.layers.push(layer);
        out.f.push(f);
        n += 1;
    }
    out
}

/// A vertex set without global indexing, read through a window. `Ord` on
/// points is the canonical scan order.
pub trait KeyedSpace {
    type Point: Clone + Ord + Hash;
    fn contains(&self, p: &Self::Point) -> bool;
    fn neighbors(&self, p: &Self::Point) -> Vec<Self::Point>;
    /// Every point within distance `r` of `p` in the full space lies in
    /// the window.
    fn ball_inside(&self, p: &Self::Point, r: u64) -> bool;
    /// Numeric label used in error reports.
    fn label(&self, p: &Self::Point) -> u64;

    /// Points within distance `r` of `x` that precede it, in order.
    fn lesser_ball(&self, x: &Self::Point, r: u64) -> Vec<Self::Point> {
        let mut seen = HashSet::from([x.clone()]);
        let mut frontier = vec![x.clone()];
        let mut out = Vec::new();
        for _ in 0..r {
            let mut next = Vec::new();
            for p in &frontier {
                for q in self.neighbors(p) {
                    if seen.insert(q.clone()) {
                        if q < *x {
                            out.push(q.clone());
                        }
                        next.push(q);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        out.sort();
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Membership {
    Member,
    NotMember,
    Unreliable,
}

impl Membership {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Membership::Member => Some(true),
            Membership::NotMember => Some(false),
            Membership::Unreliable => None,
        }
    }
}

impl Serialize for Membership {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.as_bool() {
            Some(b) => s.serialize_bool(b),
            None => s.serialize_str("UNRELIABLE"),
        }
    }
}

struct Resolver<'a, W: KeyedSpace> {
    space: &'a W,
    schedule: &'a LayerSchedule,
    memo: HashMap<(W::Point, usize), Membership>,
}

impl<W: KeyedSpace> Resolver<'_, W> {
    fn member(&mut self, x: &W::Point, n: usize) -> Membership {
        if let Some(&m) = self.memo.get(&(x.clone(), n)) {
            return m;
        }
        let result = self.compute(x, n);
        self.memo.insert((x.clone(), n), result);
        result
    }

    fn compute(&mut self, x: &W::Point, n: usize) -> Membership {
        for m in 0..n {
            match self.member(x, m) {
                Membership::Member => return Membership::NotMember,
                Membership::Unreliable => return Membership::Unreliable,
                Membership::NotMember => {}
            }
        }
        let f = self.schedule.f(n);
        if !self.space.ball_inside(x, f) {
            return Membership::Unreliable;
        }
        for y in self.space.lesser_ball(x, f) {
            match self.member(&y, n) {
                Membership::Member => return Membership::NotMember,
                Membership::Unreliable => return Membership::Unreliable,
                Membership::NotMember => {}
            }
        }
        Membership::Member
    }
}

/// Whether `x` belongs to layer `n` of the greedy layering of the full
/// space, decided from the window alone. The scan order is the point order.
/// `Unreliable` when the ball of radius `f(n)·(n+2)` leaves the window or
/// the recursive decision reaches a point whose `f`-ball does.
pub fn local_layer_membership<W: KeyedSpace>(
    w: &W,
    x: &W::Point,
    n: usize,
    schedule: &LayerSchedule,
) -> Result<Membership> {
    if !w.contains(x) {
        return Err(Error::UnknownVertex(w.label(x)));
    }
    let reach = schedule.f(n).saturating_mul(n as u64 + 2);
    if !w.ball_inside(x, reach) {
        return Ok(Membership::Unreliable);
    }
    let mut state = Resolver {
        space: w,
        schedule,
        memo: HashMap::new(),
    };
    Ok(state.member(x, n))
}

/// A finite graph is its own window: every ball is inside.
impl KeyedSpace for BipartiteGraph {
    type Point = VertexId;

    fn contains(&self, p: &VertexId) -> bool {
        BipartiteGraph::contains(self, *p)
    }

    fn neighbors(&self, p: &VertexId) -> Vec<VertexId> {
        let v = self.index_of(*p).expect("point in graph");
        BipartiteGraph::neighbors(self, v).iter().map(|&w| self.id(w)).collect()
    }

    fn ball_inside(&self, _p: &VertexId, _r: u64) -> bool {
        true
    }

    fn label(&self, p: &VertexId) -> u64 {
        *p
    }
}
