//! Stage-by-stage perfect matching: each layer's vertices take an edge that
//! keeps the residual graph perfectly matchable, and the expansion budget
//! shrinks by `8/f(n)` per stage.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{index_distance, BipartiteGraph, PartialMatching, Side, VertexId};
use crate::hall::{check_hall, check_hall_eps_n, hopcroft_karp, ExpansionParams, HallReport, NONE};
use crate::layers::{greedy_layering, LayerSchedule, Layering};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageState {
    /// `-1` before the first stage.
    pub n: isize,
    pub matching: PartialMatching,
    pub residual: BipartiteGraph,
    pub epsilon_n: Rational,
}

impl StageState {
    pub fn initial(g: &BipartiteGraph, epsilon: Rational) -> Self {
        StageState {
            n: -1,
            matching: PartialMatching::new(),
            residual: g.clone(),
            epsilon_n: epsilon,
        }
    }
}

/// Dense working state: a perfect matching `mate` of the live subgraph,
/// kept perfect after every pick.
struct Engine<'g> {
    g: &'g BipartiteGraph,
    alive: Vec<bool>,
    mate: Vec<usize>,
    parent: Vec<usize>,
    stamp: Vec<u32>,
    round: u32,
}

impl<'g> Engine<'g> {
    fn new(g: &'g BipartiteGraph) -> Result<Self> {
        let left = g.side_indices(Side::Zero);
        let mate = hopcroft_karp(g, &left, &|_| true);
        if let Some(v) = (0..g.len()).find(|&v| mate[v] == NONE) {
            return Err(Error::HallViolated(format!(
                "residual has no perfect matching; {} stays unmatched (deficiency {})",
                g.id(v),
                mate.iter().filter(|&&m| m == NONE).count()
            )));
        }
        Ok(Engine {
            g,
            alive: vec![true; g.len()],
            mate,
            parent: vec![NONE; g.len()],
            stamp: vec![0; g.len()],
            round: 0,
        })
    }

    /// Alternating path from `a` to `b` avoiding `x` and `y`; flips it so
    /// that `a` and `b` are both matched inside it.
    fn reroute(&mut self, a: usize, b: usize, x: usize, y: usize) -> bool {
        self.round += 1;
        let round = self.round;
        let mut queue = VecDeque::from([a]);
        self.stamp[a] = round;
        while let Some(u) = queue.pop_front() {
            for &v in self.g.neighbors(u) {
                if !self.alive[v] || v == y || self.stamp[v] == round {
                    continue;
                }
                self.stamp[v] = round;
                self.parent[v] = u;
                if v == b {
                    let mut v = v;
                    loop {
                        let u = self.parent[v];
                        let prev = self.mate[u];
                        self.mate[u] = v;
                        self.mate[v] = u;
                        if u == a {
                            return true;
                        }
                        v = prev;
                    }
                }
                let w = self.mate[v];
                if w != x && self.stamp[w] != round {
                    self.stamp[w] = round;
                    queue.push_back(w);
                }
            }
        }
        false
    }

    /// Least live neighbour `y` of `x` such that `{x, y}` lies in a perfect
    /// matching of the live subgraph; removes both.
    fn pick(&mut self, x: usize) -> Result<usize> {
        for &y in self.g.neighbors(x) {
            if !self.alive[y] {
                continue;
            }
            let (mx, my) = (self.mate[x], self.mate[y]);
            if mx == y || self.reroute(my, mx, x, y) {
                self.mate[x] = y;
                self.mate[y] = x;
                self.alive[x] = false;
                self.alive[y] = false;
                return Ok(y);
            }
        }
        Err(Error::HallViolated(format!(
            "no Hall-preserving edge at {}; live neighbours {:?}",
            self.g.id(x),
            self.g
                .neighbors(x)
                .iter()
                .filter(|&&y| self.alive[y])
                .map(|&y| self.g.id(y))
                .collect::<Vec<_>>()
        )))
    }

    fn residual(&self) -> BipartiteGraph {
        self.g.induced_by_mask(&self.alive)
    }
}

/// The least edge `{x, y}` (by `y`) whose removal leaves a residual with
/// a perfect matching, i.e. zero deficiency on both sides.
pub fn select_hall_preserving_edge(residual: &BipartiteGraph, x: VertexId) -> Result<(VertexId, VertexId)> {
    let xv = residual.require(x)?;
    let mut e = Engine::new(residual)?;
    let y = e.pick(xv)?;
    Ok((x, residual.id(y)))
}

/// One stage on an explicit state: layer members still in the residual are
/// matched in ascending id order.
pub fn run_stage(prev: &StageState, layer: &BTreeSet<VertexId>, schedule: &LayerSchedule) -> Result<StageState> {
    let n = (prev.n + 1) as usize;
    let epsilon_n = &prev.epsilon_n - schedule.stage_cost(n);
    if epsilon_n <= Rational::from_integer(0.into()) {
        return Err(Error::BudgetExhausted { stage: n });
    }
    let mut matching = prev.matching.clone();
    let residual = if layer.iter().any(|&x| prev.residual.contains(x)) {
        let mut e = Engine::new(&prev.residual)?;
        for &x in layer {
            if let Some(xv) = prev.residual.index_of(x) {
                if e.alive[xv] {
                    let y = e.pick(xv)?;
                    matching.insert(x, prev.residual.id(y))?;
                }
            }
        }
        e.residual()
    } else {
        prev.residual.clone()
    };
    Ok(StageState {
        n: n as isize,
        matching,
        residual,
        epsilon_n,
    })
}

#[derive(Clone, Debug)]
pub struct MatchConfig {
    /// Full `Hall_{ε_n, f(n)}` check of every residual, up to `cap`.
    pub audit: bool,
    /// Size cap for the hypothesis check; 0 checks plain Hall only.
    pub cap: usize,
    /// Size cap for the per-stage audits.
    pub audit_cap: usize,
    /// Seed for sampling the sets used by the neighbourhood-loss audit.
    pub seed: u64,
    /// Sets sampled per stage for the neighbourhood-loss audit.
    pub samples: usize,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            audit: false,
            cap: 8,
            audit_cap: 8,
            seed: 0,
            samples: 64,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StageAudit {
    /// `Hall_{ε_n, f(n)}` on the residual, up to the cap (plain Hall when
    /// `f(n)` exceeds the cap).
    pub hall: Option<HallReport>,
    /// Sampled residual sets that lost neighbours in this stage.
    pub loss_checked: usize,
    /// Sets with `|D| >= 2` and `|D|·f(n) > 8|F|`.
    pub loss_violations: usize,
    /// Pairs of lost neighbours whose `F`-contacts were compared.
    pub distance_pairs: usize,
    /// Pairs with contacts at distance `<= f(n) - 4` or sharing a layer point.
    pub distance_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageLog {
    pub n: usize,
    pub f: u64,
    #[serde(with = "rational::serde_str")]
    pub epsilon_n: Rational,
    pub matched: Vec<[VertexId; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<StageAudit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchRun {
    pub matching: PartialMatching,
    pub stages: Vec<StageLog>,
}

/// Hypothesis check shared by the driver and the command line: balanced
/// even vertex set and `Hall_{ε,n}` up to `cap`.
pub fn check_hypothesis(g: &BipartiteGraph, p: &ExpansionParams, cap: usize) -> Result<()> {
    if g.len() % 2 == 1 || g.side_count(Side::Zero) != g.side_count(Side::One) {
        return Err(Error::HypothesisFailed {
            reason: format!(
                "sides have {} and {} vertices; no perfect matching exists",
                g.side_count(Side::Zero),
                g.side_count(Side::One)
            ),
            report: None,
        });
    }
    let report = if cap == 0 { check_hall(g) } else { check_hall_eps_n(g, p, cap.max(p.size_floor))? };
    if !report.satisfied {
        return Err(Error::HypothesisFailed {
            reason: format!("graph fails the expansion hypothesis (checked up to size {cap})"),
            report: Some(Box::new(report)),
        });
    }
    Ok(())
}

/// Perfect matching through the greedy layering of `g`.
pub fn layered_perfect_matching(
    g: &BipartiteGraph,
    p: &ExpansionParams,
    schedule: &LayerSchedule,
    cfg: &MatchConfig,
) -> Result<MatchRun> {
    let layering = greedy_layering(g, schedule);
    layered_perfect_matching_with(g, p, schedule, &layering, cfg)
}

/// As [`layered_perfect_matching`] with a caller-supplied layering, which
/// must cover the vertex set and respect the separation `> f(n)`.
pub fn layered_perfect_matching_with(
    g: &BipartiteGraph,
    p: &ExpansionParams,
    schedule: &LayerSchedule,
    layering: &Layering,
    cfg: &MatchConfig,
) -> Result<MatchRun> {
    if &p.epsilon < schedule.epsilon_budget() {
        return Err(Error::BadSchedule(format!(
            "schedule budget {} exceeds the hypothesis epsilon {}",
            rational::format(schedule.epsilon_budget()),
            rational::format(&p.epsilon)
        )));
    }
    check_hypothesis(g, p, cfg.cap)?;
    validate_layering(g, schedule, layering)?;

    let mut engine = Engine::new(g)?;
    let mut matching = PartialMatching::new();
    let mut epsilon_n = schedule.epsilon_budget().clone();
    let mut stages = Vec::with_capacity(layering.layers.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for (n, layer) in layering.layers.iter().enumerate() {
        epsilon_n -= schedule.stage_cost(n);
        if epsilon_n <= Rational::from_integer(0.into()) {
            return Err(Error::BudgetExhausted { stage: n });
        }
        let before = engine.alive.clone();
        let mut layer = layer.clone();
        layer.sort_unstable();
        let mut picks = Vec::new();
        for x in layer {
            let xv = g.require(x)?;
            if engine.alive[xv] {
                let yv = engine.pick(xv)?;
                matching.insert(x, g.id(yv))?;
                picks.push((xv, yv));
            }
        }
        let audit = if cfg.audit {
            let a = audit_stage(g, schedule, n, &epsilon_n, &before, &engine, &picks, cfg, &mut rng)?;
            Some(a)
        } else {
            None
        };
        stages.push(StageLog {
            n,
            f: schedule.f(n),
            epsilon_n: epsilon_n.clone(),
            matched: picks.iter().map(|&(x, y)| [g.id(x), g.id(y)]).collect(),
            audit,
        });
    }
    if let Some(v) = (0..g.len()).find(|&v| engine.alive[v]) {
        return Err(Error::HallViolated(format!("vertex {} left unmatched after the last layer", g.id(v))));
    }
    Ok(MatchRun { matching, stages })
}

/// Coverage and the separation `d > f(n)` of a supplied layering.
pub fn validate_layering(g: &BipartiteGraph, schedule: &LayerSchedule, layering: &Layering) -> Result<()> {
    let mut seen = BTreeSet::new();
    for layer in &layering.layers {
        for &x in layer {
            g.require(x)?;
            if !seen.insert(x) {
                return Err(Error::BadSchedule(format!("vertex {x} appears in two layers")));
            }
        }
    }
    if seen.len() != g.len() {
        return Err(Error::BadSchedule(format!(
            "layering covers {} of {} vertices",
            seen.len(),
            g.len()
        )));
    }
    let expected: Vec<u64> = (0..layering.layers.len()).map(|n| schedule.f(n)).collect();
    let checked = Layering {
        layers: layering.layers.clone(),
        f: expected,
    };
    if let Some((n, x, y)) = checked.separation_violation(g) {
        return Err(Error::BadSchedule(format!(
            "layer {n}: {x} and {y} are within distance f({n}) = {}",
            schedule.f(n)
        )));
    }
    Ok(())
}

fn neighbors_alive(g: &BipartiteGraph, set: &[usize], alive: &[bool]) -> BTreeSet<usize> {
    set.iter()
        .flat_map(|&v| g.neighbors(v).iter().copied())
        .filter(|&w| alive[w])
        .collect()
}

/// Random distance-2-connected set of live vertices of `seed`'s side.
fn grow_set(g: &BipartiteGraph, seed: usize, size: usize, alive: &[bool], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut set = vec![seed];
    let mut members = BTreeSet::from([seed]);
    while set.len() < size {
        let mut frontier: Vec<usize> = Vec::new();
        for &v in &set {
            for &w in g.neighbors(v) {
                if !alive[w] {
                    continue;
                }
                for &u in g.neighbors(w) {
                    if alive[u] && !members.contains(&u) {
                        frontier.push(u);
                    }
                }
            }
        }
        frontier.sort_unstable();
        frontier.dedup();
        match frontier.choose(rng) {
            Some(&u) => {
                members.insert(u);
                set.push(u);
            }
            None => break,
        }
    }
    set.sort_unstable();
    set
}

#[allow(clippy::too_many_arguments)]
fn audit_stage(
    g: &BipartiteGraph,
    schedule: &LayerSchedule,
    n: usize,
    epsilon_n: &Rational,
    before: &[bool],
    engine: &Engine<'_>,
    picks: &[(usize, usize)],
    cfg: &MatchConfig,
    rng: &mut ChaCha8Rng,
) -> Result<StageAudit> {
    let f = schedule.f(n);
    let residual = engine.residual();
    let floor = usize::try_from(f).unwrap_or(usize::MAX);
    let hall = if floor <= cfg.audit_cap {
        let p = ExpansionParams::new(epsilon_n.clone(), floor)?;
        check_hall_eps_n(&residual, &p, cfg.audit_cap)?
    } else {
        check_hall(&residual)
    };
    if !hall.satisfied {
        return Err(Error::HallViolated(format!(
            "stage {n}: residual fails Hall_{{{}, {f}}}: {}",
            rational::format(epsilon_n),
            serde_json::to_string(&hall)?
        )));
    }
    let mut audit = StageAudit {
        hall: Some(hall),
        ..StageAudit::default()
    };

    // which layer point each removed vertex answers to
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for &(x, y) in picks {
        owner.insert(x, x);
        owner.insert(y, x);
    }
    let mut seeds: Vec<usize> = Vec::new();
    for &(x, y) in picks {
        for r in [x, y] {
            for &w in g.neighbors(r) {
                if engine.alive[w] {
                    seeds.push(w);
                }
            }
        }
    }
    seeds.sort_unstable();
    seeds.dedup();
    if seeds.is_empty() {
        return Ok(audit);
    }
    for _ in 0..cfg.samples {
        let seed = *seeds.choose(rng).unwrap();
        let size = rng.gen_range(1..=cfg.audit_cap.max(1));
        let set = grow_set(g, seed, size, &engine.alive, rng);
        let nb = neighbors_alive(g, &set, before);
        let na = neighbors_alive(g, &set, &engine.alive);
        let lost: Vec<usize> = nb.difference(&na).copied().collect();
        if lost.is_empty() {
            continue;
        }
        audit.loss_checked += 1;
        if lost.len() < 2 {
            continue;
        }
        if (lost.len() as u128) * (f as u128) > 8 * set.len() as u128 {
            audit.loss_violations += 1;
        }
        let contact = |x: usize| *set.iter().find(|&&y| g.neighbors(x).contains(&y)).unwrap();
        for (i, &x) in lost.iter().enumerate() {
            for &x2 in &lost[i + 1..] {
                audit.distance_pairs += 1;
                let far = index_distance(g, contact(x), contact(x2)).exceeds(f.saturating_sub(4));
                if owner[&x] == owner[&x2] || !far {
                    audit.distance_violations += 1;
                }
            }
        }
    }
    Ok(audit)
}
