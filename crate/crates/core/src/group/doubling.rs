//! The doubling graph on `{0, …, copies−1} × window`: `(0, x)` is joined to
//! `(i, γ·x)` for every `i >= 1` and `γ ∈ S`.

use serde::Serialize;

use super::window::{ActionWindow, NO_POINT};
use super::GeneratingSet;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side, VertexId};
use crate::hall::connected::{search, SearchParams, SetSpace};
use crate::hall::{HallReport, Witness};
use crate::rational::int;

pub struct DoublingGraph<'w> {
    window: &'w ActionWindow,
    s: GeneratingSet,
    copies: usize,
    /// `forward[i][x] = γ_i·x`
    forward: Vec<Vec<u32>>,
    /// `backward[i][y] = γ_i⁻¹·y`
    backward: Vec<Vec<u32>>,
}

/// Materializes the action of `s` on the window; the graph itself stays
/// implicit until [`DoublingGraph::to_bipartite`].
pub fn build_doubling<'w>(w: &'w ActionWindow, s: &GeneratingSet, copies: usize) -> Result<DoublingGraph<'w>> {
    if !(3..=4).contains(&copies) {
        return Err(Error::BadWindow(format!("copies must be 3 or 4, got {copies}")));
    }
    let forward = w.action_table(s)?;
    let inv = s.inverse_positions();
    let backward = inv.iter().map(|&j| forward[j].clone()).collect();
    Ok(DoublingGraph {
        window: w,
        s: s.clone(),
        copies,
        forward,
        backward,
    })
}

impl<'w> DoublingGraph<'w> {
    pub fn window(&self) -> &'w ActionWindow {
        self.window
    }

    pub fn generators(&self) -> &GeneratingSet {
        &self.s
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn vertex_count(&self) -> usize {
        self.window.len() * self.copies
    }

    pub fn id(&self, copy: usize, x: usize) -> VertexId {
        (x * self.copies + copy) as VertexId
    }

    pub fn decode(&self, id: VertexId) -> (usize, usize) {
        let v = id as usize;
        (v % self.copies, v / self.copies)
    }

    /// `γ_i·x` inside the window.
    pub fn image(&self, i: usize, x: usize) -> Option<usize> {
        let y = self.forward[i][x];
        (y != NO_POINT).then_some(y as usize)
    }

    /// `γ_i⁻¹·y` inside the window.
    pub fn preimage(&self, i: usize, y: usize) -> Option<usize> {
        let x = self.backward[i][y];
        (x != NO_POINT).then_some(x as usize)
    }

    /// Neighbours of a vertex slot, ascending.
    pub fn neighbors(&self, v: usize, out: &mut Vec<usize>) {
        let (copy, x) = (v % self.copies, v / self.copies);
        let start = out.len();
        if copy == 0 {
            for i in 0..self.s.len() {
                if let Some(y) = self.image(i, x) {
                    for c in 1..self.copies {
                        out.push(y * self.copies + c);
                    }
                }
            }
        } else {
            for i in 0..self.s.len() {
                if let Some(z) = self.preimage(i, x) {
                    out.push(z * self.copies);
                }
            }
        }
        out[start..].sort_unstable();
        let mut k = start;
        for j in start..out.len() {
            if j == start || out[j] != out[k - 1] {
                out[k] = out[j];
                k += 1;
            }
        }
        out.truncate(k);
    }

    pub fn is_interior_vertex(&self, v: usize) -> bool {
        self.window.is_interior(v / self.copies)
    }

    pub fn to_bipartite(&self) -> BipartiteGraph {
        let n = self.vertex_count();
        let ids: Vec<VertexId> = (0..n as VertexId).collect();
        let sides = (0..n)
            .map(|v| if v % self.copies == 0 { Side::Zero } else { Side::One })
            .collect();
        let adj = (0..n)
            .map(|v| {
                let mut out = Vec::new();
                self.neighbors(v, &mut out);
                out
            })
            .collect();
        BipartiteGraph::from_parts(ids, sides, adj)
    }
}

impl SetSpace for DoublingGraph<'_> {
    fn universe(&self) -> usize {
        self.vertex_count()
    }

    fn base_neighbors(&self, v: usize, out: &mut Vec<usize>) {
        self.neighbors(v, out);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionAudit {
    pub report: HallReport,
    pub roots: usize,
    pub examined: u64,
    pub pruned: u64,
}

/// `|N(F)| >= 2|F|` for distance-2-connected sets of copies 1 and 2, and
/// `|N(F)| >= |F|` for copy-0 sets, over sets of interior vertices of size
/// at most `size_cap`. `sample_cap` bounds the number of roots per side
/// (0 for all).
pub fn interior_expansion_audit(dg: &DoublingGraph<'_>, sample_cap: usize, size_cap: usize) -> Result<ExpansionAudit> {
    let required = 2 * dg.generators().max_len();
    if dg.window().margin() < required {
        return Err(Error::MarginTooSmall {
            margin: dg.window().margin(),
            required,
        });
    }
    let interior = |v: usize| dg.is_interior_vertex(v);
    let mut audit = ExpansionAudit {
        report: HallReport::ok(),
        roots: 0,
        examined: 0,
        pruned: 0,
    };
    for (side, factor) in [(Side::One, 2usize), (Side::Zero, 1usize)] {
        let mut roots: Vec<usize> = (0..dg.vertex_count())
            .filter(|&v| interior(v) && (v % dg.copies() == 0) == (side == Side::Zero))
            .collect();
        if sample_cap > 0 {
            roots.truncate(sample_cap);
        }
        audit.roots += roots.len();
        let violates = move |size: usize, nsize: usize| nsize < factor * size;
        let out = search(
            dg,
            &roots,
            &interior,
            &SearchParams {
                cap: size_cap,
                floor: 1,
                violates: &violates,
                prune_at: factor * size_cap,
                budget: None,
            },
        );
        audit.examined += out.examined;
        audit.pruned += out.pruned;
        if let Some((set, actual)) = out.best {
            audit.report = HallReport::violated(Witness {
                side,
                required: int((factor * set.len()) as i64),
                f_set: set.into_iter().map(|v| v as VertexId).collect(),
                actual,
            });
            break;
        }
    }
    Ok(audit)
}
