//! Paradoxical decompositions read off perfect matchings of doubling
//! graphs, the textbook free-group decomposition, and a verifier for both.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, PartialMatching, Side, VertexId};
use crate::group::{build_doubling, expand_window, square_set, ActionWindow, DoublingGraph, GeneratingSet, Letter, WindowKind};
use crate::hall::{cover_mates, NONE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Piece {
    /// Member of `A_i`: translated by `γ_i` into the first copy.
    A(usize),
    /// Member of `B_i`: translated by `γ_i` into the second copy.
    B(usize),
}

/// Piece assignment on window points; indices refer to `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParadoxicalDecomposition {
    pub s: GeneratingSet,
    pub pieces: Vec<Option<Piece>>,
}

#[derive(Serialize)]
struct PiecesJson {
    s: Vec<String>,
    pieces_a: BTreeMap<String, usize>,
    pieces_b: BTreeMap<String, usize>,
}

impl ParadoxicalDecomposition {
    /// `{"s": [...], "pieces_a": {word: i}, "pieces_b": {word: i}}`.
    pub fn to_json(&self, w: &ActionWindow) -> serde_json::Value {
        let mut out = PiecesJson {
            s: self.s.elements().iter().map(|g| g.to_string()).collect(),
            pieces_a: BTreeMap::new(),
            pieces_b: BTreeMap::new(),
        };
        for (x, p) in self.pieces.iter().enumerate() {
            match p {
                Some(Piece::A(i)) => {
                    out.pieces_a.insert(w.word(x).to_string(), *i);
                }
                Some(Piece::B(i)) => {
                    out.pieces_b.insert(w.word(x).to_string(), *i);
                }
                None => {}
            }
        }
        serde_json::to_value(out).expect("plain data")
    }

    /// Reads the format of [`to_json`](Self::to_json) against a window.
    pub fn from_json(v: &serde_json::Value, w: &ActionWindow) -> Result<Self> {
        let bad = |m: String| Error::Parse(m);
        let s: Vec<String> = serde_json::from_value(v.get("s").cloned().ok_or_else(|| bad("missing field s".into()))?)?;
        let s = GeneratingSet::new(s.iter().map(|x| crate::group::reduce(x)).collect::<Result<_>>()?)?;
        let mut pieces = vec![None; w.len()];
        for (field, make) in [("pieces_a", Piece::A as fn(usize) -> Piece), ("pieces_b", Piece::B)] {
            let map: BTreeMap<String, usize> =
                serde_json::from_value(v.get(field).cloned().ok_or_else(|| bad(format!("missing field {field}")))?)?;
            for (word, i) in map {
                let x = w
                    .index_of_word(&crate::group::reduce(&word)?)
                    .ok_or_else(|| bad(format!("{field}: word {word} is outside the window")))?;
                if i >= s.len() {
                    return Err(bad(format!("{field}: index {i} for {word} exceeds |S| = {}", s.len())));
                }
                if pieces[x].is_some() {
                    return Err(bad(format!("{word} is assigned twice")));
                }
                pieces[x] = Some(make(i));
            }
        }
        Ok(ParadoxicalDecomposition { s, pieces })
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.iter().flatten().collect::<BTreeSet<_>>().len()
    }
}

/// `x ∈ A_i` when `(0, x)` is matched to `(1, γ_i·x)` with `i` least among
/// indices giving that point; `B_i` likewise through copy 2. Defined on
/// interior points, every interior vertex must be matched.
pub fn matching_to_paradox(dg: &DoublingGraph<'_>, m: &PartialMatching) -> Result<ParadoxicalDecomposition> {
    if dg.copies() != 3 {
        return Err(Error::BadWindow("pieces are read from the three-copy graph".into()));
    }
    let w = dg.window();
    let mut pieces = vec![None; w.len()];
    for x in 0..w.len() {
        if !w.is_interior(x) {
            continue;
        }
        for c in 0..3 {
            if !m.is_covered(dg.id(c, x)) {
                return Err(Error::NotPerfectOnInterior(dg.id(c, x)));
            }
        }
        let (c, y) = dg.decode(m.mate(dg.id(0, x)).unwrap());
        let i = (0..dg.generators().len())
            .find(|&i| dg.image(i, x) == Some(y))
            .ok_or_else(|| Error::InvalidMatching(format!("({c}, {y}) is not a translate of (0, {x})")))?;
        pieces[x] = Some(match c {
            1 => Piece::A(i),
            2 => Piece::B(i),
            _ => return Err(Error::InvalidMatching(format!("copy-0 vertex {x} matched within copy 0"))),
        });
    }
    Ok(ParadoxicalDecomposition {
        s: dg.generators().clone(),
        pieces,
    })
}

/// Inverse of [`matching_to_paradox`]: `(0, x) – (1, γ_i·x)` for `x ∈ A_i`
/// and `(0, x) – (2, γ_i·x)` for `x ∈ B_i`, dropping pieces whose
/// translate leaves the window.
pub fn paradox_to_matching(dg: &DoublingGraph<'_>, pd: &ParadoxicalDecomposition) -> Result<PartialMatching> {
    let w = dg.window();
    let pos: Vec<Option<usize>> = pd.s.elements().iter().map(|g| dg.generators().position(g)).collect();
    let mut m = PartialMatching::new();
    for (x, p) in pd.pieces.iter().enumerate() {
        let (copy, i) = match p {
            Some(Piece::A(i)) => (1, *i),
            Some(Piece::B(i)) => (2, *i),
            None => continue,
        };
        let gi = pos[i].ok_or_else(|| {
            Error::BadGeneratingSet(format!("{} is not in the doubling set", pd.s.elements()[i]))
        })?;
        if let Some(y) = dg.image(gi, x) {
            m.insert(dg.id(0, x), dg.id(copy, y)).map_err(|_| {
                Error::InvalidMatching(format!("two pieces translate onto ({copy}, {})", w.word(y)))
            })?;
        }
    }
    Ok(m)
}

/// The decomposition by leading letter over `S = {e, a, A, b, B}`:
/// `A_e = W(a) ∪ {e} ∪ {Aⁿ}`, `A_a = W(A) ∖ {Aⁿ}`, `B_e = W(b)`,
/// `B_b = W(B)`. On sphere windows it is applied to the labelling words.
pub fn classical_f2_decomposition(w: &ActionWindow) -> ParadoxicalDecomposition {
    let s = GeneratingSet::standard();
    let pieces = (0..w.len())
        .map(|x| {
            let word = w.word(x);
            Some(match word.first() {
                None | Some(Letter::A) => Piece::A(0),
                Some(Letter::AInv) if word.is_power_of(Letter::AInv) => Piece::A(0),
                Some(Letter::AInv) => Piece::A(1),
                Some(Letter::B) => Piece::B(0),
                Some(Letter::BInv) => Piece::B(3),
            })
        })
        .collect();
    ParadoxicalDecomposition { s, pieces }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub point: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub passed: bool,
    pub points: usize,
    pub interior: usize,
    pub deep_interior: usize,
    pub pieces: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Points whose `S`-ball lies in the interior.
pub fn deep_interior(w: &ActionWindow, table: &[Vec<u32>]) -> Vec<usize> {
    (0..w.len())
        .filter(|&x| {
            table
                .iter()
                .all(|row| row[x] != u32::MAX && w.is_interior(row[x] as usize))
        })
        .collect()
}

/// Partition, translate disjointness and coverage on the deep interior:
/// each deep point is assigned a piece and is `γ_i·x` for exactly one
/// `x ∈ A_i` and exactly one `x ∈ B_i`.
pub fn verify_paradox(pd: &ParadoxicalDecomposition, w: &ActionWindow) -> Result<Certificate> {
    let table = w.action_table(&pd.s)?;
    let inv = pd.s.inverse_positions();
    let deep = deep_interior(w, &table);
    let mut cert = Certificate {
        passed: true,
        points: w.len(),
        interior: (0..w.len()).filter(|&x| w.is_interior(x)).count(),
        deep_interior: deep.len(),
        pieces: pd.piece_count(),
        violation: None,
        warning: deep.is_empty().then(|| "deep interior is empty; certificate is vacuous".to_string()),
    };
    let fail = |check: &'static str, y: usize, detail: String| Violation {
        check,
        point: w.word(y).to_string(),
        detail,
    };
    for &y in &deep {
        if pd.pieces[y].is_none() {
            cert.violation = Some(fail("partition", y, "point has no piece".into()));
            break;
        }
        let mut hits_a = Vec::new();
        let mut hits_b = Vec::new();
        for i in 0..pd.s.len() {
            let x = table[inv[i]][y] as usize;
            match pd.pieces[x] {
                Some(Piece::A(j)) if j == i => hits_a.push(i),
                Some(Piece::B(j)) if j == i => hits_b.push(i),
                _ => {}
            }
        }
        for (name, hits) in [("A", &hits_a), ("B", &hits_b)] {
            let names: Vec<String> = hits.iter().map(|&i| pd.s.elements()[i].to_string()).collect();
            match hits.len() {
                1 => {}
                0 => cert.violation = Some(fail("coverage", y, format!("no {name}-piece translates onto it"))),
                _ => {
                    cert.violation = Some(fail(
                        "disjointness",
                        y,
                        format!("{name}-translates by {} overlap", names.join(", ")),
                    ))
                }
            }
            if cert.violation.is_some() {
                break;
            }
        }
        if cert.violation.is_some() {
            break;
        }
    }
    cert.passed = cert.violation.is_none();
    Ok(cert)
}

/// Bipartite graph on `{0} × A ∪ {1} × B` with `(0, x) – (1, γ·x)` for
/// `γ ∈ s`; vertex id `2x + copy`.
pub fn build_equidecomposition_graph(
    w: &ActionWindow,
    s: &GeneratingSet,
    a_set: &BTreeSet<usize>,
    b_set: &BTreeSet<usize>,
) -> Result<BipartiteGraph> {
    if let Some(&x) = a_set.iter().chain(b_set).find(|&&x| x >= w.len()) {
        return Err(Error::UnknownVertex(x as u64));
    }
    let table = w.action_table(s)?;
    let mut edges = BTreeSet::new();
    for &x in a_set {
        for row in &table {
            let y = row[x];
            if y != u32::MAX && b_set.contains(&(y as usize)) {
                edges.insert((2 * x as VertexId, 2 * y as VertexId + 1));
            }
        }
    }
    BipartiteGraph::new(
        a_set
            .iter()
            .map(|&x| (2 * x as VertexId, Side::Zero))
            .chain(b_set.iter().map(|&y| (2 * y as VertexId + 1, Side::One))),
        edges,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct DemoReport {
    pub kind: WindowKind,
    pub radius: usize,
    pub margin: usize,
    pub points: usize,
    pub doubling_vertices: usize,
    pub doubling_edges: usize,
    pub matched_edges: usize,
    pub unmatched: usize,
    /// Largest distance to the boundary among unmatched vertices.
    pub unmatched_max_boundary_distance: usize,
    pub boundary_limit: usize,
    pub matched: Certificate,
    pub classical: Certificate,
    /// The matching rebuilt from its pieces covers the deep interior and
    /// agrees with the original there.
    pub reverse_matches: bool,
    /// The matching rebuilt from the classical pieces covers the deep
    /// interior.
    pub classical_reverse_perfect: bool,
    pub passed: bool,
}

/// Window, doubling over `S²`, a matching covering the interior, pieces,
/// certificates.
pub fn demo(kind: WindowKind, radius: usize) -> Result<(DemoReport, ParadoxicalDecomposition, ActionWindow)> {
    let s = GeneratingSet::standard();
    let s2 = square_set(&s);
    let margin = 2 * s2.max_len();
    let w = expand_window(kind, None, &s, radius, margin)?;
    let (report, pd) = {
        let dg = build_doubling(&w, &s2, 3)?;
        let g = dg.to_bipartite();
        let required: Vec<bool> = (0..g.len()).map(|v| dg.is_interior_vertex(v)).collect();
        let mate = cover_mates(&g, &required)?;
        let mut m = PartialMatching::new();
        for (v, &u) in mate.iter().enumerate() {
            if u != NONE && v < u {
                m.insert(v as VertexId, u as VertexId)?;
            }
        }
        let unmatched: Vec<usize> = (0..g.len()).filter(|&v| mate[v] == NONE).collect();
        let far = unmatched
            .iter()
            .map(|&v| w.boundary_distance(v / 3))
            .max()
            .unwrap_or(0);

        let pd = matching_to_paradox(&dg, &m)?;
        let matched = verify_paradox(&pd, &w)?;
        let classical_pd = classical_f2_decomposition(&w);
        let classical = verify_paradox(&classical_pd, &w)?;

        let table = w.action_table(&s2)?;
        let deep = deep_interior(&w, &table);
        let back = paradox_to_matching(&dg, &pd)?;
        let reverse_matches = deep
            .iter()
            .all(|&y| (0..3).all(|c| back.is_covered(dg.id(c, y)) && back.mate(dg.id(c, y)) == m.mate(dg.id(c, y))));
        let back_classical = paradox_to_matching(&dg, &classical_pd)?;
        let classical_reverse_perfect = deep
            .iter()
            .all(|&y| (0..3).all(|c| back_classical.is_covered(dg.id(c, y))));
        let passed = matched.passed
            && classical.passed
            && reverse_matches
            && classical_reverse_perfect
            && far <= margin
            && matched.deep_interior > 0;
        (
            DemoReport {
                kind,
                radius,
                margin,
                points: w.len(),
                doubling_vertices: g.len(),
                doubling_edges: g.edge_count(),
                matched_edges: m.len(),
                unmatched: unmatched.len(),
                unmatched_max_boundary_distance: far,
                boundary_limit: margin,
                matched,
                classical,
                reverse_matches,
                classical_reverse_perfect,
                passed,
            },
            pd,
        )
    };
    Ok((report, pd, w))
}
