//! Free-group words, exact rotations, finite windows of group actions and
//! the doubling graphs built over them.

mod doubling;
mod rotation;
mod window;
mod word;

use serde::Serialize;

pub use doubling::{build_doubling, interior_expansion_audit, DoublingGraph, ExpansionAudit};
pub use rotation::{standard_free_rotations, RationalRotation, RotationPair, SpherePoint};
pub use window::{expand_window, ActionWindow, FreeBall, WindowKind};
pub use word::{ball_size, reduce, words_up_to, FreeWord, Letter, LETTERS, MAX_PACKED};

use crate::error::{Error, Result};

/// Finite symmetric set of group elements with the identity. The order of
/// `elements` fixes piece indices downstream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratingSet {
    elements: Vec<FreeWord>,
}

impl GeneratingSet {
    /// Deduplicates (first occurrence wins), puts the identity first if it
    /// is missing and rejects sets not closed under inverses.
    pub fn new(elements: Vec<FreeWord>) -> Result<Self> {
        let mut out: Vec<FreeWord> = Vec::with_capacity(elements.len() + 1);
        if !elements.iter().any(FreeWord::is_identity) {
            out.push(FreeWord::identity());
        }
        for w in elements {
            if !out.contains(&w) {
                out.push(w);
            }
        }
        if let Some(w) = out.iter().find(|w| !out.contains(&w.inverse())) {
            return Err(Error::BadGeneratingSet(format!("{w} is present but its inverse {} is not", w.inverse())));
        }
        Ok(GeneratingSet { elements: out })
    }

    /// `{e, a, A, b, B}` in that order.
    pub fn standard() -> Self {
        let mut elements = vec![FreeWord::identity()];
        elements.extend(LETTERS.iter().map(|&l| FreeWord::letter(l)));
        GeneratingSet { elements }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let words = text
            .split(',')
            .map(|s| reduce(s.trim()))
            .collect::<Result<Vec<_>>>()?;
        GeneratingSet::new(words)
    }

    pub fn elements(&self) -> &[FreeWord] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.elements.iter().map(FreeWord::len).max().unwrap_or(0)
    }

    pub fn position(&self, w: &FreeWord) -> Option<usize> {
        self.elements.iter().position(|x| x == w)
    }

    /// Index of the inverse of each element.
    pub fn inverse_positions(&self) -> Vec<usize> {
        self.elements
            .iter()
            .map(|w| self.position(&w.inverse()).expect("symmetric"))
            .collect()
    }
}

/// `S² = {γδ : γ, δ ∈ S}` in key order.
pub fn square_set(s: &GeneratingSet) -> GeneratingSet {
    let mut out: Vec<FreeWord> = Vec::new();
    for g in s.elements() {
        for d in s.elements() {
            out.push(g.mul(d));
        }
    }
    out.sort();
    out.dedup();
    GeneratingSet { elements: out }
}
