//! Layered Hall-preserving matchings, doubling graphs of group actions,
//! paradoxical decompositions and the tree dynamics built from them, all on
//! finite graphs or finite windows of infinite action graphs.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod group;
pub mod hall;
pub mod layers;
pub mod matcher;
pub mod paradox;
pub mod rational;

pub use error::{Error, Result};
