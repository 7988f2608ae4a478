//! Interchange format:
//! `{"vertices":[{"id":int,"side":0|1},…],"edges":[[int,int],…]}`
//! plus DOT export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{BipartiteGraph, PartialMatching, Side, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VertexJson {
    pub id: VertexId,
    pub side: Side,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[VertexId; 2]>,
}

impl From<&BipartiteGraph> for GraphJson {
    fn from(g: &BipartiteGraph) -> Self {
        GraphJson {
            vertices: g.vertices().map(|(id, side)| VertexJson { id, side }).collect(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }
    }
}

pub fn to_json_value(g: &BipartiteGraph) -> Value {
    serde_json::to_value(GraphJson::from(g)).expect("graph serializes")
}

/// Parses and validates a graph document. Syntax errors carry the line and
/// column; structural errors name the offending field.
pub fn from_json_str(text: &str) -> Result<BipartiteGraph> {
    let doc: Value = serde_json::from_str(text).map_err(|e| {
        Error::InvalidGraph(format!("line {} column {}: {e}", e.line(), e.column()))
    })?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::InvalidGraph("top level: expected an object".into()))?;
    let vertices = obj
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidGraph("vertices: expected an array".into()))?;
    let edges = match obj.get("edges") {
        None => &[][..],
        Some(e) => e
            .as_array()
            .ok_or_else(|| Error::InvalidGraph("edges: expected an array".into()))?
            .as_slice(),
    };
    let mut vs = Vec::with_capacity(vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        let id = v
            .get("id")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidGraph(format!("vertices[{i}].id: expected a non-negative integer")))?;
        let side = match v.get("side").and_then(Value::as_u64) {
            Some(0) => Side::Zero,
            Some(1) => Side::One,
            _ => return Err(Error::InvalidGraph(format!("vertices[{i}].side: expected 0 or 1"))),
        };
        vs.push((id, side));
    }
    let mut es = Vec::with_capacity(edges.len());
    for (i, e) in edges.iter().enumerate() {
        let pair = e
            .as_array()
            .filter(|a| a.len() == 2)
            .and_then(|a| Some((a[0].as_u64()?, a[1].as_u64()?)))
            .ok_or_else(|| Error::InvalidGraph(format!("edges[{i}]: expected a pair of vertex ids")))?;
        es.push(pair);
    }
    BipartiteGraph::new(vs, es)
}

/// DOT rendering: side 0 as boxes, side 1 as ellipses, matched edges bold.
pub fn to_dot(g: &BipartiteGraph, matching: Option<&PartialMatching>) -> String {
    let mut out = String::from("graph G {\n");
    for (id, side) in g.vertices() {
        let shape = match side {
            Side::Zero => "box",
            Side::One => "ellipse",
        };
        let _ = writeln!(out, "  {id} [shape={shape}];");
    }
    for (u, v) in g.edges() {
        let bold = matching.is_some_and(|m| m.mate(u) == Some(v));
        if bold {
            let _ = writeln!(out, "  {u} -- {v} [style=bold];");
        } else {
            let _ = writeln!(out, "  {u} -- {v};");
        }
    }
    out.push_str("}\n");
    out
}
