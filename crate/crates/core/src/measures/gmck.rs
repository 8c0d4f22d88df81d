//! Boundary connectivity score.
//!
//! A vertex is on the boundary when it has a neighbour on the other side and a same-side
//! neighbour that itself has no cross-side neighbour. Every other vertex is internal.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ConversationGraph;
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GmckScore {
    pub value: f64,
    pub boundary: Vec<usize>,
}

/// Boundary mask over all vertices.
pub fn boundary_vertices(g: &ConversationGraph, p: &Partition) -> Vec<bool> {
    let n = g.vertex_count();
    let crosses: Vec<bool> = (0..n)
        .map(|u| g.neighbors(u).iter().any(|&v| p.side(v) != p.side(u)))
        .collect();
    (0..n)
        .map(|u| {
            crosses[u]
                && g.neighbors(u)
                    .iter()
                    .any(|&v| p.side(v) == p.side(u) && !crosses[v])
        })
        .collect()
}

/// `(1/|B|) Σ_{u∈B} d_i(u) / (d_b(u) + d_i(u)) − 0.5`, with `d_i`/`d_b` counting edges from
/// `u` to internal/boundary vertices.
pub fn gmck(g: &ConversationGraph, p: &Partition) -> Result<GmckScore> {
    let is_boundary = boundary_vertices(g, p);
    let boundary: Vec<usize> = (0..g.vertex_count()).filter(|&u| is_boundary[u]).collect();
    if boundary.is_empty() {
        return Err(Error::Degenerate(
            "no boundary (sides disconnected or fully mixed)".into(),
        ));
    }
    let total: f64 = boundary
        .iter()
        .map(|&u| {
            let d_b = g.neighbors(u).iter().filter(|&&v| is_boundary[v]).count();
            let d_i = g.degree(u) - d_b;
            d_i as f64 / (d_b + d_i) as f64
        })
        .sum();
    Ok(GmckScore {
        value: total / boundary.len() as f64 - 0.5,
        boundary,
    })
}
