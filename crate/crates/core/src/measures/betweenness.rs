//! Exact edge betweenness (Brandes' accumulation) on the unweighted undirected view.
//!
//! `bc(e) = Σ_{s≠t} σ_st(e) / σ_st` over ordered pairs, so every unordered pair
//! contributes twice. Unreachable pairs contribute nothing.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::graph::ConversationGraph;

/// Betweenness per undirected edge, aligned with
/// [`ConversationGraph::undirected_edges`].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeBetweenness {
    pub edges: Vec<(usize, usize)>,
    pub values: Vec<f64>,
}

impl EdgeBetweenness {
    pub fn get(&self, u: usize, v: usize) -> Option<f64> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok().map(|i| self.values[i])
    }
}

/// Sources per parallel block. Partial sums are combined in block order, which keeps the
/// floating-point result independent of the thread count.
const BLOCK: usize = 32;

pub fn edge_betweenness(g: &ConversationGraph) -> EdgeBetweenness {
    let n = g.vertex_count();
    let edges: Vec<(usize, usize)> = g.undirected_edges().into_iter().map(|(u, v, _)| (u, v)).collect();
    // edge id of every adjacency slot
    let mut slot_edge: Vec<Vec<usize>> = Vec::with_capacity(n);
    for u in 0..n {
        slot_edge.push(
            g.neighbors(u)
                .iter()
                .map(|&v| edges.binary_search(&(u.min(v), u.max(v))).expect("edge present"))
                .collect(),
        );
    }

    let blocks: Vec<Vec<f64>> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![0.0; edges.len()];
            let mut state = BfsState::new(n);
            for s in b * BLOCK..((b + 1) * BLOCK).min(n) {
                state.accumulate(g, &slot_edge, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut values = vec![0.0; edges.len()];
    for block in blocks {
        for (v, x) in values.iter_mut().zip(block) {
            *v += x;
        }
    }
    EdgeBetweenness { edges, values }
}

struct BfsState {
    dist: Vec<i64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl BfsState {
    fn new(n: usize) -> Self {
        BfsState {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::new(),
        }
    }

    fn accumulate(&mut self, g: &ConversationGraph, slot_edge: &[Vec<usize>], s: usize, acc: &mut [f64]) {
        for &v in &self.order {
            self.dist[v] = -1;
            self.sigma[v] = 0.0;
            self.delta[v] = 0.0;
        }
        self.order.clear();
        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            for &w in g.neighbors(v) {
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                }
            }
        }
        // predecessors of w are the neighbours one level closer to s
        for &w in self.order.iter().rev() {
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for (i, &v) in g.neighbors(w).iter().enumerate() {
                if self.dist[v] >= 0 && self.dist[v] + 1 == self.dist[w] {
                    let c = self.sigma[v] * coeff;
                    acc[slot_edge[w][i]] += c;
                    self.delta[v] += c;
                }
            }
        }
    }
}
