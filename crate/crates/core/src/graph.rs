//! Conversation graphs.
//!
//! A [`ConversationGraph`] stores user-id labelled vertices with dense indices and a
//! weighted edge list. Two read views are precomputed at construction:
//!
//! - the undirected view: `{u,v}` is present iff `(u,v)` or `(v,u)` is stored, with the
//!   summed weight;
//! - the arc view used by restart walks: stored arcs for directed graphs, both
//!   directions for undirected ones.
//!
//! Graphs are immutable once built and can be shared freely between threads.

use std::collections::{BTreeMap, HashMap, VecDeque};

/// One stored edge. For undirected graphs `src < dst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: u64,
}

#[derive(Debug, Clone, Default)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<u64>,
}

impl Csr {
    fn from_sorted(n: usize, entries: &[(usize, usize, u64)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, _, _) in entries {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Csr {
            offsets,
            targets: entries.iter().map(|e| e.1).collect(),
            weights: entries.iter().map(|e| e.2).collect(),
        }
    }

    fn row(&self, u: usize) -> std::ops::Range<usize> {
        self.offsets[u]..self.offsets[u + 1]
    }
}

/// Vertex-labelled graph for one topic of discussion.
#[derive(Debug, Clone)]
pub struct ConversationGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    directed: bool,
    undirected: Csr,
    arcs: Csr,
}

impl PartialEq for ConversationGraph {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.edges == other.edges && self.directed == other.directed
    }
}

impl ConversationGraph {
    /// Empty graph.
    pub fn empty(directed: bool) -> Self {
        GraphBuilder::new(directed).build()
    }

    /// Undirected graph on vertices `"0".."n-1"` with unit-weight edges.
    ///
    /// Every vertex is kept, including isolated ones.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut b = GraphBuilder::new(false);
        for i in 0..n {
            b.add_vertex(&i.to_string());
        }
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge ({u},{v}) out of range for n={n}");
            b.add_edge_by_index(u, v, 1);
        }
        b.build()
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    /// Number of edges of the undirected view.
    pub fn edge_count(&self) -> usize {
        self.undirected.targets.len() / 2
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Stored edges, sorted by `(src, dst)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `u` in the undirected view, ascending.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.undirected.targets[self.undirected.row(u)]
    }

    /// Summed weights aligned with [`neighbors`](Self::neighbors).
    pub fn neighbor_weights(&self, u: usize) -> &[u64] {
        &self.undirected.weights[self.undirected.row(u)]
    }

    /// Number of distinct neighbours in the undirected view.
    pub fn degree(&self, u: usize) -> usize {
        self.undirected.row(u).len()
    }

    /// Sum of undirected edge weights at `u`.
    pub fn weighted_degree(&self, u: usize) -> u64 {
        self.neighbor_weights(u).iter().sum()
    }

    /// Out-arcs of `u` as seen by restart walks.
    pub fn out_arcs(&self, u: usize) -> &[usize] {
        &self.arcs.targets[self.arcs.row(u)]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Weight of `{u,v}` in the undirected view, 0 when absent.
    pub fn edge_weight(&self, u: usize, v: usize) -> u64 {
        match self.neighbors(u).binary_search(&v) {
            Ok(i) => self.neighbor_weights(u)[i],
            Err(_) => 0,
        }
    }

    /// Directed weight of the stored arc `u -> v` (for undirected graphs, of `{u,v}`).
    pub fn arc_weight(&self, u: usize, v: usize) -> u64 {
        let (a, b) = if self.directed { (u, v) } else { (u.min(v), u.max(v)) };
        self.edges
            .binary_search_by(|e| (e.src, e.dst).cmp(&(a, b)))
            .map(|i| self.edges[i].weight)
            .unwrap_or(0)
    }

    /// Edges of the undirected view as `(u, v, weight)` with `u < v`, sorted.
    pub fn undirected_edges(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.vertex_count() {
            for (&v, &w) in self.neighbors(u).iter().zip(self.neighbor_weights(u)) {
                if u < v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    /// Connected components of the undirected view, each sorted ascending, ordered by
    /// their smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Induced subgraph on `keep` (old indices, any order). New index `i` corresponds to
    /// the i-th smallest entry of `keep`, so relative vertex order is preserved.
    pub fn induced_subgraph(&self, keep: &[usize]) -> ConversationGraph {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut map = vec![usize::MAX; self.vertex_count()];
        let mut b = GraphBuilder::new(self.directed);
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
            b.add_vertex(&self.ids[old]);
        }
        for e in &self.edges {
            let (s, d) = (map[e.src], map[e.dst]);
            if s != usize::MAX && d != usize::MAX {
                b.add_edge_by_index(s, d, e.weight);
            }
        }
        b.build()
    }
}

/// Largest connected component of the undirected view together with the old indices of
/// the kept vertices (ascending). Ties go to the component with the smallest vertex index.
pub fn largest_component_with_map(g: &ConversationGraph) -> (ConversationGraph, Vec<usize>) {
    let comps = g.connected_components();
    // components come ordered by min index, so the first maximum wins ties
    let best = comps
        .into_iter()
        .fold(None::<Vec<usize>>, |best, c| match best {
            Some(b) if b.len() >= c.len() => Some(b),
            _ => Some(c),
        })
        .unwrap_or_default();
    (g.induced_subgraph(&best), best)
}

/// Induced subgraph on the largest connected component.
pub fn largest_component(g: &ConversationGraph) -> ConversationGraph {
    largest_component_with_map(g).0
}

/// Incremental constructor. Self-loops are dropped and repeated `(src,dst)` pairs
/// aggregate their weights; for undirected builders `(u,v)` and `(v,u)` are the same pair.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    directed: bool,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    weights: BTreeMap<(usize, usize), u64>,
}

impl GraphBuilder {
    pub fn new(directed: bool) -> Self {
        GraphBuilder {
            directed,
            ids: Vec::new(),
            index: HashMap::new(),
            weights: BTreeMap::new(),
        }
    }

    /// Registers `id` (if new) and returns its index.
    pub fn add_vertex(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.ids.push(id.to_string());
        self.index.insert(id.to_string(), i);
        i
    }

    pub fn add_edge(&mut self, src: &str, dst: &str, weight: u64) {
        if src == dst || weight == 0 {
            return;
        }
        let s = self.add_vertex(src);
        let d = self.add_vertex(dst);
        self.add_edge_by_index(s, d, weight);
    }

    pub fn add_edge_by_index(&mut self, src: usize, dst: usize, weight: u64) {
        if src == dst || weight == 0 {
            return;
        }
        let key = if self.directed { (src, dst) } else { (src.min(dst), src.max(dst)) };
        *self.weights.entry(key).or_insert(0) += weight;
    }

    pub fn build(self) -> ConversationGraph {
        let n = self.ids.len();
        let edges: Vec<Edge> = self
            .weights
            .iter()
            .map(|(&(src, dst), &weight)| Edge { src, dst, weight })
            .collect();

        let mut und: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        let mut arcs: Vec<(usize, usize, u64)> = Vec::with_capacity(edges.len() * 2);
        for e in &edges {
            *und.entry((e.src, e.dst)).or_insert(0) += e.weight;
            *und.entry((e.dst, e.src)).or_insert(0) += e.weight;
            arcs.push((e.src, e.dst, e.weight));
            if !self.directed {
                arcs.push((e.dst, e.src, e.weight));
            }
        }
        arcs.sort_unstable();
        let und: Vec<(usize, usize, u64)> = und.into_iter().map(|((u, v), w)| (u, v, w)).collect();

        ConversationGraph {
            undirected: Csr::from_sorted(n, &und),
            arcs: Csr::from_sorted(n, &arcs),
            ids: self.ids,
            index: self.index,
            edges,
            directed: self.directed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(offset: usize) -> Vec<(usize, usize)> {
        vec![(offset, offset + 1), (offset + 1, offset + 2), (offset, offset + 2)]
    }

    #[test]
    fn largest_component_picks_pentagon() {
        let mut edges = triangle(0);
        edges.extend(triangle(3));
        edges.extend((0..5).map(|i| (6 + i, 6 + (i + 1) % 5)));
        let g = ConversationGraph::from_edges(11, &edges);
        let lc = largest_component(&g);
        assert_eq!(lc.vertex_count(), 5);
        assert_eq!(lc.edge_count(), 5);
        assert_eq!(lc.ids(), &["6", "7", "8", "9", "10"]);
    }

    #[test]
    fn largest_component_of_connected_graph_is_identity() {
        let g = ConversationGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(largest_component(&g), g);
    }

    #[test]
    fn largest_component_tie_prefers_smallest_index() {
        let mut edges = triangle(0);
        edges.extend(triangle(3));
        let g = ConversationGraph::from_edges(6, &edges);
        let (lc, kept) = largest_component_with_map(&g);
        assert_eq!(kept, vec![0, 1, 2]);
        assert_eq!(lc.ids(), &["0", "1", "2"]);
    }

    #[test]
    fn largest_component_of_empty_graph_is_empty() {
        let g = ConversationGraph::empty(false);
        assert!(largest_component(&g).is_empty());
    }

    #[test]
    fn undirected_view_sums_both_directions() {
        let mut b = GraphBuilder::new(true);
        b.add_edge("a", "b", 2);
        b.add_edge("b", "a", 3);
        b.add_edge("a", "a", 7);
        let g = b.build();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), 5);
        assert_eq!(g.edge_weight(1, 0), 5);
        assert_eq!(g.arc_weight(0, 1), 2);
        assert_eq!(g.out_arcs(0), &[1]);
        assert_eq!(g.out_arcs(1), &[0]);
    }

    #[test]
    fn undirected_builder_merges_reversed_pairs() {
        let mut b = GraphBuilder::new(false);
        b.add_edge("a", "b", 1);
        b.add_edge("b", "a", 1);
        let g = b.build();
        assert_eq!(g.edges(), &[Edge { src: 0, dst: 1, weight: 2 }]);
        assert_eq!(g.out_arcs(1), &[0]);
    }
}
