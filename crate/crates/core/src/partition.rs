//! Two-way splits of a conversation graph.
//!
//! [`spectral_bisection`] splits at the median of the Fiedler vector of the weighted
//! Laplacian and then runs one Kernighan–Lin style pass. [`import_partition`] reads
//! externally produced labels (METIS output, ground truth) instead.

use std::collections::HashMap;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ConversationGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }

    /// File label: X = 0, Y = 1.
    pub fn label(self) -> u8 {
        match self {
            Side::X => 0,
            Side::Y => 1,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::X => "X",
            Side::Y => "Y",
        })
    }
}

/// Total labelling of the vertices with two sides, both non-empty once `n >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    sides: Vec<Side>,
}

impl Partition {
    pub fn new(sides: Vec<Side>) -> Result<Self> {
        if sides.len() >= 2 && (!sides.contains(&Side::X) || !sides.contains(&Side::Y)) {
            return Err(Error::Degenerate("partition has an empty side".into()));
        }
        Ok(Partition { sides })
    }

    /// Vertices `< split` go to X, the rest to Y.
    pub fn split_at(n: usize, split: usize) -> Result<Self> {
        Partition::new((0..n).map(|v| if v < split { Side::X } else { Side::Y }).collect())
    }

    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    pub fn side(&self, v: usize) -> Side {
        self.sides[v]
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn members(&self, side: Side) -> Vec<usize> {
        (0..self.sides.len()).filter(|&v| self.sides[v] == side).collect()
    }

    pub fn size(&self, side: Side) -> usize {
        self.sides.iter().filter(|&&s| s == side).count()
    }

    /// Same split with the X and Y labels exchanged.
    pub fn swapped(&self) -> Partition {
        Partition {
            sides: self.sides.iter().map(|s| s.other()).collect(),
        }
    }

    /// Restriction to the old indices in `kept` (ascending, as returned by
    /// [`largest_component_with_map`](crate::graph::largest_component_with_map)).
    pub fn restrict(&self, kept: &[usize]) -> Result<Partition> {
        Partition::new(kept.iter().map(|&v| self.sides[v]).collect())
    }

    fn check_graph(&self, g: &ConversationGraph) {
        assert_eq!(
            self.sides.len(),
            g.vertex_count(),
            "partition size does not match graph"
        );
    }
}

/// Undirected edges `(u, v)`, `u < v`, whose endpoints lie on different sides.
pub fn cut_edges(g: &ConversationGraph, p: &Partition) -> Vec<(usize, usize)> {
    p.check_graph(g);
    g.undirected_edges()
        .into_iter()
        .filter(|&(u, v, _)| p.side(u) != p.side(v))
        .map(|(u, v, _)| (u, v))
        .collect()
}

/// Total weight of the cut edges.
pub fn cut_weight(g: &ConversationGraph, p: &Partition) -> u64 {
    g.undirected_edges()
        .into_iter()
        .filter(|&(u, v, _)| p.side(u) != p.side(v))
        .map(|(_, _, w)| w)
        .sum()
}

const FIEDLER_TOL: f64 = 1e-8;
const FIEDLER_MAX_ITERS: usize = 10_000;

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

fn remove_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

/// Approximate Fiedler vector by power iteration on `c·I − L` with the constant vector
/// projected out, where `c` bounds the Laplacian spectrum.
pub fn fiedler_vector(g: &ConversationGraph, seed: u64) -> Vec<f64> {
    let n = g.vertex_count();
    let deg: Vec<f64> = (0..n).map(|u| g.weighted_degree(u) as f64).collect();
    let shift = 2.0 * deg.iter().cloned().fold(0.0, f64::max).max(1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    remove_mean(&mut x);
    normalize(&mut x);
    let mut next = vec![0.0; n];
    for _ in 0..FIEDLER_MAX_ITERS {
        for u in 0..n {
            let mut lx = deg[u] * x[u];
            for (&v, &w) in g.neighbors(u).iter().zip(g.neighbor_weights(u)) {
                lx -= w as f64 * x[v];
            }
            next[u] = shift * x[u] - lx;
        }
        remove_mean(&mut next);
        normalize(&mut next);
        let diff = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut x, &mut next);
        if diff < FIEDLER_TOL {
            break;
        }
    }
    x
}

/// Spectral bisection with a median split and one Kernighan–Lin refinement pass.
/// Deterministic given `(g, seed)`; the side holding vertex 0 is labelled X.
pub fn spectral_bisection(g: &ConversationGraph, seed: u64) -> Result<Partition> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::Degenerate("bisection needs at least 2 vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Degenerate("graph must be connected".into()));
    }
    let fiedler = fiedler_vector(g, seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fiedler[a].total_cmp(&fiedler[b]).then(a.cmp(&b)));
    let mut sides = vec![Side::Y; n];
    for &v in &order[..n / 2] {
        sides[v] = Side::X;
    }
    kernighan_lin_pass(g, &mut sides);
    if sides[0] == Side::Y {
        sides.iter_mut().for_each(|s| *s = s.other());
    }
    Partition::new(sides)
}

/// One pass of balanced pair swaps. Each swap strictly lowers the weighted cut; the pass
/// stops at the first non-improving candidate pair.
fn kernighan_lin_pass(g: &ConversationGraph, sides: &mut [Side]) {
    let n = g.vertex_count();
    // D(v) = external - internal weight
    let mut gain: Vec<i64> = (0..n)
        .map(|u| {
            g.neighbors(u)
                .iter()
                .zip(g.neighbor_weights(u))
                .map(|(&v, &w)| if sides[v] == sides[u] { -(w as i64) } else { w as i64 })
                .sum()
        })
        .collect();
    let mut locked = vec![false; n];
    let best = |side: Side, gain: &[i64], locked: &[bool], sides: &[Side]| {
        (0..n)
            .filter(|&v| !locked[v] && sides[v] == side)
            .max_by(|&a, &b| gain[a].cmp(&gain[b]).then(b.cmp(&a)))
    };
    while let (Some(a), Some(b)) = (
        best(Side::X, &gain, &locked, sides),
        best(Side::Y, &gain, &locked, sides),
    ) {
        let delta = gain[a] + gain[b] - 2 * g.edge_weight(a, b) as i64;
        if delta <= 0 {
            break;
        }
        for moved in [a, b] {
            let from = sides[moved];
            for (&v, &w) in g.neighbors(moved).iter().zip(g.neighbor_weights(moved)) {
                if sides[v] == from {
                    gain[v] += 2 * w as i64;
                } else {
                    gain[v] -= 2 * w as i64;
                }
            }
            sides[moved] = from.other();
            locked[moved] = true;
        }
    }
}

/// Reads a TSV partition file `vertex-id<TAB>side` (side 0 = X, 1 = Y). Lines starting
/// with `#` are ignored. Every vertex of `g` must be labelled exactly once.
pub fn import_partition<R: BufRead>(g: &ConversationGraph, reader: R) -> Result<Partition> {
    let mut labels: HashMap<usize, Side> = HashMap::new();
    let mut problems = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut cols = trimmed.split('\t');
        let (Some(id), Some(label), None) = (cols.next(), cols.next(), cols.next()) else {
            problems.push(format!("line {}: expected 2 columns", i + 1));
            continue;
        };
        let id = crate::records::normalize_user(id);
        let side = match label.trim() {
            "0" => Side::X,
            "1" => Side::Y,
            other => {
                problems.push(format!("line {}: invalid label '{other}' for '{id}'", i + 1));
                continue;
            }
        };
        match g.index_of(&id) {
            Some(v) => {
                if labels.insert(v, side).is_some() {
                    problems.push(format!("line {}: duplicate vertex '{id}'", i + 1));
                }
            }
            None => problems.push(format!("line {}: unknown vertex '{id}'", i + 1)),
        }
    }
    let missing: Vec<&str> = (0..g.vertex_count())
        .filter(|v| !labels.contains_key(v))
        .map(|v| g.id(v))
        .collect();
    if !missing.is_empty() {
        problems.push(format!("missing vertices: {}", missing.join(", ")));
    }
    if !problems.is_empty() {
        return Err(Error::Input(format!("bad partition file: {}", problems.join("; "))));
    }
    Partition::new((0..g.vertex_count()).map(|v| labels[&v]).collect())
}

/// Writes `vertex-id<TAB>side` lines in vertex order.
pub fn write_partition<W: std::io::Write>(
    g: &ConversationGraph,
    p: &Partition,
    mut w: W,
) -> Result<()> {
    for v in 0..g.vertex_count() {
        writeln!(w, "{}\t{}", g.id(v), p.side(v).label())?;
    }
    Ok(())
}
