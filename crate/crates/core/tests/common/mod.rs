//! Independent reference implementations and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use controversy::graph::{largest_component, ConversationGraph};
use controversy::partition::{Partition, Side};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn clique_pair(k: usize, bridge: bool) -> ConversationGraph {
    let mut e = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            e.push((a, b));
            e.push((a + k, b + k));
        }
    }
    if bridge {
        e.push((k - 1, k));
    }
    ConversationGraph::from_edges(2 * k, &e)
}

/// Connected G(n, p) (largest component), relabelled "0".."m-1".
pub fn random_connected(n: usize, p: f64, rng: &mut ChaCha8Rng) -> ConversationGraph {
    let mut e = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen::<f64>() < p {
                e.push((a, b));
            }
        }
    }
    let lc = largest_component(&ConversationGraph::from_edges(n, &e));
    let edges: Vec<(usize, usize)> = lc.undirected_edges().into_iter().map(|(u, v, _)| (u, v)).collect();
    ConversationGraph::from_edges(lc.vertex_count(), &edges)
}

/// Random labelling with both sides non-empty.
pub fn random_partition(n: usize, rng: &mut ChaCha8Rng) -> Partition {
    let mut sides: Vec<Side> = (0..n).map(|_| if rng.gen_bool(0.5) { Side::X } else { Side::Y }).collect();
    sides[0] = Side::X;
    sides[n - 1] = Side::Y;
    Partition::new(sides).unwrap()
}

pub fn corpus_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bfs(g: &ConversationGraph, s: usize) -> (Vec<usize>, Vec<f64>) {
    let n = g.vertex_count();
    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0.0; n];
    dist[s] = 0;
    sigma[s] = 1.0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
            if dist[v] == dist[u] + 1 {
                sigma[v] += sigma[u];
            }
        }
    }
    (dist, sigma)
}

/// Edge betweenness by enumerating every ordered pair `(s, t)` and every edge: an edge
/// `{u, v}` lies on `σ_su · σ_vt` shortest `s`–`t` paths when `d(s,u) + 1 + d(v,t) = d(s,t)`.
pub fn naive_edge_betweenness(g: &ConversationGraph) -> BTreeMap<(usize, usize), f64> {
    let n = g.vertex_count();
    let all: Vec<(Vec<usize>, Vec<f64>)> = (0..n).map(|s| bfs(g, s)).collect();
    let mut out = BTreeMap::new();
    for (u, v, _) in g.undirected_edges() {
        let mut total = 0.0;
        for s in 0..n {
            for t in 0..n {
                if s == t || all[s].0[t] == usize::MAX {
                    continue;
                }
                let (ds, ss) = (&all[s].0, &all[s].1);
                let (dt, st) = (&all[t].0, &all[t].1);
                let d = ds[t];
                for (a, b) in [(u, v), (v, u)] {
                    if ds[a] != usize::MAX && dt[b] != usize::MAX && ds[a] + 1 + dt[b] == d {
                        total += ss[a] * st[b] / ss[t];
                    }
                }
            }
        }
        out.insert((u, v), total);
    }
    out
}

/// Stationary distribution of the restart walk from a dense solve.
///
/// With `F` the follow-an-arc part of the transition matrix (column-stochastic up to the
/// restart leakage) and `r` the restart distribution, the stationary vector satisfies
/// `π = Fπ + s·r` for the scalar restart mass `s`, hence `π ∝ (I − F)⁻¹ r`.
pub fn dense_rwr(g: &ConversationGraph, restart: &[usize], dangling: &[usize], damping: f64) -> Vec<f64> {
    let n = g.vertex_count();
    let mut f = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        let out = g.out_arcs(v);
        if dangling.contains(&v) || out.is_empty() {
            continue;
        }
        for &w in out {
            f[(w, v)] += damping / out.len() as f64;
        }
    }
    let mut r = DVector::<f64>::zeros(n);
    for &v in restart {
        r[v] += 1.0 / restart.len() as f64;
    }
    let a = DMatrix::<f64>::identity(n, n) - f;
    let x = a.lu().solve(&r).expect("I - F is non-singular");
    let total = x.sum();
    x.iter().map(|v| v / total).collect()
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
