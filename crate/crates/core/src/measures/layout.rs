//! Spring-electrical (Fruchterman–Reingold) force-directed layout.
//!
//! Repulsion `k²/d` between every vertex pair, attraction `d²/k` along edges, with a
//! linearly cooling cap on per-iteration displacement. `O(n²)` per iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::ConversationGraph;

pub const DEFAULT_ITERATIONS: usize = 500;

pub type Point = (f64, f64);

/// Layout in the unit square (before forces act), deterministic given `(g, iterations, seed)`.
pub fn force_layout(g: &ConversationGraph, iterations: usize, seed: u64) -> Vec<Point> {
    let n = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<Point> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    if n < 2 {
        return pos;
    }
    let k = (1.0 / n as f64).sqrt();
    let k2 = k * k;
    let t0 = 0.1;
    let edges = g.undirected_edges();
    let mut disp = vec![(0.0f64, 0.0f64); n];
    for it in 0..iterations {
        disp.iter_mut().for_each(|d| *d = (0.0, 0.0));
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy, d) = separation(pos[i], pos[j], i, j);
                let f = k2 / d;
                let (fx, fy) = (dx / d * f, dy / d * f);
                disp[i].0 += fx;
                disp[i].1 += fy;
                disp[j].0 -= fx;
                disp[j].1 -= fy;
            }
        }
        for &(u, v, _) in &edges {
            let (dx, dy, d) = separation(pos[u], pos[v], u, v);
            let f = d * d / k;
            let (fx, fy) = (dx / d * f, dy / d * f);
            disp[u].0 -= fx;
            disp[u].1 -= fy;
            disp[v].0 += fx;
            disp[v].1 += fy;
        }
        let temp = t0 * (1.0 - it as f64 / iterations as f64);
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = (d.0 * d.0 + d.1 * d.1).sqrt();
            if len > 0.0 {
                let step = len.min(temp);
                p.0 += d.0 / len * step;
                p.1 += d.1 / len * step;
            }
        }
    }
    pos
}

/// Vector from `b` to `a` and its length, nudged apart when the points coincide.
fn separation(a: Point, b: Point, i: usize, j: usize) -> (f64, f64, f64) {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    let d = (dx * dx + dy * dy).sqrt();
    if d > 1e-9 {
        (dx, dy, d)
    } else {
        let angle = (i * 7919 + j * 104_729) as f64;
        (1e-9 * angle.cos(), 1e-9 * angle.sin(), 1e-9)
    }
}
