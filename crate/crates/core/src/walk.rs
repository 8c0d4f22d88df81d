//! Random-walk machinery shared by the controversy measures and user scores.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ConversationGraph;
use crate::partition::{Partition, Side};

/// The highest-degree ("authoritative") vertices of each side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HighDegreeSets {
    pub x_plus: Vec<usize>,
    pub y_plus: Vec<usize>,
}

impl HighDegreeSets {
    pub fn of(&self, side: Side) -> &[usize] {
        match side {
            Side::X => &self.x_plus,
            Side::Y => &self.y_plus,
        }
    }

    /// Membership mask over `n` vertices for `X⁺ ∪ Y⁺`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in self.x_plus.iter().chain(&self.y_plus) {
            m[v] = true;
        }
        m
    }

    pub fn union(&self) -> Vec<usize> {
        let mut u: Vec<usize> = self.x_plus.iter().chain(&self.y_plus).copied().collect();
        u.sort_unstable();
        u
    }
}

/// How many high-degree vertices to take from each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HighDegreeRule {
    /// The same `k` on both sides, clamped at the side size.
    Fixed(usize),
    /// `max(1, ceil(fraction · |side|))` per side.
    Fraction(f64),
}

impl Default for HighDegreeRule {
    fn default() -> Self {
        HighDegreeRule::Fraction(0.05)
    }
}

impl HighDegreeRule {
    pub fn k_for(&self, side_size: usize) -> usize {
        let k = match *self {
            HighDegreeRule::Fixed(k) => k.max(1),
            HighDegreeRule::Fraction(f) => ((f * side_size as f64).ceil() as usize).max(1),
        };
        k.min(side_size)
    }

    pub fn select(&self, g: &ConversationGraph, p: &Partition) -> HighDegreeSets {
        top_degree_sides(
            g,
            p,
            self.k_for(p.size(Side::X)),
            self.k_for(p.size(Side::Y)),
        )
    }
}

/// `"3"` is a fixed count, `"0.05"` or `"5%"` a fraction.
impl std::str::FromStr for HighDegreeRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Input(format!("invalid high-degree rule '{s}'"));
        let frac = if let Some(pct) = s.strip_suffix('%') {
            pct.trim().parse::<f64>().map_err(|_| bad())? / 100.0
        } else if s.contains('.') {
            s.parse::<f64>().map_err(|_| bad())?
        } else {
            let k: usize = s.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(Error::Domain("k must be >= 1".into()));
            }
            return Ok(HighDegreeRule::Fixed(k));
        };
        if !(frac > 0.0 && frac <= 1.0) {
            return Err(Error::Domain(format!("high-degree fraction must be in (0,1], got {frac}")));
        }
        Ok(HighDegreeRule::Fraction(frac))
    }
}

impl std::fmt::Display for HighDegreeRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HighDegreeRule::Fixed(k) => write!(f, "{k}"),
            HighDegreeRule::Fraction(x) => write!(f, "{}%", x * 100.0),
        }
    }
}

fn top_of_side(g: &ConversationGraph, p: &Partition, side: Side, k: usize) -> Vec<usize> {
    let mut members = p.members(side);
    members.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    members.truncate(k);
    members.sort_unstable();
    members
}

fn top_degree_sides(g: &ConversationGraph, p: &Partition, kx: usize, ky: usize) -> HighDegreeSets {
    HighDegreeSets {
        x_plus: top_of_side(g, p, Side::X, kx),
        y_plus: top_of_side(g, p, Side::Y, ky),
    }
}

/// The `k` highest-degree vertices of each side (undirected degree, ties to the smaller
/// index). `k` clamps at the side size.
pub fn top_degree(g: &ConversationGraph, p: &Partition, k: usize) -> HighDegreeSets {
    top_degree_sides(g, p, k.max(1), k.max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartWalkConfig {
    /// Probability of following an out-arc rather than restarting.
    pub damping: f64,
    /// L1 change between iterates at which power iteration stops.
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for RestartWalkConfig {
    fn default() -> Self {
        RestartWalkConfig {
            damping: 0.85,
            tolerance: 1e-10,
            max_iters: 10_000,
        }
    }
}

impl RestartWalkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::Domain(format!("damping must be in (0,1), got {}", self.damping)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Stationary distribution of a restart walk.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    pub probs: Vec<f64>,
    pub iterations: usize,
}

impl StationaryDistribution {
    pub fn mass(&self, vertices: &[usize]) -> f64 {
        vertices.iter().map(|&v| self.probs[v]).sum()
    }
}

/// Stationary distribution of the walk on the arc view that, at each step, follows a
/// uniformly random out-arc with probability `damping` and otherwise restarts uniformly
/// in `restart`. Vertices in `dangling`, and vertices without out-arcs, restart with
/// probability 1.
pub fn stationary_rwr(
    g: &ConversationGraph,
    restart: &[usize],
    dangling: &[usize],
    cfg: &RestartWalkConfig,
) -> Result<StationaryDistribution> {
    cfg.validate()?;
    if restart.is_empty() {
        return Err(Error::Domain("restart set must be non-empty".into()));
    }
    let n = g.vertex_count();
    let mut is_dangling = vec![false; n];
    for &v in dangling {
        is_dangling[v] = true;
    }
    let restart_share = 1.0 / restart.len() as f64;
    let mut pi = vec![0.0; n];
    for &r in restart {
        pi[r] += restart_share;
    }
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.max_iters {
        next.iter_mut().for_each(|x| *x = 0.0);
        let mut restart_mass = 0.0;
        for v in 0..n {
            let mass = pi[v];
            if mass == 0.0 {
                continue;
            }
            let out = g.out_arcs(v);
            if is_dangling[v] || out.is_empty() {
                restart_mass += mass;
                continue;
            }
            restart_mass += (1.0 - cfg.damping) * mass;
            let share = cfg.damping * mass / out.len() as f64;
            for &w in out {
                next[w] += share;
            }
        }
        let spread = restart_mass * restart_share;
        for &r in restart {
            next[r] += spread;
        }
        residual = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if residual < cfg.tolerance {
            return Ok(StationaryDistribution {
                probs: pi,
                iterations: iter,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iters,
        residual,
    })
}

/// Step cap for a single walk.
pub const MAX_WALK_STEPS: usize = 1_000_000;

/// Uniform-neighbour walk on the undirected view from `start` until it reaches a vertex
/// with `terminal[v] == true`; returns that vertex.
pub fn sample_walk<R: Rng + ?Sized>(
    g: &ConversationGraph,
    start: usize,
    terminal: &[bool],
    rng: &mut R,
) -> Result<usize> {
    let mut at = start;
    for _ in 0..MAX_WALK_STEPS {
        if terminal[at] {
            return Ok(at);
        }
        let nbrs = g.neighbors(at);
        if nbrs.is_empty() {
            break;
        }
        at = nbrs[rng.gen_range(0..nbrs.len())];
    }
    if terminal[at] {
        return Ok(at);
    }
    Err(Error::Degenerate(format!("walk did not terminate (start {})", g.id(start))))
}

/// Exact expected number of steps for the uniform undirected walk from each vertex to
/// first reach `targets`. Zero on targets, `+inf` in components without a target.
///
/// Solves the absorbing-chain system `deg(u)·l_u − Σ_{v~u} l_v = deg(u)` on the
/// non-target vertices by conjugate gradients (the system is symmetric positive definite
/// once every component holds a target).
pub fn expected_hitting_times(g: &ConversationGraph, targets: &[usize]) -> Result<Vec<f64>> {
    if targets.is_empty() {
        return Err(Error::Domain("target set must be non-empty".into()));
    }
    let n = g.vertex_count();
    let mut is_target = vec![false; n];
    for &t in targets {
        is_target[t] = true;
    }
    let mut times = vec![f64::INFINITY; n];
    let mut unknown = Vec::new();
    for comp in g.connected_components() {
        if comp.iter().any(|&v| is_target[v]) {
            for v in comp {
                if is_target[v] {
                    times[v] = 0.0;
                } else {
                    unknown.push(v);
                }
            }
        }
    }
    if unknown.is_empty() {
        return Ok(times);
    }
    let mut slot = vec![usize::MAX; n];
    for (i, &v) in unknown.iter().enumerate() {
        slot[v] = i;
    }
    let m = unknown.len();
    let apply = |x: &[f64], out: &mut [f64]| {
        for (i, &u) in unknown.iter().enumerate() {
            let mut acc = g.degree(u) as f64 * x[i];
            for &v in g.neighbors(u) {
                if slot[v] != usize::MAX {
                    acc -= x[slot[v]];
                }
            }
            out[i] = acc;
        }
    };
    let b: Vec<f64> = unknown.iter().map(|&u| g.degree(u) as f64).collect();
    let b_norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut x = vec![0.0; m];
    let mut r = b.clone();
    let mut d = r.clone();
    let mut ad = vec![0.0; m];
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let max_iters = 10 * m + 100;
    let mut converged = false;
    for _ in 0..max_iters {
        if rr.sqrt() <= 1e-13 * b_norm {
            converged = true;
            break;
        }
        apply(&d, &mut ad);
        let dad: f64 = d.iter().zip(&ad).map(|(a, b)| a * b).sum();
        if dad <= 0.0 {
            return Err(Error::Degenerate("singular hitting-time system".into()));
        }
        let alpha = rr / dad;
        for i in 0..m {
            x[i] += alpha * d[i];
            r[i] -= alpha * ad[i];
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_new / rr;
        for i in 0..m {
            d[i] = r[i] + beta * d[i];
        }
        rr = rr_new;
    }
    if !converged && rr.sqrt() > 1e-10 * b_norm {
        return Err(Error::NonConvergence {
            iterations: max_iters,
            residual: rr.sqrt() / b_norm,
        });
    }
    for (i, &u) in unknown.iter().enumerate() {
        times[u] = x[i];
    }
    Ok(times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn barbell5() -> ConversationGraph {
        let mut e = Vec::new();
        for a in 0..5 {
            for b in a + 1..5 {
                e.push((a, b));
                e.push((a + 5, b + 5));
            }
        }
        e.push((4, 5));
        ConversationGraph::from_edges(10, &e)
    }

    #[test]
    fn top_degree_picks_bridge_endpoints() {
        let g = barbell5();
        let p = Partition::split_at(10, 5).unwrap();
        let h = top_degree(&g, &p, 1);
        assert_eq!(h.x_plus, vec![4]);
        assert_eq!(h.y_plus, vec![5]);
    }

    #[test]
    fn top_degree_star_hub_and_clamping() {
        let g = ConversationGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let p = Partition::split_at(5, 3).unwrap();
        assert_eq!(top_degree(&g, &p, 1).x_plus, vec![0]);
        assert_eq!(top_degree(&g, &p, 5).y_plus, vec![3, 4]);
    }

    #[test]
    fn fraction_rule() {
        let r = HighDegreeRule::Fraction(0.05);
        assert_eq!(r.k_for(17), 1);
        assert_eq!(r.k_for(21), 2);
        assert_eq!(r.k_for(1000), 50);
        assert_eq!(HighDegreeRule::Fixed(5).k_for(2), 2);
    }

    #[test]
    fn rwr_single_vertex() {
        let g = ConversationGraph::from_edges(1, &[]);
        let d = stationary_rwr(&g, &[0], &[], &RestartWalkConfig::default()).unwrap();
        assert_eq!(d.probs, vec![1.0]);
    }

    #[test]
    fn rwr_two_state_balance() {
        let mut b = crate::graph::GraphBuilder::new(true);
        b.add_edge("a", "b", 1);
        let g = b.build();
        let d = stationary_rwr(&g, &[0], &[1], &RestartWalkConfig::default()).unwrap();
        assert!((d.probs[0] - 1.0 / 1.85).abs() < 1e-10);
        assert!((d.probs[1] - 0.85 / 1.85).abs() < 1e-10);
    }

    #[test]
    fn rwr_rejects_bad_config() {
        let g = ConversationGraph::from_edges(2, &[(0, 1)]);
        let cfg = RestartWalkConfig { damping: 1.0, ..Default::default() };
        assert!(stationary_rwr(&g, &[0], &[], &cfg).is_err());
        assert!(stationary_rwr(&g, &[], &[], &RestartWalkConfig::default()).is_err());
    }

    #[test]
    fn rwr_non_convergence_reports_residual() {
        let g = ConversationGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let cfg = RestartWalkConfig { max_iters: 2, ..Default::default() };
        match stationary_rwr(&g, &[0], &[], &cfg) {
            Err(Error::NonConvergence { iterations: 2, residual }) => assert!(residual > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn walk_trivial_cases() {
        let g = ConversationGraph::from_edges(2, &[(0, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_walk(&g, 1, &[false, true], &mut rng).unwrap(), 1);
        assert_eq!(sample_walk(&g, 0, &[false, true], &mut rng).unwrap(), 1);
        let g = ConversationGraph::from_edges(3, &[(0, 1)]);
        assert!(sample_walk(&g, 2, &[true, false, false], &mut rng).is_err());
    }

    #[test]
    fn hitting_times_path_and_cycle() {
        let g = ConversationGraph::from_edges(2, &[(0, 1)]);
        assert_eq!(expected_hitting_times(&g, &[1]).unwrap(), vec![1.0, 0.0]);
        let c4 = ConversationGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let l = expected_hitting_times(&c4, &[0]).unwrap();
        assert_eq!(l[0], 0.0);
        assert!((l[1] - 3.0).abs() < 1e-10);
        assert!((l[2] - 4.0).abs() < 1e-10);
        assert!((l[3] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn hitting_times_infinite_without_target() {
        let g = ConversationGraph::from_edges(4, &[(0, 1), (2, 3)]);
        let l = expected_hitting_times(&g, &[0]).unwrap();
        assert_eq!(l[1], 1.0);
        assert!(l[2].is_infinite() && l[3].is_infinite());
    }
}
