//! Random Walk Controversy: Monte Carlo estimator and the restart-walk variant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ConversationGraph;
use crate::partition::{Partition, Side};
use crate::walk::{sample_walk, stationary_rwr, HighDegreeSets, RestartWalkConfig};

/// Default number of Monte Carlo walks.
pub const DEFAULT_WALKS: usize = 10_000;

/// RNG for walk `index` under `seed`. Each walk owns its stream, so estimates do not
/// depend on how walks are scheduled across threads.
pub fn walk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Walk outcome counts: `counts[start][end]`, sides indexed X = 0, Y = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WalkCounts {
    pub counts: [[u64; 2]; 2],
}

impl WalkCounts {
    /// `Pr[start in a | end in b]`.
    pub fn conditional(&self, start: Side, end: Side) -> Result<f64> {
        let e = end.label() as usize;
        let total = self.counts[0][e] + self.counts[1][e];
        if total == 0 {
            return Err(Error::Degenerate(format!(
                "insufficient terminations: no walk ended on side {end}; increase the number of walks"
            )));
        }
        Ok(self.counts[start.label() as usize][e] as f64 / total as f64)
    }

    pub fn rwc(&self) -> Result<f64> {
        use Side::*;
        Ok(self.conditional(X, X)? * self.conditional(Y, Y)?
            - self.conditional(Y, X)? * self.conditional(X, Y)?)
    }
}

/// Runs `n_walks` terminating walks on the undirected view and tallies start/end sides.
pub fn sample_walk_counts(
    g: &ConversationGraph,
    p: &Partition,
    hds: &HighDegreeSets,
    n_walks: usize,
    seed: u64,
) -> Result<WalkCounts> {
    let x = p.members(Side::X);
    let y = p.members(Side::Y);
    if x.is_empty() || y.is_empty() {
        return Err(Error::Degenerate("partition has an empty side".into()));
    }
    let terminal = hds.mask(g.vertex_count());
    let outcomes: Vec<(usize, usize)> = (0..n_walks as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = walk_rng(seed, i);
            let side = if rng.gen_bool(0.5) { Side::X } else { Side::Y };
            let pool = if side == Side::X { &x } else { &y };
            let start = pool[rng.gen_range(0..pool.len())];
            let end = sample_walk(g, start, &terminal, &mut rng)?;
            Ok((side.label() as usize, p.side(end).label() as usize))
        })
        .collect::<Result<_>>()?;
    let mut counts = [[0u64; 2]; 2];
    for (s, e) in outcomes {
        counts[s][e] += 1;
    }
    Ok(WalkCounts { counts })
}

/// Monte Carlo RWC: `P_XX·P_YY − P_YX·P_XY` with `P_AB = Pr[start in A | end in B]`.
pub fn rwc_mc(
    g: &ConversationGraph,
    p: &Partition,
    hds: &HighDegreeSets,
    n_walks: usize,
    seed: u64,
) -> Result<f64> {
    sample_walk_counts(g, p, hds, n_walks, seed)?.rwc()
}

/// Restart-walk RWC together with its four conditional probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RwrScore {
    pub value: f64,
    /// `Pr[start = X | end = X⁺]`
    pub p_x_xplus: f64,
    /// `Pr[start = X | end = Y⁺]`
    pub p_x_yplus: f64,
    /// `Pr[start = Y | end = Y⁺]`
    pub p_y_yplus: f64,
    /// `Pr[start = Y | end = X⁺]`
    pub p_y_xplus: f64,
}

/// RWC from the stationary distributions of two restart walks, one restarting uniformly
/// on X and one on Y, with `X⁺ ∪ Y⁺` made dangling. The side sizes weight the two walks.
pub fn rwc_rwr(
    g: &ConversationGraph,
    p: &Partition,
    hds: &HighDegreeSets,
    cfg: &RestartWalkConfig,
) -> Result<RwrScore> {
    let x = p.members(Side::X);
    let y = p.members(Side::Y);
    if x.is_empty() || y.is_empty() {
        return Err(Error::Degenerate("partition has an empty side".into()));
    }
    let dangling = hds.union();
    let (p1, p2) = rayon::join(
        || stationary_rwr(g, &x, &dangling, cfg),
        || stationary_rwr(g, &y, &dangling, cfg),
    );
    let (p1, p2) = (p1?, p2?);
    let n = g.vertex_count() as f64;
    let (wx, wy) = (x.len() as f64 / n, y.len() as f64 / n);

    let conditional = |end: &[usize]| -> Result<(f64, f64)> {
        let from_x = wx * p1.mass(end);
        let from_y = wy * p2.mass(end);
        let denom = from_x + from_y;
        if denom <= 0.0 {
            return Err(Error::Degenerate(
                "no stationary mass on a high-degree set".into(),
            ));
        }
        Ok((from_x / denom, from_y / denom))
    };
    let (p_x_xplus, p_y_xplus) = conditional(&hds.x_plus)?;
    let (p_x_yplus, p_y_yplus) = conditional(&hds.y_plus)?;
    Ok(RwrScore {
        value: p_x_xplus * p_y_yplus - p_x_yplus * p_y_xplus,
        p_x_xplus,
        p_x_yplus,
        p_y_yplus,
        p_y_xplus,
    })
}
