//! Per-user controversy scores.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ConversationGraph;
use crate::partition::{Partition, Side};
use crate::walk::{expected_hitting_times, stationary_rwr, HighDegreeSets, RestartWalkConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserScore {
    pub user_id: String,
    pub side: Side,
    /// Share of the walk's mass on the user's own side's high-degree vertices, in `[0,1]`.
    pub rwc_user: f64,
    /// Hitting-time rank difference `ρ^X − ρ^Y`, in `(−1,1)`.
    pub rho: f64,
}

/// Restart walk from `u` (restarting at `u`, with `X⁺ ∪ Y⁺` dangling); returns the share
/// of the stationary mass on `X⁺ ∪ Y⁺` that sits on `u`'s own side.
pub fn rwc_user(
    g: &ConversationGraph,
    p: &Partition,
    hds: &HighDegreeSets,
    u: usize,
    cfg: &RestartWalkConfig,
) -> Result<f64> {
    if u >= g.vertex_count() {
        return Err(Error::Input(format!("vertex {u} out of range")));
    }
    let pi = stationary_rwr(g, &[u], &hds.union(), cfg)?;
    let m_x = pi.mass(&hds.x_plus);
    let m_y = pi.mass(&hds.y_plus);
    let total = m_x + m_y;
    if total <= 0.0 {
        return Err(Error::Degenerate(format!(
            "no high-degree vertex reachable from '{}'",
            g.id(u)
        )));
    }
    Ok(match p.side(u) {
        Side::X => m_x / total,
        Side::Y => m_y / total,
    })
}

/// Relative slack under which two hitting times count as tied.
const TIE_SLACK: f64 = 1e-9;

fn strictly_less(a: f64, b: f64) -> bool {
    if b.is_infinite() {
        return a.is_finite();
    }
    a < b - TIE_SLACK * b.abs().max(1.0)
}

fn rank_fractions(times: &[f64]) -> Vec<f64> {
    let n = times.len() as f64;
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    times
        .iter()
        .map(|&t| sorted.partition_point(|&s| strictly_less(s, t)) as f64 / n)
        .collect()
}

/// `ρ(u) = ρ^X(u) − ρ^Y(u)`, where `ρ^X(u)` is the fraction of vertices whose expected
/// hitting time to `X⁺` is strictly smaller than `u`'s. Infinite times rank last; times
/// equal up to solver precision tie.
pub fn hitting_score_all(g: &ConversationGraph, hds: &HighDegreeSets) -> Result<Vec<f64>> {
    let lx = expected_hitting_times(g, &hds.x_plus)?;
    let ly = expected_hitting_times(g, &hds.y_plus)?;
    let rx = rank_fractions(&lx);
    let ry = rank_fractions(&ly);
    Ok(rx.iter().zip(&ry).map(|(a, b)| a - b).collect())
}

/// Both scores for every vertex, in vertex order.
pub fn user_scores(
    g: &ConversationGraph,
    p: &Partition,
    hds: &HighDegreeSets,
    cfg: &RestartWalkConfig,
) -> Result<Vec<UserScore>> {
    let rho = hitting_score_all(g, hds)?;
    (0..g.vertex_count())
        .into_par_iter()
        .map(|u| {
            Ok(UserScore {
                user_id: g.id(u).to_string(),
                side: p.side(u),
                rwc_user: rwc_user(g, p, hds, u, cfg)?,
                rho: rho[u],
            })
        })
        .collect()
}

/// CSV `user_id,side,rwc_user,rho`.
pub fn write_user_scores<W: std::io::Write>(scores: &[UserScore], mut w: W) -> Result<()> {
    writeln!(w, "user_id,side,rwc_user,rho")?;
    for s in scores {
        writeln!(w, "{},{},{},{}", s.user_id, s.side, s.rwc_user, s.rho)?;
    }
    Ok(())
}
