//! Planted two-community random graphs and RWC parameter sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{largest_component_with_map, ConversationGraph, GraphBuilder};
use crate::measures::rwc::rwc_rwr;
use crate::partition::{spectral_bisection, Partition, Side};
use crate::walk::{HighDegreeRule, RestartWalkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedConfig {
    pub n: usize,
    /// Intra-community edge probability.
    pub p1: f64,
    /// Inter-community edge probability.
    pub p2: f64,
    pub seed: u64,
}

/// Two blocks of `n/2` vertices (`0..n/2` is X). Every unordered pair is an edge
/// independently with probability `p1` inside a block and `p2` across.
///
/// Pairs are visited in a fixed order with one uniform draw each, so graphs sharing a
/// seed are coupled: raising `p1` or `p2` only adds edges.
pub fn planted_two_community(cfg: &PlantedConfig) -> Result<(ConversationGraph, Partition)> {
    let n = cfg.n;
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::Domain(format!("n must be even and >= 4, got {n}")));
    }
    for p in [cfg.p1, cfg.p2] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("edge probability {p} outside [0,1]")));
        }
    }
    let half = n / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut b = GraphBuilder::new(false);
    for v in 0..n {
        b.add_vertex(&v.to_string());
    }
    for u in 0..n {
        for v in u + 1..n {
            let p = if (u < half) == (v < half) { cfg.p1 } else { cfg.p2 };
            if rng.gen::<f64>() < p {
                b.add_edge_by_index(u, v, 1);
            }
        }
    }
    Ok((b.build(), Partition::split_at(n, half)?))
}

/// splitmix64 finaliser; derives independent run seeds from a base seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub p1_values: Vec<f64>,
    pub p2_values: Vec<f64>,
    pub runs: usize,
    pub base_seed: u64,
    /// Score only the largest connected component.
    pub giant_component: bool,
    /// Re-detect the sides by spectral bisection instead of using the planted blocks.
    pub redetect: bool,
    pub high_degree: HighDegreeRule,
    pub walk: RestartWalkConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n: 2000,
            p1_values: (1..=10).map(|i| 0.002 * i as f64).collect(),
            p2_values: vec![0.0005, 0.001, 0.002, 0.004],
            runs: 10,
            base_seed: 42,
            giant_component: true,
            redetect: false,
            high_degree: HighDegreeRule::default(),
            walk: RestartWalkConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p1: f64,
    pub p2: f64,
    /// NaN when no run was valid.
    pub mean_rwc: f64,
    pub std_rwc: f64,
    /// Number of valid runs.
    pub runs: usize,
}

impl SweepRow {
    pub fn is_valid(&self) -> bool {
        self.runs > 0
    }
}

/// RWC (restart-walk variant) of one planted graph under the sweep settings.
pub fn score_planted(cfg: &SweepConfig, planted: &PlantedConfig) -> Result<f64> {
    let (g, truth) = planted_two_community(planted)?;
    let (g, p) = if cfg.giant_component {
        let (lc, kept) = largest_component_with_map(&g);
        if lc.vertex_count() < 2 {
            return Err(Error::Degenerate("empty largest component".into()));
        }
        let p = truth.restrict(&kept)?;
        (lc, p)
    } else {
        (g, truth)
    };
    let p = if cfg.redetect {
        spectral_bisection(&g, planted.seed)?
    } else {
        p
    };
    if p.size(Side::X) == 0 || p.size(Side::Y) == 0 {
        return Err(Error::Degenerate("a planted block vanished".into()));
    }
    let hds = cfg.high_degree.select(&g, &p);
    Ok(rwc_rwr(&g, &p, &hds, &cfg.walk)?.value)
}

/// Mean and standard deviation of RWC over `runs` graphs for every `(p1, p2)` cell,
/// rows ordered by `p1` then `p2`.
///
/// Run `r` of every cell uses the same generator seed, so cells differ only through the
/// probabilities (common random numbers). Runs that fail are left out of the mean.
pub fn rwc_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.runs == 0 {
        return Err(Error::Domain("runs must be >= 1".into()));
    }
    let cells: Vec<(f64, f64, usize)> = cfg
        .p1_values
        .iter()
        .flat_map(|&p1| cfg.p2_values.iter().map(move |&p2| (p1, p2)))
        .flat_map(|(p1, p2)| (0..cfg.runs).map(move |r| (p1, p2, r)))
        .collect();
    let scores: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(p1, p2, run)| {
            let planted = PlantedConfig {
                n: cfg.n,
                p1,
                p2,
                seed: derive_seed(cfg.base_seed, run as u64),
            };
            score_planted(cfg, &planted).ok()
        })
        .collect();
    Ok(scores
        .chunks(cfg.runs)
        .zip(cells.chunks(cfg.runs))
        .map(|(chunk, cell)| {
            let valid: Vec<f64> = chunk.iter().flatten().copied().collect();
            let (mean, std) = mean_std(&valid);
            SweepRow {
                p1: cell[0].0,
                p2: cell[0].1,
                mean_rwc: mean,
                std_rwc: std,
                runs: valid.len(),
            }
        })
        .collect())
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (mean, var.sqrt())
}

/// CSV `p1,p2,mean_rwc,std_rwc,runs`.
pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], mut w: W) -> Result<()> {
    writeln!(w, "p1,p2,mean_rwc,std_rwc,runs")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.p1, r.p2, r.mean_rwc, r.std_rwc, r.runs)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_probabilities() {
        let (g, p) = planted_two_community(&PlantedConfig { n: 10, p1: 1.0, p2: 0.0, seed: 1 }).unwrap();
        assert_eq!(g.edge_count(), 2 * 10);
        assert_eq!(g.connected_components().len(), 2);
        assert_eq!(p.size(Side::X), 5);
        let (g, _) = planted_two_community(&PlantedConfig { n: 10, p1: 1.0, p2: 1.0, seed: 1 }).unwrap();
        assert_eq!(g.edge_count(), 45);
    }

    #[test]
    fn odd_n_rejected() {
        assert!(planted_two_community(&PlantedConfig { n: 7, p1: 0.5, p2: 0.1, seed: 0 }).is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        let cfg = PlantedConfig { n: 60, p1: 0.3, p2: 0.05, seed: 77 };
        assert_eq!(planted_two_community(&cfg).unwrap().0, planted_two_community(&cfg).unwrap().0);
    }

    #[test]
    fn zero_crossing_probability_scores_one() {
        let cfg = SweepConfig {
            n: 40,
            p1_values: vec![0.5, 0.9],
            p2_values: vec![0.0],
            runs: 2,
            giant_component: false,
            ..Default::default()
        };
        let rows = rwc_sweep(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.runs == 2 && r.mean_rwc == 1.0));
        let mut out = Vec::new();
        write_sweep_csv(&rows, &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().starts_with("p1,p2,mean_rwc,std_rwc,runs\n0.5,0,1,0,2\n"));
    }

    #[test]
    fn seeds_differ_by_index() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }
}
