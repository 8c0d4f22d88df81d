//! Betweenness Centrality Controversy.
//!
//! Edge betweenness values are split into cut and non-cut populations and mapped to
//! `log(1 + bc)`. Each population gets a Gaussian KDE with Scott's-rule bandwidth, and
//! `d_KL(cut ‖ rest)` is estimated by sampling from the cut KDE. The score is
//! `1 − exp(−d_KL)`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ConversationGraph;
use crate::measures::betweenness::{edge_betweenness, EdgeBetweenness};
use crate::measures::rwc::walk_rng;
use crate::partition::Partition;

pub const DEFAULT_SAMPLES: usize = 10_000;
/// Densities are floored here before taking logs.
pub const DENSITY_FLOOR: f64 = 1e-12;

/// One-dimensional Gaussian kernel density estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKde {
    points: Vec<f64>,
    bandwidth: f64,
}

/// Sample standard deviation; spreads at rounding-noise level count as 0.
fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt();
    if sd <= 1e-9 * mean.abs().max(1.0) {
        0.0
    } else {
        sd
    }
}

impl GaussianKde {
    /// KDE with Scott's rule `h = σ · n^(−1/5)`. When the points have no spread,
    /// `fallback_sigma` stands in for σ.
    pub fn scott(points: Vec<f64>, fallback_sigma: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Degenerate("KDE over an empty sample".into()));
        }
        let mut sigma = sample_std(&points);
        if !(sigma > 0.0) {
            sigma = fallback_sigma;
        }
        let bandwidth = sigma * (points.len() as f64).powf(-0.2);
        Ok(GaussianKde { points, bandwidth })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn density(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h * self.points.len() as f64);
        norm * self
            .points
            .iter()
            .map(|&p| {
                let z = (x - p) / h;
                (-0.5 * z * z).exp()
            })
            .sum::<f64>()
    }

    /// A draw from the estimate: a resampled centre plus kernel noise.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let c = self.points[rng.gen_range(0..self.points.len())];
        let z: f64 = StandardNormal.sample(rng);
        c + self.bandwidth * z
    }
}

/// Monte Carlo estimate of `KL(p ‖ q)` from `n_samples` draws of `p`.
pub fn kl_divergence_mc<R: Rng + ?Sized>(p: &GaussianKde, q: &GaussianKde, n_samples: usize, rng: &mut R) -> f64 {
    let mut total = 0.0;
    for _ in 0..n_samples {
        let x = p.sample(rng);
        let a = p.density(x).max(DENSITY_FLOOR);
        let b = q.density(x).max(DENSITY_FLOOR);
        total += (a / b).ln();
    }
    total / n_samples as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BccScore {
    pub value: f64,
    pub kl_divergence: f64,
    pub cut_edges: usize,
    pub other_edges: usize,
}

/// BCC from precomputed betweenness values.
pub fn bcc_from_betweenness(
    bc: &EdgeBetweenness,
    p: &Partition,
    n_samples: usize,
    seed: u64,
) -> Result<BccScore> {
    if n_samples == 0 {
        return Err(Error::Domain("n_samples must be positive".into()));
    }
    let mut cut = Vec::new();
    let mut rest = Vec::new();
    for (&(u, v), &b) in bc.edges.iter().zip(&bc.values) {
        let x = b.ln_1p();
        if p.side(u) != p.side(v) {
            cut.push(x);
        } else {
            rest.push(x);
        }
    }
    if cut.is_empty() || rest.is_empty() {
        return Err(Error::Degenerate("degenerate partition for BCC".into()));
    }
    let all: Vec<f64> = cut.iter().chain(&rest).copied().collect();
    let pooled = sample_std(&all);
    let fallback = if pooled > 0.0 { pooled } else { 1.0 };
    let (n_cut, n_rest) = (cut.len(), rest.len());
    let p_cut = GaussianKde::scott(cut, fallback)?;
    let p_rest = GaussianKde::scott(rest, fallback)?;
    let mut rng = walk_rng(seed, 0);
    let kl = kl_divergence_mc(&p_cut, &p_rest, n_samples, &mut rng).max(0.0);
    let value = (1.0 - (-kl).exp()).clamp(0.0, 1.0 - f64::EPSILON);
    Ok(BccScore {
        value,
        kl_divergence: kl,
        cut_edges: n_cut,
        other_edges: n_rest,
    })
}

pub fn bcc(g: &ConversationGraph, p: &Partition, n_samples: usize, seed: u64) -> Result<BccScore> {
    bcc_from_betweenness(&edge_betweenness(g), p, n_samples, seed)
}
