//! Browser demo: planted graphs, an RWC sweep and karate-club user scores.
//!
//! Every exported function returns a JSON string; `www/index.html` draws it on a canvas.
//! The `*_json` functions hold the logic so it can be tested natively.

use controversy::datasets::{karate_club, karate_factions};
use controversy::graph::{largest_component_with_map, ConversationGraph};
use controversy::measures;
use controversy::partition::{Partition, Side};
use controversy::synthetic::{planted_two_community, rwc_sweep, PlantedConfig, SweepConfig};
use controversy::user::user_scores;
use controversy::walk::{HighDegreeRule, RestartWalkConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Caps keeping a single call under a second or so in the browser.
const MAX_N: usize = 600;
const LAYOUT_ITERS: usize = 300;
const BCC_SAMPLES: usize = 2000;

#[derive(Serialize)]
struct Vertex {
    id: String,
    x: f64,
    y: f64,
    side: u8,
}

#[derive(Serialize)]
struct Scores {
    rwc: Option<f64>,
    bcc: Option<f64>,
    ec: Option<f64>,
    gmck: Option<f64>,
    mblb: Option<f64>,
}

#[derive(Serialize)]
struct Scene {
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
    scores: Scores,
}

fn scene(g: &ConversationGraph, p: &Partition, seed: u64) -> Scene {
    let layout = measures::force_layout(g, LAYOUT_ITERS, seed);
    let hds = HighDegreeRule::default().select(g, p);
    // undefined scores (for example no cut edge) are shown as blanks
    let scores = Scores {
        rwc: measures::rwc_rwr(g, p, &hds, &RestartWalkConfig::default()).ok().map(|s| s.value),
        bcc: measures::bcc(g, p, BCC_SAMPLES, seed).ok().map(|s| s.value),
        ec: measures::ec(&layout, p).ok(),
        gmck: measures::gmck(g, p).ok().map(|s| s.value),
        mblb: measures::mblb(g, p, 0.05, 1e-6, 1000).ok().map(|s| s.value),
    };
    let vertices = layout
        .iter()
        .enumerate()
        .map(|(v, &(x, y))| Vertex { id: g.id(v).to_string(), x, y, side: p.side(v).label() })
        .collect();
    let edges = g.undirected_edges().into_iter().map(|(u, v, _)| (u, v)).collect();
    Scene { vertices, edges, scores }
}

fn to_json<T: Serialize>(v: &T) -> controversy::Result<String> {
    Ok(serde_json::to_string(v)?)
}

pub fn planted_json(n: usize, p1: f64, p2: f64, seed: u64) -> controversy::Result<String> {
    if n > MAX_N {
        return Err(controversy::Error::Domain(format!("n is capped at {MAX_N} in the demo")));
    }
    let (g, truth) = planted_two_community(&PlantedConfig { n, p1, p2, seed })?;
    let (g, kept) = largest_component_with_map(&g);
    let p = truth.restrict(&kept)?;
    to_json(&scene(&g, &p, seed))
}

#[derive(Serialize)]
struct CurvePoint {
    p1: f64,
    mean: f64,
    std: f64,
}

pub fn sweep_json(n: usize, p2: f64, runs: usize, seed: u64) -> controversy::Result<String> {
    if n > MAX_N {
        return Err(controversy::Error::Domain(format!("n is capped at {MAX_N} in the demo")));
    }
    let cfg = SweepConfig {
        n,
        p1_values: (1..=10).map(|i| 0.005 * i as f64).collect(),
        p2_values: vec![p2],
        runs,
        base_seed: seed,
        ..SweepConfig::default()
    };
    let rows = rwc_sweep(&cfg)?;
    let points: Vec<CurvePoint> = rows
        .iter()
        .filter(|r| r.is_valid())
        .map(|r| CurvePoint { p1: r.p1, mean: r.mean_rwc, std: r.std_rwc })
        .collect();
    to_json(&points)
}

#[derive(Serialize)]
struct KarateUsers {
    #[serde(flatten)]
    scene: Scene,
    rwc_user: Vec<f64>,
    rho: Vec<f64>,
    high_degree: Vec<usize>,
}

pub fn karate_json(k: usize, seed: u64) -> controversy::Result<String> {
    let g = karate_club();
    let p = karate_factions(&g);
    let hds = HighDegreeRule::Fixed(k.max(1)).select(&g, &p);
    let users = user_scores(&g, &p, &hds, &RestartWalkConfig::default())?;
    let mut scene = scene(&g, &p, seed);
    scene.scores.rwc = measures::rwc_rwr(&g, &p, &hds, &RestartWalkConfig::default()).ok().map(|s| s.value);
    to_json(&KarateUsers {
        scene,
        rwc_user: users.iter().map(|u| u.rwc_user).collect(),
        rho: users.iter().map(|u| u.rho).collect(),
        high_degree: hds.of(Side::X).iter().chain(hds.of(Side::Y)).copied().collect(),
    })
}

fn js(r: controversy::Result<String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Planted two-community graph (largest component): layout, edges and scores.
#[wasm_bindgen]
pub fn planted(n: usize, p1: f64, p2: f64, seed: u32) -> Result<String, JsValue> {
    js(planted_json(n, p1, p2, seed as u64))
}

/// Mean RWC against the intra-community probability for a fixed `p2`.
#[wasm_bindgen]
pub fn sweep(n: usize, p2: f64, runs: usize, seed: u32) -> Result<String, JsValue> {
    js(sweep_json(n, p2, runs, seed as u64))
}

/// Karate club with the faction split and per-user scores for `k` high-degree vertices.
#[wasm_bindgen]
pub fn karate(k: usize, seed: u32) -> Result<String, JsValue> {
    js(karate_json(k, seed as u64))
}
