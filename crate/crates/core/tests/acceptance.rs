//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero when any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use controversy::datasets::{karate_club, karate_factions};
use controversy::graph::{largest_component_with_map, ConversationGraph};
use controversy::measures::{self, betweenness::edge_betweenness, rwc::sample_walk_counts};
use controversy::partition::{Partition, Side};
use controversy::pipeline::ec_averaged;
use controversy::sentiment::{classify_by_variance, variance, VarianceClass};
use controversy::synthetic::{planted_two_community, rwc_sweep, PlantedConfig, SweepConfig};
use controversy::user::{hitting_score_all, rwc_user, user_scores};
use controversy::walk::{expected_hitting_times, stationary_rwr, top_degree, HighDegreeRule, RestartWalkConfig};

const SEED: u64 = 42;
const COMPLEMENT_TOL: f64 = 1e-9;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(v: f64, target: f64, tol: f64) -> bool {
    (v - target).abs() <= tol
}

fn rwr_complements_hold(s: &measures::RwrScore) -> bool {
    (s.p_x_xplus + s.p_y_xplus - 1.0).abs() <= COMPLEMENT_TOL && (s.p_x_yplus + s.p_y_yplus - 1.0).abs() <= COMPLEMENT_TOL
}

fn karate() -> Outcome {
    let start = Instant::now();
    let g = karate_club();
    let p = karate_factions(&g);
    let hds = HighDegreeRule::default().select(&g, &p);
    let rwr = measures::rwc_rwr(&g, &p, &hds, &RestartWalkConfig::default()).unwrap();
    let gmck = measures::gmck(&g, &p).unwrap().value;
    let mblb = measures::mblb(&g, &p, 0.05, 1e-6, 1000).unwrap().value;
    let bcc = measures::bcc(&g, &p, 10_000, SEED).unwrap().value;
    let (ec, _, _) = ec_averaged(&g, &p, 500, 5, SEED).unwrap();
    let elapsed = start.elapsed();
    let checks = [
        ("|V|=34", g.vertex_count() == 34),
        ("|E|=78", g.edge_count() == 78),
        ("rwc_rwr", within(rwr.value, 0.11, 0.15)),
        ("gmck", within(gmck, 0.17, 0.10)),
        ("mblb", within(mblb, 0.11, 0.15)),
        ("bcc", within(bcc, 0.64, 0.20)),
        ("ec", within(ec, 0.51, 0.20)),
        ("complements", rwr_complements_hold(&rwr)),
        ("runtime<5s", elapsed < Duration::from_secs(5)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    check(
        failed.is_empty(),
        format!(
            "rwc_rwr={:.3} (0.11±0.15) gmck={:.3} (0.17±0.10) mblb={:.3} (0.11±0.15) bcc={:.3} (0.64±0.20) ec={:.3} (0.51±0.20) in {:.2?}; out of tolerance: {:?}",
            rwr.value, gmck, mblb, bcc, ec, elapsed, failed
        ),
    )
}

fn planted_lc(n: usize, p1: f64, p2: f64, seed: u64) -> Option<(ConversationGraph, Partition)> {
    let (g, truth) = planted_two_community(&PlantedConfig { n, p1, p2, seed }).ok()?;
    let (lc, kept) = largest_component_with_map(&g);
    let p = truth.restrict(&kept).ok()?;
    Some((lc, p))
}

fn mc_rwr_agreement() -> Outcome {
    let start = Instant::now();
    let p1s = [0.01, 0.0325, 0.055, 0.0775, 0.1];
    let p2s = [0.001, 0.003, 0.01, 0.025, 0.05];
    let cfg = RestartWalkConfig::default();
    let mut mc = Vec::new();
    let mut rwr = Vec::new();
    let mut complements = true;
    for (i, &p1) in p1s.iter().enumerate() {
        for (j, &p2) in p2s.iter().enumerate() {
            let Some((g, p)) = planted_lc(500, p1, p2, SEED + (i * 10 + j) as u64) else { continue };
            let hds = HighDegreeRule::default().select(&g, &p);
            let (Ok(a), Ok(b)) = (
                measures::rwc_mc(&g, &p, &hds, 10_000, SEED),
                measures::rwc_rwr(&g, &p, &hds, &cfg),
            ) else {
                continue;
            };
            complements &= rwr_complements_hold(&b);
            mc.push(a);
            rwr.push(b.value);
        }
    }
    let r = pearson(&mc, &rwr);
    let elapsed = start.elapsed();
    check(
        mc.len() >= 20 && r >= 0.90 && complements && elapsed < Duration::from_secs(120),
        format!("{} graphs, pearson r = {r:.4} (>= 0.90), complements {complements}, {elapsed:.2?}", mc.len()),
    )
}

fn simulation_trends() -> Outcome {
    let start = Instant::now();
    let cfg = SweepConfig::default();
    let rows = rwc_sweep(&cfg).unwrap();
    let elapsed = start.elapsed();
    let np2 = cfg.p2_values.len();
    let at = |i: usize, j: usize| &rows[i * np2 + j];
    let slack = 0.05;
    let mut violations = Vec::new();
    let mut invalid = 0;
    for r in &rows {
        if !r.is_valid() {
            invalid += 1;
        }
    }
    for j in 0..np2 {
        for i in 1..cfg.p1_values.len() {
            let (a, b) = (at(i - 1, j), at(i, j));
            if a.is_valid() && b.is_valid() && b.mean_rwc < a.mean_rwc - slack {
                violations.push(format!("p1 {}->{} at p2 {}", a.p1, b.p1, a.p2));
            }
        }
    }
    for i in 0..cfg.p1_values.len() {
        for j in 1..np2 {
            let (a, b) = (at(i, j - 1), at(i, j));
            if a.is_valid() && b.is_valid() && b.mean_rwc > a.mean_rwc + slack {
                violations.push(format!("p2 {}->{} at p1 {}", a.p2, b.p2, a.p1));
            }
        }
    }
    let lo = rows.iter().filter(|r| r.is_valid()).map(|r| r.mean_rwc).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().filter(|r| r.is_valid()).map(|r| r.mean_rwc).fold(f64::NEG_INFINITY, f64::max);
    check(
        violations.is_empty() && invalid == 0 && elapsed < Duration::from_secs(600),
        format!(
            "{} cells x {} runs, mean rwc range [{lo:.3}, {hi:.3}], invalid cells {invalid}, violations {violations:?}, {elapsed:.2?}",
            rows.len(),
            cfg.runs
        ),
    )
}

fn closed_forms() -> Outcome {
    let barbell = clique_pair(5, true);
    let halves = Partition::split_at(10, 5).unwrap();
    let gmck = measures::gmck(&barbell, &halves).unwrap().value;
    let split = clique_pair(10, false);
    let sides = Partition::split_at(20, 10).unwrap();
    let rwr = measures::rwc_rwr(&split, &sides, &top_degree(&split, &sides, 1), &RestartWalkConfig::default()).unwrap();
    let mblb = measures::mblb(&split, &sides, 0.05, 1e-6, 1000).unwrap().value;

    // complement identities on a spread of scored graphs
    let mut rng = corpus_rng(4);
    let mut complements = rwr_complements_hold(&rwr);
    let mut scored = 1;
    let k = karate_club();
    let kp = karate_factions(&k);
    for g_p in std::iter::once((k, kp)).chain((0..60).map(|_| {
        let n = rng.gen_range(6..40);
        let g = random_connected(n, rng.gen_range(0.1..0.6), &mut rng);
        let p = random_partition(g.vertex_count(), &mut rng);
        (g, p)
    })) {
        let (g, p) = g_p;
        if g.vertex_count() < 2 {
            continue;
        }
        if let Ok(s) = measures::rwc_rwr(&g, &p, &HighDegreeRule::default().select(&g, &p), &RestartWalkConfig::default()) {
            complements &= rwr_complements_hold(&s);
            scored += 1;
        }
    }
    // 4/5 - 1/2 evaluated in floating point is the exact closed form
    let gmck_exact = gmck == 4.0 / 5.0 - 0.5;
    check(
        gmck_exact && rwr.value == 1.0 && mblb == 1.0 && complements,
        format!(
            "barbell gmck = {gmck:?}, split cliques rwc_rwr = {:?}, mblb = {mblb:?}, complements on {scored} graphs: {complements}",
            rwr.value
        ),
    )
}

use rand::Rng;

fn oracles() -> Outcome {
    let mut rng = corpus_rng(5);
    let mut bc_err: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(3..=30);
        let g = random_connected(n, rng.gen_range(0.08..0.5), &mut rng);
        let fast = edge_betweenness(&g);
        let slow = naive_edge_betweenness(&g);
        for (&(u, v), &val) in fast.edges.iter().zip(&fast.values) {
            bc_err = bc_err.max((val - slow[&(u, v)]).abs());
        }
    }
    let cfg = RestartWalkConfig::default();
    let mut rwr_err: f64 = 0.0;
    let mut user_err: f64 = 0.0;
    for _ in 0..30 {
        let n = rng.gen_range(4..=50);
        let g = random_connected(n, rng.gen_range(0.08..0.5), &mut rng);
        if g.vertex_count() < 4 {
            continue;
        }
        let p = random_partition(g.vertex_count(), &mut rng);
        let hds = HighDegreeRule::Fixed(2).select(&g, &p);
        let dangling = hds.union();
        let restart = p.members(Side::X);
        let got = stationary_rwr(&g, &restart, &dangling, &cfg).unwrap();
        rwr_err = rwr_err.max(l1(&got.probs, &dense_rwr(&g, &restart, &dangling, cfg.damping)));
        for u in 0..g.vertex_count() {
            let pi = dense_rwr(&g, &[u], &dangling, cfg.damping);
            let mx: f64 = hds.x_plus.iter().map(|&v| pi[v]).sum();
            let my: f64 = hds.y_plus.iter().map(|&v| pi[v]).sum();
            let want = if p.side(u) == Side::X { mx / (mx + my) } else { my / (mx + my) };
            user_err = user_err.max((rwc_user(&g, &p, &hds, u, &cfg).unwrap() - want).abs());
        }
    }
    // hand-solved: path 0-1-2-3 to {0} gives k(6-k); cycle C6 to {0} gives k(6-k)
    let path = ConversationGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
    let cycle = ConversationGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
    let hp = expected_hitting_times(&path, &[0]).unwrap();
    let hc = expected_hitting_times(&cycle, &[0]).unwrap();
    let hit_err = l1(&hp, &[0.0, 5.0, 8.0, 9.0]).max(l1(&hc, &[0.0, 5.0, 8.0, 9.0, 8.0, 5.0]));
    check(
        bc_err <= 1e-9 && rwr_err <= 1e-8 && user_err <= 1e-8 && hit_err <= 1e-10,
        format!(
            "betweenness max err {bc_err:.1e} (<=1e-9), stationary L1 {rwr_err:.1e} (<=1e-8), rwc_user max err {user_err:.1e} (<=1e-8), hitting times err {hit_err:.1e} (<=1e-10)"
        ),
    )
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

fn performance() -> Outcome {
    let (g, p) = planted_two_community(&PlantedConfig { n: 2000, p1: 0.02, p2: 0.001, seed: SEED }).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let cfg = RestartWalkConfig::default();
    let ratio_for = |hds: &controversy::walk::HighDegreeSets| {
        pool.install(|| {
            let rwr = median(
                (0..5)
                    .map(|_| {
                        let t = Instant::now();
                        measures::rwc_rwr(&g, &p, hds, &cfg).unwrap();
                        t.elapsed()
                    })
                    .collect(),
            );
            let mc = median(
                (0..3)
                    .map(|i| {
                        let t = Instant::now();
                        measures::rwc_mc(&g, &p, hds, 10_000, SEED + i).unwrap();
                        t.elapsed()
                    })
                    .collect(),
            );
            (rwr, mc, mc.as_secs_f64() / rwr.as_secs_f64())
        })
    };
    let (rwr, mc, ratio) = ratio_for(&HighDegreeRule::default().select(&g, &p));
    let (rwr1, mc1, ratio1) = ratio_for(&top_degree(&g, &p, 1));
    check(
        g.edge_count() >= 20_000 && ratio >= 5.0,
        format!(
            "{} edges, default k: rwr {rwr:.2?} vs mc {mc:.2?} = {ratio:.1}x (>= 5x); for reference k=1: rwr {rwr1:.2?} vs mc {mc1:.2?} = {ratio1:.1}x",
            g.edge_count()
        ),
    )
}

fn properties() -> Outcome {
    let mut rng = corpus_rng(7);
    let cfg = RestartWalkConfig::default();
    let mut graphs = 0;
    let mut problems: Vec<String> = Vec::new();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    while graphs < 120 {
        let n = rng.gen_range(6..=30);
        let g = random_connected(n, rng.gen_range(0.1..0.5), &mut rng);
        if g.vertex_count() < 6 {
            continue;
        }
        graphs += 1;
        let p = random_partition(g.vertex_count(), &mut rng);
        let q = p.swapped();
        let (hp, hq) = (HighDegreeRule::default().select(&g, &p), HighDegreeRule::default().select(&g, &q));
        let mut compare = |name: &str, a: controversy::Result<f64>, b: controversy::Result<f64>, lo: f64, hi: f64| match (a, b) {
            (Ok(a), Ok(b)) => {
                if !close(a, b) {
                    problems.push(format!("{name} swap {a} vs {b}"));
                }
                if !(lo..=hi).contains(&a) {
                    problems.push(format!("{name} out of range {a}"));
                }
            }
            (Err(_), Err(_)) => {}
            _ => problems.push(format!("{name} defined on one labelling only")),
        };
        compare(
            "rwc_rwr",
            measures::rwc_rwr(&g, &p, &hp, &cfg).map(|s| s.value),
            measures::rwc_rwr(&g, &q, &hq, &cfg).map(|s| s.value),
            -1.0,
            1.0,
        );
        compare(
            "bcc",
            measures::bcc(&g, &p, 2000, SEED).map(|s| s.value),
            measures::bcc(&g, &q, 2000, SEED).map(|s| s.value),
            0.0,
            1.0 - f64::EPSILON,
        );
        let layout = measures::force_layout(&g, 100, SEED);
        compare("ec", measures::ec(&layout, &p), measures::ec(&layout, &q), f64::NEG_INFINITY, 1.0);
        compare(
            "gmck",
            measures::gmck(&g, &p).map(|s| s.value),
            measures::gmck(&g, &q).map(|s| s.value),
            -0.5,
            0.5,
        );
        compare(
            "mblb",
            measures::mblb(&g, &p, 0.05, 1e-6, 1000).map(|s| s.value),
            measures::mblb(&g, &q, 0.05, 1e-6, 1000).map(|s| s.value),
            0.0,
            1.0,
        );
        if let Ok(v) = measures::rwc_mc(&g, &p, &hp, 500, SEED) {
            if !(-1.0..=1.0).contains(&v) {
                problems.push(format!("rwc_mc out of range {v}"));
            }
        }
        let rp = hitting_score_all(&g, &hp).unwrap();
        let rq = hitting_score_all(&g, &hq).unwrap();
        if rp.iter().zip(&rq).any(|(a, b)| !close(*a, -*b) || a.abs() >= 1.0) {
            problems.push("rho antisymmetry".into());
        }
        if let Ok(us) = user_scores(&g, &p, &hp, &cfg) {
            if us.iter().any(|u| !(0.0..=1.0).contains(&u.rwc_user)) {
                problems.push("rwc_user range".into());
            }
        }
    }
    // determinism independent of worker count
    let (g, p) = planted_two_community(&PlantedConfig { n: 300, p1: 0.05, p2: 0.005, seed: 9 }).unwrap();
    let (g, kept) = largest_component_with_map(&g);
    let p = p.restrict(&kept).unwrap();
    let hds = HighDegreeRule::default().select(&g, &p);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let counts = sample_walk_counts(&g, &p, &hds, 5000, SEED).unwrap();
            let bc = edge_betweenness(&g).values;
            let bcc = measures::bcc(&g, &p, 5000, SEED).unwrap().value;
            let layout = measures::force_layout(&g, 50, SEED);
            let users: Vec<(f64, f64)> = user_scores(&g, &p, &hds, &cfg).unwrap().iter().map(|u| (u.rwc_user, u.rho)).collect();
            let sweep = rwc_sweep(&SweepConfig {
                n: 200,
                p1_values: vec![0.05, 0.1],
                p2_values: vec![0.005],
                runs: 3,
                ..Default::default()
            })
            .unwrap()
            .iter()
            .map(|r| (r.mean_rwc, r.std_rwc))
            .collect::<Vec<_>>();
            format!("{counts:?}{bc:?}{bcc:?}{layout:?}{users:?}{sweep:?}")
        })
    };
    let deterministic = run(1) == run(4) && run(4) == run(3);
    if !deterministic {
        problems.push("results depend on worker count".into());
    }
    problems.truncate(5);
    check(
        problems.is_empty(),
        format!("{graphs} random graphs, worker-count determinism {deterministic}, problems {problems:?}"),
    )
}

fn sentiment() -> Outcome {
    let cases: [(&[f64], VarianceClass); 6] = [
        (&[-2.0, 0.0, 2.0, 0.0], VarianceClass::Controversial),                 // exactly 2
        (&[-3.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], VarianceClass::Controversial), // 2.25
        (&[-3.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], VarianceClass::NonControversial), // exactly 1.5
        (&[-1.0, 1.0, -1.0, 1.0], VarianceClass::NonControversial),             // 1
        (&[-3.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], VarianceClass::Indeterminate), // 1.8
        (&[-4.0, 4.0, -4.0, 4.0], VarianceClass::Controversial),                // 16
    ];
    let mut wrong = Vec::new();
    for (scores, want) in cases {
        let v = variance(scores).unwrap();
        let got = classify_by_variance(v).unwrap();
        if got != want {
            wrong.push(format!("var {v}: {got} != {want}"));
        }
    }
    check(wrong.is_empty(), format!("{} constructed score sets, mismatches {wrong:?}", cases.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 karate club reproduction", karate),
        ("2 MC/RWR agreement", mc_rwr_agreement),
        ("3 simulation trends", simulation_trends),
        ("4 closed-form anchors", closed_forms),
        ("5 oracle equivalence", oracles),
        ("6 RWR vs MC speed", performance),
        ("7 property suites", properties),
        ("8 sentiment thresholds", sentiment),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        let out = f();
        println!("criterion {name}: {} -- {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        if !out.pass {
            failures += 1;
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
