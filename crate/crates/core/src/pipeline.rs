//! Batch driver: build -> largest component -> partition -> measures -> report.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::build::{build_content_graph, build_follow_graph, build_retweet_graph, ContentMode, DEFAULT_TAU};
use crate::error::{Error, Result};
use crate::graph::{largest_component_with_map, ConversationGraph};
use crate::io::{read_edge_list, read_follow_edges, write_layout};
use crate::measures::{self, Measure, Point};
use crate::partition::{import_partition, spectral_bisection, Partition, Side};
use crate::records::{read_records, Topic};
use crate::report::{now_unix, ControversyReport, GraphStats, MeasureEntry, SCHEMA_VERSION};
use crate::synthetic::{derive_seed, rwc_sweep, write_sweep_csv, SweepConfig, SweepRow};
use crate::topic::{expand_topic, read_profiles, ExpansionConfig};
use crate::user::{user_scores, write_user_scores, UserScore};
use crate::walk::{HighDegreeRule, RestartWalkConfig};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    Retweet,
    Follow,
    /// Content graphs.
    Hashtag,
    Url,
    Domain,
}

impl std::str::FromStr for GraphKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "retweet" => Ok(GraphKind::Retweet),
            "follow" => Ok(GraphKind::Follow),
            "hashtag" | "content-hashtag" => Ok(GraphKind::Hashtag),
            "url" | "content-url" => Ok(GraphKind::Url),
            "domain" | "content-domain" => Ok(GraphKind::Domain),
            other => Err(Error::Input(format!("unknown graph kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionMode {
    Spectral,
    Import,
}

impl std::str::FromStr for PartitionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(PartitionMode::Spectral),
            "import" => Ok(PartitionMode::Import),
            other => Err(Error::Input(format!("unknown partition mode '{other}'"))),
        }
    }
}

/// Everything one scoring run needs. Serialized verbatim into the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub records: Option<PathBuf>,
    pub edge_list: Option<PathBuf>,
    pub follows: Option<PathBuf>,
    pub profiles: Option<PathBuf>,
    pub partition_file: Option<PathBuf>,
    pub graph_kind: GraphKind,
    /// Edge lists only: treat lines as arcs.
    pub directed: bool,
    pub topic: Option<String>,
    /// Related tags to add from the profiles; 0 disables expansion.
    pub expand_k: usize,
    pub alpha: f64,
    pub tau: u64,
    pub partition: PartitionMode,
    pub giant_component: bool,
    pub measures: Vec<Measure>,
    pub k: HighDegreeRule,
    pub damping: f64,
    pub tolerance: f64,
    pub n_walks: usize,
    pub n_samples: usize,
    pub layout_iterations: usize,
    /// EC is averaged over this many layouts with derived seeds.
    pub layout_runs: usize,
    pub mblb_seed_fraction: f64,
    pub seed: u64,
    pub report: Option<PathBuf>,
    pub report_csv: Option<PathBuf>,
    pub user_scores: Option<PathBuf>,
    pub layout: Option<PathBuf>,
    pub force: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            records: None,
            edge_list: None,
            follows: None,
            profiles: None,
            partition_file: None,
            graph_kind: GraphKind::Retweet,
            directed: false,
            topic: None,
            expand_k: 0,
            alpha: ExpansionConfig::default().alpha,
            tau: DEFAULT_TAU,
            partition: PartitionMode::Spectral,
            giant_component: true,
            measures: Measure::ALL.to_vec(),
            k: HighDegreeRule::default(),
            damping: RestartWalkConfig::default().damping,
            tolerance: RestartWalkConfig::default().tolerance,
            n_walks: measures::rwc::DEFAULT_WALKS,
            n_samples: measures::bcc::DEFAULT_SAMPLES,
            layout_iterations: measures::layout::DEFAULT_ITERATIONS,
            layout_runs: 1,
            mblb_seed_fraction: measures::mblb::DEFAULT_SEED_FRACTION,
            seed: DEFAULT_SEED,
            report: None,
            report_csv: None,
            user_scores: None,
            layout: None,
            force: false,
        }
    }
}

fn parse_bool(v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Input(format!("expected a boolean, got '{v}'"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| Error::Input(format!("{key}: {e}")))
}

pub fn parse_measures(v: &str) -> Result<Vec<Measure>> {
    if v.trim() == "all" {
        return Ok(Measure::ALL.to_vec());
    }
    let mut out: Vec<Measure> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(Error::Input("no measure selected".into()));
    }
    Ok(out)
}

impl PipelineConfig {
    /// Sets one field from its `key = value` form. Keys are the field names; `-` and `_`
    /// are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let path = || Some(PathBuf::from(v));
        match key.trim().replace('-', "_").as_str() {
            "records" => self.records = path(),
            "edge_list" => self.edge_list = path(),
            "follows" => self.follows = path(),
            "profiles" => self.profiles = path(),
            "partition_file" => self.partition_file = path(),
            "graph_kind" => self.graph_kind = v.parse()?,
            "directed" => self.directed = parse_bool(v)?,
            "topic" => self.topic = Some(v.to_string()),
            "expand_k" => self.expand_k = parse_num(key, v)?,
            "alpha" => self.alpha = parse_num(key, v)?,
            "tau" => self.tau = parse_num(key, v)?,
            "partition" => self.partition = v.parse()?,
            "giant_component" => self.giant_component = parse_bool(v)?,
            "measures" => self.measures = parse_measures(v)?,
            "k" => self.k = v.parse()?,
            "damping" => self.damping = parse_num(key, v)?,
            "tolerance" => self.tolerance = parse_num(key, v)?,
            "n_walks" => self.n_walks = parse_num(key, v)?,
            "n_samples" => self.n_samples = parse_num(key, v)?,
            "layout_iterations" => self.layout_iterations = parse_num(key, v)?,
            "layout_runs" => self.layout_runs = parse_num(key, v)?,
            "mblb_seed_fraction" => self.mblb_seed_fraction = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "report" => self.report = path(),
            "report_csv" => self.report_csv = path(),
            "user_scores" => self.user_scores = path(),
            "layout" => self.layout = path(),
            "force" => self.force = parse_bool(v)?,
            other => return Err(Error::Input(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; blank lines and `#` comments are skipped.
    pub fn apply_config_text(&mut self, text: &str, source: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse {
                path: source.to_string(),
                line: i + 1,
                msg,
            };
            let (k, v) = line.split_once('=').ok_or_else(|| err("expected 'key = value'".into()))?;
            self.set(k, v).map_err(|e| err(e.to_string()))?;
        }
        Ok(())
    }

    pub fn walk_config(&self) -> RestartWalkConfig {
        RestartWalkConfig {
            damping: self.damping,
            tolerance: self.tolerance,
            ..RestartWalkConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.records, &self.edge_list) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => return Err(Error::Input("exactly one of records or edge list must be given".into())),
        }
        if self.records.is_some() && self.topic.is_none() {
            return Err(Error::Input("a topic seed is required with a records file".into()));
        }
        if self.records.is_some() && self.graph_kind == GraphKind::Follow && self.follows.is_none() {
            return Err(Error::Input("follow graphs need a follows file".into()));
        }
        if self.expand_k > 0 && self.profiles.is_none() {
            return Err(Error::Input("topic expansion needs a profiles file".into()));
        }
        if self.partition == PartitionMode::Import && self.partition_file.is_none() {
            return Err(Error::Input("partition mode 'import' needs a partition file".into()));
        }
        if self.measures.is_empty() {
            return Err(Error::Input("no measure selected".into()));
        }
        if self.n_walks == 0 || self.n_samples == 0 || self.layout_runs == 0 {
            return Err(Error::Domain("n_walks, n_samples and layout_runs must be >= 1".into()));
        }
        self.walk_config().validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Build,
    Partition,
    Score,
    Write,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Build => "build",
            Stage::Partition => "partition",
            Stage::Score => "score",
            Stage::Write => "write",
        })
    }
}

#[derive(Debug)]
pub struct PipelineError {
    pub stage: Stage,
    pub error: Error,
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.stage, self.error)
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        self.error.exit_code()
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError> {
        self.map_err(|error| PipelineError { stage, error })
    }
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load_topic(cfg: &PipelineConfig) -> Result<Topic> {
    let seed = cfg.topic.as_deref().unwrap_or_default();
    match (&cfg.profiles, cfg.expand_k) {
        (Some(path), k) if k > 0 => {
            let profiles = read_profiles(open(path)?, &path.display().to_string())?;
            expand_topic(seed, &profiles, &ExpansionConfig { alpha: cfg.alpha, k })
        }
        _ => Ok(Topic::single(seed)),
    }
}

/// Builds the configured graph; returns it with the topic label.
pub fn load_graph(cfg: &PipelineConfig) -> Result<(ConversationGraph, String)> {
    if let Some(path) = &cfg.edge_list {
        let g = read_edge_list(open(path)?, cfg.directed, &path.display().to_string())?;
        let label = cfg.topic.clone().unwrap_or_else(|| {
            path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        });
        return Ok((g, label));
    }
    let path = cfg.records.as_ref().ok_or_else(|| Error::Input("no graph source".into()))?;
    let records = read_records(open(path)?, &path.display().to_string())?;
    let topic = load_topic(cfg)?;
    let g = match cfg.graph_kind {
        GraphKind::Retweet => build_retweet_graph(&records, &topic, cfg.tau)?,
        GraphKind::Follow => {
            let fp = cfg.follows.as_ref().ok_or_else(|| Error::Input("no follows file".into()))?;
            let follows = read_follow_edges(open(fp)?, &fp.display().to_string())?;
            build_follow_graph(&follows, &topic.active_users(&records))
        }
        GraphKind::Hashtag => build_content_graph(&records, &topic, ContentMode::SharedHashtag).graph,
        GraphKind::Url => build_content_graph(&records, &topic, ContentMode::SharedUrl).graph,
        GraphKind::Domain => build_content_graph(&records, &topic, ContentMode::SharedDomain).graph,
    };
    Ok((g, topic.members().join("+")))
}

/// A scored graph ready for measures.
pub struct Prepared {
    pub graph: ConversationGraph,
    pub partition: Partition,
    pub topic: String,
    pub stats: GraphStats,
}

pub fn prepare(cfg: &PipelineConfig) -> std::result::Result<Prepared, PipelineError> {
    cfg.validate().at(Stage::Config)?;
    let (full, topic) = load_graph(cfg).at(Stage::Build)?;
    if full.edge_count() == 0 {
        return Err(Error::Input("empty graph".into())).at(Stage::Build);
    }
    let imported = match cfg.partition {
        PartitionMode::Import => {
            let path = cfg.partition_file.as_ref().expect("validated");
            Some(open(path).and_then(|r| import_partition(&full, r)).at(Stage::Partition)?)
        }
        PartitionMode::Spectral => None,
    };
    let (graph, kept) = if cfg.giant_component {
        largest_component_with_map(&full)
    } else {
        let n = full.vertex_count();
        (full.clone(), (0..n).collect())
    };
    let partition = match imported {
        Some(p) => p.restrict(&kept).at(Stage::Partition)?,
        None => spectral_bisection(&graph, cfg.seed).at(Stage::Partition)?,
    };
    let stats = GraphStats {
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        directed: graph.is_directed(),
        dropped_vertices: full.vertex_count() - graph.vertex_count(),
        side_x: partition.size(Side::X),
        side_y: partition.size(Side::Y),
    };
    Ok(Prepared {
        graph,
        partition,
        topic,
        stats,
    })
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// EC averaged over `cfg.layout_runs` layouts; also returns the first layout.
pub fn ec_averaged(
    g: &ConversationGraph,
    p: &Partition,
    iterations: usize,
    runs: usize,
    seed: u64,
) -> Result<(f64, Vec<f64>, Vec<Point>)> {
    let layouts: Vec<Vec<Point>> = (0..runs)
        .into_par_iter()
        .map(|i| measures::force_layout(g, iterations, derive_seed(seed, i as u64)))
        .collect();
    let values = layouts.iter().map(|l| measures::ec(l, p)).collect::<Result<Vec<f64>>>()?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok((mean, values, layouts.into_iter().next().unwrap_or_default()))
}

/// Computes one measure entry.
pub fn score_measure(
    m: Measure,
    g: &ConversationGraph,
    p: &Partition,
    cfg: &PipelineConfig,
) -> Result<MeasureEntry> {
    let k = json!(cfg.k.to_string());
    let hds = || cfg.k.select(g, p);
    let mut details = BTreeMap::new();
    let (value, parameters, seed) = match m {
        Measure::RwcMc => {
            let counts = measures::rwc::sample_walk_counts(g, p, &hds(), cfg.n_walks, cfg.seed)?;
            for (name, s, e) in [
                ("p_x_given_xplus", Side::X, Side::X),
                ("p_y_given_xplus", Side::Y, Side::X),
                ("p_x_given_yplus", Side::X, Side::Y),
                ("p_y_given_yplus", Side::Y, Side::Y),
            ] {
                details.insert(name.to_string(), counts.conditional(s, e)?);
            }
            (counts.rwc()?, params(&[("k", k), ("n_walks", json!(cfg.n_walks))]), Some(cfg.seed))
        }
        Measure::RwcRwr => {
            let wc = cfg.walk_config();
            let s = measures::rwc_rwr(g, p, &hds(), &wc)?;
            details.insert("p_x_given_xplus".into(), s.p_x_xplus);
            details.insert("p_y_given_xplus".into(), s.p_y_xplus);
            details.insert("p_x_given_yplus".into(), s.p_x_yplus);
            details.insert("p_y_given_yplus".into(), s.p_y_yplus);
            let ps = params(&[
                ("k", k),
                ("damping", json!(wc.damping)),
                ("tolerance", json!(wc.tolerance)),
            ]);
            (s.value, ps, None)
        }
        Measure::Bcc => {
            let s = measures::bcc(g, p, cfg.n_samples, cfg.seed)?;
            details.insert("kl_divergence".into(), s.kl_divergence);
            (s.value, params(&[("n_samples", json!(cfg.n_samples))]), Some(cfg.seed))
        }
        Measure::Ec => {
            let (mean, values, _) = ec_averaged(g, p, cfg.layout_iterations, cfg.layout_runs, cfg.seed)?;
            if values.len() > 1 {
                for (i, v) in values.iter().enumerate() {
                    details.insert(format!("run_{i}"), *v);
                }
            }
            let ps = params(&[
                ("layout_iterations", json!(cfg.layout_iterations)),
                ("layout_runs", json!(cfg.layout_runs)),
            ]);
            (mean, ps, Some(cfg.seed))
        }
        Measure::Gmck => {
            let s = measures::gmck(g, p)?;
            details.insert("boundary_size".into(), s.boundary.len() as f64);
            (s.value, BTreeMap::new(), None)
        }
        Measure::Mblb => {
            let s = measures::mblb(
                g,
                p,
                cfg.mblb_seed_fraction,
                measures::mblb::DEFAULT_TOLERANCE,
                measures::mblb::DEFAULT_MAX_ITERS,
            )?;
            let ps = params(&[
                ("seed_fraction", json!(cfg.mblb_seed_fraction)),
                ("tolerance", json!(measures::mblb::DEFAULT_TOLERANCE)),
                ("max_iters", json!(measures::mblb::DEFAULT_MAX_ITERS)),
            ]);
            (s.value, ps, None)
        }
    };
    Ok(MeasureEntry {
        name: m.name().to_string(),
        value,
        parameters,
        seed,
        details,
    })
}

/// Report plus the optional per-user table and layout.
pub struct PipelineOutput {
    pub report: ControversyReport,
    pub prepared: Prepared,
    pub user_scores: Option<Vec<UserScore>>,
    pub layout: Option<Vec<Point>>,
}

/// Runs every stage without touching output files.
pub fn compute(cfg: &PipelineConfig) -> std::result::Result<PipelineOutput, PipelineError> {
    let prepared = prepare(cfg)?;
    let (g, p) = (&prepared.graph, &prepared.partition);
    let entries = cfg
        .measures
        .par_iter()
        .map(|&m| score_measure(m, g, p, cfg))
        .collect::<Result<Vec<_>>>()
        .at(Stage::Score)?;
    let users = match cfg.user_scores {
        Some(_) => Some(user_scores(g, p, &cfg.k.select(g, p), &cfg.walk_config()).at(Stage::Score)?),
        None => None,
    };
    let layout = cfg
        .layout
        .as_ref()
        .map(|_| measures::force_layout(g, cfg.layout_iterations, derive_seed(cfg.seed, 0)));
    let report = ControversyReport {
        schema_version: SCHEMA_VERSION,
        topic: prepared.topic.clone(),
        graph: prepared.stats.clone(),
        measures: entries,
        config: serde_json::to_value(cfg).map_err(Error::from).at(Stage::Score)?,
        timestamp: now_unix(),
    };
    Ok(PipelineOutput {
        report,
        prepared,
        user_scores: users,
        layout,
    })
}

/// Refuses existing paths unless `force`.
pub fn check_writable(paths: &[&Path], force: bool) -> Result<()> {
    if force {
        return Ok(());
    }
    for p in paths {
        if p.exists() {
            return Err(Error::Input(format!(
                "{} exists; pass --force to overwrite",
                p.display()
            )));
        }
    }
    Ok(())
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Input(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Computes everything, then writes the configured outputs. No output is written when
/// any stage fails.
pub fn run_pipeline(cfg: &PipelineConfig) -> std::result::Result<ControversyReport, PipelineError> {
    let targets: Vec<&Path> = [&cfg.report, &cfg.report_csv, &cfg.user_scores, &cfg.layout]
        .into_iter()
        .flatten()
        .map(PathBuf::as_path)
        .collect();
    check_writable(&targets, cfg.force).at(Stage::Config)?;
    let out = compute(cfg)?;
    let mut files: Vec<(&Path, Vec<u8>)> = Vec::new();
    if let Some(path) = &cfg.report {
        files.push((path, out.report.to_json().at(Stage::Write)?.into_bytes()));
    }
    if let Some(path) = &cfg.report_csv {
        files.push((path, out.report.to_csv().into_bytes()));
    }
    if let (Some(path), Some(scores)) = (&cfg.user_scores, &out.user_scores) {
        let mut buf = Vec::new();
        write_user_scores(scores, &mut buf).at(Stage::Write)?;
        files.push((path, buf));
    }
    if let (Some(path), Some(coords)) = (&cfg.layout, &out.layout) {
        let mut buf = Vec::new();
        write_layout(&out.prepared.graph, coords, Some(&out.prepared.partition), &mut buf).at(Stage::Write)?;
        files.push((path, buf));
    }
    for (path, bytes) in files {
        write_atomic(path, &bytes).at(Stage::Write)?;
    }
    Ok(out.report)
}

/// Runs the planted-partition sweep and writes its CSV to `out` when given.
pub fn run_sweep(
    cfg: &SweepConfig,
    out: Option<&Path>,
    force: bool,
) -> std::result::Result<Vec<SweepRow>, PipelineError> {
    if let Some(path) = out {
        check_writable(&[path], force).at(Stage::Config)?;
    }
    cfg.walk.validate().at(Stage::Config)?;
    let rows = rwc_sweep(cfg).at(Stage::Score)?;
    if let Some(path) = out {
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).at(Stage::Write)?;
        write_atomic(path, &buf).at(Stage::Write)?;
    }
    Ok(rows)
}
