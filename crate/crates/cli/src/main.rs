//! `controversy` command-line tool.
//!
//! Every subcommand accepts `--config FILE` with `key = value` lines; flags given on the
//! command line override the file. Outputs are never overwritten without `--force`.
//! Exit codes: 0 success, 2 bad input or usage, 3 non-convergence, 4 degenerate graph.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use controversy::pipeline::{self, check_writable, open, write_atomic, PipelineConfig, PipelineError, Stage};
use controversy::records::read_records;
use controversy::sentiment::{classify_by_variance, read_sentiment_csv, sentiment_variance};
use controversy::synthetic::{write_sweep_csv, SweepConfig};
use controversy::topic::{build_profiles, expand_topic, read_profiles, write_profiles, ExpansionConfig};
use controversy::user::{user_scores, write_user_scores};
use controversy::Error;

#[derive(Parser)]
#[command(name = "controversy", version, about = "Controversy scores for conversation graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a conversation graph and write it as an edge list.
    BuildGraph {
        #[command(flatten)]
        graph: GraphOpts,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Expand a seed hashtag into a topic using hashtag profiles.
    ExpandTopic {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Hashtag profiles (JSON lines).
        #[arg(long)]
        profiles: Option<PathBuf>,
        /// Seed hashtag.
        #[arg(long)]
        tag: Option<String>,
        /// Number of related tags.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Derive hashtag profiles from interaction records.
    BuildProfiles {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        records: Option<PathBuf>,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Split a graph in two and write `id<TAB>side` lines.
    Partition {
        #[command(flatten)]
        graph: GraphOpts,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Score a graph with the selected measures.
    Score {
        #[command(flatten)]
        graph: GraphOpts,
        #[command(flatten)]
        walk: WalkOpts,
        #[command(flatten)]
        score: ScoreOpts,
        #[arg(long)]
        force: bool,
    },
    /// Per-user walk and hitting-time scores as CSV.
    UserScores {
        #[command(flatten)]
        graph: GraphOpts,
        #[command(flatten)]
        walk: WalkOpts,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Planted two-community sweep; writes mean RWC per parameter cell as CSV.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Vertices per graph.
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated intra-community probabilities.
        #[arg(long)]
        p1: Option<String>,
        /// Comma-separated inter-community probabilities.
        #[arg(long)]
        p2: Option<String>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        giant_component: Option<bool>,
        /// Re-detect sides by spectral bisection.
        #[arg(long)]
        redetect: Option<bool>,
        #[command(flatten)]
        walk: WalkOpts,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Variance of per-post sentiment scores and its controversy class.
    Sentiment {
        #[arg(long)]
        config: Option<PathBuf>,
        /// CSV `post_id,score`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        out: OutOpts,
    },
}

#[derive(Args)]
struct GraphOpts {
    /// `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Interaction records (JSON lines).
    #[arg(long)]
    records: Option<PathBuf>,
    /// Edge list `src<TAB>dst[<TAB>weight]`, instead of records.
    #[arg(long)]
    edge_list: Option<PathBuf>,
    /// Follow edges for `--graph-kind follow`.
    #[arg(long)]
    follows: Option<PathBuf>,
    /// retweet, follow, hashtag, url or domain.
    #[arg(long)]
    graph_kind: Option<String>,
    /// Read edge-list lines as arcs.
    #[arg(long)]
    directed: Option<bool>,
    /// Topic seed hashtag.
    #[arg(long)]
    topic: Option<String>,
    /// Hashtag profiles for topic expansion.
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Related tags to add to the topic.
    #[arg(long)]
    expand_k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Minimum retweets per pair and hashtag.
    #[arg(long)]
    tau: Option<u64>,
    /// spectral or import.
    #[arg(long)]
    partition: Option<String>,
    /// `id<TAB>side` file for `--partition import`.
    #[arg(long)]
    partition_file: Option<PathBuf>,
    /// Restrict to the largest connected component.
    #[arg(long)]
    giant_component: Option<bool>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct WalkOpts {
    /// High-degree vertices per side: a count (`3`) or a fraction (`0.05`, `5%`).
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    damping: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct ScoreOpts {
    /// `all` or a comma list of rwc_mc, rwc_rwr, bcc, ec, gmck, mblb.
    #[arg(long)]
    measures: Option<String>,
    #[arg(long)]
    n_walks: Option<usize>,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long)]
    layout_iterations: Option<usize>,
    #[arg(long)]
    layout_runs: Option<usize>,
    #[arg(long)]
    mblb_seed_fraction: Option<f64>,
    /// JSON report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// One-row CSV summary path.
    #[arg(long)]
    report_csv: Option<PathBuf>,
    /// Per-user scores CSV path.
    #[arg(long)]
    user_scores: Option<PathBuf>,
    /// Layout TSV path.
    #[arg(long)]
    layout: Option<PathBuf>,
}

#[derive(Args)]
struct OutOpts {
    /// Output path; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Overwrite existing outputs.
    #[arg(long)]
    force: bool,
}

type CliResult<T> = Result<T, PipelineError>;

trait At<T> {
    fn at(self, stage: Stage) -> CliResult<T>;
}

impl<T> At<T> for controversy::Result<T> {
    fn at(self, stage: Stage) -> CliResult<T> {
        self.map_err(|error| PipelineError { stage, error })
    }
}

/// Flag overrides as `(key, value)` pairs for [`PipelineConfig::set`].
#[derive(Default)]
struct Overrides(Vec<(&'static str, String)>);

impl Overrides {
    fn put<T: ToString>(&mut self, key: &'static str, v: &Option<T>) {
        if let Some(v) = v {
            self.0.push((key, v.to_string()));
        }
    }

    fn path(&mut self, key: &'static str, v: &Option<PathBuf>) {
        self.put(key, &v.as_ref().map(|p| p.display().to_string()));
    }
}

impl GraphOpts {
    fn overrides(&self, o: &mut Overrides) {
        o.path("records", &self.records);
        o.path("edge_list", &self.edge_list);
        o.path("follows", &self.follows);
        o.put("graph_kind", &self.graph_kind);
        o.put("directed", &self.directed);
        o.put("topic", &self.topic);
        o.path("profiles", &self.profiles);
        o.put("expand_k", &self.expand_k);
        o.put("alpha", &self.alpha);
        o.put("tau", &self.tau);
        o.put("partition", &self.partition);
        o.path("partition_file", &self.partition_file);
        o.put("giant_component", &self.giant_component);
        o.put("seed", &self.seed);
    }
}

impl WalkOpts {
    fn overrides(&self, o: &mut Overrides) {
        o.put("k", &self.k);
        o.put("damping", &self.damping);
        o.put("tolerance", &self.tolerance);
    }
}

impl ScoreOpts {
    fn overrides(&self, o: &mut Overrides) {
        o.put("measures", &self.measures);
        o.put("n_walks", &self.n_walks);
        o.put("n_samples", &self.n_samples);
        o.put("layout_iterations", &self.layout_iterations);
        o.put("layout_runs", &self.layout_runs);
        o.put("mblb_seed_fraction", &self.mblb_seed_fraction);
        o.path("report", &self.report);
        o.path("report_csv", &self.report_csv);
        o.path("user_scores", &self.user_scores);
        o.path("layout", &self.layout);
    }
}

fn read_config_file(path: &Path) -> controversy::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn pipeline_config(config: &Option<PathBuf>, o: Overrides) -> CliResult<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    if let Some(path) = config {
        let text = read_config_file(path).at(Stage::Config)?;
        cfg.apply_config_text(&text, &path.display().to_string()).at(Stage::Config)?;
    }
    for (k, v) in o.0 {
        cfg.set(k, &v).map_err(|e| Error::Input(format!("--{}: {e}", k.replace('_', "-")))).at(Stage::Config)?;
    }
    Ok(cfg)
}

/// `key = value` file for the subcommands that do not run the scoring pipeline. Only
/// `allowed` keys are accepted; `-` and `_` are interchangeable.
fn simple_config(path: &Option<PathBuf>, allowed: &[&str]) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    let Some(path) = path else { return Ok(map) };
    let source = path.display().to_string();
    let text = read_config_file(path).at(Stage::Config)?;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| PipelineError {
            stage: Stage::Config,
            error: Error::Parse { path: source.clone(), line: i + 1, msg },
        };
        let (k, v) = line.split_once('=').ok_or_else(|| err("expected 'key = value'".into()))?;
        let k = k.trim().replace('-', "_");
        if !allowed.contains(&k.as_str()) {
            return Err(err(format!("unknown config key '{k}'")));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

/// Flag value, else config value parsed, else `None`.
fn pick<T: std::str::FromStr>(flag: Option<T>, map: &BTreeMap<String, String>, key: &str) -> CliResult<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    map.get(key)
        .map(|v| v.parse::<T>().map_err(|e| Error::Input(format!("{key}: {e}"))))
        .transpose()
        .at(Stage::Config)
}

fn require<T>(v: Option<T>, what: &str) -> CliResult<T> {
    v.ok_or_else(|| Error::Input(format!("missing {what}"))).at(Stage::Config)
}

fn parse_list(v: &str) -> controversy::Result<Vec<f64>> {
    v.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Input(format!("bad probability '{s}': {e}"))))
        .collect()
}

/// Writes `bytes` to `out.output` (refusing to clobber without `--force`) or stdout.
fn emit(out: &OutOpts, bytes: &[u8]) -> CliResult<()> {
    match &out.output {
        Some(path) => write_atomic(path, bytes).at(Stage::Write),
        None => std::io::stdout().write_all(bytes).map_err(Error::from).at(Stage::Write),
    }
}

fn guard(out: &OutOpts) -> CliResult<()> {
    match &out.output {
        Some(path) => check_writable(&[path], out.force).at(Stage::Config),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::BuildGraph { graph, out } => {
            let mut o = Overrides::default();
            graph.overrides(&mut o);
            let cfg = pipeline_config(&graph.config, o)?;
            guard(&out)?;
            if cfg.records.is_some() == cfg.edge_list.is_some() {
                return Err(Error::Input("exactly one of --records or --edge-list must be given".into())).at(Stage::Config);
            }
            let (g, _) = pipeline::load_graph(&cfg).at(Stage::Build)?;
            if g.edge_count() == 0 {
                return Err(Error::Input("empty graph".into())).at(Stage::Build);
            }
            let mut buf = Vec::new();
            controversy::io::write_edge_list(&g, &mut buf).at(Stage::Write)?;
            emit(&out, &buf)?;
            eprintln!("{} vertices, {} edges", g.vertex_count(), g.edge_count());
        }
        Command::ExpandTopic { config, profiles, tag, k, alpha, out } => {
            let map = simple_config(&config, &["profiles", "tag", "k", "alpha"])?;
            let profiles = require(pick(profiles, &map, "profiles")?, "--profiles")?;
            let tag = require(pick(tag, &map, "tag")?, "--tag")?;
            let defaults = ExpansionConfig::default();
            let cfg = ExpansionConfig {
                k: pick(k, &map, "k")?.unwrap_or(defaults.k),
                alpha: pick(alpha, &map, "alpha")?.unwrap_or(defaults.alpha),
            };
            guard(&out)?;
            let list = read_profiles(open(&profiles).at(Stage::Build)?, &profiles.display().to_string()).at(Stage::Build)?;
            let topic = expand_topic(&tag, &list, &cfg).at(Stage::Build)?;
            let mut text = String::new();
            for t in topic.members() {
                text.push_str(t);
                text.push('\n');
            }
            emit(&out, text.as_bytes())?;
        }
        Command::BuildProfiles { config, records, out } => {
            let map = simple_config(&config, &["records"])?;
            let records = require(pick(records, &map, "records")?, "--records")?;
            guard(&out)?;
            let recs = read_records(open(&records).at(Stage::Build)?, &records.display().to_string()).at(Stage::Build)?;
            let mut buf = Vec::new();
            write_profiles(&build_profiles(&recs), &mut buf).at(Stage::Write)?;
            emit(&out, &buf)?;
        }
        Command::Partition { graph, out } => {
            let mut o = Overrides::default();
            graph.overrides(&mut o);
            let cfg = pipeline_config(&graph.config, o)?;
            guard(&out)?;
            let prepared = pipeline::prepare(&cfg)?;
            let mut buf = Vec::new();
            controversy::partition::write_partition(&prepared.graph, &prepared.partition, &mut buf).at(Stage::Write)?;
            emit(&out, &buf)?;
            let cut = controversy::partition::cut_edges(&prepared.graph, &prepared.partition).len();
            eprintln!(
                "sides {} / {}, {cut} cut edges",
                prepared.stats.side_x, prepared.stats.side_y
            );
        }
        Command::Score { graph, walk, score, force } => {
            let mut o = Overrides::default();
            graph.overrides(&mut o);
            walk.overrides(&mut o);
            score.overrides(&mut o);
            if force {
                o.0.push(("force", "true".into()));
            }
            let cfg = pipeline_config(&graph.config, o)?;
            let report = pipeline::run_pipeline(&cfg)?;
            println!("topic\t{}", report.topic);
            println!("vertices\t{}\nedges\t{}", report.graph.vertices, report.graph.edges);
            for m in &report.measures {
                println!("{}\t{}", m.name, m.value);
            }
        }
        Command::UserScores { graph, walk, out } => {
            let mut o = Overrides::default();
            graph.overrides(&mut o);
            walk.overrides(&mut o);
            let cfg = pipeline_config(&graph.config, o)?;
            guard(&out)?;
            let prepared = pipeline::prepare(&cfg)?;
            let (g, p) = (&prepared.graph, &prepared.partition);
            let scores = user_scores(g, p, &cfg.k.select(g, p), &cfg.walk_config()).at(Stage::Score)?;
            let mut buf = Vec::new();
            write_user_scores(&scores, &mut buf).at(Stage::Write)?;
            emit(&out, &buf)?;
        }
        Command::Simulate { config, n, p1, p2, runs, seed, giant_component, redetect, walk, out } => {
            let map = simple_config(
                &config,
                &["n", "p1", "p2", "runs", "seed", "giant_component", "redetect", "k", "damping", "tolerance"],
            )?;
            let mut cfg = SweepConfig::default();
            if let Some(v) = pick(n, &map, "n")? {
                cfg.n = v;
            }
            if let Some(v) = pick(p1, &map, "p1")? {
                cfg.p1_values = parse_list(&v).at(Stage::Config)?;
            }
            if let Some(v) = pick(p2, &map, "p2")? {
                cfg.p2_values = parse_list(&v).at(Stage::Config)?;
            }
            if let Some(v) = pick(runs, &map, "runs")? {
                cfg.runs = v;
            }
            if let Some(v) = pick(seed, &map, "seed")? {
                cfg.base_seed = v;
            }
            if let Some(v) = pick(giant_component, &map, "giant_component")? {
                cfg.giant_component = v;
            }
            if let Some(v) = pick(redetect, &map, "redetect")? {
                cfg.redetect = v;
            }
            if let Some(v) = pick(walk.k, &map, "k")? {
                cfg.high_degree = v.parse().at(Stage::Config)?;
            }
            if let Some(v) = pick(walk.damping, &map, "damping")? {
                cfg.walk.damping = v;
            }
            if let Some(v) = pick(walk.tolerance, &map, "tolerance")? {
                cfg.walk.tolerance = v;
            }
            if cfg.runs == 0 || cfg.p1_values.is_empty() || cfg.p2_values.is_empty() {
                return Err(Error::Input("need at least one run and one value of p1 and p2".into())).at(Stage::Config);
            }
            guard(&out)?;
            let rows = pipeline::run_sweep(&cfg, None, true)?;
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &mut buf).at(Stage::Write)?;
            emit(&out, &buf)?;
        }
        Command::Sentiment { config, input, out } => {
            let map = simple_config(&config, &["input"])?;
            let input = require(pick(input, &map, "input")?, "--input")?;
            guard(&out)?;
            let recs = read_sentiment_csv(open(&input).at(Stage::Build)?, &input.display().to_string()).at(Stage::Build)?;
            let v = sentiment_variance(&recs).at(Stage::Score)?;
            let class = classify_by_variance(v).at(Stage::Score)?;
            let text = format!("posts\t{}\nvariance\t{v}\nclass\t{class}\n", recs.len());
            emit(&out, text.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("controversy: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
