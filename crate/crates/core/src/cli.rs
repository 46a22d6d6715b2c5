//! Command-line workflows: generate, fit, detect, benchmark, select.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::detection::{
    anomaly_scores, default_eta, evaluate, kmeans_embed, relative_eta, threshold_anomalies, MetricsReport,
    DEFAULT_RESTARTS,
};
use crate::io::{
    fmt_f64, format_config, format_edges, format_matrix, read_config, read_edges, read_input, read_matrix,
    write_atomic, RunConfig,
};
use crate::model::{latent_matrix, EmbeddingState, Intercepts, Link};
use crate::optimizer::{fit, FitConfig};
use crate::select::{select_m_with, Criterion};
use crate::synthgen::{generate, Example};
use crate::{Error, Result};

/// Fraction of the largest fitted `|ŝ_ij|` used as the benchmark threshold
/// when no `--eta` is given.
pub const BENCHMARK_ETA_FRACTION: f64 = 0.5;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Divergence { .. } | Error::AllCandidatesFailed(_) => EXIT_DIVERGENCE,
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_PARSE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "signet", version, about = "Signed network embedding, community and anomaly detection")]
pub struct Cli {
    /// Record zero wall time so repeated runs give identical files.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a synthetic network with known communities and anomalies.
    Generate(GenerateArgs),
    /// Fit the embedding to an edge list.
    Fit(FitArgs),
    /// Cluster a fitted embedding and threshold its anomaly scores.
    Detect(DetectArgs),
    /// Replicate fits on synthetic networks and tabulate errors.
    Benchmark(BenchmarkArgs),
    /// Choose the number of communities.
    Select(SelectArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 1)]
    pub example: u8,
    #[arg(long)]
    pub n: usize,
    #[arg(long = "a-n", default_value_t = 0.0)]
    pub a_n: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = Link::Logit)]
    pub link: Link,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Edge list (`i<TAB>j<TAB>sign`).
    pub edges: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of nodes, if isolated nodes exceed the largest id.
    #[arg(long)]
    pub n: Option<usize>,
    /// Sets both embedding dimensions to m - 1.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "a-n")]
    pub a_n: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Output directory of a previous `fit`.
    pub fit_dir: PathBuf,
    #[arg(long)]
    pub m: usize,
    /// Anomaly threshold; defaults to the median of |ŝ_ij|.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Edge list; defaults to the one recorded by the fit.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long, default_value_t = 1)]
    pub example: u8,
    #[arg(long, value_delimiter = ',', default_values_t = [200usize])]
    pub n: Vec<usize>,
    #[arg(long = "a-n", value_delimiter = ',', default_values_t = [0.0f64])]
    pub a_n: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// Fixed anomaly threshold; defaults to half the largest |ŝ_ij| per fit.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    pub edges: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Single candidate; overrides the range.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "m-min", default_value_t = 2)]
    pub m_min: usize,
    #[arg(long = "m-max", default_value_t = 6)]
    pub m_max: usize,
    #[arg(long, default_value_t = Criterion::Community)]
    pub criterion: Criterion,
    #[arg(long)]
    pub out: PathBuf,
}

/// Options shared by every command.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub deterministic: bool,
    pub jobs: Option<usize>,
}

/// Record written next to every command's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub inputs: Vec<String>,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
    pub wall_time_secs: f64,
    pub version: String,
}

pub const MANIFEST: &str = "manifest.json";

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Outputs {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        }
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        write_atomic(&self.dir.join(name), contents)?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable value");
        text.push('\n');
        self.write(name, &text)
    }

    fn finish(mut self, command: &str, config: serde_json::Value, seed: u64, inputs: Vec<String>, start: Instant, opts: RunOptions) -> Result<RunManifest> {
        let manifest = RunManifest {
            command: command.to_string(),
            config,
            seed,
            inputs,
            outputs: self.written.clone(),
            wall_time_secs: if opts.deterministic { 0.0 } else { start.elapsed().as_secs_f64() },
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        self.write_json(MANIFEST, &manifest)?;
        Ok(manifest)
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => read_config(p),
        None => Ok(RunConfig::default()),
    }
}

fn config_json(cfg: &RunConfig) -> serde_json::Value {
    json!({ "fit": cfg.fit, "link": cfg.link })
}

pub fn cmd_generate(example: u8, n: usize, a_n: f64, seed: u64, link: Link, out: &Path, opts: RunOptions) -> Result<RunManifest> {
    let start = Instant::now();
    let example = Example::from_index(example)?;
    let d = Intercepts::default();
    let (y, truth) = generate(example, n, a_n, seed, d, link)?;
    let mut files = Outputs::new(out);
    files.write("edges.tsv", &format_edges(&y))?;

    let mut labels = String::from("node,label\n");
    for (i, l) in truth.labels.iter().enumerate() {
        let _ = writeln!(labels, "{i},{l}");
    }
    files.write("truth_labels.csv", &labels)?;

    let mut support = String::from("i,j\n");
    for (i, j) in &truth.support {
        let _ = writeln!(support, "{i},{j}");
    }
    files.write("truth_support.csv", &support)?;
    files.write("truth_B.csv", &format_matrix(&truth.b_star, "b"))?;
    files.write("truth_A.csv", &format_matrix(&truth.a_star, "a"))?;

    let config = json!({
        "example": example.index(),
        "n": n,
        "a_n": a_n,
        "link": link,
        "intercepts": d,
    });
    files.finish("generate", config, seed, Vec::new(), start, opts)
}

pub fn cmd_fit(edges: &Path, cfg: &RunConfig, n: Option<usize>, out: &Path, config_path: Option<&Path>, opts: RunOptions) -> Result<RunManifest> {
    let start = Instant::now();
    let y = read_edges(edges, n)?;
    info!("fitting {} nodes, {} edges", y.n(), y.edges().count());
    let result = fit(&y, &cfg.fit, cfg.link)?;
    let state = &result.state;

    let mut files = Outputs::new(out);
    files.write("B_hat.csv", &format_matrix(&state.b, "b"))?;
    files.write("A_hat.csv", &format_matrix(&state.a, "a"))?;
    files.write_json("intercepts.json", &state.d)?;
    let mut trace = String::from("iteration,objective\n");
    for (k, v) in result.objective_trace.iter().enumerate() {
        let _ = writeln!(trace, "{k},{}", fmt_f64(*v));
    }
    files.write("objective_trace.csv", &trace)?;
    let report = state.constraint_report(cfg.fit.c, cfg.fit.kappa, cfg.fit.a_n);
    let n_f = y.n() as f64;
    files.write_json(
        "constraints.json",
        &json!({
            "report": report,
            "satisfied": report.satisfied(1e-8, 1e-6 * n_f),
            "iterations": result.iterations,
            "converged": result.converged,
        }),
    )?;
    files.write("config.txt", &format_config(cfg))?;

    let mut inputs = vec![path_str(edges)];
    inputs.extend(config_path.map(path_str));
    let seed = cfg.fit.seed;
    files.finish("fit", config_json(cfg), seed, inputs, start, opts)
}

fn read_fit(dir: &Path) -> Result<(EmbeddingState, Option<PathBuf>)> {
    let b = read_matrix(&dir.join("B_hat.csv"), None)?;
    let a = read_matrix(&dir.join("A_hat.csv"), Some(b.nrows()))?;
    let ipath = dir.join("intercepts.json");
    let d: Intercepts = serde_json::from_str(&read_input(&ipath)?).map_err(|e| Error::Parse {
        path: path_str(&ipath),
        line: e.line(),
        msg: e.to_string(),
    })?;
    let edges = read_input(&dir.join(MANIFEST))
        .ok()
        .and_then(|text| serde_json::from_str::<RunManifest>(&text).ok())
        .and_then(|m| m.inputs.first().map(PathBuf::from));
    Ok((EmbeddingState::new(b, a, d)?, edges))
}

pub fn cmd_detect(fit_dir: &Path, m: usize, eta: Option<f64>, edges: Option<&Path>, seed: u64, out: &Path, opts: RunOptions) -> Result<RunManifest> {
    let start = Instant::now();
    let (state, recorded) = read_fit(fit_dir)?;
    let edges = edges.map(Path::to_path_buf).or(recorded).ok_or_else(|| Error::Parse {
        path: path_str(&fit_dir.join(MANIFEST)),
        line: 0,
        msg: "no edge list recorded; pass --edges".into(),
    })?;
    let n = state.n();
    let y = read_edges(&edges, Some(n))?;

    let communities = kmeans_embed(&state.b, m, DEFAULT_RESTARTS, seed)?;
    let dec = latent_matrix(&state)?;
    let s_hat = anomaly_scores(&state.a);
    let (eta, rule) = match eta {
        Some(e) => (e, "given"),
        None => (default_eta(&s_hat), "median"),
    };
    let report = threshold_anomalies(&s_hat, eta)?;
    let labels = &communities.labels;

    let mut files = Outputs::new(out);
    let mut text = String::from("node,label\n");
    for (i, l) in labels.iter().enumerate() {
        let _ = writeln!(text, "{i},{l}");
    }
    files.write("labels.csv", &text)?;

    let mut text = String::from("i,j,s_hat\n");
    for &(i, j) in &report.flagged {
        let _ = writeln!(text, "{i},{j},{}", fmt_f64(s_hat[(i, j)]));
    }
    files.write("anomalies.csv", &text)?;
    files.write_json("eta.json", &json!({ "eta": eta, "rule": rule }))?;

    // nodes grouped by label, stable within a label
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| labels[i]);
    let mut text = String::from("node");
    for &j in &order {
        let _ = write!(text, ",{j}");
    }
    text.push('\n');
    for &i in &order {
        let _ = write!(text, "{i}");
        for &j in &order {
            let _ = write!(text, ",{}", fmt_f64(dec.l[(i, j)]));
        }
        text.push('\n');
    }
    files.write("heatmap_L.csv", &text)?;

    let mut text = String::from("group,i,j,s_tilde\n");
    for (group, same, sign) in [("within_negative", true, -1i8), ("cross_positive", false, 1)] {
        for i in 0..n {
            for j in (i + 1)..n {
                if (labels[i] == labels[j]) == same && y.get(i, j) == sign {
                    let s = s_hat[(i, j)];
                    let kept = if s.abs() > eta { s } else { 0.0 };
                    let _ = writeln!(text, "{group},{i},{j},{}", fmt_f64(kept));
                }
            }
        }
    }
    files.write("boxplot_s.csv", &text)?;

    let config = json!({ "m": m, "eta": eta, "eta_rule": rule, "restarts": DEFAULT_RESTARTS });
    files.finish("detect", config, seed, vec![path_str(fit_dir), path_str(&edges)], start, opts)
}

/// One replication of the benchmark grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub index: usize,
    pub n: usize,
    pub a_n: f64,
    pub rep: usize,
    pub seed: u64,
    pub metrics: std::result::Result<MetricsReport, String>,
}

const CELL_HEADER: &str = "cell,n,a_n,rep,seed,status,community_error,worst_case_error,fdp,flagged,m_error,l_error,s_error";

fn cell_row(c: &CellOutcome) -> String {
    let head = format!("{},{},{},{},{}", c.index, c.n, fmt_f64(c.a_n), c.rep, c.seed);
    match &c.metrics {
        Ok(r) => format!(
            "{head},ok,{},{},{},{},{},{},{}",
            fmt_f64(r.community_error),
            fmt_f64(r.worst_case_error),
            fmt_f64(r.fdp),
            r.flagged,
            fmt_f64(r.m_error),
            fmt_f64(r.l_error),
            fmt_f64(r.s_error)
        ),
        Err(msg) => format!("{head},failed: {},,,,,,,", msg.replace([',', '\n'], ";")),
    }
}

/// Mean and standard error (0 for a single value); `None` when empty.
pub fn mean_se(vals: &[f64]) -> Option<(f64, f64)> {
    if vals.is_empty() {
        return None;
    }
    let k = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / k;
    if vals.len() == 1 {
        return Some((mean, 0.0));
    }
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Some((mean, (var / k).sqrt()))
}

fn table(cells: &[CellOutcome], ns: &[usize], cols: &[f64], pick: impl Fn(&MetricsReport) -> f64) -> String {
    let mut out = String::from("n");
    for a in cols {
        let _ = write!(out, ",a_n={a} mean,a_n={a} se");
    }
    out.push('\n');
    for &n in ns {
        let _ = write!(out, "{n}");
        for &a in cols {
            let vals: Vec<f64> = cells
                .iter()
                .filter(|c| c.n == n && c.a_n == a)
                .filter_map(|c| c.metrics.as_ref().ok().map(&pick))
                .collect();
            match mean_se(&vals) {
                Some((m, se)) => {
                    let _ = write!(out, ",{},{}", fmt_f64(m), fmt_f64(se));
                }
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

/// Runs one benchmark replication: generate, fit, detect, score.
pub fn run_cell(example: Example, n: usize, a_n: f64, seed: u64, m: usize, eta: Option<f64>, template: &RunConfig) -> Result<MetricsReport> {
    let d = template.fit.intercepts;
    let (y, truth) = generate(example, n, a_n, seed, d, template.link)?;
    let config = FitConfig {
        a_n,
        seed,
        ..template.fit.clone()
    };
    let result = fit(&y, &config, template.link)?;
    let eta = match eta {
        Some(e) => e,
        None => relative_eta(&anomaly_scores(&result.state.a), BENCHMARK_ETA_FRACTION),
    };
    evaluate(&result.state, &truth, m, eta, DEFAULT_RESTARTS, seed)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_benchmark(
    example: u8,
    ns: &[usize],
    a_list: &[f64],
    reps: usize,
    seed: u64,
    m: usize,
    eta: Option<f64>,
    template: Option<&RunConfig>,
    out: &Path,
    config_path: Option<&Path>,
    opts: RunOptions,
) -> Result<RunManifest> {
    let start = Instant::now();
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    if ns.is_empty() || a_list.is_empty() {
        return Err(Error::InvalidConfig("empty n or a_n list".into()));
    }
    let example = Example::from_index(example)?;
    let template = match template {
        Some(t) => t.clone(),
        None => RunConfig {
            fit: FitConfig::default().with_communities(m),
            link: Link::default(),
        },
    };
    let mut grid = Vec::new();
    for &n in ns {
        for &a in a_list {
            for rep in 0..reps {
                grid.push((n, a, rep));
            }
        }
    }
    let cells_dir = out.join("cells");
    let work = || -> Vec<Result<CellOutcome>> {
        grid.par_iter()
            .enumerate()
            .map(|(index, &(n, a_n, rep))| {
                let cell_seed = seed.wrapping_add(index as u64);
                let metrics = run_cell(example, n, a_n, cell_seed, m, eta, &template).map_err(|e| {
                    warn!("cell {index} (n = {n}, a_n = {a_n}, rep {rep}) failed: {e}");
                    e.to_string()
                });
                let outcome = CellOutcome {
                    index,
                    n,
                    a_n,
                    rep,
                    seed: cell_seed,
                    metrics,
                };
                let text = format!("{CELL_HEADER}\n{}\n", cell_row(&outcome));
                write_atomic(&cells_dir.join(format!("cell_{index:05}.csv")), &text)?;
                Ok(outcome)
            })
            .collect()
    };
    let results = match opts.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let cells = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut files = Outputs::new(out);
    files.written.extend((0..cells.len()).map(|i| format!("cells/cell_{i:05}.csv")));
    let mut text = format!("{CELL_HEADER}\n");
    for c in &cells {
        text.push_str(&cell_row(c));
        text.push('\n');
    }
    files.write("cells.csv", &text)?;
    files.write("table1_like.csv", &table(&cells, ns, a_list, |r| r.community_error))?;
    let anomalous: Vec<f64> = a_list.iter().copied().filter(|&a| a > 0.0).collect();
    files.write("table3_like.csv", &table(&cells, ns, &anomalous, |r| r.fdp))?;

    let eta_rule = match eta {
        Some(e) => json!(e),
        None => json!(format!("{BENCHMARK_ETA_FRACTION} * max |s_hat|")),
    };
    let config = json!({
        "example": example.index(),
        "n": ns,
        "a_n": a_list,
        "reps": reps,
        "m": m,
        "eta": eta_rule,
        "template": config_json(&template),
    });
    files.finish("benchmark", config, seed, config_path.map(path_str).into_iter().collect(), start, opts)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_select(
    edges: &Path,
    cfg: &RunConfig,
    n: Option<usize>,
    grid: &[usize],
    criterion: Criterion,
    out: &Path,
    config_path: Option<&Path>,
    opts: RunOptions,
) -> Result<RunManifest> {
    let start = Instant::now();
    let y = read_edges(edges, n)?;
    let result = select_m_with(&y, grid, &cfg.fit, cfg.link, criterion)?;
    let mut files = Outputs::new(out);
    let mut text = String::from("m,score,neg_log_likelihood,df,status\n");
    for (k, &m) in result.m_grid.iter().enumerate() {
        let df = criterion.degrees_of_freedom(y.n(), m);
        match (&result.scores[k], &result.fits[k]) {
            (Some(s), Some(f)) => {
                let _ = writeln!(text, "{m},{},{},{df},ok", fmt_f64(*s), fmt_f64(f.final_objective()));
            }
            _ => {
                let _ = writeln!(text, "{m},,,{df},failed");
            }
        }
    }
    files.write("selection.csv", &text)?;
    files.write_json("chosen_m.json", &json!({ "chosen_m": result.chosen_m }))?;
    let mut inputs = vec![path_str(edges)];
    inputs.extend(config_path.map(path_str));
    let config = json!({ "grid": grid, "criterion": criterion, "template": config_json(cfg) });
    files.finish("select", config, cfg.fit.seed, inputs, start, opts)
}

/// Dispatches a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let opts = RunOptions {
        deterministic: cli.deterministic,
        jobs: cli.jobs,
    };
    match cli.command {
        Command::Generate(a) => cmd_generate(a.example, a.n, a.a_n, a.seed, a.link, &a.out, opts).map(drop),
        Command::Fit(a) => {
            let mut cfg = load_config(a.config.as_deref())?;
            if let Some(m) = a.m {
                cfg.fit = cfg.fit.with_communities(m);
            }
            if let Some(x) = a.a_n {
                cfg.fit.a_n = x;
            }
            if let Some(s) = a.seed {
                cfg.fit.seed = s;
            }
            cfg.fit.validate()?;
            cmd_fit(&a.edges, &cfg, a.n, &a.out, a.config.as_deref(), opts).map(drop)
        }
        Command::Detect(a) => cmd_detect(&a.fit_dir, a.m, a.eta, a.edges.as_deref(), a.seed, &a.out, opts).map(drop),
        Command::Benchmark(a) => {
            let template = a.config.as_deref().map(read_config).transpose()?;
            cmd_benchmark(
                a.example,
                &a.n,
                &a.a_n,
                a.reps,
                a.seed,
                a.m,
                a.eta,
                template.as_ref(),
                &a.out,
                a.config.as_deref(),
                opts,
            )
            .map(drop)
        }
        Command::Select(a) => {
            let cfg = load_config(a.config.as_deref())?;
            let grid: Vec<usize> = match a.m {
                Some(m) => vec![m],
                None if a.m_min <= a.m_max => (a.m_min..=a.m_max).collect(),
                None => return Err(Error::InvalidConfig(format!("m-min {} exceeds m-max {}", a.m_min, a.m_max))),
            };
            cmd_select(&a.edges, &cfg, a.n, &grid, a.criterion, &a.out, a.config.as_deref(), opts).map(drop)
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Truth support as read back from `truth_support.csv`.
pub fn read_support(path: &Path) -> Result<BTreeSet<(usize, usize)>> {
    let text = read_input(path)?;
    let mut out = BTreeSet::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let pair = line
            .split_once(',')
            .and_then(|(i, j)| Some((i.trim().parse().ok()?, j.trim().parse().ok()?)));
        match pair {
            Some(p) => {
                out.insert(p);
            }
            None => {
                return Err(Error::Parse {
                    path: path_str(path),
                    line: idx + 1,
                    msg: format!("expected `i,j`, got `{line}`"),
                })
            }
        }
    }
    Ok(out)
}
