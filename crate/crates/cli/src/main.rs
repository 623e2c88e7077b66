//! `netprox` command-line tool.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use netprox::clustering::{spectral_cluster_with, ward_cluster, RowScaling, SpectralOptions};
use netprox::graph::parse_edge_list;
use netprox::harness::{
    self, emit_plot, metadata_json, parse_config, parse_csv, sweep_with_progress, PlotOptions,
};
use netprox::kernels::{kernel_to_distance, KernelFactory};
use netprox::lfr::{generate_lfr, validate_lfr, LfrParams};
use netprox::metrics::{adjusted_rand_index, rand_index};
use netprox::{Measure, Partition};

#[derive(Parser)]
#[command(
    name = "netprox",
    version,
    about = "Graph proximity kernels, clustering and LFR sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an LFR graph with its ground-truth communities.
    Generate(GenerateArgs),
    /// Cluster a graph with one proximity kernel.
    Cluster(ClusterArgs),
    /// Compare a predicted partition with the ground truth.
    Evaluate(EvaluateArgs),
    /// Run a parameter sweep described by a config file.
    Sweep(SweepArgs),
    /// Draw a sweep CSV as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 300)]
    n: usize,
    /// Average degree.
    #[arg(long, default_value_t = 5.0)]
    m: f64,
    #[arg(long, default_value_t = 2.5)]
    tau1: f64,
    #[arg(long, default_value_t = 1.5)]
    tau2: f64,
    #[arg(long, default_value_t = 80)]
    cmin: usize,
    #[arg(long, default_value_t = 140)]
    cmax: usize,
    #[arg(long, default_value_t = 0.2)]
    mu: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, default_value_t = 10)]
    max_retries: u32,
    /// Output prefix: writes PREFIX.edges, PREFIX.truth and PREFIX.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ward,
    Spectral,
}

#[derive(Args)]
struct ClusterArgs {
    /// Edge list, one `u v` pair per line.
    #[arg(long)]
    graph: PathBuf,
    /// Walk, Comm, Forest, Heat or PageRank.
    #[arg(long)]
    measure: Measure,
    #[arg(long)]
    alpha: f64,
    /// Read --alpha as a multiple of 1/q (Walk only).
    #[arg(long)]
    relative_alpha: bool,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Number of clusters.
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = netprox::clustering::DEFAULT_RESTARTS)]
    restarts: usize,
    /// Use raw eigenvector rows in the spectral embedding.
    #[arg(long)]
    raw_rows: bool,
    /// Node count, when the highest-numbered nodes have no edges.
    #[arg(long)]
    nodes: Option<usize>,
    /// Partition file to write; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV output path. Run metadata goes to the same path with a
    /// `.meta.json` suffix.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Overrides master_seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    title: Option<String>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn generate(args: GenerateArgs) -> Result<()> {
    let params = LfrParams {
        n: args.n,
        m: args.m,
        tau1: args.tau1,
        tau2: args.tau2,
        cmin: args.cmin,
        cmax: args.cmax,
        mu: args.mu,
        seed: args.seed,
        max_retries: args.max_retries,
        kmax: args.kmax,
    };
    let out = generate_lfr(&params)?;
    let report = validate_lfr(&out, &params);
    write(
        &with_suffix(&args.out, ".edges"),
        &out.graph.to_edge_list_string(),
    )?;
    write(
        &with_suffix(&args.out, ".truth"),
        &out.ground_truth.to_file_string(),
    )?;
    let meta = serde_json::json!({
        "params": params,
        "realized": out.realized,
        "validation": report,
    });
    write(
        &with_suffix(&args.out, ".json"),
        &serde_json::to_string_pretty(&meta)?,
    )?;
    for w in &out.realized.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "{} nodes, {} edges, {} communities, mu {:.3}, average degree {:.3}",
        out.graph.node_count(),
        out.graph.edge_count(),
        out.ground_truth.cluster_count(),
        out.realized.mu,
        out.realized.average_degree
    );
    if !report.passed() {
        eprintln!("warning: generated graph misses a validity tolerance: {report:?}");
    }
    Ok(())
}

fn cluster(args: ClusterArgs) -> Result<()> {
    let file = parse_edge_list(&read(&args.graph)?, args.nodes)?;
    let graph = &file.graph;
    let factory = KernelFactory::new(graph);
    let alpha = if args.relative_alpha {
        if args.measure != Measure::Walk {
            bail!("--relative-alpha only applies to the Walk measure");
        }
        args.alpha / factory.spectral_radius()?
    } else {
        args.alpha
    };
    let kernel = factory.kernel(args.measure, alpha)?;
    let partition = match args.method {
        MethodArg::Ward => ward_cluster(&kernel_to_distance(&kernel)?, args.k)?.partition,
        MethodArg::Spectral => {
            let options = SpectralOptions {
                restarts: args.restarts,
                rows: if args.raw_rows {
                    RowScaling::Raw
                } else {
                    RowScaling::UnitRows
                },
            };
            let result = spectral_cluster_with(&kernel, args.k, args.seed, options)?;
            if result.degenerate_cut {
                eprintln!(
                    "warning: eigenvalues {} and {} tie; the partition is not unique",
                    args.k,
                    args.k + 1
                );
            }
            result.partition
        }
    };
    // labelled input keeps the original label as a third column
    let text = match &file.labels {
        None => partition.to_file_string(),
        Some(labels) => partition
            .labels()
            .iter()
            .enumerate()
            .map(|(i, c)| match labels.get(i) {
                Some(name) => format!("{i} {c} {name}\n"),
                None => format!("{i} {c}\n"),
            })
            .collect(),
    };
    match &args.out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let pred = Partition::parse(&read(&args.pred)?)
        .with_context(|| format!("parsing {}", args.pred.display()))?;
    let truth = Partition::parse(&read(&args.truth)?)
        .with_context(|| format!("parsing {}", args.truth.display()))?;
    println!("ARI {:.6}", adjusted_rand_index(&pred, &truth)?);
    println!("RI {:.6}", rand_index(&pred, &truth)?);
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<()> {
    let mut config = parse_config(&read(&args.config)?)
        .with_context(|| format!("in {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    let total = config.values.len();
    let quiet = args.quiet;
    let vary = config.vary;
    let output = sweep_with_progress(&config, |i, v| {
        if !quiet {
            eprintln!("[{}/{total}] {vary} = {v}", i + 1);
        }
    })?;
    for f in &output.failures {
        eprintln!(
            "cell {}/{} at {vary}={} failed: {}",
            f.measure, f.method, f.value, f.reason
        );
    }
    harness::write_csv(&output.rows, &args.out)?;
    write(
        &with_suffix(&args.out, ".meta.json"),
        &metadata_json(&config, &output),
    )?;
    if let Some(svg) = &args.svg {
        let options = PlotOptions {
            basic: Some(config.base.clone()),
            ..PlotOptions::default()
        };
        write(svg, &emit_plot(&output.rows, &options)?)?;
    }
    if !quiet {
        eprintln!(
            "{} rows written to {}",
            output.rows.len(),
            args.out.display()
        );
    }
    Ok(())
}

fn plot(args: PlotArgs) -> Result<()> {
    let rows =
        parse_csv(&read(&args.csv)?).with_context(|| format!("in {}", args.csv.display()))?;
    let options = PlotOptions {
        title: args.title,
        ..PlotOptions::default()
    };
    write(&args.out, &emit_plot(&rows, &options)?)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::Cluster(a) => cluster(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Plot(a) => plot(a),
    }
}
