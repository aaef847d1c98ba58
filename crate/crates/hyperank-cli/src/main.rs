//! `hyperank` command line: allocation, scheduling, benchmarks, table
//! selection, and instance validation.
//!
//! Exit codes: 0 success, 1 validation/configuration error, 2 infeasibility,
//! 3 I/O error. `HYPERANK_THREADS` caps worker threads (0 = automatic).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use hyperank::bench::{
    emit, run_allocation_experiment, run_scheduling_experiment, AllocatorKind, MetricConfig,
    OutputFormat, RunConfig,
};
use hyperank::metrics::{presets, MetricSet};
use hyperank::model::{load_instance, validate};
use hyperank::poset::{build_dag, entities_for_edge, ScoringContext, SemanticEntity};
use hyperank::rank::{rank, score_all, RankKey, RankResult};
use hyperank::sched::{
    load_tasks, schedule_csv, schedule_fcfs, schedule_hypergraph, schedule_round_robin,
    schedule_sjf, ScheduleResult,
};
use hyperank::tables::{load_schema_entities, rank_entities};
use hyperank::{Error, Instance, Result, Score};

#[derive(Parser)]
#[command(
    name = "hyperank",
    version,
    about = "Hypergraph ranking toolkit for top-k resource allocation and task scheduling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank candidates and select top-k resources for every task edge.
    Allocate(AllocateArgs),
    /// Assign tasks to VMs with the chosen scheduler(s).
    Schedule(ScheduleArgs),
    /// Seeded benchmark experiments.
    Bench {
        #[command(subcommand)]
        what: BenchCommand,
    },
    /// Rank table.column entities against a natural-language question.
    Tables(TablesArgs),
    /// Check an instance document against the model invariants.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
}

#[derive(Args)]
struct AllocateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Metric preset name (appendix, scheduling) or path to a metric-set
    /// JSON file.
    #[arg(long, default_value = "appendix")]
    metrics: String,
    /// Ranking key: upsilon (score/cost) or tensor (raw score).
    #[arg(long, default_value = "upsilon")]
    key: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
    /// Write the dependency DAG of all (node, edge) entities as DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Include the full ranked list in JSON output.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    tasks: PathBuf,
    #[arg(long)]
    vms: PathBuf,
    /// Remove a VM from later candidates once assigned.
    #[arg(long)]
    exclusive: bool,
    /// hypergraph, rr, fcfs, sjf, or all.
    #[arg(long, default_value = "all")]
    scheduler: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Allocation experiment over generated instances.
    Alloc(BenchAllocArgs),
    /// Scheduling experiment over generated VM fleets.
    Sched(BenchSchedArgs),
}

#[derive(Args)]
struct BenchAllocArgs {
    /// Run-config JSON file; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated node counts, e.g. 100,500,1000.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Metric preset name or path to a metric-set JSON file.
    #[arg(long)]
    metrics: Option<String>,
    /// Comma-separated allocators (hypergraph,exhaustive,cheapest,random,greedy).
    #[arg(long)]
    allocators: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json (default csv).
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct BenchSchedArgs {
    /// Run-config JSON file; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json (default csv).
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct TablesArgs {
    /// JSON array of {"table","column","context"} entities.
    #[arg(long)]
    schema: PathBuf,
    #[arg(long)]
    question: String,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    hyperank::parallel::init_threads_from_env();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(Error::Io)
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content).map_err(Error::Io),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn resolve_metrics(arg: &str, instance: &Instance) -> Result<MetricSet<Score>> {
    match arg {
        "appendix" => presets::appendix(&instance.schema),
        "scheduling" => presets::scheduling(&instance.schema),
        path => {
            let bytes = read_file(Path::new(path))?;
            let entries: MetricSet<Score> =
                serde_json::from_slice(&bytes).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(entries)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Allocate(args) => cmd_allocate(args),
        Command::Schedule(args) => cmd_schedule(args),
        Command::Bench { what } => match what {
            BenchCommand::Alloc(args) => cmd_bench_alloc(args),
            BenchCommand::Sched(args) => cmd_bench_sched(args),
        },
        Command::Tables(args) => cmd_tables(args),
        Command::Validate { instance } => cmd_validate(&instance),
    }
}

fn cmd_allocate(args: AllocateArgs) -> Result<()> {
    let instance: Instance = load_instance(&read_file(&args.instance)?)?;
    let metric = resolve_metrics(&args.metrics, &instance)?;
    let key = RankKey::from_str(&args.key)?;

    let results: Vec<RankResult<Score>> = instance
        .edges
        .iter()
        .map(|edge| {
            let mut result = rank(score_all(&instance, edge, &metric)?, edge.k, key);
            result.edge_id = edge.id.clone();
            Ok(result)
        })
        .collect::<Result<_>>()?;

    if let Some(dot_path) = &args.dot {
        let operator_id = if Path::new(&args.metrics).exists() {
            "custom"
        } else {
            &args.metrics
        };
        let ctx = ScoringContext::new(&instance, key).with_operator(operator_id, metric.clone());
        let entities: Vec<SemanticEntity> = instance
            .edges
            .iter()
            .flat_map(|e| entities_for_edge(&instance, &e.id, operator_id))
            .collect();
        let dag = build_dag(entities, &ctx)?;
        fs::write(dot_path, dag.to_dot()).map_err(Error::Io)?;
    }

    let content = match args.format.as_str() {
        "json" => {
            let values: Vec<serde_json::Value> =
                results.iter().map(|r| r.to_json(args.verbose)).collect();
            let mut s = serde_json::to_string_pretty(&values).expect("results serialize");
            s.push('\n');
            s
        }
        "csv" => allocate_csv(&results, args.verbose),
        other => return Err(Error::Config(format!("unknown output format \"{other}\""))),
    };
    write_output(&args.out, &content)
}

fn allocate_csv(results: &[RankResult<Score>], verbose: bool) -> String {
    use hyperank::bench::g9;
    use hyperank::sched::csv_field;

    let mut out = String::from("edge_id,position,node_id,tensor,upsilon,weight,selected\n");
    for r in results {
        let shown = if verbose {
            r.ranked.len()
        } else {
            r.selected.len()
        };
        for (pos, sc) in r.ranked[..shown].iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                csv_field(&r.edge_id),
                pos + 1,
                csv_field(&sc.node_id),
                g9(sc.tensor),
                g9(sc.upsilon),
                g9(sc.weight),
                pos < r.selected.len(),
            ));
        }
    }
    out
}

fn cmd_schedule(args: ScheduleArgs) -> Result<()> {
    let tasks = load_tasks::<Score>(&read_file(&args.tasks)?)?;
    let vms: Instance = load_instance(&read_file(&args.vms)?)?;
    let metric = presets::scheduling(&vms.schema)?;

    let wanted: Vec<&str> = match args.scheduler.as_str() {
        "all" => vec!["hypergraph", "rr", "fcfs", "sjf"],
        one => vec![one],
    };
    let mut results: Vec<ScheduleResult<Score>> = Vec::new();
    for name in wanted {
        let r = match name {
            "hypergraph" => schedule_hypergraph(&tasks, &vms, &metric, args.exclusive)?,
            "rr" => schedule_round_robin(&tasks, &vms)?,
            "fcfs" => schedule_fcfs(&tasks, &vms, args.exclusive)?,
            "sjf" => schedule_sjf(&tasks, &vms, args.exclusive)?,
            other => return Err(Error::Config(format!("unknown scheduler \"{other}\""))),
        };
        results.push(r);
    }

    let content = match args.format.as_str() {
        "csv" => schedule_csv(&results, &vms),
        "json" => {
            let mut s = serde_json::to_string_pretty(&results).expect("results serialize");
            s.push('\n');
            s
        }
        other => return Err(Error::Config(format!("unknown output format \"{other}\""))),
    };
    write_output(&args.out, &content)
}

fn parse_sizes(arg: &str) -> Result<Vec<usize>> {
    arg.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad size \"{s}\"")))
        })
        .collect()
}

fn load_run_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => {
            let bytes = read_file(p)?;
            serde_json::from_slice(&bytes).map_err(|e| Error::Parse(e.to_string()))
        }
        None => Ok(RunConfig::default()),
    }
}

/// Without a config file, sizes/trials/seed must come from flags.
fn require_when_bare<T>(
    value: Option<T>,
    flag: &str,
    config: &Option<PathBuf>,
) -> Result<Option<T>> {
    if value.is_none() && config.is_none() {
        return Err(Error::Config(format!(
            "--{flag} is required without --config"
        )));
    }
    Ok(value)
}

fn cmd_bench_alloc(args: BenchAllocArgs) -> Result<()> {
    let mut cfg = load_run_config(&args.config)?;
    if let Some(sizes) = require_when_bare(args.sizes, "sizes", &args.config)? {
        cfg.sizes = parse_sizes(&sizes)?;
    }
    if let Some(trials) = require_when_bare(args.trials, "trials", &args.config)? {
        cfg.trials = trials;
    }
    if let Some(seed) = require_when_bare(args.seed, "seed", &args.config)? {
        cfg.seed = seed;
    }
    if let Some(k) = require_when_bare(args.k, "k", &args.config)? {
        cfg.k = k;
        cfg.generator.k = k;
    }
    if let Some(metrics) = &args.metrics {
        cfg.metric = match metrics.as_str() {
            "appendix" | "scheduling" => MetricConfig::Preset(metrics.clone()),
            path => {
                let set: MetricSet<Score> = serde_json::from_slice(&read_file(Path::new(path))?)
                    .map_err(|e| Error::Parse(e.to_string()))?;
                MetricConfig::Inline(set.into())
            }
        };
    }
    if let Some(list) = &args.allocators {
        cfg.allocators = list
            .split(',')
            .map(|s| AllocatorKind::from_str(s.trim()))
            .collect::<Result<_>>()?;
    }
    if let Some(format) = &args.format {
        cfg.format = OutputFormat::from_str(format)?;
    }
    if args.out.is_some() {
        cfg.out = args.out;
    }
    let table = run_allocation_experiment(&cfg)?;
    write_output(&cfg.out, &emit(&table, cfg.format))
}

fn cmd_bench_sched(args: BenchSchedArgs) -> Result<()> {
    let mut cfg = load_run_config(&args.config)?;
    if let Some(sizes) = require_when_bare(args.sizes, "sizes", &args.config)? {
        cfg.sizes = parse_sizes(&sizes)?;
    }
    if let Some(trials) = require_when_bare(args.trials, "trials", &args.config)? {
        cfg.trials = trials;
    }
    if let Some(seed) = require_when_bare(args.seed, "seed", &args.config)? {
        cfg.seed = seed;
    }
    if let Some(format) = &args.format {
        cfg.format = OutputFormat::from_str(format)?;
    }
    if args.out.is_some() {
        cfg.out = args.out;
    }
    let table = run_scheduling_experiment(&cfg)?;
    write_output(&cfg.out, &emit(&table, cfg.format))
}

fn cmd_tables(args: TablesArgs) -> Result<()> {
    let entities = load_schema_entities(&read_file(&args.schema)?)?;
    let ranked = rank_entities::<Score>(&args.question, &entities, args.k)?;
    if ranked.zero_question {
        eprintln!("warning: question produced no trigrams; all scores are zero");
    }
    let mut s = serde_json::to_string_pretty(&ranked.entries).expect("entries serialize");
    s.push('\n');
    write_output(&args.out, &s)
}

fn cmd_validate(instance: &Path) -> Result<()> {
    let bytes = read_file(instance)?;
    match load_instance::<Score>(&bytes) {
        Ok(h) => {
            let report = validate(&h);
            debug_assert!(report.is_empty());
            println!(
                "valid: {} attributes, {} nodes, {} edges",
                h.schema.len(),
                h.nodes.len(),
                h.edges.len()
            );
            Ok(())
        }
        Err(e) => Err(e),
    }
}
