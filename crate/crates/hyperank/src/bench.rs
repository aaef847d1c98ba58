//! Seeded instance generation, experiment harnesses, and deterministic
//! CSV/JSON emission.
//!
//! Reproducibility contract: everything is derived from the configured
//! master seed. Per-instance seeds come from a documented splitmix64 mix of
//! (master, size, trial), and inside an instance every node draws its
//! attributes from its own ChaCha8 stream (stream id = node index), so the
//! generated data is independent of generation order and thread count. Only
//! wall-time columns vary between runs.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    greedy_by_weight, is_feasible, optimal_cheapest_feasible, optimal_exhaustive, random_allocation,
};
use crate::error::{Error, Result};
use crate::metrics::{presets, MetricEntry, MetricSet};
use crate::model::{
    Attribute, AttributeKind, AttributeSchema, Hypergraph, MetadataVector, ResourceNode, TaskEdge,
};
use crate::rank::{rank, score_all, RankKey};
use crate::sched::{
    reference_workload, schedule_fcfs, schedule_hypergraph, schedule_round_robin, schedule_sjf,
    SchedTask,
};
use crate::Score;

/// Per-attribute sampling distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "lowercase")]
pub enum Dist {
    Uniform { min: f64, max: f64 },
    Choice { values: Vec<f64> },
}

/// One generated attribute: schema entry plus its distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeGen {
    pub name: String,
    pub unit: String,
    pub kind: AttributeKind,
    #[serde(flatten)]
    pub dist: Dist,
}

/// Instance-generation recipe: attribute distributions plus the query edge
/// (requirement vector and demanded count).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub attributes: Vec<AttributeGen>,
    /// Requirement of the generated query edge, schema-aligned
    /// (cost slot included).
    pub requirement: Vec<f64>,
    pub k: usize,
}

impl GeneratorSpec {
    /// Allocation defaults: cpu `U[4,64]` cores, ram `U[8,128]` GiB, storage
    /// `U[0.5,8]` TB, bandwidth `U[100,1000]` Mbps, latency `U[2,30]` ms, cost
    /// `U[50,400]` units; the query edge demands {16, 32, 2.0, 500, 10}, k=5.
    pub fn default_allocation() -> Self {
        let u = |min: f64, max: f64| Dist::Uniform { min, max };
        GeneratorSpec {
            attributes: vec![
                AttributeGen {
                    name: "cpu".into(),
                    unit: "cores".into(),
                    kind: AttributeKind::Capacity,
                    dist: u(4.0, 64.0),
                },
                AttributeGen {
                    name: "ram".into(),
                    unit: "GiB".into(),
                    kind: AttributeKind::Capacity,
                    dist: u(8.0, 128.0),
                },
                AttributeGen {
                    name: "storage".into(),
                    unit: "TB".into(),
                    kind: AttributeKind::Capacity,
                    dist: u(0.5, 8.0),
                },
                AttributeGen {
                    name: "bandwidth".into(),
                    unit: "Mbps".into(),
                    kind: AttributeKind::Capacity,
                    dist: u(100.0, 1000.0),
                },
                AttributeGen {
                    name: "latency".into(),
                    unit: "ms".into(),
                    kind: AttributeKind::LatencyLike,
                    dist: u(2.0, 30.0),
                },
                AttributeGen {
                    name: "cost".into(),
                    unit: "units".into(),
                    kind: AttributeKind::Cost,
                    dist: u(50.0, 400.0),
                },
            ],
            requirement: vec![16.0, 32.0, 2.0, 500.0, 10.0, 0.0],
            k: 5,
        }
    }

    /// Scheduling-fleet defaults: cpu `U[4,64]` cores, ram `U[8,128]` GiB,
    /// exec_time `U[1,20]` s, cost `U[50,400]` units.
    pub fn default_scheduling() -> Self {
        let u = |min: f64, max: f64| Dist::Uniform { min, max };
        GeneratorSpec {
            attributes: vec![
                AttributeGen {
                    name: "cpu".into(),
                    unit: "cores".into(),
                    kind: AttributeKind::Capacity,
                    dist: u(4.0, 64.0),
                },
                AttributeGen {
                    name: "ram".into(),
                    unit: "GiB".into(),
                    kind: AttributeKind::Capacity,
                    dist: u(8.0, 128.0),
                },
                AttributeGen {
                    name: "exec_time".into(),
                    unit: "s".into(),
                    kind: AttributeKind::LatencyLike,
                    dist: u(1.0, 20.0),
                },
                AttributeGen {
                    name: "cost".into(),
                    unit: "units".into(),
                    kind: AttributeKind::Cost,
                    dist: u(50.0, 400.0),
                },
            ],
            requirement: vec![8.0, 16.0, 5.0, 0.0],
            k: 1,
        }
    }

    pub fn schema(&self) -> AttributeSchema {
        AttributeSchema::new(
            self.attributes
                .iter()
                .map(|a| Attribute::new(&a.name, &a.unit, a.kind))
                .collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.attributes {
            match &a.dist {
                Dist::Uniform { min, max } => {
                    if !min.is_finite() || !max.is_finite() || min >= max {
                        return Err(Error::Config(format!(
                            "attribute {}: uniform needs min < max, got [{min}, {max}]",
                            a.name
                        )));
                    }
                    if a.kind == AttributeKind::LatencyLike && *min <= 0.0 {
                        return Err(Error::Config(format!(
                            "attribute {}: latency-like minimum must be positive",
                            a.name
                        )));
                    }
                    if a.kind != AttributeKind::LatencyLike && *min < 0.0 {
                        return Err(Error::Config(format!(
                            "attribute {}: values must be non-negative",
                            a.name
                        )));
                    }
                }
                Dist::Choice { values } => {
                    if values.is_empty() {
                        return Err(Error::Config(format!(
                            "attribute {}: choice set must be non-empty",
                            a.name
                        )));
                    }
                    if values.iter().any(|v| {
                        !v.is_finite()
                            || (a.kind == AttributeKind::LatencyLike && *v <= 0.0)
                            || (a.kind != AttributeKind::LatencyLike && *v < 0.0)
                    }) {
                        return Err(Error::Config(format!(
                            "attribute {}: invalid choice value",
                            a.name
                        )));
                    }
                }
            }
        }
        if self
            .attributes
            .iter()
            .filter(|a| a.kind == AttributeKind::Cost)
            .count()
            != 1
        {
            return Err(Error::Config(
                "generator needs exactly one cost attribute".into(),
            ));
        }
        if self.requirement.len() != self.attributes.len() {
            return Err(Error::Config(format!(
                "requirement length {} does not match attribute count {}",
                self.requirement.len(),
                self.attributes.len()
            )));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// splitmix64 step, the documented seed-mixing primitive.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// Per-trial seed: splitmix64 folds of (master, size, trial).
pub fn derive_seed(master: u64, size: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ size) ^ trial)
}

/// Generate an n-node instance with one query edge. Node `i` draws its
/// attributes (in schema order) from ChaCha8 stream `i` of the seed, so the
/// result depends only on `(spec, n, seed)`.
pub fn generate(spec: &GeneratorSpec, n: usize, seed: u64) -> Result<Hypergraph<Score>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Config("node count must be ≥ 1".into()));
    }
    let schema = spec.schema();
    let cost_index = schema.cost_index().expect("validated: one cost attribute");
    let width = n.to_string().len();
    let nodes: Vec<ResourceNode<Score>> = (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let values: Vec<f64> = spec
                .attributes
                .iter()
                .map(|a| match &a.dist {
                    Dist::Uniform { min, max } => rng.gen_range(*min..*max),
                    Dist::Choice { values } => values[rng.gen_range(0..values.len())],
                })
                .collect();
            let weight = values[cost_index];
            ResourceNode::new(&format!("n{:0width$}", i + 1), values, weight)
        })
        .collect();
    let edge = TaskEdge {
        id: "t1".into(),
        requirement: MetadataVector::new(spec.requirement.clone()),
        k: spec.k,
        members: None,
    };
    Ok(Hypergraph::new(schema, nodes, vec![edge]))
}

/// Metric configuration: a named preset or inline entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricConfig {
    Preset(String),
    Inline(Vec<MetricEntry<Score>>),
}

impl MetricConfig {
    pub fn resolve(&self, schema: &AttributeSchema) -> Result<MetricSet<Score>> {
        match self {
            MetricConfig::Preset(name) => presets::by_name(name, schema),
            MetricConfig::Inline(entries) => MetricSet::new(entries.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllocatorKind {
    Hypergraph,
    Exhaustive,
    Cheapest,
    Random,
    Greedy,
}

impl AllocatorKind {
    pub const ALL: [AllocatorKind; 5] = [
        AllocatorKind::Hypergraph,
        AllocatorKind::Exhaustive,
        AllocatorKind::Cheapest,
        AllocatorKind::Random,
        AllocatorKind::Greedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AllocatorKind::Hypergraph => "hypergraph",
            AllocatorKind::Exhaustive => "exhaustive",
            AllocatorKind::Cheapest => "cheapest",
            AllocatorKind::Random => "random",
            AllocatorKind::Greedy => "greedy",
        }
    }
}

impl std::str::FromStr for AllocatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AllocatorKind::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown allocator \"{s}\"")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchedulerKind {
    Hypergraph,
    Rr,
    Fcfs,
    Sjf,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 4] = [
        SchedulerKind::Hypergraph,
        SchedulerKind::Rr,
        SchedulerKind::Fcfs,
        SchedulerKind::Sjf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::Hypergraph => "hypergraph",
            SchedulerKind::Rr => "rr",
            SchedulerKind::Fcfs => "fcfs",
            SchedulerKind::Sjf => "sjf",
        }
    }
}

impl std::str::FromStr for SchedulerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchedulerKind::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheduler \"{s}\"")))
    }
}

/// Experiment configuration shared by the allocation and scheduling runs.
/// Deserializes from the run-config file; omitted fields take the defaults
/// of [`RunConfig::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub k: usize,
    pub metric: MetricConfig,
    pub allocators: Vec<AllocatorKind>,
    pub schedulers: Vec<SchedulerKind>,
    pub generator: GeneratorSpec,
    pub sched_generator: GeneratorSpec,
    /// Extra generated tasks appended to the fixed three-task workload.
    pub extra_tasks: usize,
    /// Output destination; `None` means stdout. CLI flags take precedence.
    pub out: Option<std::path::PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::new(0, vec![100, 200, 300, 400, 500], 10, 5)
    }
}

impl RunConfig {
    pub fn new(seed: u64, sizes: Vec<usize>, trials: usize, k: usize) -> Self {
        let mut generator = GeneratorSpec::default_allocation();
        generator.k = k;
        RunConfig {
            seed,
            sizes,
            trials,
            k,
            metric: MetricConfig::Preset("appendix".into()),
            allocators: vec![
                AllocatorKind::Hypergraph,
                AllocatorKind::Cheapest,
                AllocatorKind::Random,
                AllocatorKind::Greedy,
            ],
            schedulers: SchedulerKind::ALL.to_vec(),
            generator,
            sched_generator: GeneratorSpec::default_scheduling(),
            extra_tasks: 0,
            out: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Config("sizes must be non-empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be ≥ 1".into()));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be ≥ 1".into()));
        }
        self.generator.validate()?;
        self.sched_generator.validate()
    }
}

/// One table cell. `Empty` renders as an empty CSV field / JSON null.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Str(String),
    Empty,
}

/// Rectangular result table with a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format \"{other}\""))),
        }
    }
}

/// Format a float with 9 significant digits, printf `%.9g` style.
pub fn g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("numeric exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => g9(*v),
            Cell::Str(s) => crate::sched::csv_field(s),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => g9(*v),
            Cell::Float(_) => "null".into(),
            Cell::Str(s) => serde_json::to_string(s).expect("string encodes"),
            Cell::Empty => "null".into(),
        }
    }
}

/// Serialize a table. CSV has a fixed header order; JSON is an array of row
/// objects. Bit-identical across runs with equal inputs.
pub fn emit(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = table.columns.join(",");
            out.push('\n');
            for row in &table.rows {
                let fields: Vec<String> = row.iter().map(Cell::csv).collect();
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let mut out = String::from("[");
            for (ri, row) in table.rows.iter().enumerate() {
                if ri > 0 {
                    out.push(',');
                }
                out.push_str("\n  {");
                for (ci, (col, cell)) in table.columns.iter().zip(row).enumerate() {
                    if ci > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(&serde_json::to_string(col).expect("column encodes"));
                    out.push_str(": ");
                    out.push_str(&cell.json());
                }
                out.push('}');
            }
            out.push_str("\n]\n");
            out
        }
    }
}

pub const ALLOC_COLUMNS: [&str; 8] = [
    "size",
    "trial",
    "allocator",
    "status",
    "total_cost",
    "ratio_vs_cheapest",
    "alpha_bound",
    "wall_time_ns",
];

pub const SCHED_COLUMNS: [&str; 6] = [
    "size",
    "trial",
    "scheduler",
    "status",
    "total_cost",
    "wall_time_ns",
];

struct AllocOutcome {
    status: &'static str,
    total_cost: Option<f64>,
    bound_m: Option<f64>,
    wall_time_ns: u64,
}

fn run_allocator(
    kind: AllocatorKind,
    h: &Hypergraph<Score>,
    metric: &MetricSet<Score>,
    k: usize,
    seed: u64,
) -> Result<AllocOutcome> {
    let edge = &h.edges[0];
    let start = Instant::now();
    let outcome = match kind {
        AllocatorKind::Hypergraph => {
            // Rank within the feasible pool so the cost ratio against the
            // feasibility-respecting optimum is well-defined.
            let feasible: Vec<String> = h
                .candidates(edge)
                .into_iter()
                .filter(|n| is_feasible(&h.schema, n, &edge.requirement.values))
                .map(|n| n.id.clone())
                .collect();
            if feasible.len() < k {
                Ok(None)
            } else {
                let mut scoped = edge.clone();
                scoped.members = Some(feasible.into_iter().collect());
                let result = rank(score_all(h, &scoped, metric)?, k, RankKey::Upsilon);
                Ok(Some((result.total_cost, Some(result.bound.m))))
            }
        }
        AllocatorKind::Exhaustive => match optimal_exhaustive(h, edge, k) {
            Ok(a) => Ok(Some((a.total_cost, None))),
            Err(Error::Infeasible(_)) => Ok(None),
            Err(e) => Err(e),
        },
        AllocatorKind::Cheapest => match optimal_cheapest_feasible(h, edge, k) {
            Ok(a) => Ok(Some((a.total_cost, None))),
            Err(Error::Infeasible(_)) => Ok(None),
            Err(e) => Err(e),
        },
        AllocatorKind::Random => match random_allocation(h, edge, k, seed) {
            Ok(a) => Ok(Some((a.total_cost, None))),
            Err(Error::Infeasible(_)) => Ok(None),
            Err(e) => Err(e),
        },
        AllocatorKind::Greedy => {
            let a = greedy_by_weight(h, edge, k);
            Ok(Some((a.total_cost, None)))
        }
    };
    let wall_time_ns = start.elapsed().as_nanos() as u64;
    match outcome {
        Ok(Some((cost, m))) => Ok(AllocOutcome {
            status: "ok",
            total_cost: Some(cost),
            bound_m: m,
            wall_time_ns,
        }),
        Ok(None) => Ok(AllocOutcome {
            status: "infeasible",
            total_cost: None,
            bound_m: None,
            wall_time_ns,
        }),
        Err(Error::Usage(_)) => Ok(AllocOutcome {
            status: "skipped",
            total_cost: None,
            bound_m: None,
            wall_time_ns,
        }),
        Err(e) => Err(e),
    }
}

/// Run every configured allocator over `sizes × trials` generated instances.
/// One row per (size, trial, allocator), in that order; wall time measures
/// the allocator call only. Infeasibility becomes a status row.
pub fn run_allocation_experiment(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    let mut spec = cfg.generator.clone();
    spec.k = cfg.k;

    let jobs: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&size| (0..cfg.trials).map(move |trial| (size, trial)))
        .collect();

    let per_job: Vec<Result<Vec<Vec<Cell>>>> = jobs
        .par_iter()
        .map(|&(size, trial)| {
            let seed = derive_seed(cfg.seed, size as u64, trial as u64);
            let h = generate(&spec, size, seed)?;
            let metric = cfg.metric.resolve(&h.schema)?;

            // Guard-aware ordering: the cheapest optimum anchors ratios.
            let cheapest = match optimal_cheapest_feasible(&h, &h.edges[0], cfg.k) {
                Ok(a) => Some(a.total_cost),
                Err(Error::Infeasible(_)) => None,
                Err(e) => return Err(e),
            };

            let mut rows = Vec::with_capacity(cfg.allocators.len());
            for &kind in &cfg.allocators {
                let out = run_allocator(kind, &h, &metric, cfg.k, seed)?;
                let ratio = match (out.total_cost, cheapest) {
                    (Some(c), Some(best)) if best > 0.0 => Cell::Float(c / best),
                    _ => Cell::Empty,
                };
                let alpha = match (out.bound_m, cheapest) {
                    (Some(m), Some(best)) => Cell::Float(cfg.k as f64 * m * best),
                    _ => Cell::Empty,
                };
                rows.push(vec![
                    Cell::Int(size as u64),
                    Cell::Int(trial as u64),
                    Cell::Str(kind.name().into()),
                    Cell::Str(out.status.into()),
                    out.total_cost.map_or(Cell::Empty, Cell::Float),
                    ratio,
                    alpha,
                    Cell::Int(out.wall_time_ns),
                ]);
            }
            Ok(rows)
        })
        .collect();

    let mut rows = Vec::new();
    for job in per_job {
        rows.extend(job?);
    }
    Ok(Table {
        columns: ALLOC_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

/// Workload for one scheduling trial: the fixed three tasks plus any extra
/// generated ones (cpu `U[2,16]`, ram `U[4,32]`, exec `U[1,10]` from the
/// trial's task stream).
fn trial_workload(cfg: &RunConfig, seed: u64) -> Vec<SchedTask<Score>> {
    let mut tasks = reference_workload();
    if cfg.extra_tasks > 0 {
        let mut rng = StdRng::seed_from_u64(splitmix64(seed ^ 0x7461736b));
        for i in 0..cfg.extra_tasks {
            tasks.push(SchedTask {
                id: format!("gen{i}"),
                cpu_cores: rng.gen_range(2.0..16.0),
                ram_gib: rng.gen_range(4.0..32.0),
                exec_seconds: rng.gen_range(1.0..10.0),
                arrival_index: 3 + i,
            });
        }
    }
    tasks
}

/// Run every configured scheduler over `sizes × trials` generated VM fleets
/// with the fixed workload. One row per (size, trial, scheduler).
pub fn run_scheduling_experiment(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;

    let jobs: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&size| (0..cfg.trials).map(move |trial| (size, trial)))
        .collect();

    let per_job: Vec<Result<Vec<Vec<Cell>>>> = jobs
        .par_iter()
        .map(|&(size, trial)| {
            let seed = derive_seed(cfg.seed, size as u64, trial as u64);
            let vms = generate(&cfg.sched_generator, size, seed)?;
            let metric = presets::scheduling(&vms.schema)?;
            let tasks = trial_workload(cfg, seed);

            let mut rows = Vec::with_capacity(cfg.schedulers.len());
            for &kind in &cfg.schedulers {
                let start = Instant::now();
                let outcome = match kind {
                    SchedulerKind::Hypergraph => {
                        schedule_hypergraph(&tasks, &vms, &metric, false).map(Some)
                    }
                    SchedulerKind::Rr => schedule_round_robin(&tasks, &vms).map(Some),
                    SchedulerKind::Fcfs => match schedule_fcfs(&tasks, &vms, false) {
                        Ok(r) => Ok(Some(r)),
                        Err(Error::Infeasible(_)) => Ok(None),
                        Err(e) => Err(e),
                    },
                    SchedulerKind::Sjf => match schedule_sjf(&tasks, &vms, false) {
                        Ok(r) => Ok(Some(r)),
                        Err(Error::Infeasible(_)) => Ok(None),
                        Err(e) => Err(e),
                    },
                }?;
                let wall_time_ns = start.elapsed().as_nanos() as u64;
                let (status, cost) = match outcome {
                    Some(r) => ("ok", Cell::Float(r.total_cost)),
                    None => ("infeasible", Cell::Empty),
                };
                rows.push(vec![
                    Cell::Int(size as u64),
                    Cell::Int(trial as u64),
                    Cell::Str(kind.name().into()),
                    Cell::Str(status.into()),
                    cost,
                    Cell::Int(wall_time_ns),
                ]);
            }
            Ok(rows)
        })
        .collect();

    let mut rows = Vec::new();
    for job in per_job {
        rows.extend(job?);
    }
    Ok(Table {
        columns: SCHED_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::EXHAUSTIVE_GUARD;

    #[test]
    fn generation_is_deterministic() {
        let spec = GeneratorSpec::default_allocation();
        let a = generate(&spec, 50, 42).unwrap();
        let b = generate(&spec, 50, 42).unwrap();
        assert_eq!(a, b);
        let c = generate(&spec, 50, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_instances_validate() {
        let spec = GeneratorSpec::default_allocation();
        let h = generate(&spec, 20, 7).unwrap();
        let report = crate::model::validate(&h);
        assert!(report.is_empty(), "{report}");
        assert_eq!(h.edges[0].k, 5);
    }

    #[test]
    fn single_node_instance() {
        let spec = GeneratorSpec::default_allocation();
        let h = generate(&spec, 1, 0).unwrap();
        assert_eq!(h.nodes.len(), 1);
        assert_eq!(h.nodes[0].id, "n1");
    }

    #[test]
    fn per_node_streams_make_prefixes_stable() {
        let spec = GeneratorSpec::default_allocation();
        let small = generate(&spec, 10, 99).unwrap();
        let large = generate(&spec, 1000, 99).unwrap();
        for i in 0..10 {
            assert_eq!(
                small.nodes[i].metadata, large.nodes[i].metadata,
                "node {i} must not depend on the total count"
            );
        }
    }

    #[test]
    fn empirical_cpu_mean_matches_uniform_expectation() {
        // cpu ~ U[4, 64]: mean 34, sd 60/sqrt(12); 1e5 samples.
        let spec = GeneratorSpec::default_allocation();
        let h = generate(&spec, 100_000, 2024).unwrap();
        let mean = h.nodes.iter().map(|n| n.metadata.values[0]).sum::<f64>() / 1e5;
        let se = (60.0 / 12f64.sqrt()) / (1e5f64).sqrt();
        assert!(
            (mean - 34.0).abs() <= 3.0 * se,
            "mean {mean} outside 34 ± {}",
            3.0 * se
        );
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = GeneratorSpec::default_allocation();
        spec.attributes[0].dist = Dist::Uniform {
            min: 10.0,
            max: 10.0,
        };
        assert!(matches!(generate(&spec, 5, 0), Err(Error::Config(_))));

        let mut spec = GeneratorSpec::default_allocation();
        spec.attributes[4].dist = Dist::Uniform { min: 0.0, max: 5.0 };
        assert!(
            matches!(generate(&spec, 5, 0), Err(Error::Config(_))),
            "latency min must be > 0"
        );

        let mut spec = GeneratorSpec::default_allocation();
        spec.attributes[5].kind = AttributeKind::Capacity;
        assert!(
            matches!(generate(&spec, 5, 0), Err(Error::Config(_))),
            "cost attribute required"
        );
    }

    #[test]
    fn choice_distribution_samples_from_the_set() {
        let mut spec = GeneratorSpec::default_allocation();
        spec.attributes[0].dist = Dist::Choice {
            values: vec![8.0, 16.0],
        };
        let h = generate(&spec, 200, 5).unwrap();
        assert!(h
            .nodes
            .iter()
            .all(|n| n.metadata.values[0] == 8.0 || n.metadata.values[0] == 16.0));
    }

    #[test]
    fn allocate_on_generated_hundred_node_instance_selects_k5() {
        let spec = GeneratorSpec::default_allocation();
        let h = generate(&spec, 100, 31).unwrap();
        let metric = presets::appendix(&h.schema).unwrap();
        let results = crate::rank::allocate(&h, &metric).unwrap();
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].selected.len(), 5);
        assert!(!results[0].short_selection);
    }

    #[test]
    fn allocation_experiment_row_count_and_order() {
        let mut cfg = RunConfig::new(1, vec![30, 40], 2, 3);
        cfg.allocators = vec![AllocatorKind::Hypergraph, AllocatorKind::Cheapest];
        let table = run_allocation_experiment(&cfg).unwrap();
        assert_eq!(table.rows.len(), 2 * 2 * 2);
        // Rows ordered by (size, trial, allocator-as-configured).
        let keys: Vec<(u64, u64, String)> = table
            .rows
            .iter()
            .map(|r| match (&r[0], &r[1], &r[2]) {
                (Cell::Int(s), Cell::Int(t), Cell::Str(a)) => (*s, *t, a.clone()),
                _ => panic!("bad row shape"),
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort_by_key(|(s, t, _)| (*s, *t));
        assert_eq!(keys, sorted);
    }

    #[test]
    fn single_cell_experiment_has_one_row() {
        let mut cfg = RunConfig::new(7, vec![25], 1, 2);
        cfg.allocators = vec![AllocatorKind::Cheapest];
        let table = run_allocation_experiment(&cfg).unwrap();
        assert_eq!(table.rows.len(), 1);
    }

    #[test]
    fn hypergraph_ratio_is_at_least_one_on_ok_rows() {
        let mut cfg = RunConfig::new(11, vec![60, 120], 5, 4);
        cfg.allocators = vec![AllocatorKind::Hypergraph, AllocatorKind::Cheapest];
        let table = run_allocation_experiment(&cfg).unwrap();
        let mut checked = 0;
        for row in &table.rows {
            if row[2] == Cell::Str("hypergraph".into()) && row[3] == Cell::Str("ok".into()) {
                if let Cell::Float(ratio) = row[5] {
                    assert!(ratio >= 1.0 - 1e-12, "ratio {ratio} below 1");
                    checked += 1;
                }
            }
        }
        assert!(checked > 0, "no ok hypergraph rows to check");
    }

    #[test]
    fn infeasible_trials_become_status_rows_not_errors() {
        let mut cfg = RunConfig::new(3, vec![3], 2, 3);
        // Demand beyond every distribution's ceiling: nothing is feasible.
        cfg.generator.requirement = vec![1000.0, 1000.0, 100.0, 5000.0, 1.0, 0.0];
        cfg.allocators = vec![AllocatorKind::Hypergraph, AllocatorKind::Cheapest];
        let table = run_allocation_experiment(&cfg).unwrap();
        assert_eq!(table.rows.len(), 4);
        for row in &table.rows {
            assert_eq!(row[3], Cell::Str("infeasible".into()));
            assert_eq!(row[4], Cell::Empty);
        }
    }

    #[test]
    fn exhaustive_is_skipped_beyond_the_guard() {
        let mut cfg = RunConfig::new(5, vec![EXHAUSTIVE_GUARD + 10], 1, 2);
        cfg.allocators = vec![AllocatorKind::Exhaustive];
        let table = run_allocation_experiment(&cfg).unwrap();
        assert_eq!(table.rows[0][3], Cell::Str("skipped".into()));
    }

    #[test]
    fn scheduling_experiment_rows_and_costs() {
        let cfg = RunConfig::new(2, vec![50, 100], 2, 1);
        let table = run_scheduling_experiment(&cfg).unwrap();
        assert_eq!(table.rows.len(), 2 * 2 * 4);
        for row in &table.rows {
            if row[3] == Cell::Str("ok".into()) {
                match row[4] {
                    Cell::Float(c) => assert!(c > 0.0),
                    _ => panic!("ok row without cost"),
                }
            }
        }
    }

    #[test]
    fn experiments_are_deterministic_modulo_wall_time() {
        let cfg = RunConfig::new(99, vec![40], 3, 2);
        let strip = |t: &Table| -> Vec<Vec<String>> {
            t.rows
                .iter()
                .map(|r| r[..r.len() - 1].iter().map(Cell::csv).collect())
                .collect()
        };
        let a = run_allocation_experiment(&cfg).unwrap();
        let b = run_allocation_experiment(&cfg).unwrap();
        assert_eq!(strip(&a), strip(&b));
        let sa = run_scheduling_experiment(&cfg).unwrap();
        let sb = run_scheduling_experiment(&cfg).unwrap();
        assert_eq!(strip(&sa), strip(&sb));
    }

    #[test]
    fn emit_csv_header_only_and_single_row() {
        let empty = Table {
            columns: vec!["a".into(), "b".into()],
            rows: vec![],
        };
        assert_eq!(emit(&empty, OutputFormat::Csv), "a,b\n");
        let one = Table {
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec![Cell::Int(1), Cell::Float(2.25)]],
        };
        assert_eq!(emit(&one, OutputFormat::Csv), "a,b\n1,2.25\n");
    }

    #[test]
    fn emit_json_row_objects() {
        let one = Table {
            columns: vec!["name".into(), "cost".into(), "gap".into()],
            rows: vec![vec![Cell::Str("x".into()), Cell::Float(0.5), Cell::Empty]],
        };
        let json = emit(&one, OutputFormat::Json);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed[0]["name"], "x");
        assert_eq!(parsed[0]["cost"], 0.5);
        assert!(parsed[0]["gap"].is_null());
    }

    #[test]
    fn g9_formats_nine_significant_digits() {
        assert_eq!(g9(0.0), "0");
        assert_eq!(g9(225.0), "225");
        assert_eq!(g9(-5.5), "-5.5");
        assert_eq!(g9(500.0 / 501.0), "0.998003992");
        assert_eq!(g9(1234567891.0), "1.23456789e9");
        assert_eq!(g9(0.00012345678912), "0.000123456789");
        assert_eq!(g9(1e-7), "1e-7");
        assert_eq!(g9(4.5793413173652695), "4.57934132");
    }

    #[test]
    fn derive_seed_changes_with_every_input() {
        let base = derive_seed(1, 2, 3);
        assert_ne!(base, derive_seed(2, 2, 3));
        assert_ne!(base, derive_seed(1, 3, 3));
        assert_ne!(base, derive_seed(1, 2, 4));
        assert_eq!(base, derive_seed(1, 2, 3));
    }
}
