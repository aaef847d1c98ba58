//! Task-to-VM scheduling: best-fit assignment via hypergraph ranking with
//! Round Robin, FCFS, and SJF baselines.
//!
//! Each task becomes a k=1 hyperedge over the scheduling schema
//! {cpu, ram, exec_time, cost}. By default a VM may serve any number of
//! tasks; exclusive mode removes an assigned VM from later candidates.

use serde::{Deserialize, Serialize};

use crate::baselines::is_feasible;
use crate::error::{Error, Result};
use crate::metrics::MetricSet;
use crate::model::{
    Attribute, AttributeKind, AttributeSchema, Hypergraph, MetadataVector, TaskEdge,
};
use crate::rank::{rank, score_all, RankKey};
use crate::Scalar;

/// One task to place: resource demands, execution time, arrival position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedTask<S: Scalar> {
    pub id: String,
    pub cpu_cores: S,
    pub ram_gib: S,
    pub exec_seconds: S,
    pub arrival_index: usize,
}

/// One task-to-VM assignment; `score` is the ranking key for the
/// hypergraph scheduler and zero for the baselines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment<S: Scalar> {
    pub task_id: String,
    pub node_id: String,
    pub score: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleResult<S: Scalar> {
    pub assignments: Vec<Assignment<S>>,
    pub total_cost: S,
    pub scheduler: String,
}

/// The scheduling attribute schema: cpu and ram are capacities, exec_time is
/// latency-like (shorter relative execution preferred), plus cost.
pub fn scheduling_schema() -> AttributeSchema {
    AttributeSchema::new(vec![
        Attribute::new("cpu", "cores", AttributeKind::Capacity),
        Attribute::new("ram", "GiB", AttributeKind::Capacity),
        Attribute::new("exec_time", "s", AttributeKind::LatencyLike),
        Attribute::new("cost", "units", AttributeKind::Cost),
    ])
}

/// The fixed three-task workload used by the scheduling comparisons:
/// 8 cores/16 GiB/5 s, 4 cores/8 GiB/10 s, 16 cores/32 GiB/2 s.
pub fn reference_workload<S: Scalar>() -> Vec<SchedTask<S>> {
    let mk = |id: &str, cpu: f64, ram: f64, exec: f64, arrival: usize| SchedTask {
        id: id.into(),
        cpu_cores: crate::scalar::s(cpu),
        ram_gib: crate::scalar::s(ram),
        exec_seconds: crate::scalar::s(exec),
        arrival_index: arrival,
    };
    vec![
        mk("task1", 8.0, 16.0, 5.0, 0),
        mk("task2", 4.0, 8.0, 10.0, 1),
        mk("task3", 16.0, 32.0, 2.0, 2),
    ]
}

/// A task as a k=1 hyperedge over the scheduling schema.
pub fn task_to_edge<S: Scalar>(task: &SchedTask<S>) -> TaskEdge<S> {
    TaskEdge {
        id: task.id.clone(),
        requirement: MetadataVector::new(vec![
            task.cpu_cores,
            task.ram_gib,
            task.exec_seconds,
            S::zero(),
        ]),
        k: 1,
        members: None,
    }
}

fn check_tasks<S: Scalar>(tasks: &[SchedTask<S>]) -> Result<()> {
    for t in tasks {
        for (name, v) in [
            ("cpu_cores", t.cpu_cores),
            ("ram_gib", t.ram_gib),
            ("exec_seconds", t.exec_seconds),
        ] {
            if !v.is_finite() || v <= S::zero() {
                return Err(Error::Config(format!(
                    "task {}: {name} must be positive and finite, got {v}",
                    t.id
                )));
            }
        }
    }
    Ok(())
}

fn check_vms<S: Scalar>(vms: &Hypergraph<S>) -> Result<()> {
    if vms.nodes.is_empty() {
        return Err(Error::Usage("no VMs available".into()));
    }
    Ok(())
}

/// Best-fit assignment: for each task (input order), rank all remaining VMs
/// by relevance `Υ` and take the top one.
pub fn schedule_hypergraph<S: Scalar>(
    tasks: &[SchedTask<S>],
    vms: &Hypergraph<S>,
    metric: &MetricSet<S>,
    exclusive: bool,
) -> Result<ScheduleResult<S>> {
    check_vms(vms)?;
    check_tasks(tasks)?;
    if exclusive && tasks.len() > vms.nodes.len() {
        return Err(Error::Infeasible(format!(
            "{} tasks cannot use {} VMs exclusively",
            tasks.len(),
            vms.nodes.len()
        )));
    }
    let mut consumed: Vec<String> = Vec::new();
    let mut assignments = Vec::with_capacity(tasks.len());
    let mut total_cost = S::zero();
    for task in tasks {
        let mut edge = task_to_edge(task);
        if exclusive {
            edge.members = Some(
                vms.nodes
                    .iter()
                    .map(|n| n.id.clone())
                    .filter(|id| !consumed.contains(id))
                    .collect(),
            );
        }
        let result = rank(score_all(vms, &edge, metric)?, 1, RankKey::Upsilon);
        let node_id =
            result.selected.first().cloned().ok_or_else(|| {
                Error::Infeasible(format!("task {}: no VM left to assign", task.id))
            })?;
        let score = result.ranked[0].upsilon;
        total_cost = total_cost + result.ranked[0].weight;
        if exclusive {
            consumed.push(node_id.clone());
        }
        assignments.push(Assignment {
            task_id: task.id.clone(),
            node_id,
            score,
        });
    }
    Ok(ScheduleResult {
        assignments,
        total_cost,
        scheduler: "hypergraph".into(),
    })
}

/// Cyclic assignment: task `i` (input order) goes to VM `i mod |vms|`
/// (input order). O(n), resource-blind.
pub fn schedule_round_robin<S: Scalar>(
    tasks: &[SchedTask<S>],
    vms: &Hypergraph<S>,
) -> Result<ScheduleResult<S>> {
    check_vms(vms)?;
    check_tasks(tasks)?;
    let mut total_cost = S::zero();
    let assignments = tasks
        .iter()
        .enumerate()
        .map(|(i, task)| {
            instrumentation::bump(1);
            let vm = &vms.nodes[i % vms.nodes.len()];
            total_cost = total_cost + vm.weight;
            Assignment {
                task_id: task.id.clone(),
                node_id: vm.id.clone(),
                score: S::zero(),
            }
        })
        .collect();
    Ok(ScheduleResult {
        assignments,
        total_cost,
        scheduler: "rr".into(),
    })
}

fn assign_first_feasible<S: Scalar>(
    order: Vec<usize>,
    tasks: &[SchedTask<S>],
    vms: &Hypergraph<S>,
    exclusive: bool,
    scheduler: &str,
) -> Result<ScheduleResult<S>> {
    let mut consumed: Vec<usize> = Vec::new();
    let mut assignments = Vec::with_capacity(tasks.len());
    let mut total_cost = S::zero();
    for ti in order {
        let task = &tasks[ti];
        let edge = task_to_edge(task);
        let slot = vms.nodes.iter().enumerate().find(|(vi, vm)| {
            !(exclusive && consumed.contains(vi))
                && is_feasible(&vms.schema, vm, &edge.requirement.values)
        });
        let Some((vi, vm)) = slot else {
            return Err(Error::Infeasible(format!(
                "task {}: no feasible VM",
                task.id
            )));
        };
        if exclusive {
            consumed.push(vi);
        }
        total_cost = total_cost + vm.weight;
        assignments.push(Assignment {
            task_id: task.id.clone(),
            node_id: vm.id.clone(),
            score: S::zero(),
        });
    }
    Ok(ScheduleResult {
        assignments,
        total_cost,
        scheduler: scheduler.into(),
    })
}

/// First-come-first-serve: tasks in arrival order, each takes the first
/// feasible VM in input order.
pub fn schedule_fcfs<S: Scalar>(
    tasks: &[SchedTask<S>],
    vms: &Hypergraph<S>,
    exclusive: bool,
) -> Result<ScheduleResult<S>> {
    check_vms(vms)?;
    check_tasks(tasks)?;
    let mut order: Vec<usize> = (0..tasks.len()).collect();
    order.sort_by_key(|&i| tasks[i].arrival_index);
    assign_first_feasible(order, tasks, vms, exclusive, "fcfs")
}

/// Shortest-job-first: tasks ascending by execution time (ties by arrival),
/// then FCFS assignment.
pub fn schedule_sjf<S: Scalar>(
    tasks: &[SchedTask<S>],
    vms: &Hypergraph<S>,
    exclusive: bool,
) -> Result<ScheduleResult<S>> {
    check_vms(vms)?;
    check_tasks(tasks)?;
    let mut order: Vec<usize> = (0..tasks.len()).collect();
    order.sort_by(|&a, &b| {
        tasks[a]
            .exec_seconds
            .partial_cmp(&tasks[b].exec_seconds)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| tasks[a].arrival_index.cmp(&tasks[b].arrival_index))
    });
    assign_first_feasible(order, tasks, vms, exclusive, "sjf")
}

/// Parse a task list document (JSON array).
pub fn load_tasks<S: Scalar + serde::de::DeserializeOwned>(
    bytes: &[u8],
) -> Result<Vec<SchedTask<S>>> {
    let tasks: Vec<SchedTask<S>> =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    check_tasks(&tasks)?;
    Ok(tasks)
}

/// CSV form of schedule results: `scheduler,task_id,node_id,score,cost`,
/// one row per assignment with the assigned VM's weight as cost.
pub fn schedule_csv<S: Scalar>(results: &[ScheduleResult<S>], vms: &Hypergraph<S>) -> String {
    let mut out = String::from("scheduler,task_id,node_id,score,cost\n");
    for r in results {
        for a in &r.assignments {
            let cost = vms
                .node_by_id(&a.node_id)
                .map(|n| n.weight)
                .unwrap_or_else(S::zero);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_field(&r.scheduler),
                csv_field(&a.task_id),
                csv_field(&a.node_id),
                crate::bench::g9(a.score.to_f64().unwrap_or(f64::NAN)),
                crate::bench::g9(cost.to_f64().unwrap_or(f64::NAN)),
            ));
        }
    }
    out
}

/// Minimal RFC 4180 quoting.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Operation counting used by the complexity checks: the ranking path counts
/// key comparisons, the round-robin path counts assignment steps.
pub mod instrumentation {
    use std::cell::Cell;

    thread_local! {
        static OPS: Cell<u64> = const { Cell::new(0) };
    }

    pub fn reset() {
        OPS.with(|c| c.set(0));
    }

    pub fn count() -> u64 {
        OPS.with(|c| c.get())
    }

    pub(crate) fn bump(n: u64) {
        OPS.with(|c| c.set(c.get() + n));
    }
}
