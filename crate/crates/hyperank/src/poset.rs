//! Partial orders over semantic entities, dependency-DAG construction, and
//! topological ranking.
//!
//! A semantic entity is a `(node, edge, operator)` triple. Two orders are
//! provided: the score-induced order (compare relevance keys computed by the
//! entity's own operator) and the subset-induced order over node-id sets.
//! The strict score order materializes as a DAG whose arcs point from lower
//! to higher key; topological sorting of that DAG recovers the ranking.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{tensor, MetricSet};
use crate::model::Hypergraph;
use crate::rank::{RankKey, EPSILON_WEIGHT};
use crate::scalar::s;
use crate::Scalar;

/// A vertex–hyperedge–operator triple, the unit being ranked.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SemanticEntity {
    pub node_id: String,
    pub edge_id: String,
    /// Name of a registered metric set.
    pub operator_id: String,
}

impl SemanticEntity {
    pub fn new(node_id: &str, edge_id: &str, operator_id: &str) -> Self {
        SemanticEntity {
            node_id: node_id.into(),
            edge_id: edge_id.into(),
            operator_id: operator_id.into(),
        }
    }

    /// Display label, also used for DOT export.
    pub fn label(&self) -> String {
        format!("{}@{}#{}", self.node_id, self.edge_id, self.operator_id)
    }
}

/// Resolution context for scoring entities: the instance plus a registry of
/// named operators and the key choice.
pub struct ScoringContext<'a, S: Scalar> {
    hypergraph: &'a Hypergraph<S>,
    operators: BTreeMap<String, MetricSet<S>>,
    key: RankKey,
}

impl<'a, S: Scalar> ScoringContext<'a, S> {
    pub fn new(hypergraph: &'a Hypergraph<S>, key: RankKey) -> Self {
        ScoringContext {
            hypergraph,
            operators: BTreeMap::new(),
            key,
        }
    }

    pub fn with_operator(mut self, id: &str, metric: MetricSet<S>) -> Self {
        self.operators.insert(id.into(), metric);
        self
    }

    /// Relevance key of one entity under its own operator.
    pub fn key_of(&self, entity: &SemanticEntity) -> Result<S> {
        let node = self.hypergraph.node_by_id(&entity.node_id).ok_or_else(|| {
            Error::Config(format!("entity {} references unknown node", entity.label()))
        })?;
        let edge = self
            .hypergraph
            .edges
            .iter()
            .find(|e| e.id == entity.edge_id)
            .ok_or_else(|| {
                Error::Config(format!("entity {} references unknown edge", entity.label()))
            })?;
        let metric = self.operators.get(&entity.operator_id).ok_or_else(|| {
            Error::Config(format!(
                "entity {} references unregistered operator",
                entity.label()
            ))
        })?;
        let t = tensor(&self.hypergraph.schema, node, edge, metric)?;
        Ok(match self.key {
            RankKey::Tensor => t,
            RankKey::Upsilon => t / node.weight.max(s::<S>(EPSILON_WEIGHT)),
        })
    }
}

/// Compare two entities by their relevance keys. Equality means the keys are
/// exactly equal; no tolerance is applied.
///
/// The entities may reference different operators; each one is keyed under
/// its own operator before the keys are compared. That is an interpretation:
/// no canonical cross-operator comparison exists, so the per-entity key is
/// the only well-defined choice.
pub fn compare_score<S: Scalar>(
    t1: &SemanticEntity,
    t2: &SemanticEntity,
    ctx: &ScoringContext<'_, S>,
) -> Result<Ordering> {
    let k1 = ctx.key_of(t1)?;
    let k2 = ctx.key_of(t2)?;
    Ok(k1.partial_cmp(&k2).unwrap_or(Ordering::Equal))
}

/// Outcome of comparing two node-id sets under inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SubsetRelation {
    /// The sets are equal (less-or-equal holds in both directions).
    Equal,
    /// Left is a proper subset of right.
    Subset,
    /// Left is a proper superset of right.
    Superset,
    Incomparable,
}

impl SubsetRelation {
    /// Less-or-equal in the inclusion order.
    pub fn is_le(self) -> bool {
        matches!(self, SubsetRelation::Equal | SubsetRelation::Subset)
    }
}

/// The subset-induced partial order: reflexive, antisymmetric, transitive.
pub fn compare_subset(a: &BTreeSet<String>, b: &BTreeSet<String>) -> SubsetRelation {
    let ab = a.is_subset(b);
    let ba = b.is_subset(a);
    match (ab, ba) {
        (true, true) => SubsetRelation::Equal,
        (true, false) => SubsetRelation::Subset,
        (false, true) => SubsetRelation::Superset,
        (false, false) => SubsetRelation::Incomparable,
    }
}

/// Supremum of a finite chain under the score order: the entity with the
/// largest key (key ties resolve to the smallest entity). `None` for an
/// empty chain. Every finite chain has one, which is all the completeness
/// this crate claims.
pub fn chain_sup<'a, S: Scalar>(
    chain: &'a [SemanticEntity],
    ctx: &ScoringContext<'_, S>,
) -> Result<Option<&'a SemanticEntity>> {
    chain_extremum(chain, ctx, Ordering::Greater)
}

/// Infimum of a finite chain under the score order: the entity with the
/// smallest key. `None` for an empty chain.
pub fn chain_inf<'a, S: Scalar>(
    chain: &'a [SemanticEntity],
    ctx: &ScoringContext<'_, S>,
) -> Result<Option<&'a SemanticEntity>> {
    chain_extremum(chain, ctx, Ordering::Less)
}

fn chain_extremum<'a, S: Scalar>(
    chain: &'a [SemanticEntity],
    ctx: &ScoringContext<'_, S>,
    keep: Ordering,
) -> Result<Option<&'a SemanticEntity>> {
    let mut best: Option<(&'a SemanticEntity, S)> = None;
    for entity in chain {
        let key = ctx.key_of(entity)?;
        best = Some(match best {
            None => (entity, key),
            Some((b, bk)) => {
                let cmp = key.partial_cmp(&bk).unwrap_or(Ordering::Equal);
                if cmp == keep || (cmp == Ordering::Equal && entity < b) {
                    (entity, key)
                } else {
                    (b, bk)
                }
            }
        });
    }
    Ok(best.map(|(e, _)| e))
}

/// Dependency DAG over semantic entities: arc `(i, j)` means entity `i`'s
/// key is strictly below entity `j`'s under the generating comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependencyDag {
    pub vertices: Vec<SemanticEntity>,
    pub arcs: BTreeSet<(usize, usize)>,
}

impl DependencyDag {
    /// DOT text form: vertex label `node@edge#operator`, one arc per line.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dependency {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  v{} [label=\"{}\"];", i, v.label());
        }
        for (from, to) in &self.arcs {
            let _ = writeln!(out, "  v{from} -> v{to};");
        }
        out.push_str("}\n");
        out
    }
}

/// Build the dependency DAG with one arc per strictly ordered pair
/// (transitive arcs retained). Equal-key entities form an antichain.
/// O(n²) pairwise comparisons.
pub fn build_dag<S: Scalar>(
    entities: Vec<SemanticEntity>,
    ctx: &ScoringContext<'_, S>,
) -> Result<DependencyDag> {
    build_dag_with(entities, ctx, false)
}

/// As [`build_dag`]; with `consecutive_only` the DAG is instead the chain of
/// consecutive arcs along the (key, entity) sorted order — O(n log n) and a
/// linear number of arcs — which yields the same topological ranking.
pub fn build_dag_with<S: Scalar>(
    entities: Vec<SemanticEntity>,
    ctx: &ScoringContext<'_, S>,
    consecutive_only: bool,
) -> Result<DependencyDag> {
    let keys = entities
        .iter()
        .map(|e| ctx.key_of(e))
        .collect::<Result<Vec<S>>>()?;
    let mut arcs = BTreeSet::new();
    if consecutive_only {
        let mut order: Vec<usize> = (0..entities.len()).collect();
        order.sort_by(|&a, &b| {
            keys[a]
                .partial_cmp(&keys[b])
                .unwrap_or(Ordering::Equal)
                .then_with(|| entities[a].cmp(&entities[b]))
        });
        for pair in order.windows(2) {
            arcs.insert((pair[0], pair[1]));
        }
    } else {
        for i in 0..entities.len() {
            for j in 0..entities.len() {
                if i != j && keys[i] < keys[j] {
                    arcs.insert((i, j));
                }
            }
        }
    }
    let dag = DependencyDag {
        vertices: entities,
        arcs,
    };
    // Construction check: the generating order is strict, so Kahn must
    // consume every vertex.
    topo_rank(&dag)?;
    Ok(dag)
}

/// Topological rank by in-degree elimination. Incomparable entities are
/// emitted in ascending entity order; a cycle (corrupted input) errors with
/// one witness cycle.
pub fn topo_rank(dag: &DependencyDag) -> Result<Vec<usize>> {
    let n = dag.vertices.len();
    let mut indegree = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(from, to) in &dag.arcs {
        if from >= n || to >= n {
            return Err(Error::Usage(format!("arc ({from}, {to}) out of bounds")));
        }
        indegree[to] += 1;
        succ[from].push(to);
    }

    // Rank of each vertex in ascending entity order, for deterministic ties.
    let mut by_entity: Vec<usize> = (0..n).collect();
    by_entity.sort_by(|&a, &b| dag.vertices[a].cmp(&dag.vertices[b]));
    let mut tie_rank = vec![0usize; n];
    for (r, &i) in by_entity.iter().enumerate() {
        tie_rank[i] = r;
    }

    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..n)
        .filter(|&i| indegree[i] == 0)
        .map(|i| Reverse((tie_rank[i], i)))
        .collect();
    let mut out = Vec::with_capacity(n);
    while let Some(Reverse((_, i))) = ready.pop() {
        out.push(i);
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(Reverse((tie_rank[j], j)));
            }
        }
    }

    if out.len() < n {
        return Err(Error::Cycle(witness_cycle(dag, &out)));
    }
    Ok(out)
}

/// Walk successors among unprocessed vertices until one repeats.
fn witness_cycle(dag: &DependencyDag, done: &[usize]) -> Vec<String> {
    let n = dag.vertices.len();
    let done: BTreeSet<usize> = done.iter().copied().collect();
    let start = (0..n)
        .find(|i| !done.contains(i))
        .expect("some vertex is stuck");
    let mut seen: Vec<usize> = Vec::new();
    let mut current = start;
    loop {
        if let Some(pos) = seen.iter().position(|&v| v == current) {
            let mut cycle: Vec<String> = seen[pos..]
                .iter()
                .map(|&v| dag.vertices[v].label())
                .collect();
            cycle.push(dag.vertices[current].label());
            return cycle;
        }
        seen.push(current);
        current = dag
            .arcs
            .iter()
            .find(|&&(from, to)| from == current && !done.contains(&to))
            .map(|&(_, to)| to)
            .expect("stuck vertex has an unprocessed successor");
    }
}

/// One entity per node of the instance, all against the same edge and
/// operator.
pub fn entities_for_edge<S: Scalar>(
    h: &Hypergraph<S>,
    edge_id: &str,
    operator_id: &str,
) -> Vec<SemanticEntity> {
    h.nodes
        .iter()
        .map(|n| SemanticEntity::new(&n.id, edge_id, operator_id))
        .collect()
}
