//! Reference allocators: exhaustive exact optimum, cheapest-feasible exact
//! optimum, seeded random allocation, and weight-greedy selection. These
//! provide the optimal cost `C*(e)` for approximation reports.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AttributeKind, AttributeSchema, Hypergraph, ResourceNode, TaskEdge};
use crate::Scalar;

/// Candidate-count ceiling for the exhaustive allocator.
pub const EXHAUSTIVE_GUARD: usize = 25;

/// Selection outcome of a baseline allocator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation<S: Scalar> {
    pub selected: Vec<String>,
    pub total_cost: S,
    /// True when fewer than `k` candidates were available (greedy only;
    /// the other allocators treat that as infeasibility).
    pub short_selection: bool,
}

/// A node is feasible for a requirement when every capacity attribute meets
/// it and every latency-like attribute does not exceed it. Cost is ignored.
pub fn is_feasible<S: Scalar>(
    schema: &AttributeSchema,
    node: &ResourceNode<S>,
    requirement: &[S],
) -> bool {
    schema.attributes.iter().enumerate().all(|(i, attr)| {
        let (Some(nv), Some(&rv)) = (node.metadata.get(i), requirement.get(i)) else {
            return false;
        };
        match attr.kind {
            AttributeKind::Capacity => nv >= rv,
            AttributeKind::LatencyLike => nv <= rv,
            AttributeKind::Cost => true,
        }
    })
}

/// Name of the attribute that excluded the most candidates.
fn binding_attribute<S: Scalar>(
    schema: &AttributeSchema,
    candidates: &[&ResourceNode<S>],
    requirement: &[S],
) -> String {
    let mut best = ("<none>".to_string(), 0usize);
    for (i, attr) in schema.attributes.iter().enumerate() {
        if attr.kind == AttributeKind::Cost {
            continue;
        }
        let failing = candidates
            .iter()
            .filter(|n| {
                let (Some(nv), Some(&rv)) = (n.metadata.get(i), requirement.get(i)) else {
                    return true;
                };
                match attr.kind {
                    AttributeKind::Capacity => nv < rv,
                    AttributeKind::LatencyLike => nv > rv,
                    AttributeKind::Cost => false,
                }
            })
            .count();
        if failing > best.1 {
            best = (attr.name.clone(), failing);
        }
    }
    best.0
}

/// Canonical cost of a selection: weights summed in id order, so allocators
/// that agree on the set agree bit-for-bit on the total.
fn canonical_total<S: Scalar>(selected: &[&ResourceNode<S>]) -> S {
    let mut by_id: Vec<&ResourceNode<S>> = selected.to_vec();
    by_id.sort_by(|a, b| a.id.cmp(&b.id));
    by_id.iter().fold(S::zero(), |acc, n| acc + n.weight)
}

fn feasible_candidates<'a, S: Scalar>(
    h: &'a Hypergraph<S>,
    edge: &'a TaskEdge<S>,
    k: usize,
) -> Result<Vec<&'a ResourceNode<S>>> {
    let candidates = h.candidates(edge);
    let feasible: Vec<&ResourceNode<S>> = candidates
        .iter()
        .copied()
        .filter(|n| is_feasible(&h.schema, n, &edge.requirement.values))
        .collect();
    if feasible.len() < k {
        return Err(Error::Infeasible(format!(
            "edge {}: only {} of {} candidates feasible for k={}, binding attribute: {}",
            edge.id,
            feasible.len(),
            candidates.len(),
            k,
            binding_attribute(&h.schema, &candidates, &edge.requirement.values),
        )));
    }
    Ok(feasible)
}

/// Minimum total weight over all C(n, k) feasible subsets, found by full
/// enumeration. Ties resolve to the lexicographically smallest id-set.
/// Guarded to at most [`EXHAUSTIVE_GUARD`] candidates.
pub fn optimal_exhaustive<S: Scalar>(
    h: &Hypergraph<S>,
    edge: &TaskEdge<S>,
    k: usize,
) -> Result<Allocation<S>> {
    let candidates = h.candidates(edge);
    if candidates.len() > EXHAUSTIVE_GUARD {
        return Err(Error::Usage(format!(
            "exhaustive search limited to {EXHAUSTIVE_GUARD} candidates, got {}",
            candidates.len()
        )));
    }
    if k == 0 {
        return Err(Error::Usage("k must be ≥ 1".into()));
    }
    let feasible = feasible_candidates(h, edge, k)?;

    let mut best_cost: Option<S> = None;
    let mut best: Vec<&ResourceNode<S>> = Vec::new();
    let mut best_ids: Vec<String> = Vec::new();
    let mut chosen = Vec::with_capacity(k);
    enumerate_subsets(&feasible, k, 0, &mut chosen, &mut |ids| {
        // Compare by the canonical sum so the reported optimum is identical
        // to what other exact allocators report for the same set.
        let cost = canonical_total(ids);
        let mut sorted: Vec<String> = ids.iter().map(|n| n.id.clone()).collect();
        sorted.sort();
        let better = match best_cost {
            None => true,
            Some(b) => cost < b || (cost == b && sorted < best_ids),
        };
        if better {
            best_cost = Some(cost);
            best = ids.to_vec();
            best_ids = sorted;
        }
    });

    Ok(Allocation {
        selected: best_ids,
        total_cost: canonical_total(&best),
        short_selection: false,
    })
}

fn enumerate_subsets<'a, S: Scalar>(
    pool: &[&'a ResourceNode<S>],
    k: usize,
    start: usize,
    chosen: &mut Vec<&'a ResourceNode<S>>,
    visit: &mut impl FnMut(&[&'a ResourceNode<S>]),
) {
    if chosen.len() == k {
        visit(chosen);
        return;
    }
    let needed = k - chosen.len();
    for i in start..=pool.len().saturating_sub(needed) {
        chosen.push(pool[i]);
        enumerate_subsets(pool, k, i + 1, chosen, visit);
        chosen.pop();
    }
}

/// The k lowest-weight feasible nodes (weight asc, id asc). The per-node
/// objective is separable, so this agrees with [`optimal_exhaustive`]
/// whenever both run, at polynomial cost.
pub fn optimal_cheapest_feasible<S: Scalar>(
    h: &Hypergraph<S>,
    edge: &TaskEdge<S>,
    k: usize,
) -> Result<Allocation<S>> {
    if k == 0 {
        return Err(Error::Usage("k must be ≥ 1".into()));
    }
    let mut feasible = feasible_candidates(h, edge, k)?;
    feasible.sort_by(|a, b| {
        a.weight
            .partial_cmp(&b.weight)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.id.cmp(&b.id))
    });
    let picked = &feasible[..k];
    Ok(Allocation {
        selected: picked.iter().map(|n| n.id.clone()).collect(),
        total_cost: canonical_total(picked),
        short_selection: false,
    })
}

/// Uniform sample of k candidates without replacement, reproducible per
/// seed. Feasibility is not consulted.
pub fn random_allocation<S: Scalar>(
    h: &Hypergraph<S>,
    edge: &TaskEdge<S>,
    k: usize,
    seed: u64,
) -> Result<Allocation<S>> {
    let candidates = h.candidates(edge);
    if k > candidates.len() {
        return Err(Error::Infeasible(format!(
            "edge {}: k={} exceeds candidate count {}",
            edge.id,
            k,
            candidates.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, candidates.len(), k);
    let selected: Vec<String> = picked.iter().map(|i| candidates[i].id.clone()).collect();
    let total_cost = picked
        .iter()
        .fold(S::zero(), |acc, i| acc + candidates[i].weight);
    Ok(Allocation {
        selected,
        total_cost,
        short_selection: false,
    })
}

/// The k cheapest candidates ignoring feasibility and relevance: the naive
/// comparator. Never errors; a short pool flags `short_selection`.
pub fn greedy_by_weight<S: Scalar>(
    h: &Hypergraph<S>,
    edge: &TaskEdge<S>,
    k: usize,
) -> Allocation<S> {
    let mut candidates = h.candidates(edge);
    candidates.sort_by(|a, b| {
        a.weight
            .partial_cmp(&b.weight)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.id.cmp(&b.id))
    });
    let take = k.min(candidates.len());
    Allocation {
        selected: candidates[..take].iter().map(|n| n.id.clone()).collect(),
        total_cost: candidates[..take]
            .iter()
            .fold(S::zero(), |acc, n| acc + n.weight),
        short_selection: take < k,
    }
}
