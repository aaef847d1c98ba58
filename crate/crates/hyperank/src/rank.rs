//! The ranking engine: relevance scores, ranked projection, top-k selection
//! per hyperedge, total cost, and approximation-bound diagnostics.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{abs_tensor, tensor, MetricSet};
use crate::model::{Hypergraph, TaskEdge};
use crate::scalar::s;
use crate::Scalar;

/// Weight substituted for zero-cost nodes when forming `Υ = (v⊗e)/w(v)`,
/// so the division stays finite. Affected nodes are flagged in the result.
pub const EPSILON_WEIGHT: f64 = 1e-12;

/// Which key orders the ranking: the relevance `Υ` (composite score divided
/// by cost) or the raw composite `tensor` score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankKey {
    Upsilon,
    Tensor,
}

impl fmt::Display for RankKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankKey::Upsilon => "upsilon",
            RankKey::Tensor => "tensor",
        })
    }
}

impl FromStr for RankKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upsilon" => Ok(RankKey::Upsilon),
            "tensor" => Ok(RankKey::Tensor),
            other => Err(Error::Config(format!(
                "unknown rank key \"{other}\" (expected upsilon or tensor)"
            ))),
        }
    }
}

/// Scores of one candidate node against one hyperedge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelevanceScore<S: Scalar> {
    pub node_id: String,
    pub edge_id: String,
    /// Composite score `(v ⊗ e)`.
    pub tensor: S,
    /// Relevance `Υ = tensor / max(weight, ε)`.
    pub upsilon: S,
    /// Absolute-value sum `Σ μᵢ·|fᵢ|` feeding the envelope M.
    pub abs_tensor: S,
    /// The node's cost weight, carried for tie-breaks and totals.
    pub weight: S,
}

impl<S: Scalar> RelevanceScore<S> {
    pub fn key(&self, key: RankKey) -> S {
        match key {
            RankKey::Upsilon => self.upsilon,
            RankKey::Tensor => self.tensor,
        }
    }
}

/// Bound diagnostics attached to a ranking: the envelope `M` over the
/// selected nodes, the demanded count `k`, and the product `k·M` (multiply
/// by an optimal cost to obtain the full bound `k·M·C*(e)`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundInfo<S: Scalar> {
    #[serde(rename = "M")]
    pub m: S,
    pub k: usize,
    pub alpha_bound: S,
    /// Smallest relevance among the selected nodes. The bound derivation
    /// assumes this exceeds one; nothing enforces that, so it is surfaced
    /// for inspection.
    pub min_selected_upsilon: Option<S>,
}

/// Scored, ordered candidate list with the selected top-k.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankResult<S: Scalar> {
    pub edge_id: String,
    /// All candidate scores in descending key order.
    pub ranked: Vec<RelevanceScore<S>>,
    /// The first `min(k, candidate count)` node ids.
    pub selected: Vec<String>,
    /// Sum of the selected nodes' weights.
    pub total_cost: S,
    pub bound: BoundInfo<S>,
    /// True when fewer than `k` candidates were available.
    pub short_selection: bool,
    /// Candidates whose weight was zero (their `Υ` used the ε guard).
    pub zero_weight: Vec<String>,
    pub key: RankKey,
}

impl<S: Scalar + Serialize> RankResult<S> {
    /// JSON form of the result; the full ranked list is verbose-only.
    pub fn to_json(&self, include_ranked: bool) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("rank result serializes");
        if !include_ranked {
            v.as_object_mut().unwrap().remove("ranked");
        }
        v
    }
}

/// Score every candidate of `edge` (its members when present, otherwise all
/// nodes). Output order equals node input order; candidates are evaluated in
/// parallel and the result is identical for any worker count.
pub fn score_all<S: Scalar>(
    h: &Hypergraph<S>,
    edge: &TaskEdge<S>,
    metric: &MetricSet<S>,
) -> Result<Vec<RelevanceScore<S>>> {
    let eps = s::<S>(EPSILON_WEIGHT);
    let candidates = h.candidates(edge);
    candidates
        .par_iter()
        .with_min_len(64)
        .map(|node| {
            let t = tensor(&h.schema, node, edge, metric)?;
            let a = abs_tensor(&h.schema, node, edge, metric)?;
            Ok(RelevanceScore {
                node_id: node.id.clone(),
                edge_id: edge.id.clone(),
                tensor: t,
                upsilon: t / node.weight.max(eps),
                abs_tensor: a,
                weight: node.weight,
            })
        })
        .collect()
}

/// Counts key comparisons made while ranking, for complexity checks.
pub mod instrumentation {
    use std::cell::Cell;

    thread_local! {
        static COMPARISONS: Cell<u64> = const { Cell::new(0) };
    }

    pub fn reset() {
        COMPARISONS.with(|c| c.set(0));
    }

    pub fn count() -> u64 {
        COMPARISONS.with(|c| c.get())
    }

    pub(super) fn bump() {
        COMPARISONS.with(|c| c.set(c.get() + 1));
    }
}

fn compare_for_rank<S: Scalar>(
    a: &RelevanceScore<S>,
    b: &RelevanceScore<S>,
    key: RankKey,
) -> Ordering {
    instrumentation::bump();
    // Descending key, then ascending weight, then ascending node id.
    b.key(key)
        .partial_cmp(&a.key(key))
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.weight.partial_cmp(&b.weight).unwrap_or(Ordering::Equal))
        .then_with(|| a.node_id.cmp(&b.node_id))
}

/// Order scores descending by `key` with the deterministic tie-break
/// (key desc, weight asc, id asc) and select the top `min(k, n)`.
pub fn rank<S: Scalar>(scores: Vec<RelevanceScore<S>>, k: usize, key: RankKey) -> RankResult<S> {
    let edge_id = scores
        .first()
        .map(|r| r.edge_id.clone())
        .unwrap_or_default();
    let zero_weight: Vec<String> = scores
        .iter()
        .filter(|r| r.weight == S::zero())
        .map(|r| r.node_id.clone())
        .collect();

    let mut ranked = scores;
    ranked.sort_by(|a, b| compare_for_rank(a, b, key));

    let take = k.min(ranked.len());
    let selected: Vec<String> = ranked[..take].iter().map(|r| r.node_id.clone()).collect();
    let total_cost = ranked[..take]
        .iter()
        .fold(S::zero(), |acc, r| acc + r.weight);
    let m = ranked[..take]
        .iter()
        .map(|r| r.abs_tensor)
        .fold(S::zero(), S::max);
    let min_selected_upsilon = ranked[..take]
        .iter()
        .map(|r| r.upsilon)
        .fold(None, |acc: Option<S>, u| Some(acc.map_or(u, |a| a.min(u))));

    RankResult {
        edge_id,
        selected,
        total_cost,
        bound: BoundInfo {
            m,
            k,
            alpha_bound: s::<S>(k as f64) * m,
            min_selected_upsilon,
        },
        short_selection: k > ranked.len(),
        zero_weight,
        key,
        ranked,
    }
}

/// Score and rank every edge of the instance independently with the
/// relevance key `Υ`. A node may be selected by multiple edges.
pub fn allocate<S: Scalar>(h: &Hypergraph<S>, metric: &MetricSet<S>) -> Result<Vec<RankResult<S>>> {
    h.edges
        .iter()
        .map(|edge| {
            let mut result = rank(score_all(h, edge, metric)?, edge.k, RankKey::Upsilon);
            // An empty candidate pool yields no scores to read the id from.
            result.edge_id = edge.id.clone();
            Ok(result)
        })
        .collect()
}

/// Cost-ratio diagnostics of a ranking against an optimal cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationReport<S: Scalar> {
    /// `C_alg(e) / C*(e)`.
    pub ratio: S,
    /// `k · M · C*(e)`.
    pub alpha_bound: S,
    pub within_bound: bool,
}

/// Relate a ranking's cost to the optimal cost `C*(e)` and evaluate the
/// bound `ratio ≤ k·M·C*(e)` with the supplied envelope `M`.
pub fn approximation_report<S: Scalar>(
    r: &RankResult<S>,
    optimal_cost: S,
    m_bound: S,
) -> Result<ApproximationReport<S>> {
    if !optimal_cost.is_finite() || optimal_cost <= S::zero() {
        return Err(Error::Degenerate(format!(
            "optimal cost must be positive to form a cost ratio, got {optimal_cost}"
        )));
    }
    let ratio = r.total_cost / optimal_cost;
    let alpha_bound = s::<S>(r.bound.k as f64) * m_bound * optimal_cost;
    Ok(ApproximationReport {
        ratio,
        alpha_bound,
        within_bound: ratio <= alpha_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::metrics::presets;
    use crate::model::{
        Attribute, AttributeKind, AttributeSchema, Hypergraph, ResourceNode, TaskEdge,
    };
    use crate::testutil::reference_scores;

    fn reference_setup() -> (Hypergraph<f64>, MetricSet<f64>) {
        let h = fixtures::six_node_instance::<f64>(1);
        let m = presets::appendix(&h.schema).unwrap();
        (h, m)
    }

    #[test]
    fn score_all_matches_the_six_oracle_values() {
        let (h, m) = reference_setup();
        let scores = score_all(&h, &h.edges[0], &m).unwrap();
        assert_eq!(scores.len(), 6);
        let expected = reference_scores();
        for (i, sc) in scores.iter().enumerate() {
            assert_eq!(
                sc.node_id,
                format!("n{}", i + 1),
                "output keeps node input order"
            );
            assert!(
                (sc.tensor - expected[i]).abs() < 1e-12,
                "node {}: {} vs oracle {}",
                sc.node_id,
                sc.tensor,
                expected[i]
            );
        }
    }

    #[test]
    fn score_all_on_empty_candidate_set_is_empty() {
        let (h, m) = reference_setup();
        let edge = TaskEdge::new("q", h.edges[0].requirement.values.clone(), 1)
            .with_members(std::iter::empty::<String>());
        assert!(score_all(&h, &edge, &m).unwrap().is_empty());
    }

    #[test]
    fn single_candidate_scores_its_tensor() {
        let (h, m) = reference_setup();
        let edge = TaskEdge::new("q", h.edges[0].requirement.values.clone(), 1)
            .with_members(["n3".to_string()]);
        let scores = score_all(&h, &edge, &m).unwrap();
        assert_eq!(scores.len(), 1);
        assert!((scores[0].tensor - reference_scores()[2]).abs() < 1e-12);
    }

    #[test]
    fn rank_k1_by_tensor_selects_node_6() {
        let (h, m) = reference_setup();
        let scores = score_all(&h, &h.edges[0], &m).unwrap();
        let result = rank(scores, 1, RankKey::Tensor);
        assert_eq!(result.selected, vec!["n6"]);
        assert!(!result.short_selection);
    }

    #[test]
    fn equal_keys_select_lowest_weight_then_id() {
        let mk = |id: &str, weight: f64| RelevanceScore::<f64> {
            node_id: id.into(),
            edge_id: "e".into(),
            tensor: 2.0,
            upsilon: 2.0,
            abs_tensor: 2.0,
            weight,
        };
        let scores = vec![mk("c", 5.0), mk("b", 1.0), mk("d", 1.0), mk("a", 9.0)];
        let result = rank(scores, 2, RankKey::Tensor);
        assert_eq!(result.selected, vec!["b", "d"]);
    }

    #[test]
    fn k_equal_to_n_selects_everything() {
        let (h, m) = reference_setup();
        let scores = score_all(&h, &h.edges[0], &m).unwrap();
        let result = rank(scores, 6, RankKey::Upsilon);
        assert_eq!(result.selected.len(), 6);
        let total: f64 = fixtures::REFERENCE_WEIGHTS.iter().sum();
        assert!((result.total_cost - total).abs() < 1e-9);
        assert!(!result.short_selection);
    }

    #[test]
    fn k_beyond_n_flags_short_selection() {
        let (h, m) = reference_setup();
        let scores = score_all(&h, &h.edges[0], &m).unwrap();
        let result = rank(scores, 10, RankKey::Upsilon);
        assert_eq!(result.selected.len(), 6);
        assert!(result.short_selection);
    }

    #[test]
    fn ranked_is_a_permutation_and_selection_is_optimal() {
        let (h, m) = reference_setup();
        let scores = score_all(&h, &h.edges[0], &m).unwrap();
        let result = rank(scores.clone(), 3, RankKey::Upsilon);
        assert_eq!(result.ranked.len(), scores.len());
        let worst_selected = result.ranked[..3]
            .iter()
            .map(|r| r.upsilon)
            .fold(f64::INFINITY, f64::min);
        for r in &result.ranked[3..] {
            assert!(r.upsilon <= worst_selected);
        }
    }

    #[test]
    fn total_cost_matches_independent_recount() {
        let (h, m) = reference_setup();
        let result = rank(score_all(&h, &h.edges[0], &m).unwrap(), 4, RankKey::Upsilon);
        let recount: f64 = result
            .selected
            .iter()
            .map(|id| h.node_by_id(id).unwrap().weight)
            .sum();
        assert_eq!(result.total_cost, recount);
    }

    #[test]
    fn allocate_runs_one_result_per_edge() {
        let (mut h, m) = reference_setup();
        h.edges.push(TaskEdge::new(
            "t2",
            h.edges[0].requirement.values.clone(),
            2,
        ));
        let results = allocate(&h, &m).unwrap();
        assert_eq!(results.len(), 2);
        assert_eq!(results[0].edge_id, "t1");
        assert_eq!(results[1].edge_id, "t2");
        assert_eq!(results[1].selected.len(), 2);
    }

    #[test]
    fn allocate_on_zero_edges_is_empty() {
        let (mut h, m) = reference_setup();
        h.edges.clear();
        assert!(allocate(&h, &m).unwrap().is_empty());
    }

    #[test]
    fn allocate_single_member_edge_is_short_when_k_exceeds_it() {
        let (mut h, m) = reference_setup();
        h.edges[0].members = Some(["n2".to_string()].into_iter().collect());
        h.edges[0].k = 3;
        let results = allocate(&h, &m).unwrap();
        assert_eq!(results[0].selected, vec!["n2"]);
        assert!(results[0].short_selection);
    }

    #[test]
    fn upsilon_divides_by_weight_with_epsilon_guard() {
        let schema = AttributeSchema::new(vec![Attribute::new(
            "cpu",
            "cores",
            AttributeKind::Capacity,
        )]);
        let h = Hypergraph::new(
            schema,
            vec![
                ResourceNode::new("free", vec![4.0], 0.0),
                ResourceNode::new("paid", vec![4.0], 2.0),
            ],
            vec![TaskEdge::new("t", vec![4.0], 1)],
        );
        let m = MetricSet::new(vec![crate::metrics::MetricEntry {
            attribute: "cpu".into(),
            function: crate::metrics::MatchFunction::RatioMinMax,
            mu: 1.0,
        }])
        .unwrap();
        let scores = score_all(&h, &h.edges[0], &m).unwrap();
        assert_eq!(scores[0].upsilon, 1.0 / EPSILON_WEIGHT);
        assert_eq!(scores[1].upsilon, 0.5);
        let result = rank(scores, 1, RankKey::Upsilon);
        assert_eq!(result.zero_weight, vec!["free"]);
    }

    #[test]
    fn approximation_report_at_optimum_is_ratio_one() {
        let (h, m) = reference_setup();
        let result = rank(score_all(&h, &h.edges[0], &m).unwrap(), 2, RankKey::Upsilon);
        let report = approximation_report(&result, result.total_cost, result.bound.m).unwrap();
        assert_eq!(report.ratio, 1.0);
        assert!(report.within_bound);
    }

    #[test]
    fn approximation_report_bound_arithmetic() {
        let (h, m) = reference_setup();
        let result = rank(score_all(&h, &h.edges[0], &m).unwrap(), 1, RankKey::Upsilon);
        let report = approximation_report(&result, 200.0, 4.579344).unwrap();
        assert!((report.alpha_bound - 915.8688).abs() < 1e-9);
    }

    #[test]
    fn approximation_report_rejects_non_positive_optimum() {
        let (h, m) = reference_setup();
        let result = rank(score_all(&h, &h.edges[0], &m).unwrap(), 1, RankKey::Upsilon);
        assert!(matches!(
            approximation_report(&result, 0.0, 1.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn scaling_all_weights_keeps_order_and_selection() {
        let (h, m) = reference_setup();
        let m7 = m.scaled(7.0).unwrap();
        let a = rank(score_all(&h, &h.edges[0], &m).unwrap(), 3, RankKey::Upsilon);
        let b = rank(
            score_all(&h, &h.edges[0], &m7).unwrap(),
            3,
            RankKey::Upsilon,
        );
        assert_eq!(a.selected, b.selected);
        let ids = |r: &RankResult<f64>| -> Vec<String> {
            r.ranked
                .iter()
                .map(|x| x.node_id.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(ids(&a), ids(&b));
    }

    #[test]
    fn parallel_and_serial_scoring_agree_bitwise() {
        let (h, m) = reference_setup();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap();
        let a = single.install(|| score_all(&h, &h.edges[0], &m).unwrap());
        let b = many.install(|| score_all(&h, &h.edges[0], &m).unwrap());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.tensor.to_bits(), y.tensor.to_bits());
            assert_eq!(x.upsilon.to_bits(), y.upsilon.to_bits());
        }
    }

    #[test]
    fn rank_result_json_hides_ranked_list_unless_verbose() {
        let (h, m) = reference_setup();
        let result = rank(score_all(&h, &h.edges[0], &m).unwrap(), 1, RankKey::Upsilon);
        let terse = result.to_json(false);
        assert!(terse.get("ranked").is_none());
        assert!(terse.get("bound").unwrap().get("M").is_some());
        let verbose = result.to_json(true);
        assert_eq!(verbose.get("ranked").unwrap().as_array().unwrap().len(), 6);
    }
}
