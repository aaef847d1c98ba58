//! Hypergraph ranking toolkit for top-k resource allocation and task scheduling.
//!
//! Resources are vertices of a hypergraph carrying a metadata vector and a cost
//! weight; tasks are hyperedges carrying a requirement vector and a demanded
//! count `k`. A family of per-attribute matching functions combines node and
//! task metadata into a composite score `(v ⊗ e) = Σ μᵢ·fᵢ(vᵢ, eᵢ)`, and the
//! relevance key `Υ(v, e) = (v ⊗ e) / w(v)` divides by the node's cost. For
//! each task the engine ranks all candidate nodes and selects the top-k,
//! reporting the total cost alongside the approximation-bound diagnostics
//! `α ≤ k·M·C*(e)` where `M = max_v Σ μᵢ·|fᵢ|`.
//!
//! The score relation also induces a partial order on `(node, edge, operator)`
//! triples. [`poset`] materializes that order as a dependency DAG and ranks it
//! by topological sort. [`baselines`] provides exact and naive reference
//! allocators, [`sched`] the task-scheduling application with Round Robin /
//! FCFS / SJF comparisons, [`tables`] a table-selection demo over lexical
//! vectors, and [`mod@bench`] a seeded instance generator plus experiment
//! harnesses with deterministic CSV/JSON emission.
//!
//! All score math is generic over the scalar type via [`Scalar`] (f32 or
//! f64); the concrete pipeline uses [`Score`] (= f64).

pub mod baselines;
pub mod bench;
pub mod error;
pub mod fixtures;
pub mod metrics;
pub mod model;
pub mod parallel;
pub mod poset;
pub mod rank;
pub mod sched;
pub mod tables;

mod scalar;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Scalar type used by the concrete pipeline (instances, CLI, benchmarks).
pub type Score = f64;

/// Hypergraph instantiated at the default scalar.
pub type Instance = model::Hypergraph<Score>;
