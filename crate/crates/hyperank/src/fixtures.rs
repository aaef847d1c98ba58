//! Small built-in instances used by tests, docs, and CLI examples.

use crate::model::{Attribute, AttributeKind, AttributeSchema, Hypergraph, ResourceNode, TaskEdge};
use crate::scalar::s;
use crate::Scalar;

/// Schema of the six-node reference instance: five matching attributes
/// (cpu, ram, storage, bandwidth, latency) plus cost.
pub fn reference_schema() -> AttributeSchema {
    AttributeSchema::new(vec![
        Attribute::new("cpu", "cores", AttributeKind::Capacity),
        Attribute::new("ram", "GiB", AttributeKind::Capacity),
        Attribute::new("storage", "TB", AttributeKind::Capacity),
        Attribute::new("bandwidth", "Mbps", AttributeKind::Capacity),
        Attribute::new("latency", "ms", AttributeKind::LatencyLike),
        Attribute::new("cost", "units", AttributeKind::Cost),
    ])
}

/// Matching-dimension metadata of the six reference nodes, in node order.
pub const REFERENCE_NODES: [[f64; 5]; 6] = [
    [16.0, 32.0, 2.0, 500.0, 10.0],
    [8.0, 16.0, 1.0, 300.0, 20.0],
    [32.0, 64.0, 4.0, 800.0, 5.0],
    [4.0, 8.0, 0.5, 150.0, 30.0],
    [12.0, 24.0, 1.5, 400.0, 15.0],
    [64.0, 128.0, 8.0, 1000.0, 2.0],
];

/// Cost weights assigned to the six reference nodes (n1 through n6).
pub const REFERENCE_WEIGHTS: [f64; 6] = [200.0, 120.0, 350.0, 80.0, 180.0, 500.0];

/// Matching-dimension requirement of the reference task.
pub const REFERENCE_TASK: [f64; 5] = [16.0, 32.0, 2.0, 500.0, 10.0];

/// The six-node reference instance with a single task edge demanding `k`
/// resources. Node ids are `n1` through `n6`, the edge id is `t1`.
pub fn six_node_instance<S: Scalar>(k: usize) -> Hypergraph<S> {
    let nodes = REFERENCE_NODES
        .iter()
        .zip(REFERENCE_WEIGHTS)
        .enumerate()
        .map(|(i, (meta, w))| {
            let mut values: Vec<S> = meta.iter().map(|&x| s(x)).collect();
            values.push(s(w));
            ResourceNode::new(&format!("n{}", i + 1), values, s(w))
        })
        .collect();
    let mut requirement: Vec<S> = REFERENCE_TASK.iter().map(|&x| s(x)).collect();
    requirement.push(S::zero());
    Hypergraph::new(
        reference_schema(),
        nodes,
        vec![TaskEdge::new("t1", requirement, k)],
    )
}

/// Same instance with all node weights set to one, so the cost division
/// leaves raw composite scores unchanged.
pub fn six_node_unit_weights<S: Scalar>(k: usize) -> Hypergraph<S> {
    let mut h = six_node_instance::<S>(k);
    let ci = h.schema.cost_index().unwrap();
    for node in &mut h.nodes {
        node.weight = S::one();
        node.metadata.values[ci] = S::one();
    }
    h
}
