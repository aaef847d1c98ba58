//! Shared test oracles, independent of the implementation paths they check.

/// Per-function arithmetic for the five reference matching dimensions,
/// spelled out long-hand: cpu ratio, ram saturation, log storage ratio,
/// shifted bandwidth ratio, inverse latency.
pub(crate) fn reference_oracle(node: [f64; 5], task: [f64; 5]) -> f64 {
    let cpu = node[0].min(task[0]) / node[0].max(task[0]);
    let ram = if node[1] >= task[1] {
        1.0
    } else {
        node[1] / task[1]
    };
    let storage = (1.0 + node[2].min(task[2])).ln() / (1.0 + node[2].max(task[2])).ln();
    let bandwidth = node[3] / (task[3] + 1.0);
    let latency = 1.0 / (1.0 + node[4] / task[4]);
    cpu + ram + storage + bandwidth + latency
}

/// Oracle scores of the six reference nodes against the reference task.
pub(crate) fn reference_scores() -> [f64; 6] {
    let mut out = [0.0; 6];
    for (i, node) in crate::fixtures::REFERENCE_NODES.iter().enumerate() {
        out[i] = reference_oracle(*node, crate::fixtures::REFERENCE_TASK);
    }
    out
}
