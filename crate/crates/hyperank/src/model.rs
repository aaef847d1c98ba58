//! Hyperstructure data model: attribute schema, metadata vectors, resource
//! nodes, task hyperedges, and whole-instance validation plus JSON I/O.
//!
//! All types are immutable after construction; nothing here mutates shared
//! state, so instances can be freely shared across threads.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

/// Role of an attribute, driving validation and feasibility direction.
///
/// * `Capacity`: more is better, a node satisfies a requirement when its
///   value is at least the requested one.
/// * `LatencyLike`: less is better, a node satisfies a requirement when its
///   value does not exceed the requested one.
/// * `Cost`: the node's price; excluded from matching dimensions and from
///   feasibility, mirrored into [`ResourceNode::weight`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttributeKind {
    Capacity,
    LatencyLike,
    Cost,
}

/// One named, unit-carrying dimension of the instance schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub unit: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn new(name: &str, unit: &str, kind: AttributeKind) -> Self {
        Attribute {
            name: name.into(),
            unit: unit.into(),
            kind,
        }
    }
}

/// Ordered sequence of attributes; every vector in an instance indexes
/// against this order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttributeSchema {
    pub attributes: Vec<Attribute>,
}

impl AttributeSchema {
    pub fn new(attributes: Vec<Attribute>) -> Self {
        AttributeSchema { attributes }
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    /// Index of the cost-kind attribute, if the schema declares one.
    pub fn cost_index(&self) -> Option<usize> {
        self.attributes
            .iter()
            .position(|a| a.kind == AttributeKind::Cost)
    }

    /// Position of a named attribute.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// Indices of the matching dimensions: every attribute except cost,
    /// in schema order.
    pub fn match_indices(&self) -> Vec<usize> {
        self.attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind != AttributeKind::Cost)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Positionally schema-aligned vector of finite numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MetadataVector<S: Scalar> {
    pub values: Vec<S>,
}

impl<S: Scalar> MetadataVector<S> {
    pub fn new(values: Vec<S>) -> Self {
        MetadataVector { values }
    }

    pub fn get(&self, index: usize) -> Option<S> {
        self.values.get(index).copied()
    }
}

impl<S: Scalar> From<Vec<S>> for MetadataVector<S> {
    fn from(values: Vec<S>) -> Self {
        MetadataVector::new(values)
    }
}

/// A vertex: resource identifier, metadata, and cost weight `w(v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceNode<S: Scalar> {
    pub id: String,
    pub metadata: MetadataVector<S>,
    pub weight: S,
}

impl<S: Scalar> ResourceNode<S> {
    pub fn new(id: &str, metadata: Vec<S>, weight: S) -> Self {
        ResourceNode {
            id: id.into(),
            metadata: metadata.into(),
            weight,
        }
    }
}

/// A hyperedge: task identifier, requirement vector, demanded count `k`,
/// and an optional explicit member set restricting the candidate nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskEdge<S: Scalar> {
    pub id: String,
    pub requirement: MetadataVector<S>,
    pub k: usize,
    pub members: Option<BTreeSet<String>>,
}

impl<S: Scalar> TaskEdge<S> {
    pub fn new(id: &str, requirement: Vec<S>, k: usize) -> Self {
        TaskEdge {
            id: id.into(),
            requirement: requirement.into(),
            k,
            members: None,
        }
    }

    pub fn with_members<I: IntoIterator<Item = String>>(mut self, members: I) -> Self {
        self.members = Some(members.into_iter().collect());
        self
    }
}

/// The hyperstructure: schema, resource nodes, and task hyperedges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypergraph<S: Scalar> {
    pub schema: AttributeSchema,
    pub nodes: Vec<ResourceNode<S>>,
    pub edges: Vec<TaskEdge<S>>,
}

impl<S: Scalar> Hypergraph<S> {
    pub fn new(
        schema: AttributeSchema,
        nodes: Vec<ResourceNode<S>>,
        edges: Vec<TaskEdge<S>>,
    ) -> Self {
        Hypergraph {
            schema,
            nodes,
            edges,
        }
    }

    pub fn node_by_id(&self, id: &str) -> Option<&ResourceNode<S>> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Candidate nodes for an edge: its members when present, otherwise all
    /// nodes. Node input order is preserved either way.
    pub fn candidates<'a>(&'a self, edge: &'a TaskEdge<S>) -> Vec<&'a ResourceNode<S>> {
        match &edge.members {
            Some(members) => self
                .nodes
                .iter()
                .filter(|n| members.contains(&n.id))
                .collect(),
            None => self.nodes.iter().collect(),
        }
    }
}

/// One invariant violation: where it was found and what is wrong.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Node id, edge id, or attribute name locating the problem.
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Validation outcome: empty means the instance is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Check every model invariant; violations are data, not faults, so this
/// never errors. An empty report means the instance is valid.
pub fn validate<S: Scalar>(h: &Hypergraph<S>) -> ValidationReport {
    let mut out = Vec::new();

    validate_schema(&h.schema, &mut out);

    let mut seen_ids = BTreeSet::new();
    for node in &h.nodes {
        let path = format!("node {}", node.id);
        if node.id.is_empty() {
            out.push(Violation::new(&path, "node id must be non-empty"));
        }
        if !seen_ids.insert(node.id.clone()) {
            out.push(Violation::new(&path, "duplicate node id"));
        }
        validate_vector(&h.schema, &node.metadata, &path, &mut out);
        if !node.weight.is_finite() || node.weight < S::zero() {
            out.push(Violation::new(
                &path,
                "weight must be finite and non-negative",
            ));
        }
        if let Some(ci) = h.schema.cost_index() {
            if node.metadata.get(ci).is_some_and(|c| c != node.weight) {
                out.push(Violation::new(
                    &path,
                    format!(
                        "weight {} does not equal cost attribute value {}",
                        node.weight,
                        node.metadata.get(ci).unwrap()
                    ),
                ));
            }
        }
    }

    let node_ids: BTreeSet<&str> = h.nodes.iter().map(|n| n.id.as_str()).collect();
    for edge in &h.edges {
        let path = format!("edge {}", edge.id);
        if edge.id.is_empty() {
            out.push(Violation::new(&path, "edge id must be non-empty"));
        }
        if edge.k == 0 {
            out.push(Violation::new(&path, "k must be ≥ 1"));
        }
        validate_vector(&h.schema, &edge.requirement, &path, &mut out);
        if let Some(members) = &edge.members {
            for m in members {
                if !node_ids.contains(m.as_str()) {
                    out.push(Violation::new(
                        &path,
                        format!("member \"{m}\" does not resolve to a node"),
                    ));
                }
            }
            if edge.k > members.len() {
                out.push(Violation::new(
                    &path,
                    format!("k = {} exceeds member count {}", edge.k, members.len()),
                ));
            }
        }
    }

    ValidationReport { violations: out }
}

fn validate_schema(schema: &AttributeSchema, out: &mut Vec<Violation>) {
    let mut names = BTreeSet::new();
    for attr in &schema.attributes {
        let path = format!("attribute {}", attr.name);
        if attr.name.is_empty() {
            out.push(Violation::new("schema", "attribute name must be non-empty"));
        }
        if !names.insert(attr.name.clone()) {
            out.push(Violation::new(&path, "duplicate attribute name"));
        }
    }
    let cost_count = schema
        .attributes
        .iter()
        .filter(|a| a.kind == AttributeKind::Cost)
        .count();
    if cost_count > 1 {
        out.push(Violation::new(
            "schema",
            format!("at most one cost attribute allowed, found {cost_count}"),
        ));
    }
}

fn validate_vector<S: Scalar>(
    schema: &AttributeSchema,
    v: &MetadataVector<S>,
    path: &str,
    out: &mut Vec<Violation>,
) {
    if v.values.len() != schema.len() {
        out.push(Violation::new(
            path,
            format!(
                "vector length {} does not match schema length {}",
                v.values.len(),
                schema.len()
            ),
        ));
        return;
    }
    for (attr, &value) in schema.attributes.iter().zip(&v.values) {
        let apath = format!("{path} / attribute {}", attr.name);
        if !value.is_finite() {
            out.push(Violation::new(&apath, "value must be finite"));
            continue;
        }
        match attr.kind {
            AttributeKind::Capacity | AttributeKind::Cost => {
                if value < S::zero() {
                    out.push(Violation::new(&apath, "value must be non-negative"));
                }
            }
            AttributeKind::LatencyLike => {
                if value <= S::zero() {
                    out.push(Violation::new(&apath, "value must be strictly positive"));
                }
            }
        }
    }
}

// Wire types: `weight` is optional on input (read from the cost attribute
// when omitted) and always present on output.

#[derive(Deserialize)]
struct RawNode<S: Scalar> {
    id: String,
    metadata: Vec<S>,
    weight: Option<S>,
}

#[derive(Deserialize)]
struct RawInstance<S: Scalar> {
    schema: AttributeSchema,
    nodes: Vec<RawNode<S>>,
    edges: Vec<TaskEdge<S>>,
}

/// Parse and validate an instance document (JSON, UTF-8).
pub fn load_instance<S: Scalar + serde::de::DeserializeOwned>(
    bytes: &[u8],
) -> Result<Hypergraph<S>> {
    let raw: RawInstance<S> =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    let cost_index = raw.schema.cost_index();
    let mut nodes = Vec::with_capacity(raw.nodes.len());
    let mut missing_weight = Vec::new();
    for rn in raw.nodes {
        let weight = match rn.weight {
            Some(w) => w,
            None => match cost_index.and_then(|ci| rn.metadata.get(ci).copied()) {
                Some(w) => w,
                None => {
                    missing_weight.push(Violation::new(
                        format!("node {}", rn.id),
                        "weight omitted and schema declares no cost attribute",
                    ));
                    S::zero()
                }
            },
        };
        nodes.push(ResourceNode {
            id: rn.id,
            metadata: rn.metadata.into(),
            weight,
        });
    }
    let h = Hypergraph {
        schema: raw.schema,
        nodes,
        edges: raw.edges,
    };
    let mut report = validate(&h);
    report.violations.splice(0..0, missing_weight);
    if report.is_empty() {
        Ok(h)
    } else {
        Err(Error::Validation(report))
    }
}

/// Serialize a valid instance canonically: object keys sorted, attribute and
/// node order preserved, floats emitted with the shortest representation that
/// reparses to the same value.
pub fn save_instance<S: Scalar + Serialize>(h: &Hypergraph<S>) -> String {
    // serde_json's default map is a BTreeMap, so routing through Value
    // sorts object keys.
    let value = serde_json::to_value(h).expect("model serializes");
    serde_json::to_string_pretty(&value).expect("value serializes")
}
