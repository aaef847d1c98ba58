//! The semantic-operator family: per-attribute matching functions, weighted
//! metric sets, the composite score `(v ⊗ e)`, the triangle-inequality
//! envelope `M`, and meet/join operator composition.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AttributeKind, AttributeSchema, ResourceNode, TaskEdge};
use crate::Scalar;

/// Per-attribute matching function between a node value and a task value.
///
/// All registry functions are oriented as similarities (higher is better);
/// `AbsDiff` is a distance and therefore evaluates to the negated absolute
/// difference. `ExactIndicator` is a degenerate helper for tests and edge
/// scenarios rather than a production matcher.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchFunction {
    /// `min(n, t) / max(n, t)` — closeness ratio in (0, 1].
    #[serde(rename = "ratio-minmax")]
    RatioMinMax,
    /// `1` when `n ≥ t`, else `n / t` — capacity satisfaction in (0, 1].
    #[serde(rename = "saturating-ratio")]
    SaturatingRatio,
    /// `ln(1 + min(n, t)) / ln(1 + max(n, t))` — log-compressed ratio.
    #[serde(rename = "log-ratio")]
    LogRatio,
    /// `n / (t + 1)` — shifted throughput ratio, unbounded above.
    #[serde(rename = "bandwidth-shift")]
    BandwidthShift,
    /// `1 / (1 + n / t)` — inverse latency score in (0, 1).
    #[serde(rename = "latency-inverse")]
    LatencyInverse,
    /// `-|n - t|` — negated distance so that higher still means better.
    #[serde(rename = "abs-diff")]
    AbsDiff,
    /// `1` when `n == t`, else `0`.
    #[serde(rename = "exact-indicator")]
    ExactIndicator,
}

impl MatchFunction {
    pub const ALL: [MatchFunction; 7] = [
        MatchFunction::RatioMinMax,
        MatchFunction::SaturatingRatio,
        MatchFunction::LogRatio,
        MatchFunction::BandwidthShift,
        MatchFunction::LatencyInverse,
        MatchFunction::AbsDiff,
        MatchFunction::ExactIndicator,
    ];

    pub fn id(self) -> &'static str {
        match self {
            MatchFunction::RatioMinMax => "ratio-minmax",
            MatchFunction::SaturatingRatio => "saturating-ratio",
            MatchFunction::LogRatio => "log-ratio",
            MatchFunction::BandwidthShift => "bandwidth-shift",
            MatchFunction::LatencyInverse => "latency-inverse",
            MatchFunction::AbsDiff => "abs-diff",
            MatchFunction::ExactIndicator => "exact-indicator",
        }
    }

    fn domain_error<S: Scalar>(self, node: S, task: S, why: &str) -> Error {
        Error::Domain(format!(
            "{} undefined for node_value={node}, task_value={task}: {why}",
            self.id()
        ))
    }

    /// Evaluate the closed form on one node/task value pair.
    pub fn eval<S: Scalar>(self, node: S, task: S) -> Result<S> {
        if !node.is_finite() || !task.is_finite() {
            return Err(self.domain_error(node, task, "inputs must be finite"));
        }
        let zero = S::zero();
        let one = S::one();
        match self {
            MatchFunction::RatioMinMax => {
                if node < zero || task < zero {
                    return Err(self.domain_error(node, task, "inputs must be non-negative"));
                }
                if node == zero && task == zero {
                    return Err(self.domain_error(node, task, "both inputs zero"));
                }
                Ok(node.min(task) / node.max(task))
            }
            MatchFunction::SaturatingRatio => {
                if node < zero || task < zero {
                    return Err(self.domain_error(node, task, "inputs must be non-negative"));
                }
                if node >= task {
                    Ok(one)
                } else {
                    Ok(node / task)
                }
            }
            MatchFunction::LogRatio => {
                if node <= zero || task <= zero {
                    return Err(self.domain_error(node, task, "inputs must be positive"));
                }
                Ok((one + node.min(task)).ln() / (one + node.max(task)).ln())
            }
            MatchFunction::BandwidthShift => {
                if node < zero || task < zero {
                    return Err(self.domain_error(node, task, "inputs must be non-negative"));
                }
                Ok(node / (task + one))
            }
            MatchFunction::LatencyInverse => {
                if node <= zero || task <= zero {
                    return Err(self.domain_error(node, task, "inputs must be positive"));
                }
                Ok(one / (one + node / task))
            }
            MatchFunction::AbsDiff => Ok(-(node - task).abs()),
            MatchFunction::ExactIndicator => Ok(if node == task { one } else { zero }),
        }
    }
}

impl fmt::Display for MatchFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for MatchFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MatchFunction::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown match function \"{s}\"")))
    }
}

/// One weighted matching dimension: attribute name, function, weight μ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricEntry<S: Scalar> {
    pub attribute: String,
    pub function: MatchFunction,
    pub mu: S,
}

/// The operator family Ω: the weighted matching functions that make up the
/// composite score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MetricEntry<S>>", into = "Vec<MetricEntry<S>>")]
#[serde(bound(
    serialize = "S: Serialize + Clone",
    deserialize = "S: serde::de::DeserializeOwned"
))]
pub struct MetricSet<S: Scalar> {
    entries: Vec<MetricEntry<S>>,
}

impl<S: Scalar> MetricSet<S> {
    pub fn new(entries: Vec<MetricEntry<S>>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for e in &entries {
            if !seen.insert(e.attribute.clone()) {
                return Err(Error::Config(format!(
                    "metric set repeats attribute \"{}\"",
                    e.attribute
                )));
            }
            if !e.mu.is_finite() || e.mu < S::zero() {
                return Err(Error::Config(format!(
                    "weight for \"{}\" must be finite and non-negative",
                    e.attribute
                )));
            }
        }
        if !entries.iter().any(|e| e.mu > S::zero()) {
            return Err(Error::Config(
                "metric set needs at least one positive weight".into(),
            ));
        }
        Ok(MetricSet { entries })
    }

    pub fn entries(&self) -> &[MetricEntry<S>] {
        &self.entries
    }

    /// Scale every weight by a positive constant.
    pub fn scaled(&self, factor: S) -> Result<Self> {
        if !factor.is_finite() || factor <= S::zero() {
            return Err(Error::Config(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        MetricSet::new(
            self.entries
                .iter()
                .map(|e| MetricEntry {
                    attribute: e.attribute.clone(),
                    function: e.function,
                    mu: e.mu * factor,
                })
                .collect(),
        )
    }

    /// Resolve every entry against a schema, rejecting unknown attributes
    /// and the cost dimension (cost is never a matching dimension).
    fn resolve(&self, schema: &AttributeSchema) -> Result<Vec<(usize, MatchFunction, S)>> {
        self.entries
            .iter()
            .map(|e| {
                let idx = schema.index_of(&e.attribute).ok_or_else(|| {
                    Error::Config(format!("attribute \"{}\" not in schema", e.attribute))
                })?;
                if schema.attributes[idx].kind == AttributeKind::Cost {
                    return Err(Error::Config(format!(
                        "cost attribute \"{}\" cannot be a matching dimension",
                        e.attribute
                    )));
                }
                Ok((idx, e.function, e.mu))
            })
            .collect()
    }
}

impl<S: Scalar> TryFrom<Vec<MetricEntry<S>>> for MetricSet<S> {
    type Error = Error;

    fn try_from(entries: Vec<MetricEntry<S>>) -> Result<Self> {
        MetricSet::new(entries)
    }
}

impl<S: Scalar> From<MetricSet<S>> for Vec<MetricEntry<S>> {
    fn from(m: MetricSet<S>) -> Self {
        m.entries
    }
}

/// The composite score `(v ⊗ e) = Σᵢ μᵢ·fᵢ(vᵢ, eᵢ)` over the metric set's
/// dimensions. Pure and deterministic.
pub fn tensor<S: Scalar>(
    schema: &AttributeSchema,
    node: &ResourceNode<S>,
    edge: &TaskEdge<S>,
    metric: &MetricSet<S>,
) -> Result<S> {
    let resolved = metric.resolve(schema)?;
    let mut total = S::zero();
    for (idx, f, mu) in resolved {
        let nv = node.metadata.get(idx).ok_or_else(|| {
            Error::Config(format!("node {} metadata shorter than schema", node.id))
        })?;
        let tv = edge.requirement.get(idx).ok_or_else(|| {
            Error::Config(format!("edge {} requirement shorter than schema", edge.id))
        })?;
        total = total + mu * f.eval(nv, tv)?;
    }
    Ok(total)
}

/// The absolute-value counterpart `Σᵢ μᵢ·|fᵢ(vᵢ, eᵢ)|` for one node.
pub fn abs_tensor<S: Scalar>(
    schema: &AttributeSchema,
    node: &ResourceNode<S>,
    edge: &TaskEdge<S>,
    metric: &MetricSet<S>,
) -> Result<S> {
    let resolved = metric.resolve(schema)?;
    let mut total = S::zero();
    for (idx, f, mu) in resolved {
        let nv = node.metadata.get(idx).ok_or_else(|| {
            Error::Config(format!("node {} metadata shorter than schema", node.id))
        })?;
        let tv = edge.requirement.get(idx).ok_or_else(|| {
            Error::Config(format!("edge {} requirement shorter than schema", edge.id))
        })?;
        total = total + mu * f.eval(nv, tv)?.abs();
    }
    Ok(total)
}

/// The triangle-inequality envelope `M = max_v Σᵢ μᵢ·|fᵢ(v, e)|` over the
/// selected nodes, as used in the bound `α ≤ k·M·C*(e)`.
pub fn bound_m<S: Scalar>(
    schema: &AttributeSchema,
    edge: &TaskEdge<S>,
    selected: &[&ResourceNode<S>],
    metric: &MetricSet<S>,
) -> Result<S> {
    if selected.is_empty() {
        return Err(Error::Usage("bound M needs a non-empty selection".into()));
    }
    let mut best = S::neg_infinity();
    for node in selected {
        let value = abs_tensor(schema, node, edge, metric)?;
        if value > best {
            best = value;
        }
    }
    Ok(best)
}

/// Named metric presets accepted wherever a metric configuration is expected.
pub mod presets {
    use super::*;

    /// The five reference matching functions with unit weights, bound to the
    /// schema's non-cost attributes in order: ratio-minmax, saturating-ratio,
    /// log-ratio, bandwidth-shift, latency-inverse.
    pub fn appendix<S: Scalar>(schema: &AttributeSchema) -> Result<MetricSet<S>> {
        const ORDER: [MatchFunction; 5] = [
            MatchFunction::RatioMinMax,
            MatchFunction::SaturatingRatio,
            MatchFunction::LogRatio,
            MatchFunction::BandwidthShift,
            MatchFunction::LatencyInverse,
        ];
        let idx = schema.match_indices();
        if idx.len() != ORDER.len() {
            return Err(Error::Config(format!(
                "appendix preset needs exactly 5 matching attributes, schema has {}",
                idx.len()
            )));
        }
        MetricSet::new(
            idx.iter()
                .zip(ORDER)
                .map(|(&i, function)| MetricEntry {
                    attribute: schema.attributes[i].name.clone(),
                    function,
                    mu: S::one(),
                })
                .collect(),
        )
    }

    /// Scheduling preset over the {cpu, ram, exec_time, cost} schema:
    /// cpu uses ratio-minmax, ram uses saturating-ratio, and exec_time uses
    /// latency-inverse so that shorter relative execution is preferred.
    /// Unit weights throughout.
    pub fn scheduling<S: Scalar>(schema: &AttributeSchema) -> Result<MetricSet<S>> {
        let wanted = [
            ("cpu", MatchFunction::RatioMinMax),
            ("ram", MatchFunction::SaturatingRatio),
            ("exec_time", MatchFunction::LatencyInverse),
        ];
        let entries = wanted
            .iter()
            .map(|(name, function)| {
                schema.index_of(name).ok_or_else(|| {
                    Error::Config(format!("scheduling preset needs attribute \"{name}\""))
                })?;
                Ok(MetricEntry {
                    attribute: (*name).into(),
                    function: *function,
                    mu: S::one(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MetricSet::new(entries)
    }

    /// Look a preset up by name.
    pub fn by_name<S: Scalar>(name: &str, schema: &AttributeSchema) -> Result<MetricSet<S>> {
        match name {
            "appendix" => appendix(schema),
            "scheduling" => scheduling(schema),
            other => Err(Error::Config(format!("unknown metric preset \"{other}\""))),
        }
    }
}

type UnaryFn<S> = Arc<dyn Fn(S) -> Result<S> + Send + Sync>;

/// Composable unary operator on the scalar pipeline value.
///
/// `meet(f, g)` applies f after g (contractive direction); `join(f, g)`
/// applies g after f (expansive direction). Identity is the unit of both.
#[derive(Clone)]
pub enum Composed<S: Scalar> {
    Identity,
    Leaf { name: String, f: UnaryFn<S> },
    Meet(Box<Composed<S>>, Box<Composed<S>>),
    Join(Box<Composed<S>>, Box<Composed<S>>),
}

impl<S: Scalar> Composed<S> {
    pub fn func(name: &str, f: impl Fn(S) -> Result<S> + Send + Sync + 'static) -> Self {
        Composed::Leaf {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// Lift a matching function into the pipeline by fixing its task value.
    pub fn match_fn(function: MatchFunction, task_value: S) -> Self {
        Composed::func(function.id(), move |x| function.eval(x, task_value))
    }

    pub fn meet(left: Composed<S>, right: Composed<S>) -> Self {
        Composed::Meet(Box::new(left), Box::new(right))
    }

    pub fn join(left: Composed<S>, right: Composed<S>) -> Self {
        Composed::Join(Box::new(left), Box::new(right))
    }

    /// Evaluate the composition at `x`. Inner domain violations propagate
    /// with the composition path prepended.
    pub fn apply(&self, x: S) -> Result<S> {
        match self {
            Composed::Identity => Ok(x),
            Composed::Leaf { name, f } => f(x).map_err(|e| Error::Domain(format!("{name}: {e}"))),
            Composed::Meet(f, g) => {
                let inner = g
                    .apply(x)
                    .map_err(|e| Error::Domain(format!("meet.right: {e}")))?;
                f.apply(inner)
                    .map_err(|e| Error::Domain(format!("meet.left: {e}")))
            }
            Composed::Join(f, g) => {
                let inner = f
                    .apply(x)
                    .map_err(|e| Error::Domain(format!("join.left: {e}")))?;
                g.apply(inner)
                    .map_err(|e| Error::Domain(format!("join.right: {e}")))
            }
        }
    }
}

impl<S: Scalar> fmt::Debug for Composed<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Composed::Identity => write!(f, "identity"),
            Composed::Leaf { name, .. } => write!(f, "{name}"),
            Composed::Meet(a, b) => write!(f, "meet({a:?}, {b:?})"),
            Composed::Join(a, b) => write!(f, "join({a:?}, {b:?})"),
        }
    }
}
