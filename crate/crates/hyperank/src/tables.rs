//! Table selection for Text-to-SQL: rank `table.column` entities by cosine
//! similarity to a natural-language question.
//!
//! Texts are embedded with a deterministic lexical vectorizer (hashed
//! character trigrams, L2-normalized) so results are hermetic. The
//! [`Vectorizer`] trait is the seam for substituting an external embedding
//! client without touching the ranking.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::s;
use crate::Scalar;

/// Number of hash buckets for trigram features.
pub const TRIGRAM_BUCKETS: u64 = 1 << 18;

/// One rankable schema entity: a table/column pair with optional context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaEntity {
    pub table: String,
    pub column: String,
    #[serde(default)]
    pub context: Option<String>,
}

impl SchemaEntity {
    pub fn new(table: &str, column: &str) -> Self {
        SchemaEntity {
            table: table.into(),
            column: column.into(),
            context: None,
        }
    }

    pub fn with_context(mut self, context: &str) -> Self {
        self.context = Some(context.into());
        self
    }

    /// The ranked text: `table.column`, plus the context when present.
    pub fn concat(&self) -> String {
        match &self.context {
            Some(ctx) => format!("{}.{} {}", self.table, self.column, ctx),
            None => format!("{}.{}", self.table, self.column),
        }
    }
}

/// Sparse L2-normalized bag of hashed character trigrams.
#[derive(Debug, Clone, PartialEq)]
pub struct LexicalVector<S: Scalar> {
    components: BTreeMap<u64, S>,
}

impl<S: Scalar> LexicalVector<S> {
    /// Build a vector from raw feature weights, dropping zeros and
    /// L2-normalizing the rest. This is the constructor for custom
    /// [`Vectorizer`] implementations.
    pub fn from_weights(weights: BTreeMap<u64, S>) -> Self {
        let norm_sq = weights.values().fold(S::zero(), |acc, &w| acc + w * w);
        if norm_sq == S::zero() {
            return LexicalVector {
                components: BTreeMap::new(),
            };
        }
        let norm = norm_sq.sqrt();
        LexicalVector {
            components: weights
                .into_iter()
                .filter(|&(_, w)| w != S::zero())
                .map(|(bucket, w)| (bucket, w / norm))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Cosine similarity; zero vectors score zero against anything.
    pub fn cosine(&self, other: &Self) -> S {
        let (small, large) = if self.components.len() <= other.components.len() {
            (&self.components, &other.components)
        } else {
            (&other.components, &self.components)
        };
        let mut dot = S::zero();
        for (bucket, &a) in small {
            if let Some(&b) = large.get(bucket) {
                dot = dot + a * b;
            }
        }
        dot
    }
}

/// Text-to-vector seam; implementations must be pure and deterministic.
pub trait Vectorizer<S: Scalar> {
    fn vectorize(&self, text: &str) -> LexicalVector<S>;
}

/// The default deterministic vectorizer: lowercase, collapse whitespace,
/// hash overlapping character trigrams (FNV-1a 64) into 2^18 buckets,
/// L2-normalize.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrigramVectorizer;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

impl<S: Scalar> Vectorizer<S> for TrigramVectorizer {
    fn vectorize(&self, text: &str) -> LexicalVector<S> {
        let normalized = text
            .to_lowercase()
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        let chars: Vec<char> = normalized.chars().collect();
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for window in chars.windows(3) {
            let gram: String = window.iter().collect();
            let bucket = fnv1a(gram.as_bytes()) % TRIGRAM_BUCKETS;
            *counts.entry(bucket).or_insert(0) += 1;
        }
        LexicalVector::from_weights(
            counts
                .into_iter()
                .map(|(bucket, c)| (bucket, s::<S>(c as f64)))
                .collect(),
        )
    }
}

/// Vectorize with the default trigram vectorizer.
pub fn vectorize<S: Scalar>(text: &str) -> LexicalVector<S> {
    Vectorizer::<S>::vectorize(&TrigramVectorizer, text)
}

/// One ranked entity with its cosine score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityScore<S: Scalar> {
    pub entity: String,
    pub score: S,
}

/// Ranking outcome; `zero_question` warns that the question produced no
/// trigrams, making every score zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedEntities<S: Scalar> {
    pub entries: Vec<EntityScore<S>>,
    pub zero_question: bool,
}

/// Rank entities by descending cosine to the question (ties by entity text)
/// and return the top k.
pub fn rank_entities<S: Scalar>(
    question: &str,
    entities: &[SchemaEntity],
    k: usize,
) -> Result<RankedEntities<S>> {
    rank_entities_with(&TrigramVectorizer, question, entities, k)
}

/// As [`rank_entities`], with a caller-supplied vectorizer.
pub fn rank_entities_with<S: Scalar, V: Vectorizer<S>>(
    vectorizer: &V,
    question: &str,
    entities: &[SchemaEntity],
    k: usize,
) -> Result<RankedEntities<S>> {
    if entities.is_empty() {
        return Err(Error::Usage("no schema entities to rank".into()));
    }
    let qv = vectorizer.vectorize(question);
    let mut entries: Vec<EntityScore<S>> = entities
        .iter()
        .map(|e| {
            let concat = e.concat();
            let score = qv.cosine(&vectorizer.vectorize(&concat));
            EntityScore {
                entity: concat,
                score,
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.entity.cmp(&b.entity))
    });
    entries.truncate(k);
    Ok(RankedEntities {
        entries,
        zero_question: qv.is_zero(),
    })
}

/// Parse a schema document: JSON array of `{"table","column","context"}`.
pub fn load_schema_entities(bytes: &[u8]) -> Result<Vec<SchemaEntity>> {
    let entities: Vec<SchemaEntity> =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    for e in &entities {
        if e.table.is_empty() || e.column.is_empty() {
            return Err(Error::Config("table and column must be non-empty".into()));
        }
    }
    Ok(entities)
}
