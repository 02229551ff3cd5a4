//! By-topic nearest neighbours over training motions.

use serde::{Deserialize, Serialize};

use super::Score;
use crate::kb::{Dataset, Motion};
use crate::text_sim::{term_similarity, SimContext, SimKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub kind: SimKind,
    /// Neighbours need similarity strictly above this.
    pub threshold: f64,
    pub min_neighbors: usize,
    pub top: usize,
    /// Ignore training motions sharing the query's topic.
    pub exclude_same_topic: bool,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams {
            kind: SimKind::Embedding,
            threshold: 0.5,
            min_neighbors: 3,
            top: 5,
            exclude_same_topic: true,
        }
    }
}

/// Scores each CoPA by the fraction of the query's nearest training motions
/// that belong to it. The query motion itself (by id) is never a neighbour.
pub fn predict_knn(ds: &Dataset, motion: &Motion, ctx: &SimContext, params: &KnnParams) -> Vec<Score> {
    let mut candidates: Vec<(f64, usize)> = ds
        .motions()
        .iter()
        .enumerate()
        .filter(|(_, m)| m.id != motion.id)
        .filter(|(_, m)| !(params.exclude_same_topic && m.topic == motion.topic))
        .filter_map(|(i, m)| {
            term_similarity(params.kind, &motion.topic, &m.topic, ctx)
                .filter(|&s| s > params.threshold)
                .map(|s| (s, i))
        })
        .collect();
    if candidates.len() < params.min_neighbors || candidates.is_empty() {
        return vec![Score::Abstain; ds.copas().len()];
    }
    let motions = ds.motions();
    candidates.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then_with(|| motions[a.1].id.cmp(&motions[b.1].id))
    });
    candidates.truncate(params.top);
    let n = candidates.len() as f64;
    (0..ds.copas().len())
        .map(|c| {
            let hits = candidates.iter().filter(|&&(_, m)| ds.is_match_at(m, c)).count();
            Score::Value(hits as f64 / n)
        })
        .collect()
}
