//! By-topic logistic regression over topic embeddings, one model per CoPA.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::logreg::{logreg_fit, sigmoid, LogRegParams};
use super::{Blacklist, Score};
use crate::error::Result;
use crate::kb::{Dataset, Motion};
use crate::text_sim::{embed_term, EmbeddingStore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct W2vModel {
    /// Always `one_vs_rest`.
    pub scheme: String,
    pub params: LogRegParams,
    pub copa_ids: Vec<String>,
    /// `None` when no training topic could be embedded.
    pub models: Option<Vec<LinearModel>>,
    pub blacklist: Blacklist,
}

pub fn train_w2v_lr(ds: &Dataset, store: &EmbeddingStore, params: &LogRegParams) -> Result<W2vModel> {
    let embedded: Vec<(usize, Vec<f64>)> = ds
        .motions()
        .iter()
        .enumerate()
        .filter_map(|(i, m)| embed_term(store, &m.topic).map(|v| (i, v)))
        .collect();
    let x: Vec<&[f64]> = embedded.iter().map(|(_, v)| v.as_slice()).collect();
    let models = if embedded.is_empty() {
        None
    } else {
        let fits = (0..ds.copas().len())
            .into_par_iter()
            .map(|c| {
                let y: Vec<bool> = embedded.iter().map(|&(m, _)| ds.is_match_at(m, c)).collect();
                logreg_fit(&x, &y, params).map(|f| LinearModel {
                    weights: f.weights,
                    bias: f.bias,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Some(fits)
    };
    Ok(W2vModel {
        scheme: "one_vs_rest".into(),
        params: params.clone(),
        copa_ids: ds.copas().iter().map(|c| c.id.clone()).collect(),
        models,
        blacklist: Blacklist::from_dataset(ds),
    })
}

/// Abstains for every CoPA when the topic cannot be embedded.
pub fn predict_w2v(model: &W2vModel, motion: &Motion, store: Option<&EmbeddingStore>) -> Vec<Score> {
    let abstain = || vec![Score::Abstain; model.copa_ids.len()];
    let (Some(models), Some(store)) = (&model.models, store) else {
        return abstain();
    };
    let Some(x) = embed_term(store, &motion.topic) else {
        return abstain();
    };
    model
        .copa_ids
        .iter()
        .zip(models)
        .map(|(c, lm)| {
            if model.blacklist.blocks(c, &motion.action) {
                Score::Value(0.0)
            } else {
                Score::Value(lm.score(&x))
            }
        })
        .collect()
}
