//! A single logistic-regression pair classifier over engineered
//! (motion, CoPA) features.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::logreg::{logreg_fit, sigmoid, LogRegParams};
use super::Score;
use crate::error::{Error, Result};
use crate::features::{
    feature_ordering, features_from_sets, CopaTextSets, FeatureVector, MotionTextSets, Standardizer,
    FEATURE_COUNT,
};
use crate::kb::{Dataset, Motion};
use crate::text_sim::SimContext;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureLrModel {
    pub feature_ordering: String,
    pub params: LogRegParams,
    pub standardizer: Standardizer,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl FeatureLrModel {
    pub fn score_features(&self, f: &FeatureVector) -> f64 {
        let x = self.standardizer.transform(f.as_slice());
        sigmoid(self.weights.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>() + self.bias)
    }
}

/// Feature vectors of every (training motion, CoPA) pair with labels.
///
/// Each training motion is held out of its own features, so training pairs
/// see the same counts a left-out motion would.
pub fn training_pairs(ds: &Dataset, ctx: &SimContext) -> Vec<(FeatureVector, bool)> {
    ds.motions()
        .par_iter()
        .enumerate()
        .flat_map_iter(|(mi, m)| {
            let msets = MotionTextSets::new(m, ds, ctx);
            ds.copas()
                .iter()
                .enumerate()
                .map(move |(ci, c)| {
                    let csets = CopaTextSets::new(c, ds, Some(m));
                    let f = features_from_sets(m, c, ds, ctx, &msets, &csets, Some(&m.id));
                    (f, ds.is_match_at(mi, ci))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn train_feature_lr(ds: &Dataset, ctx: &SimContext, params: &LogRegParams) -> Result<FeatureLrModel> {
    let pairs = training_pairs(ds, ctx);
    fit_on_pairs(&pairs, params)
}

/// Standardizes and fits on precomputed pairs.
pub fn fit_on_pairs(pairs: &[(FeatureVector, bool)], params: &LogRegParams) -> Result<FeatureLrModel> {
    if pairs.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let raw: Vec<&[f64]> = pairs.iter().map(|(f, _)| f.as_slice()).collect();
    let standardizer = Standardizer::fit(&raw)?;
    let x: Vec<Vec<f64>> = raw.iter().map(|r| standardizer.transform(r)).collect();
    let y: Vec<bool> = pairs.iter().map(|(_, l)| *l).collect();
    let fit = logreg_fit(&x, &y, params)?;
    debug_assert_eq!(fit.weights.len(), FEATURE_COUNT);
    Ok(FeatureLrModel {
        feature_ordering: feature_ordering(),
        params: params.clone(),
        standardizer,
        weights: fit.weights,
        bias: fit.bias,
    })
}

/// Scores `motion` against every CoPA of `ds`; never abstains.
pub fn predict_feature_lr(
    model: &FeatureLrModel,
    motion: &Motion,
    ds: &Dataset,
    ctx: &SimContext,
    holdout: Option<&str>,
) -> Vec<Score> {
    let msets = MotionTextSets::new(motion, ds, ctx);
    let held = holdout.and_then(|id| ds.motion(id));
    ds.copas()
        .iter()
        .map(|c| {
            let csets = CopaTextSets::new(c, ds, held);
            let f = features_from_sets(motion, c, ds, ctx, &msets, &csets, holdout);
            Score::Value(model.score_features(&f))
        })
        .collect()
}
