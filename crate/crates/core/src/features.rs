//! The 17-dimensional (motion, CoPA) feature vector and its standardization.
//!
//! Ordering is fixed: twelve set similarities (pair-major, measure-minor over
//! the pairs `(m_t,c_m) (m_t,c_t) (m_w,c_m) (m_w,c_t)` and measures
//! `emb emb_alt tfidf`), the in-article idf feature, then four count ratios.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::{Copa, Dataset, Motion};
use crate::text_sim::{avg_idf_in_article, set_similarity, SimContext, SimKind};

pub const FEATURE_COUNT: usize = 17;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "sim_emb_mt_cm",
    "sim_emb_alt_mt_cm",
    "sim_tfidf_mt_cm",
    "sim_emb_mt_ct",
    "sim_emb_alt_mt_ct",
    "sim_tfidf_mt_ct",
    "sim_emb_mw_cm",
    "sim_emb_alt_mw_cm",
    "sim_tfidf_mw_cm",
    "sim_emb_mw_ct",
    "sim_emb_alt_mw_ct",
    "sim_tfidf_mw_ct",
    "avg_idf_cm_in_article",
    "action_share",
    "action_copa_jaccard",
    "copa_given_action",
    "action_given_copa",
];

/// Comma-joined [`FEATURE_NAMES`]; recorded in saved models.
pub fn feature_ordering() -> String {
    FEATURE_NAMES.join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn action_share(&self) -> f64 {
        self.0[13]
    }

    pub fn jaccard(&self) -> f64 {
        self.0[14]
    }

    pub fn copa_given_action(&self) -> f64 {
        self.0[15]
    }

    pub fn action_given_copa(&self) -> f64 {
        self.0[16]
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotionTextSets {
    /// Action surface form and topic.
    pub m_t: Vec<String>,
    /// Up to ten enriched Wikipedia titles of the topic.
    pub m_w: Vec<String>,
}

impl MotionTextSets {
    pub fn new(motion: &Motion, ds: &Dataset, ctx: &SimContext) -> Self {
        let surface = ds.actions().surface(&motion.action).to_string();
        let mut m_t = vec![surface];
        if m_t[0] != motion.topic {
            m_t.push(motion.topic.clone());
        }
        MotionTextSets {
            m_t,
            m_w: ctx.related_titles(&motion.topic),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopaTextSets {
    pub c_m: Vec<String>,
    /// Distinct member topics, without the held-out motion's topic.
    pub c_t: Vec<String>,
}

impl CopaTextSets {
    pub fn new(copa: &Copa, ds: &Dataset, holdout: Option<&Motion>) -> Self {
        let c_t: BTreeSet<String> = copa
            .motion_ids
            .iter()
            .filter_map(|id| ds.motion(id))
            .filter(|m| holdout.is_none_or(|h| m.id != h.id && m.topic != h.topic))
            .map(|m| m.topic.clone())
            .collect();
        CopaTextSets {
            c_m: copa.manual_titles.clone(),
            c_t: c_t.into_iter().collect(),
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// The four count ratios, with `holdout` removed from every motion set.
pub fn count_features(motion: &Motion, copa: &Copa, ds: &Dataset, holdout: Option<&str>) -> [f64; 4] {
    let kept = |id: &str| holdout != Some(id);
    let all = ds.motions().iter().filter(|m| kept(&m.id)).count();
    let same_action: BTreeSet<&str> = ds
        .motions()
        .iter()
        .filter(|m| m.action == motion.action && kept(&m.id))
        .map(|m| m.id.as_str())
        .collect();
    let in_copa: BTreeSet<&str> = copa
        .motion_ids
        .iter()
        .map(String::as_str)
        .filter(|id| kept(id))
        .collect();
    let inter = same_action.intersection(&in_copa).count();
    let union = same_action.len() + in_copa.len() - inter;
    [
        ratio(same_action.len(), all),
        ratio(inter, union),
        ratio(inter, same_action.len()),
        ratio(inter, in_copa.len()),
    ]
}

/// Features from precomputed text sets; see [`compute_features`].
pub fn features_from_sets(
    motion: &Motion,
    copa: &Copa,
    ds: &Dataset,
    ctx: &SimContext,
    motion_sets: &MotionTextSets,
    copa_sets: &CopaTextSets,
    holdout: Option<&str>,
) -> FeatureVector {
    let mut f = [0.0; FEATURE_COUNT];
    let pairs: [(&[String], &[String]); 4] = [
        (&motion_sets.m_t, &copa_sets.c_m),
        (&motion_sets.m_t, &copa_sets.c_t),
        (&motion_sets.m_w, &copa_sets.c_m),
        (&motion_sets.m_w, &copa_sets.c_t),
    ];
    for (p, (a, b)) in pairs.iter().enumerate() {
        for (k, kind) in SimKind::ALL.iter().enumerate() {
            f[p * 3 + k] = set_similarity(*kind, a, b, ctx);
        }
    }
    f[12] = match (&ctx.wiki, &ctx.tfidf) {
        (Some(w), Some(t)) => avg_idf_in_article(&copa.manual_titles, &motion.topic, w, t),
        _ => 0.0,
    };
    f[13..].copy_from_slice(&count_features(motion, copa, ds, holdout));
    FeatureVector(f)
}

/// Feature vector of a (motion, CoPA) pair.
///
/// With `loo_holdout`, that motion is dropped from every count and its topic
/// from the CoPA's member topics.
pub fn compute_features(
    motion: &Motion,
    copa: &Copa,
    ds: &Dataset,
    ctx: &SimContext,
    loo_holdout: Option<&str>,
) -> FeatureVector {
    let holdout = loo_holdout.and_then(|id| ds.motion(id));
    let motion_sets = MotionTextSets::new(motion, ds, ctx);
    let copa_sets = CopaTextSets::new(copa, ds, holdout);
    features_from_sets(motion, copa, ds, ctx, &motion_sets, &copa_sets, loo_holdout)
}

/// Per-feature mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Features whose deviation is at or below this are treated as constant.
pub const STD_FLOOR: f64 = 1e-9;

impl Standardizer {
    pub fn fit<V: AsRef<[f64]>>(rows: &[V]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyTrainingSet)?;
        let dim = first.as_ref().len();
        let mut mean = vec![0.0; dim];
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            mean.iter_mut().zip(r).for_each(|(m, x)| *m += x);
        }
        let n = rows.len() as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for r in rows {
            for ((v, x), m) in var.iter_mut().zip(r.as_ref()).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let std = var.into_iter().map(|v| (v / n).sqrt()).collect();
        Ok(Standardizer { mean, std })
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| if *s <= STD_FLOOR { 0.0 } else { (x - m) / s })
            .collect()
    }
}
