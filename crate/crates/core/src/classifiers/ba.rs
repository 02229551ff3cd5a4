//! By-action matching: the empirical probability that a motion with a given
//! action belongs to each CoPA, withheld when support is below `k`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Score;
use crate::error::{Error, Result};
use crate::kb::{Dataset, Motion};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaModel {
    pub k: usize,
    pub copa_ids: Vec<String>,
    /// Training motions per action, `|M_a|`.
    pub action_totals: BTreeMap<String, usize>,
    /// `n(c, a)`: training motions in CoPA `c` with action `a`, keyed by
    /// CoPA then action.
    pub support: BTreeMap<String, BTreeMap<String, usize>>,
}

impl BaModel {
    pub fn support(&self, copa: &str, action: &str) -> usize {
        self.support
            .get(copa)
            .and_then(|m| m.get(action))
            .copied()
            .unwrap_or(0)
    }

    /// `p(c, a) = n(c, a) / |M_a|`, or `None` when no training motion has
    /// action `a`.
    pub fn probability(&self, copa: &str, action: &str) -> Option<f64> {
        let total = self.action_totals.get(action).copied().filter(|&t| t > 0)?;
        Some(self.support(copa, action) as f64 / total as f64)
    }
}

pub fn train_ba(ds: &Dataset, k: usize) -> Result<BaModel> {
    if k == 0 {
        return Err(Error::Domain("BA support threshold k must be at least 1".into()));
    }
    let mut action_totals = BTreeMap::new();
    for m in ds.motions() {
        *action_totals.entry(m.action.to_string()).or_insert(0) += 1;
    }
    let support = ds
        .copas()
        .iter()
        .map(|c| {
            let mut per_action = BTreeMap::new();
            for m in c.motion_ids.iter().filter_map(|id| ds.motion(id)) {
                *per_action.entry(m.action.to_string()).or_insert(0) += 1;
            }
            (c.id.clone(), per_action)
        })
        .collect();
    Ok(BaModel {
        k,
        copa_ids: ds.copas().iter().map(|c| c.id.clone()).collect(),
        action_totals,
        support,
    })
}

pub fn predict_ba(model: &BaModel, motion: &Motion) -> Vec<Score> {
    let action = motion.action.as_str();
    model
        .copa_ids
        .iter()
        .map(|c| match model.probability(c, action) {
            Some(p) if model.support(c, action) >= model.k => Score::Value(p),
            _ => Score::Abstain,
        })
        .collect()
}
