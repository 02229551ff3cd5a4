//! Motion/CoPA matching methods. Each produces, for one motion, a score in
//! `[0, 1]` or an explicit abstention per CoPA, aligned with
//! [`Dataset::copas`].

mod ba;
mod ensemble;
mod feature_lr;
mod knn;
pub mod logreg;
mod nb;
mod persist;
mod w2v;

pub use ba::{predict_ba, train_ba, BaModel};
pub use ensemble::{ensemble, ensemble_scores};
pub use feature_lr::{predict_feature_lr, train_feature_lr, FeatureLrModel};
pub use knn::{predict_knn, KnnParams};
pub use logreg::{logreg_fit, LogRegFit, LogRegParams};
pub use nb::{predict_nb, train_nb, NbModel, TopicSentenceCorpus};
pub use persist::SavedModel;
pub use w2v::{predict_w2v, train_w2v_lr, W2vModel};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::{ActionId, Dataset, Motion};
use crate::text_sim::SimContext;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Score {
    Value(f64),
    Abstain,
}

impl Score {
    pub fn value(self) -> Option<f64> {
        match self {
            Score::Value(v) => Some(v),
            Score::Abstain => None,
        }
    }

    /// Abstentions never pass any threshold.
    pub fn passes(self, threshold: f64) -> bool {
        matches!(self, Score::Value(v) if v >= threshold)
    }
}

/// Scores for every (motion, CoPA) pair, row-major by motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub method: String,
    pub motion_ids: Vec<String>,
    pub copa_ids: Vec<String>,
    scores: Vec<Score>,
}

impl ScoreMatrix {
    pub fn abstaining(method: impl Into<String>, motion_ids: Vec<String>, copa_ids: Vec<String>) -> Self {
        let scores = vec![Score::Abstain; motion_ids.len() * copa_ids.len()];
        ScoreMatrix {
            method: method.into(),
            motion_ids,
            copa_ids,
            scores,
        }
    }

    /// Empty matrix over every motion and CoPA of a dataset.
    pub fn for_dataset(method: impl Into<String>, ds: &Dataset) -> Self {
        Self::abstaining(
            method,
            ds.motions().iter().map(|m| m.id.clone()).collect(),
            ds.copas().iter().map(|c| c.id.clone()).collect(),
        )
    }

    pub fn get(&self, motion: usize, copa: usize) -> Score {
        self.scores[motion * self.copa_ids.len() + copa]
    }

    /// Sets an entry. Values are checked to lie in `[0, 1]`.
    pub fn set(&mut self, motion: usize, copa: usize, score: Score) -> Result<()> {
        if let Score::Value(v) = score {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!(
                    "score {v} for ({}, {}) outside [0, 1]",
                    self.motion_ids[motion], self.copa_ids[copa]
                )));
            }
        }
        let n = self.copa_ids.len();
        self.scores[motion * n + copa] = score;
        Ok(())
    }

    pub fn set_row(&mut self, motion: usize, row: &[Score]) -> Result<()> {
        if row.len() != self.copa_ids.len() {
            return Err(Error::DimensionMismatch {
                expected: self.copa_ids.len(),
                got: row.len(),
            });
        }
        for (c, s) in row.iter().enumerate() {
            self.set(motion, c, *s)?;
        }
        Ok(())
    }

    pub fn row(&self, motion: usize) -> &[Score] {
        let n = self.copa_ids.len();
        &self.scores[motion * n..(motion + 1) * n]
    }

    pub fn n_motions(&self) -> usize {
        self.motion_ids.len()
    }

    pub fn n_copas(&self) -> usize {
        self.copa_ids.len()
    }
}

/// Per-CoPA actions never seen among the CoPA's training motions.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Blacklist {
    blocked: BTreeMap<String, BTreeSet<ActionId>>,
    known: BTreeSet<ActionId>,
}

impl Blacklist {
    pub fn from_dataset(ds: &Dataset) -> Self {
        let known: BTreeSet<ActionId> = ds.actions().iter().map(|a| a.id.clone()).collect();
        let blocked = ds
            .copas()
            .iter()
            .map(|c| {
                let seen: BTreeSet<&ActionId> = c
                    .motion_ids
                    .iter()
                    .filter_map(|id| ds.motion(id))
                    .map(|m| &m.action)
                    .collect();
                let blocked = known.iter().filter(|a| !seen.contains(a)).cloned().collect();
                (c.id.clone(), blocked)
            })
            .collect();
        Blacklist { blocked, known }
    }

    /// Whether `action` is barred from `copa`. Actions unknown at training
    /// time have no motions in any CoPA and are always barred.
    pub fn blocks(&self, copa: &str, action: &ActionId) -> bool {
        !self.known.contains(action) || self.blocked.get(copa).is_some_and(|b| b.contains(action))
    }

    pub fn blocked(&self, copa: &str) -> Option<&BTreeSet<ActionId>> {
        self.blocked.get(copa)
    }
}

/// The individually trained matching methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ba,
    Knn,
    W2v,
    Nb,
    Lr,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Ba, Method::Knn, Method::W2v, Method::Nb, Method::Lr];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Ba => "ba",
            Method::Knn => "knn",
            Method::W2v => "w2v",
            Method::Nb => "nb",
            Method::Lr => "lr",
        }
    }

    /// Methods driven by the motion topic alone.
    pub fn is_topic_based(self) -> bool {
        matches!(self, Method::Knn | Method::W2v | Method::Nb)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub ba_k: usize,
    pub knn: KnnParams,
    pub nb_alpha: f64,
    pub logreg: LogRegParams,
}

impl Default for MethodConfig {
    fn default() -> Self {
        MethodConfig {
            ba_k: 5,
            knn: KnnParams::default(),
            nb_alpha: 1.0,
            logreg: LogRegParams::default(),
        }
    }
}

/// Inputs shared by the methods besides the dataset.
#[derive(Debug, Clone, Copy)]
pub struct Resources<'a> {
    pub sim: &'a SimContext,
    pub sentences: Option<&'a TopicSentenceCorpus>,
}

impl Resources<'_> {
    /// Explains why `method` cannot run on these resources, if it cannot.
    pub fn missing_for(&self, method: Method) -> Option<&'static str> {
        match method {
            Method::Ba | Method::Lr => None,
            Method::Knn if self.sim.embeddings.is_none() => Some("embeddings"),
            Method::W2v if self.sim.embeddings.is_none() => Some("embeddings"),
            Method::Nb if self.sentences.is_none() => Some("sentence corpus"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum TrainedMethod {
    Ba(BaModel),
    Knn(KnnParams),
    W2v(W2vModel),
    Nb(NbModel),
    Lr(FeatureLrModel),
}

impl TrainedMethod {
    pub fn train(method: Method, ds: &Dataset, cfg: &MethodConfig, res: &Resources) -> Result<Self> {
        if let Some(what) = res.missing_for(method) {
            return Err(Error::Domain(format!("method `{method}` needs {what}")));
        }
        Ok(match method {
            Method::Ba => TrainedMethod::Ba(train_ba(ds, cfg.ba_k)?),
            Method::Knn => TrainedMethod::Knn(cfg.knn.clone()),
            Method::W2v => TrainedMethod::W2v(train_w2v_lr(
                ds,
                res.sim.embeddings.as_ref().expect("checked above"),
                &cfg.logreg,
            )?),
            Method::Nb => {
                TrainedMethod::Nb(train_nb(ds, res.sentences.expect("checked above"), cfg.nb_alpha)?)
            }
            Method::Lr => TrainedMethod::Lr(train_feature_lr(ds, res.sim, &cfg.logreg)?),
        })
    }

    /// Scores `motion` against every CoPA of `ds`.
    ///
    /// `ds` is the full dataset and `holdout` the id of a motion to treat as
    /// unseen. Instance-based methods (KNN, LR features) read neighbours and
    /// counts from `ds` with the holdout removed; the other methods use only
    /// their trained state.
    pub fn score(&self, motion: &Motion, ds: &Dataset, res: &Resources, holdout: Option<&str>) -> Vec<Score> {
        match self {
            TrainedMethod::Ba(m) => predict_ba(m, motion),
            TrainedMethod::Knn(p) => {
                let mut p = p.clone();
                p.exclude_same_topic = p.exclude_same_topic && holdout.is_some();
                predict_knn(ds, motion, res.sim, &p)
            }
            TrainedMethod::W2v(m) => predict_w2v(m, motion, res.sim.embeddings.as_ref()),
            TrainedMethod::Nb(m) => match res.sentences {
                Some(corpus) => predict_nb(m, motion, corpus),
                None => vec![Score::Abstain; m.copa_ids().len()],
            },
            TrainedMethod::Lr(m) => predict_feature_lr(m, motion, ds, res.sim, holdout),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::fixtures::dataset;

    #[test]
    fn abstain_never_passes() {
        assert!(!Score::Abstain.passes(0.0));
        assert!(!Score::Abstain.passes(f64::NEG_INFINITY));
        assert!(Score::Value(0.0).passes(0.0));
        assert!(!Score::Value(0.49).passes(0.5));
    }

    #[test]
    fn matrix_rejects_out_of_range() {
        let mut m = ScoreMatrix::abstaining("x", vec!["m".into()], vec!["c".into()]);
        assert!(m.set(0, 0, Score::Value(1.5)).is_err());
        m.set(0, 0, Score::Value(1.0)).unwrap();
        assert_eq!(m.row(0), &[Score::Value(1.0)]);
    }

    #[test]
    fn blacklist_tracks_unseen_actions() {
        let ds = dataset(
            &["ban", "legalize", "subsidize"],
            &[("m1", "ban", "a"), ("m2", "legalize", "b"), ("m3", "ban", "c")],
            &["c1", "c2"],
            &[("m1", "c1"), ("m2", "c2"), ("m3", "c2")],
        );
        let b = Blacklist::from_dataset(&ds);
        let id = |s: &str| ActionId::parse(s).unwrap();
        assert!(!b.blocks("c1", &id("ban")));
        assert!(b.blocks("c1", &id("legalize")));
        assert!(b.blocks("c1", &id("subsidize")));
        assert!(!b.blocks("c2", &id("legalize")));
        assert!(b.blocks("c2", &id("disband")));
    }

    #[test]
    fn method_parsing() {
        assert_eq!("KNN".parse::<Method>().unwrap(), Method::Knn);
        assert!("rnn".parse::<Method>().is_err());
    }
}
