//! By-topic multinomial Naive Bayes over sentences mentioning each topic.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::logreg::sigmoid;
use super::{Blacklist, Score};
use crate::error::{Error, Result};
use crate::kb::{Dataset, Motion};
use crate::text_sim::tokenize;

/// Sentences retrieved for each topic, keyed by lowercased topic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TopicSentenceCorpus {
    by_topic: HashMap<String, Vec<String>>,
}

#[derive(Deserialize)]
struct SentenceRecord {
    topic: String,
    sentence: String,
}

impl TopicSentenceCorpus {
    pub fn new<I, S, T>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: Into<String>,
    {
        let mut by_topic: HashMap<String, Vec<String>> = HashMap::new();
        for (topic, sentence) in records {
            let sentence = sentence.into();
            if sentence.trim().is_empty() {
                return Err(Error::validation(topic.as_ref(), "empty sentence"));
            }
            by_topic
                .entry(topic.as_ref().to_lowercase())
                .or_default()
                .push(sentence);
        }
        Ok(TopicSentenceCorpus { by_topic })
    }

    /// Reads JSON lines of `{"topic": ..., "sentence": ...}`; blank lines are
    /// skipped.
    pub fn read(reader: impl BufRead, context: &str) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let parse_err = |message: String| Error::Parse {
                context: format!("{context}:{}", i + 1),
                message,
            };
            let line = line.map_err(|e| parse_err(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let r: SentenceRecord = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
            records.push((r.topic, r.sentence));
        }
        Self::new(records)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(file), &path.display().to_string())
    }

    pub fn sentences(&self, topic: &str) -> &[String] {
        self.by_topic
            .get(&topic.to_lowercase())
            .map_or(&[], Vec::as_slice)
    }
}

/// Log-probabilities of one CoPA's positive and negative sentence classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbClassModel {
    pub log_prior_pos: f64,
    pub log_prior_neg: f64,
    /// Aligned with [`NbModel::vocabulary`].
    pub log_prob_pos: Vec<f64>,
    pub log_prob_neg: Vec<f64>,
}

impl NbClassModel {
    /// `P(pos | sentence)`; out-of-vocabulary tokens are ignored.
    fn posterior(&self, tokens: &[usize]) -> f64 {
        let lp = self.log_prior_pos + tokens.iter().map(|&t| self.log_prob_pos[t]).sum::<f64>();
        let ln = self.log_prior_neg + tokens.iter().map(|&t| self.log_prob_neg[t]).sum::<f64>();
        match (lp.is_finite(), ln.is_finite()) {
            (true, true) => sigmoid(lp - ln),
            (false, true) => 0.0,
            (true, false) => 1.0,
            (false, false) => 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub alpha: f64,
    pub vocabulary: BTreeMap<String, usize>,
    pub copa_ids: Vec<String>,
    /// `None` when the training motions had no sentences at all.
    pub classes: Option<Vec<NbClassModel>>,
    pub blacklist: Blacklist,
}

impl NbModel {
    pub fn copa_ids(&self) -> &[String] {
        &self.copa_ids
    }

    fn encode(&self, sentence: &str) -> Vec<usize> {
        tokenize(sentence)
            .iter()
            .filter_map(|t| self.vocabulary.get(t).copied())
            .collect()
    }
}

/// Trains one positive-vs-negative model per CoPA: sentences of member
/// motions are positive, those of all other training motions negative.
pub fn train_nb(ds: &Dataset, corpus: &TopicSentenceCorpus, alpha: f64) -> Result<NbModel> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Domain(format!(
            "smoothing alpha must be positive, got {alpha}"
        )));
    }
    let mut vocabulary = BTreeMap::new();
    for m in ds.motions() {
        for s in corpus.sentences(&m.topic) {
            for t in tokenize(s) {
                vocabulary.entry(t).or_insert(0);
            }
        }
    }
    for (i, v) in vocabulary.values_mut().enumerate() {
        *v = i;
    }
    let v = vocabulary.len();

    // token counts and sentence counts per training motion
    let per_motion: Vec<(Vec<f64>, usize)> = ds
        .motions()
        .iter()
        .map(|m| {
            let mut counts = vec![0.0; v];
            let sentences = corpus.sentences(&m.topic);
            for s in sentences {
                for t in tokenize(s) {
                    counts[vocabulary[&t]] += 1.0;
                }
            }
            (counts, sentences.len())
        })
        .collect();
    let total_sentences: usize = per_motion.iter().map(|(_, n)| n).sum();

    let classes = if total_sentences == 0 {
        None
    } else {
        let mut total_counts = vec![0.0; v];
        for (c, _) in &per_motion {
            total_counts.iter_mut().zip(c).for_each(|(t, x)| *t += x);
        }
        let built = (0..ds.copas().len())
            .into_par_iter()
            .map(|c| {
                let mut pos = vec![0.0; v];
                let mut n_pos = 0usize;
                for (m, (counts, n)) in per_motion.iter().enumerate() {
                    if ds.is_match_at(m, c) {
                        pos.iter_mut().zip(counts).for_each(|(p, x)| *p += x);
                        n_pos += n;
                    }
                }
                let neg: Vec<f64> = total_counts.iter().zip(&pos).map(|(t, p)| t - p).collect();
                let log_probs = |counts: &[f64]| {
                    let denom = (counts.iter().sum::<f64>() + alpha * v as f64).ln();
                    counts
                        .iter()
                        .map(|x| (x + alpha).ln() - denom)
                        .collect::<Vec<_>>()
                };
                let n_neg = total_sentences - n_pos;
                let ln_total = (total_sentences as f64).ln();
                NbClassModel {
                    log_prior_pos: (n_pos as f64).ln() - ln_total,
                    log_prior_neg: (n_neg as f64).ln() - ln_total,
                    log_prob_pos: log_probs(&pos),
                    log_prob_neg: log_probs(&neg),
                }
            })
            .collect();
        Some(built)
    };

    Ok(NbModel {
        alpha,
        vocabulary,
        copa_ids: ds.copas().iter().map(|c| c.id.clone()).collect(),
        classes,
        blacklist: Blacklist::from_dataset(ds),
    })
}

/// Mean per-sentence posterior over the motion's sentences; abstains when the
/// topic has none.
pub fn predict_nb(model: &NbModel, motion: &Motion, corpus: &TopicSentenceCorpus) -> Vec<Score> {
    let sentences = corpus.sentences(&motion.topic);
    let Some(classes) = model.classes.as_ref().filter(|_| !sentences.is_empty()) else {
        return vec![Score::Abstain; model.copa_ids.len()];
    };
    let encoded: Vec<Vec<usize>> = sentences.iter().map(|s| model.encode(s)).collect();
    model
        .copa_ids
        .iter()
        .zip(classes)
        .map(|(c, cls)| {
            if model.blacklist.blocks(c, &motion.action) {
                return Score::Value(0.0);
            }
            let mean = encoded.iter().map(|t| cls.posterior(t)).sum::<f64>() / encoded.len() as f64;
            Score::Value(mean.clamp(0.0, 1.0))
        })
        .collect()
}
