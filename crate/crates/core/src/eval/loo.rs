use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ThresholdGrid;
use crate::classifiers::{ensemble, Method, MethodConfig, Resources, Score, ScoreMatrix, TrainedMethod};
use crate::error::{Error, Result};
use crate::kb::{Copa, Dataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub methods: Vec<Method>,
    pub method_config: MethodConfig,
    /// Topic-based methods only score topic-related CoPAs at least this big.
    pub min_topic_copa_size: usize,
    pub exclude_general: bool,
    pub thresholds: ThresholdGrid,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            methods: Method::ALL.to_vec(),
            method_config: MethodConfig::default(),
            min_topic_copa_size: 10,
            exclude_general: false,
            thresholds: ThresholdGrid::default(),
        }
    }
}

/// Whether `method` is evaluated on `copa`. BA handles its own support rule
/// by abstaining.
pub fn eligible(method: Method, copa: &Copa, config: &EvalConfig) -> bool {
    if method.is_topic_based() {
        copa.topic_related && copa.motion_ids.len() >= config.min_topic_copa_size
    } else {
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LooOutput {
    /// One matrix per configured method, in configuration order.
    pub matrices: Vec<ScoreMatrix>,
    /// Max-ensemble of `matrices`.
    pub ensemble: ScoreMatrix,
}

impl LooOutput {
    /// Method matrices followed by the ensemble.
    pub fn all(&self) -> impl Iterator<Item = &ScoreMatrix> {
        self.matrices.iter().chain(std::iter::once(&self.ensemble))
    }
}

/// Retrains every configured method once per motion on the remaining
/// motions and scores the left-out motion. Folds run in parallel; the
/// result does not depend on scheduling.
pub fn leave_one_out(ds: &Dataset, config: &EvalConfig, res: &Resources) -> Result<LooOutput> {
    if ds.motions().len() < 2 {
        return Err(Error::Domain("leave-one-out needs at least two motions".into()));
    }
    if config.methods.is_empty() {
        return Err(Error::Domain("no methods configured".into()));
    }
    for &m in &config.methods {
        if let Some(what) = res.missing_for(m) {
            return Err(Error::Domain(format!("method `{m}` needs {what}")));
        }
    }
    let masks: Vec<Vec<bool>> = config
        .methods
        .iter()
        .map(|&m| ds.copas().iter().map(|c| eligible(m, c, config)).collect())
        .collect();

    let rows: Vec<Vec<Vec<Score>>> = ds
        .motions()
        .par_iter()
        .map(|motion| {
            let fold = |e: Error| Error::Fold {
                motion: motion.id.clone(),
                source: Box::new(e),
            };
            let train = ds.without_motion(&motion.id).map_err(fold)?;
            config
                .methods
                .iter()
                .zip(&masks)
                .map(|(&method, mask)| {
                    let trained =
                        TrainedMethod::train(method, &train, &config.method_config, res).map_err(fold)?;
                    let scores = trained.score(motion, ds, res, Some(&motion.id));
                    Ok(scores
                        .into_iter()
                        .zip(mask)
                        .map(|(s, &ok)| if ok { s } else { Score::Abstain })
                        .collect())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut matrices: Vec<ScoreMatrix> = config
        .methods
        .iter()
        .map(|m| ScoreMatrix::for_dataset(m.tag(), ds))
        .collect();
    for (mi, per_method) in rows.iter().enumerate() {
        for (matrix, row) in matrices.iter_mut().zip(per_method) {
            matrix.set_row(mi, row)?;
        }
    }
    let ensemble = ensemble(&matrices)?;
    Ok(LooOutput { matrices, ensemble })
}
