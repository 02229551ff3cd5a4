//! Layered configuration: TOML file, then `COPA_*` environment variables,
//! then command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use copa_core::classifiers::{KnnParams, LogRegParams, Method, MethodConfig};
use copa_core::eval::{EvalConfig, ThresholdGrid};
use copa_core::text_sim::SimKind;
use serde::Deserialize;

use crate::failure::{Failure, Outcome};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub dataset: Option<PathBuf>,
    /// Extra actions accepted by `match` and `invent` besides the dataset's.
    pub actions: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub alt_embeddings: Option<PathBuf>,
    pub sentences: Option<PathBuf>,
    pub wiki: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyper {
    pub ba_k: usize,
    pub knn_threshold: f64,
    pub knn_min_neighbors: usize,
    pub knn_top: usize,
    pub nb_alpha: f64,
    pub lambda: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub threshold_steps: usize,
    pub min_topic_copa_size: usize,
}

impl Default for Hyper {
    fn default() -> Self {
        let m = MethodConfig::default();
        Hyper {
            ba_k: m.ba_k,
            knn_threshold: m.knn.threshold,
            knn_min_neighbors: m.knn.min_neighbors,
            knn_top: m.knn.top,
            nb_alpha: m.nb_alpha,
            lambda: m.logreg.lambda,
            tol: m.logreg.tol,
            max_iters: m.logreg.max_iters,
            threshold_steps: 100,
            min_topic_copa_size: EvalConfig::default().min_topic_copa_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Flags {
    pub exclude_general: bool,
    pub methods: Vec<String>,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            exclude_general: false,
            methods: Method::ALL.iter().map(|m| m.tag().to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub paths: Paths,
    pub hyper: Hyper,
    pub flags: Flags,
}

/// Command-line values that take precedence over file and environment.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub exclude_general: bool,
    pub method: Option<String>,
}

impl AppConfig {
    /// Reads `path` if given, applies `COPA_*` entries of `env` and then
    /// `overrides`, and validates the result.
    pub fn load(path: Option<&Path>, env: &BTreeMap<String, String>, overrides: &Overrides) -> Outcome<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Failure::config(format!("{}: {e}", p.display())))?;
                let mut cfg: AppConfig =
                    toml::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", p.display())))?;
                let base = p.parent().unwrap_or(Path::new(""));
                cfg.paths.resolve_against(base);
                cfg
            }
            None => AppConfig::default(),
        };
        cfg.apply_env(env)?;
        if overrides.exclude_general {
            cfg.flags.exclude_general = true;
        }
        if let Some(m) = &overrides.method {
            if m != "ensemble" {
                cfg.flags.methods = vec![m.clone()];
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_env(&mut self, env: &BTreeMap<String, String>) -> Outcome<()> {
        for (key, value) in env {
            let Some(name) = key.strip_prefix("COPA_") else {
                continue;
            };
            let path = || (!value.is_empty()).then(|| PathBuf::from(value));
            let h = &mut self.hyper;
            match name {
                "DATASET" => self.paths.dataset = path(),
                "ACTIONS" => self.paths.actions = path(),
                "EMBEDDINGS" => self.paths.embeddings = path(),
                "ALT_EMBEDDINGS" => self.paths.alt_embeddings = path(),
                "SENTENCES" => self.paths.sentences = path(),
                "WIKI" => self.paths.wiki = path(),
                "BA_K" => h.ba_k = parse(key, value)?,
                "KNN_THRESHOLD" => h.knn_threshold = parse(key, value)?,
                "KNN_MIN_NEIGHBORS" => h.knn_min_neighbors = parse(key, value)?,
                "KNN_TOP" => h.knn_top = parse(key, value)?,
                "NB_ALPHA" => h.nb_alpha = parse(key, value)?,
                "LAMBDA" => h.lambda = parse(key, value)?,
                "TOL" => h.tol = parse(key, value)?,
                "MAX_ITERS" => h.max_iters = parse(key, value)?,
                "THRESHOLD_STEPS" => h.threshold_steps = parse(key, value)?,
                "MIN_TOPIC_COPA_SIZE" => h.min_topic_copa_size = parse(key, value)?,
                "EXCLUDE_GENERAL" => self.flags.exclude_general = parse(key, value)?,
                "METHODS" => {
                    self.flags.methods = value
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect()
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn validate(&self) -> Outcome<()> {
        let h = &self.hyper;
        let checks: [(bool, &str); 9] = [
            (h.ba_k >= 1, "ba_k must be at least 1"),
            (
                (0.0..=1.0).contains(&h.knn_threshold),
                "knn_threshold must lie in [0, 1]",
            ),
            (h.knn_min_neighbors >= 1, "knn_min_neighbors must be at least 1"),
            (
                h.knn_top >= h.knn_min_neighbors,
                "knn_top must be at least knn_min_neighbors",
            ),
            (
                h.nb_alpha > 0.0 && h.nb_alpha.is_finite(),
                "nb_alpha must be positive",
            ),
            (
                h.lambda >= 0.0 && h.lambda.is_finite(),
                "lambda must be non-negative",
            ),
            (h.tol > 0.0 && h.tol.is_finite(), "tol must be positive"),
            (h.max_iters >= 1, "max_iters must be at least 1"),
            (h.threshold_steps >= 1, "threshold_steps must be at least 1"),
        ];
        if let Some((_, msg)) = checks.iter().find(|(ok, _)| !ok) {
            return Err(Failure::config(msg));
        }
        if self.flags.methods.is_empty() {
            return Err(Failure::config("no methods configured"));
        }
        self.methods().map(|_| ())
    }

    pub fn methods(&self) -> Outcome<Vec<Method>> {
        let mut out: Vec<Method> = Vec::new();
        for name in &self.flags.methods {
            let m = Method::from_str(name).map_err(Failure::config)?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        Ok(out)
    }

    pub fn method_config(&self) -> MethodConfig {
        let h = &self.hyper;
        MethodConfig {
            ba_k: h.ba_k,
            knn: KnnParams {
                kind: SimKind::Embedding,
                threshold: h.knn_threshold,
                min_neighbors: h.knn_min_neighbors,
                top: h.knn_top,
                exclude_same_topic: true,
            },
            nb_alpha: h.nb_alpha,
            logreg: LogRegParams {
                lambda: h.lambda,
                tol: h.tol,
                max_iters: h.max_iters,
            },
        }
    }

    pub fn eval_config(&self) -> Outcome<EvalConfig> {
        Ok(EvalConfig {
            methods: self.methods()?,
            method_config: self.method_config(),
            min_topic_copa_size: self.hyper.min_topic_copa_size,
            exclude_general: self.flags.exclude_general,
            thresholds: ThresholdGrid::uniform(self.hyper.threshold_steps).map_err(Failure::config)?,
        })
    }

    pub fn dataset_path(&self) -> Outcome<&Path> {
        self.paths
            .dataset
            .as_deref()
            .ok_or_else(|| Failure::config("no dataset path configured (paths.dataset or COPA_DATASET)"))
    }
}

impl Paths {
    fn resolve_against(&mut self, base: &Path) {
        for p in [
            &mut self.dataset,
            &mut self.actions,
            &mut self.embeddings,
            &mut self.alt_embeddings,
            &mut self.sentences,
            &mut self.wiki,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Outcome<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Failure::config(format!("{key}: cannot parse `{value}`")))
}
