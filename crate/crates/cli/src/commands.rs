//! Subcommand implementations. Each returns the text to print, so output
//! is produced in one place and stays byte-stable.

use std::path::Path;

use copa_core::classifiers::{ensemble_scores, Method, Resources, Score, TopicSentenceCorpus, TrainedMethod};
use copa_core::eval::{self, report};
use copa_core::features::{compute_features, FEATURE_NAMES};
use copa_core::kb::{
    build_syllogism, copa_stats, instantiate_claim, Action, ActionId, ActionRegistry, Dataset, Motion,
    Stance, SyllogismOptions,
};
use copa_core::text_sim::{EmbeddingStore, SimContext, WikiCorpus};
use serde::Serialize;

use crate::config::AppConfig;
use crate::failure::{Failure, Outcome};

/// Id given to the ad-hoc motion of `match`.
pub const QUERY_ID: &str = "__query__";

/// Which optional stores a command needs.
#[derive(Debug, Clone, Copy, Default)]
struct Needs {
    embeddings: bool,
    alt_embeddings: bool,
    wiki: bool,
    sentences: bool,
}

impl Needs {
    fn for_methods(methods: &[Method]) -> Self {
        let mut n = Needs::default();
        for m in methods {
            match m {
                Method::Ba => {}
                Method::Knn | Method::W2v => n.embeddings = true,
                Method::Nb => n.sentences = true,
                Method::Lr => n = n.features(),
            }
        }
        n
    }

    fn features(self) -> Self {
        Needs {
            embeddings: true,
            alt_embeddings: true,
            wiki: true,
            ..self
        }
    }
}

struct Loaded {
    ds: Dataset,
    sim: SimContext,
    sentences: Option<TopicSentenceCorpus>,
}

impl Loaded {
    /// Loads the dataset and each needed store whose path is configured.
    /// Methods missing a required store are reported by the caller.
    fn new(cfg: &AppConfig, needs: Needs) -> Outcome<Self> {
        let ds = Dataset::load(cfg.dataset_path()?)?;
        let mut sim = SimContext::new();
        let p = &cfg.paths;
        if let (true, Some(path)) = (needs.embeddings, &p.embeddings) {
            sim = sim.with_embeddings(EmbeddingStore::load(path)?);
        }
        if let (true, Some(path)) = (needs.alt_embeddings, &p.alt_embeddings) {
            sim = sim.with_alt_embeddings(EmbeddingStore::load(path)?);
        }
        if let (true, Some(path)) = (needs.wiki, &p.wiki) {
            sim = sim.with_wiki(WikiCorpus::load(path)?);
        }
        let sentences = match (needs.sentences, &p.sentences) {
            (true, Some(path)) => Some(TopicSentenceCorpus::load(path)?),
            _ => None,
        };
        Ok(Loaded { ds, sim, sentences })
    }

    fn resources(&self) -> Resources<'_> {
        Resources {
            sim: &self.sim,
            sentences: self.sentences.as_ref(),
        }
    }

    fn check(&self, methods: &[Method]) -> Outcome<()> {
        let res = self.resources();
        for &m in methods {
            if let Some(what) = res.missing_for(m) {
                return Err(Failure::config(format!(
                    "method `{m}` needs {what}, which is not configured"
                )));
            }
        }
        Ok(())
    }
}

/// The dataset's actions plus those of the configured registry file.
fn action_registry(cfg: &AppConfig, ds: &Dataset) -> Outcome<ActionRegistry> {
    let mut actions: Vec<Action> = ds.actions().iter().cloned().collect();
    if let Some(path) = &cfg.paths.actions {
        for a in ActionRegistry::load(path)?.iter() {
            if !ds.actions().contains(&a.id) {
                actions.push(a.clone());
            }
        }
    }
    Ok(ActionRegistry::new(actions)?)
}

fn query_motion(registry: &ActionRegistry, action: &str, topic: &str) -> Outcome<Motion> {
    let id = ActionId::parse(action).map_err(Failure::domain)?;
    if !registry.contains(&id) {
        return Err(Failure::domain(format!("unknown action `{action}`")));
    }
    if topic.trim().is_empty() {
        return Err(Failure::domain("empty topic"));
    }
    Ok(Motion {
        id: QUERY_ID.to_string(),
        action: id,
        topic: topic.to_string(),
    })
}

#[derive(Debug, Serialize)]
struct StatsOut {
    motions: usize,
    copas: usize,
    labels: usize,
    exclude_general: bool,
    stats: copa_core::kb::CopaStats,
    baselines: report::Baselines,
}

pub fn stats(cfg: &AppConfig) -> Outcome<String> {
    let ds = Dataset::load(cfg.dataset_path()?)?;
    let out = StatsOut {
        motions: ds.motions().len(),
        copas: ds.copas().len(),
        labels: ds.labels().len(),
        exclude_general: cfg.flags.exclude_general,
        stats: copa_stats(&ds, cfg.flags.exclude_general),
        baselines: report::Baselines {
            all: eval::baseline_largest(&ds, false),
            excluding_general: eval::baseline_largest(&ds, true),
        },
    };
    Ok(json(&out))
}

#[derive(Debug, Serialize)]
pub struct MatchedCopa {
    pub copa: String,
    pub name: String,
    pub score: f64,
    pub pro: String,
    pub con: String,
}

#[derive(Debug, Serialize)]
struct MatchOut<'a> {
    action: &'a str,
    topic: &'a str,
    method: &'a str,
    threshold: f64,
    matches: Vec<MatchedCopa>,
}

/// Ranks CoPAs for an unseen motion. `method` is a method tag or
/// `ensemble` (all configured methods).
pub fn matching(cfg: &AppConfig, action: &str, topic: &str, method: &str, threshold: f64) -> Outcome<String> {
    if !threshold.is_finite() {
        return Err(Failure::config("threshold must be a number"));
    }
    let methods = cfg.methods()?;
    let loaded = Loaded::new(cfg, Needs::for_methods(&methods))?;
    loaded.check(&methods)?;
    let registry = action_registry(cfg, &loaded.ds)?;
    let motion = query_motion(&registry, action, topic)?;
    let scores = match_scores(cfg, &loaded, &methods, &motion)?;
    let ds = &loaded.ds;
    let mut matches: Vec<MatchedCopa> = ds
        .copas()
        .iter()
        .zip(&scores)
        .filter(|(c, s)| s.passes(threshold) && !(cfg.flags.exclude_general && ds.is_general(&c.id)))
        .map(|(c, s)| MatchedCopa {
            copa: c.id.clone(),
            name: c.name.clone(),
            score: s.value().expect("passing scores have values"),
            pro: instantiate_claim(c.claim(Stance::Pro).expect("two claims"), &motion),
            con: instantiate_claim(c.claim(Stance::Con).expect("two claims"), &motion),
        })
        .collect();
    matches.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.copa.cmp(&b.copa)));
    Ok(json(&MatchOut {
        action,
        topic,
        method,
        threshold,
        matches,
    }))
}

/// Scores of `motion` under each configured method, max-combined.
fn match_scores(
    cfg: &AppConfig,
    loaded: &Loaded,
    methods: &[Method],
    motion: &Motion,
) -> Outcome<Vec<Score>> {
    let eval_cfg = cfg.eval_config()?;
    let res = loaded.resources();
    let mut rows = Vec::new();
    for &m in methods {
        let trained = TrainedMethod::train(m, &loaded.ds, &eval_cfg.method_config, &res)?;
        let row: Vec<Score> = trained
            .score(motion, &loaded.ds, &res, None)
            .into_iter()
            .zip(loaded.ds.copas())
            .map(|(s, c)| {
                if eval::eligible(m, c, &eval_cfg) {
                    s
                } else {
                    Score::Abstain
                }
            })
            .collect();
        rows.push(row);
    }
    let refs: Vec<&[Score]> = rows.iter().map(Vec::as_slice).collect();
    Ok(ensemble_scores(&refs))
}

pub struct InventArgs<'a> {
    pub action: &'a str,
    pub topic: &'a str,
    pub copa: &'a str,
    pub stance: Stance,
    pub minor: Option<String>,
    pub lead: Option<String>,
}

pub fn invent(cfg: &AppConfig, args: InventArgs) -> Outcome<String> {
    let ds = Dataset::load(cfg.dataset_path()?)?;
    let registry = action_registry(cfg, &ds)?;
    let motion = query_motion(&registry, args.action, args.topic)?;
    let copa = ds
        .copas()
        .iter()
        .find(|c| c.id == args.copa || c.name.eq_ignore_ascii_case(args.copa))
        .ok_or_else(|| Failure::domain(format!("unknown CoPA `{}`", args.copa)))?;
    let options = SyllogismOptions {
        minor_override: args.minor,
        conclusion_lead: args.lead,
    };
    let s = build_syllogism(&motion, copa, args.stance, &registry, &options)?;
    Ok(format!("{s}\n"))
}

/// One row per (motion, CoPA); each motion is held out of its own counts
/// and topic sets, as during training.
pub fn features(cfg: &AppConfig) -> Outcome<String> {
    let loaded = Loaded::new(cfg, Needs::default().features())?;
    let ds = &loaded.ds;
    let mut out = FEATURE_NAMES.join(",");
    out.push_str(",motion_id,copa_id,label\n");
    for m in ds.motions() {
        for c in ds.copas() {
            let f = compute_features(m, c, ds, &loaded.sim, Some(&m.id));
            for v in f.as_slice() {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!(
                "{},{},{}\n",
                m.id,
                c.id,
                u8::from(ds.is_match(&m.id, &c.id))
            ));
        }
    }
    Ok(out)
}

/// Runs leave-one-out and writes one CSV per method and curve type, a
/// long-format score table and `summary.json` into `out_dir`.
pub fn evaluate(cfg: &AppConfig, out_dir: &Path) -> Outcome<Vec<std::path::PathBuf>> {
    let eval_cfg = cfg.eval_config()?;
    let loaded = Loaded::new(cfg, Needs::for_methods(&eval_cfg.methods))?;
    loaded.check(&eval_cfg.methods)?;
    let out = eval::leave_one_out(&loaded.ds, &eval_cfg, &loaded.resources())?;
    let rep = report::build_report(&loaded.ds, &out, &eval_cfg);

    let mut files: Vec<(String, String)> = Vec::new();
    for m in &rep.methods {
        files.push((format!("pr_{}.csv", m.method), report::pr_csv([m])));
        files.push((format!("p_at_1_{}.csv", m.method), report::p_at_1_csv([m])));
    }
    files.push(("scores.csv".into(), report::scores_csv(out.all())));
    files.push(("summary.json".into(), report::summary_json(&rep)));

    std::fs::create_dir_all(out_dir).map_err(|e| Failure::io(out_dir, e))?;
    let mut written = Vec::new();
    for (name, text) in files {
        let path = out_dir.join(name);
        std::fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}
