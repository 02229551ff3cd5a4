//! Deterministic text renderings of evaluation results.
//!
//! Rows follow configuration order, numbers use Rust's shortest round-trip
//! formatting and lines end in `\n`, so equal inputs give equal bytes.

use std::fmt::Write as _;

use serde::Serialize;

use super::{
    baseline_largest, p_at_1_curve, pr_curve, Baseline, CoverageP1Point, EvalConfig, LooOutput, PrPoint,
};
use crate::classifiers::{Score, ScoreMatrix};
use crate::kb::{copa_stats, CopaStats, Dataset};

/// Curves of one method. Only the counts go into the summary JSON; the
/// curves have their own CSV files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodReport {
    pub method: String,
    pub scored_pairs: usize,
    pub pr_points: usize,
    pub p_at_1_points: usize,
    #[serde(skip)]
    pub pr: Vec<PrPoint>,
    #[serde(skip)]
    pub p_at_1: Vec<CoverageP1Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Baselines {
    pub all: Option<Baseline>,
    pub excluding_general: Option<Baseline>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub motions: usize,
    pub copas: usize,
    pub labels: usize,
    pub exclude_general: bool,
    pub stats: CopaStats,
    pub baselines: Baselines,
    pub methods: Vec<MethodReport>,
}

pub fn method_report(scores: &ScoreMatrix, ds: &Dataset, cfg: &EvalConfig) -> MethodReport {
    let scored_pairs = (0..scores.n_motions())
        .map(|m| scores.row(m).iter().filter(|s| s.value().is_some()).count())
        .sum();
    let pr = pr_curve(scores, ds, cfg.exclude_general, &cfg.thresholds);
    let p_at_1 = p_at_1_curve(scores, ds, cfg.exclude_general, &cfg.thresholds);
    MethodReport {
        method: scores.method.clone(),
        scored_pairs,
        pr_points: pr.len(),
        p_at_1_points: p_at_1.len(),
        pr,
        p_at_1,
    }
}

pub fn build_report(ds: &Dataset, out: &LooOutput, cfg: &EvalConfig) -> EvalReport {
    EvalReport {
        motions: ds.motions().len(),
        copas: ds.copas().len(),
        labels: ds.labels().len(),
        exclude_general: cfg.exclude_general,
        stats: copa_stats(ds, cfg.exclude_general),
        baselines: Baselines {
            all: baseline_largest(ds, false),
            excluding_general: baseline_largest(ds, true),
        },
        methods: out.all().map(|m| method_report(m, ds, cfg)).collect(),
    }
}

pub fn pr_csv<'a>(methods: impl IntoIterator<Item = &'a MethodReport>) -> String {
    let mut s = String::from("method,threshold,precision,recall\n");
    for m in methods {
        for p in &m.pr {
            writeln!(s, "{},{:.2},{},{}", m.method, p.threshold, p.precision, p.recall).unwrap();
        }
    }
    s
}

pub fn p_at_1_csv<'a>(methods: impl IntoIterator<Item = &'a MethodReport>) -> String {
    let mut s = String::from("method,threshold,coverage,p_at_1\n");
    for m in methods {
        for p in &m.p_at_1 {
            writeln!(s, "{},{:.2},{},{}", m.method, p.threshold, p.coverage, p.p_at_1).unwrap();
        }
    }
    s
}

/// Long-format scores; abstentions leave the score field empty.
pub fn scores_csv<'a>(matrices: impl IntoIterator<Item = &'a ScoreMatrix>) -> String {
    let mut s = String::from("method,motion_id,copa_id,score\n");
    for matrix in matrices {
        for (m, mid) in matrix.motion_ids.iter().enumerate() {
            for (c, cid) in matrix.copa_ids.iter().enumerate() {
                match matrix.get(m, c) {
                    Score::Value(v) => writeln!(s, "{},{mid},{cid},{v}", matrix.method).unwrap(),
                    Score::Abstain => writeln!(s, "{},{mid},{cid},", matrix.method).unwrap(),
                }
            }
        }
    }
    s
}

pub fn summary_json(report: &EvalReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
