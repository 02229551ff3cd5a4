use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use copa_core::classifiers::{Resources, TopicSentenceCorpus};
use copa_core::eval::{leave_one_out, report, EvalConfig, ThresholdGrid};
use copa_core::kb::Dataset;
use copa_core::text_sim::{EmbeddingStore, SimContext, WikiCorpus};
use serde_json::Value;

fn toy_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/toy")
}

fn toy_config() -> String {
    toy_dir().join("config.toml").display().to_string()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn copa(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_copa"));
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("COPA_")) {
        cmd.env_remove(k);
    }
    cmd.args(args).envs(env.iter().copied());
    let out = cmd.output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn toy(args: &[&str]) -> Run {
    let cfg = toy_config();
    let mut all = vec!["--config", cfg.as_str()];
    all.extend_from_slice(args);
    copa(&all, &[])
}

fn json(r: &Run) -> Value {
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

const TINY: &str = r#"{
  "actions": [{"id": "ban", "surface": "ban"}],
  "copas": [
    {"id": "a", "name": "A", "topic_related": false, "manual_titles": [],
     "claims": [{"stance": "pro", "template": "[TOPIC] is bad"}, {"stance": "con", "template": "[TOPIC] is fine"}]},
    {"id": "b", "name": "B", "topic_related": false, "manual_titles": [],
     "claims": [{"stance": "pro", "template": "[TOPIC] costs"}, {"stance": "con", "template": "[TOPIC] pays"}]}
  ],
  "motions": [{"id": "m1", "action": "ban", "topic": "x"}, {"id": "m2", "action": "ban", "topic": "y"},
              {"id": "m3", "action": "ban", "topic": "z"}],
  "labels": LABELS
}"#;

fn tiny(labels: &str) -> (tempfile::TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ds.json");
    std::fs::write(&path, TINY.replace("LABELS", labels)).unwrap();
    (dir, path.display().to_string())
}

#[test]
fn stats_reports_toy_counts() {
    let v = json(&toy(&["stats"]));
    assert_eq!(v["motions"], 16);
    assert_eq!(v["copas"], 7);
    assert_eq!(v["stats"]["covered_fraction"], 1.0);
    assert_eq!(v["baselines"]["all"]["copa_id"], "black_market");
}

#[test]
fn stats_on_empty_labels_has_zero_coverage() {
    let (_d, ds) = tiny("[]");
    let v = json(&copa(&["stats"], &[("COPA_DATASET", &ds)]));
    assert_eq!(v["stats"]["covered_fraction"], 0.0);
    assert_eq!(v["labels"], 0);
}

#[test]
fn match_instantiates_framework_claims_for_nato() {
    let v = json(&toy(&[
        "match",
        "--action",
        "disband",
        "--topic",
        "NATO",
        "--threshold",
        "0",
    ]));
    let fw = v["matches"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["copa"] == "Framework")
        .expect("LR scores every CoPA");
    assert_eq!(fw["pro"], "NATO works efficiently");
    assert_eq!(fw["con"], "NATO fails to achieve its goals");
}

#[test]
fn impossible_threshold_gives_empty_list() {
    let v = json(&toy(&[
        "match",
        "--action",
        "ban",
        "--topic",
        "smoking",
        "--threshold",
        "1.01",
    ]));
    assert_eq!(v["matches"], Value::Array(vec![]));
}

#[test]
fn ensemble_ranking_is_the_max_over_methods() {
    let args = |m: &'static str| {
        [
            "--method",
            m,
            "match",
            "--action",
            "subsidize",
            "--topic",
            "solar energy",
            "--threshold",
            "0",
        ]
    };
    let mut best: BTreeMap<String, f64> = BTreeMap::new();
    for m in ["ba", "knn", "w2v", "nb", "lr"] {
        let v = json(&toy(&args(m)));
        for e in v["matches"].as_array().unwrap() {
            let s = e["score"].as_f64().unwrap();
            let slot = best.entry(e["copa"].as_str().unwrap().to_string()).or_insert(s);
            *slot = slot.max(s);
        }
    }
    let mut oracle: Vec<(String, f64)> = best.into_iter().collect();
    oracle.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let v = json(&toy(&args("ensemble")));
    let got: Vec<(String, f64)> = v["matches"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["copa"].as_str().unwrap().to_string(),
                e["score"].as_f64().unwrap(),
            )
        })
        .collect();
    assert_eq!(got, oracle);
}

#[test]
fn exclude_general_drops_general_copas() {
    let v = json(&toy(&[
        "--exclude-general",
        "match",
        "--action",
        "disband",
        "--topic",
        "NATO",
        "--threshold",
        "0",
    ]));
    for e in v["matches"].as_array().unwrap() {
        assert!(!["Conservatism", "Fixable", "Framework"].contains(&e["copa"].as_str().unwrap()));
    }
}

#[test]
fn unknown_action_exits_3() {
    let r = toy(&["match", "--action", "annex", "--topic", "Crimea"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stderr.contains("annex"));
}

#[test]
fn registry_file_extends_accepted_actions() {
    // `regulate` is only in the shipped registry, not in the toy dataset
    let r = toy(&[
        "--method", "ba", "match", "--action", "regulate", "--topic", "gambling",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(copa(&["stats"], &[]).code, 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[hyper\n").unwrap();
    assert_eq!(copa(&["--config", bad.to_str().unwrap(), "stats"], &[]).code, 2);
    assert_eq!(toy(&["--method", "rnn", "stats"]).code, 2);
    assert_eq!(toy(&["eval"]).code, 2);
    let r = copa(
        &[
            "--config",
            &toy_config(),
            "--method",
            "knn",
            "eval",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[("COPA_EMBEDDINGS", "")],
    );
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn io_errors_exit_4() {
    let r = copa(&["stats"], &[("COPA_DATASET", "/nonexistent/ds.json")]);
    assert_eq!(r.code, 4, "{}", r.stderr);
    assert!(r.stderr.contains("/nonexistent/ds.json"));
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("f");
    std::fs::write(&file, "").unwrap();
    let r = toy(&["--method", "ba", "eval", "--out", file.to_str().unwrap()]);
    assert_eq!(r.code, 4, "{}", r.stderr);
}

#[test]
fn invalid_dataset_exits_3() {
    let (_d, ds) = tiny(r#"[{"motion": "m9", "copa": "a"}]"#);
    assert_eq!(copa(&["stats"], &[("COPA_DATASET", &ds)]).code, 3);
}

#[test]
fn invent_prints_the_clean_energy_syllogism() {
    let r = toy(&[
        "invent",
        "--action",
        "further_exploit",
        "--topic",
        "solar energy",
        "--copa",
        "clean_energy",
        "--stance",
        "pro",
        "--minor",
        "Solar energy is a form of clean energy",
        "--lead",
        "humanity must",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(
        r.stdout,
        "Humanity must embrace clean energy in order to fight climate change.\n\
         Solar energy is a form of clean energy.\n\
         Therefore, humanity must further exploit solar energy.\n"
    );
}

#[test]
fn invent_defaults() {
    let r = toy(&[
        "invent",
        "--action",
        "ban",
        "--topic",
        "smoking",
        "--copa",
        "Public health",
    ]);
    assert_eq!(
        r.stdout,
        "smoking endangers public health.\nsmoking relates to Public health.\nTherefore, we should ban smoking.\n"
    );
    assert_eq!(
        toy(&["invent", "--action", "ban", "--topic", "x", "--copa", "nope"]).code,
        3
    );
}

#[test]
fn features_have_one_row_per_pair() {
    let (_d, ds) = tiny(r#"[{"motion": "m1", "copa": "a"}]"#);
    let r = copa(&["features"], &[("COPA_DATASET", &ds)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 1 + 6);
    assert_eq!(lines[0].split(',').count(), 20);
    assert!(lines[0].ends_with(",motion_id,copa_id,label"));
    assert!(lines[1].ends_with(",m1,a,1"));
    assert!(lines[2].ends_with(",m1,b,0"));

    let dir = tempfile::tempdir().unwrap();
    let r = copa(
        &["--out", dir.path().to_str().unwrap(), "features"],
        &[("COPA_DATASET", &ds)],
    );
    assert_eq!(r.code, 0);
    assert_eq!(
        std::fs::read_to_string(dir.path().join("features.csv"))
            .unwrap()
            .lines()
            .count(),
        7
    );
}

#[test]
fn eval_csvs_equal_module_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let r = toy(&["eval", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);

    let d = toy_dir();
    let ds = Dataset::load(d.join("dataset.json")).unwrap();
    let sim = SimContext::new()
        .with_embeddings(EmbeddingStore::load(d.join("embeddings.txt")).unwrap())
        .with_alt_embeddings(EmbeddingStore::load(d.join("embeddings_alt.txt")).unwrap())
        .with_wiki(WikiCorpus::load(d.join("wiki.json")).unwrap());
    let sentences = TopicSentenceCorpus::load(d.join("sentences.jsonl")).unwrap();
    let mut cfg = EvalConfig {
        min_topic_copa_size: 4,
        thresholds: ThresholdGrid::uniform(100).unwrap(),
        ..Default::default()
    };
    cfg.method_config.ba_k = 2;
    cfg.method_config.knn.min_neighbors = 2;
    cfg.method_config.logreg.max_iters = 2000;
    let res = Resources {
        sim: &sim,
        sentences: Some(&sentences),
    };
    let out = leave_one_out(&ds, &cfg, &res).unwrap();
    let rep = report::build_report(&ds, &out, &cfg);
    for m in &rep.methods {
        let pr = std::fs::read_to_string(dir.path().join(format!("pr_{}.csv", m.method))).unwrap();
        assert_eq!(pr, report::pr_csv([m]));
        let p1 = std::fs::read_to_string(dir.path().join(format!("p_at_1_{}.csv", m.method))).unwrap();
        assert_eq!(p1, report::p_at_1_csv([m]));
    }
    assert_eq!(rep.methods.len(), 6);
    let summary = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    assert_eq!(summary, report::summary_json(&rep));
    let v: Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(v["stats"]["motion_count"], 16);
    assert!(v["baselines"]["excluding_general"]["precision"].is_number());
}

#[test]
fn ba_eval_runs_without_embeddings() {
    let dir = tempfile::tempdir().unwrap();
    let r = copa(
        &[
            "--config",
            &toy_config(),
            "--method",
            "ba",
            "eval",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[("COPA_EMBEDDINGS", "/nonexistent/e.txt")],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(dir.path().join("pr_ba.csv").exists());
    assert!(dir.path().join("pr_ensemble.csv").exists());
    assert!(!dir.path().join("pr_knn.csv").exists());
}

#[test]
fn eval_is_byte_stable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(toy(&["eval", "--out", a.path().to_str().unwrap()]).code, 0);
    assert_eq!(toy(&["eval", "--out", b.path().to_str().unwrap()]).code, 0);
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 14);
    for n in names {
        assert_eq!(
            std::fs::read(a.path().join(&n)).unwrap(),
            std::fs::read(b.path().join(&n)).unwrap()
        );
    }
}
