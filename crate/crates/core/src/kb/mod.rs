//! Domain model: actions, motions, CoPAs and the motion/CoPA match relation.

mod invent;
mod stats;

pub use invent::{build_syllogism, instantiate_claim, Syllogism, SyllogismOptions, TOPIC_TOKEN};
pub use stats::{copa_stats, CopaStats};

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CoPA names treated as "general" when a dataset file does not list them.
pub const DEFAULT_GENERAL_COPAS: [&str; 3] = ["Conservatism", "Fixable", "Framework"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionId(String);

impl ActionId {
    /// Validates the lowercase snake-case shape. Membership in a registry is
    /// checked separately.
    pub fn parse(id: &str) -> Result<Self> {
        let ok = id.chars().next().is_some_and(|c| c.is_ascii_lowercase())
            && id
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if ok {
            Ok(ActionId(id.to_string()))
        } else {
            Err(Error::validation(
                id,
                "action id must be non-empty lowercase snake_case",
            ))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for ActionId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub id: ActionId,
    /// Human phrasing, e.g. `further exploit` for `further_exploit`.
    pub surface: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActionRegistry {
    actions: Vec<Action>,
    index: HashMap<ActionId, usize>,
}

impl ActionRegistry {
    pub fn new(actions: Vec<Action>) -> Result<Self> {
        let mut index = HashMap::with_capacity(actions.len());
        for (i, a) in actions.iter().enumerate() {
            if a.surface.trim().is_empty() {
                return Err(Error::validation(a.id.as_str(), "empty surface form"));
            }
            if index.insert(a.id.clone(), i).is_some() {
                return Err(Error::validation(a.id.as_str(), "duplicate action id"));
            }
        }
        Ok(ActionRegistry { actions, index })
    }

    /// Loads a bare JSON array of `{"id", "surface"}` records.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw: Vec<RawAction> = serde_json::from_str(&text).map_err(|e| Error::Parse {
            context: path.display().to_string(),
            message: e.to_string(),
        })?;
        let actions = raw
            .into_iter()
            .map(|a| {
                Ok(Action {
                    id: ActionId::parse(&a.id)?,
                    surface: a.surface,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ActionRegistry::new(actions)
    }

    pub fn get(&self, id: &str) -> Option<&Action> {
        self.index.get(id).map(|&i| &self.actions[i])
    }

    pub fn lookup(&self, id: &ActionId) -> Option<&Action> {
        self.index.get(id).map(|&i| &self.actions[i])
    }

    pub fn contains(&self, id: &ActionId) -> bool {
        self.index.contains_key(id)
    }

    pub fn surface<'a>(&'a self, id: &'a ActionId) -> &'a str {
        self.lookup(id).map_or(id.as_str(), |a| a.surface.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Action> {
        self.actions.iter()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Motion {
    pub id: String,
    pub action: ActionId,
    /// A Wikipedia title or redirect.
    pub topic: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stance {
    Pro,
    Con,
}

impl Stance {
    pub fn opposite(self) -> Stance {
        match self {
            Stance::Pro => Stance::Con,
            Stance::Con => Stance::Pro,
        }
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stance::Pro => "pro",
            Stance::Con => "con",
        })
    }
}

impl std::str::FromStr for Stance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pro" => Ok(Stance::Pro),
            "con" => Ok(Stance::Con),
            _ => Err(Error::Domain(format!("unknown stance `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub stance: Stance,
    /// May contain [`TOPIC_TOKEN`] any number of times.
    pub template: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Copa {
    pub id: String,
    pub name: String,
    pub claims: [Claim; 2],
    pub topic_related: bool,
    /// Manually listed related Wikipedia titles.
    pub manual_titles: Vec<String>,
    /// Member motion ids, derived from the dataset labels.
    pub motion_ids: BTreeSet<String>,
}

impl Copa {
    pub fn claim(&self, stance: Stance) -> Option<&Claim> {
        self.claims.iter().find(|c| c.stance == stance)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Label {
    pub motion: String,
    pub copa: String,
    /// Stance of the CoPA's pro claim towards the motion, when annotated.
    /// Carried through but unused by the classifiers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim_stance_pro_means_support: Option<bool>,
}

/// Motions, CoPAs and the binary match relation between them. Immutable
/// after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    actions: ActionRegistry,
    motions: Vec<Motion>,
    copas: Vec<Copa>,
    labels: Vec<Label>,
    general_copa_ids: BTreeSet<String>,
    motion_index: HashMap<String, usize>,
    copa_index: HashMap<String, usize>,
    pairs: HashSet<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawAction {
    id: String,
    surface: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawCopa {
    id: String,
    name: String,
    #[serde(default)]
    topic_related: bool,
    #[serde(default)]
    manual_titles: Vec<String>,
    claims: Vec<Claim>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawMotion {
    id: String,
    action: String,
    topic: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawDataset {
    actions: Vec<RawAction>,
    copas: Vec<RawCopa>,
    motions: Vec<RawMotion>,
    #[serde(default)]
    labels: Vec<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    general_copas: Option<Vec<String>>,
}

/// Plain description of a CoPA used by [`Dataset::new`]; membership comes
/// from the labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopaSpec {
    pub id: String,
    pub name: String,
    pub claims: Vec<Claim>,
    pub topic_related: bool,
    pub manual_titles: Vec<String>,
}

impl Dataset {
    /// Builds and validates a dataset. When `general_copa_ids` is `None` the
    /// CoPAs whose id or name matches [`DEFAULT_GENERAL_COPAS`]
    /// (case-insensitively) are marked general.
    pub fn new(
        actions: ActionRegistry,
        motions: Vec<Motion>,
        copas: Vec<CopaSpec>,
        labels: Vec<Label>,
        general_copa_ids: Option<Vec<String>>,
    ) -> Result<Self> {
        let mut motion_index = HashMap::with_capacity(motions.len());
        let mut seen_pairs = HashSet::with_capacity(motions.len());
        for (i, m) in motions.iter().enumerate() {
            if m.id.is_empty() {
                return Err(Error::validation("<empty>", "motion with empty id"));
            }
            if m.topic.trim().is_empty() {
                return Err(Error::validation(&m.id, "motion topic is empty"));
            }
            if !actions.contains(&m.action) {
                return Err(Error::validation(&m.id, format!("unknown action `{}`", m.action)));
            }
            if motion_index.insert(m.id.clone(), i).is_some() {
                return Err(Error::validation(&m.id, "duplicate motion id"));
            }
            if !seen_pairs.insert((m.action.clone(), m.topic.clone())) {
                return Err(Error::validation(&m.id, "duplicate (action, topic) pair"));
            }
        }

        let mut copa_index = HashMap::with_capacity(copas.len());
        let mut built = Vec::with_capacity(copas.len());
        for (i, c) in copas.into_iter().enumerate() {
            if c.id.is_empty() {
                return Err(Error::validation("<empty>", "CoPA with empty id"));
            }
            if copa_index.insert(c.id.clone(), i).is_some() {
                return Err(Error::validation(&c.id, "duplicate CoPA id"));
            }
            let claims: [Claim; 2] = c
                .claims
                .try_into()
                .map_err(|_| Error::validation(&c.id, "a CoPA needs exactly two claims"))?;
            if claims[0].stance == claims[1].stance {
                return Err(Error::validation(&c.id, "a CoPA needs one pro and one con claim"));
            }
            if claims.iter().any(|cl| cl.template.trim().is_empty()) {
                return Err(Error::validation(&c.id, "empty claim template"));
            }
            if c.topic_related && c.manual_titles.is_empty() {
                return Err(Error::validation(
                    &c.id,
                    "topic-related CoPA must list manual titles",
                ));
            }
            built.push(Copa {
                id: c.id,
                name: c.name,
                claims,
                topic_related: c.topic_related,
                manual_titles: c.manual_titles,
                motion_ids: BTreeSet::new(),
            });
        }

        let mut pairs = HashSet::with_capacity(labels.len());
        for l in &labels {
            let mi = *motion_index
                .get(&l.motion)
                .ok_or_else(|| Error::validation(&l.motion, "label references unknown motion"))?;
            let ci = *copa_index
                .get(&l.copa)
                .ok_or_else(|| Error::validation(&l.copa, "label references unknown CoPA"))?;
            if !pairs.insert((mi, ci)) {
                return Err(Error::validation(
                    format!("{}/{}", l.motion, l.copa),
                    "duplicate label",
                ));
            }
            built[ci].motion_ids.insert(l.motion.clone());
        }

        let general_copa_ids = match general_copa_ids {
            Some(ids) => {
                let mut set = BTreeSet::new();
                for id in ids {
                    if !copa_index.contains_key(&id) {
                        return Err(Error::validation(&id, "general CoPA is not a known CoPA"));
                    }
                    set.insert(id);
                }
                set
            }
            None => built
                .iter()
                .filter(|c| {
                    DEFAULT_GENERAL_COPAS
                        .iter()
                        .any(|g| g.eq_ignore_ascii_case(&c.id) || g.eq_ignore_ascii_case(&c.name))
                })
                .map(|c| c.id.clone())
                .collect(),
        };

        Ok(Dataset {
            actions,
            motions,
            copas: built,
            labels,
            general_copa_ids,
            motion_index,
            copa_index,
            pairs,
        })
    }

    pub fn from_json_str(text: &str, context: &str) -> Result<Self> {
        let raw: RawDataset = serde_json::from_str(text).map_err(|e| Error::Parse {
            context: context.to_string(),
            message: e.to_string(),
        })?;
        let actions = raw
            .actions
            .into_iter()
            .map(|a| {
                Ok(Action {
                    id: ActionId::parse(&a.id)?,
                    surface: a.surface,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let registry = ActionRegistry::new(actions)?;
        let motions = raw
            .motions
            .into_iter()
            .map(|m| {
                let action = ActionId::parse(&m.action)
                    .map_err(|_| Error::validation(&m.id, format!("bad action `{}`", m.action)))?;
                Ok(Motion {
                    id: m.id,
                    action,
                    topic: m.topic,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let copas = raw
            .copas
            .into_iter()
            .map(|c| CopaSpec {
                id: c.id,
                name: c.name,
                claims: c.claims,
                topic_related: c.topic_related,
                manual_titles: c.manual_titles,
            })
            .collect();
        Dataset::new(registry, motions, copas, raw.labels, raw.general_copas)
    }

    pub fn to_json_string(&self) -> String {
        let raw = RawDataset {
            actions: self
                .actions
                .iter()
                .map(|a| RawAction {
                    id: a.id.to_string(),
                    surface: a.surface.clone(),
                })
                .collect(),
            copas: self
                .copas
                .iter()
                .map(|c| RawCopa {
                    id: c.id.clone(),
                    name: c.name.clone(),
                    topic_related: c.topic_related,
                    manual_titles: c.manual_titles.clone(),
                    claims: c.claims.to_vec(),
                })
                .collect(),
            motions: self
                .motions
                .iter()
                .map(|m| RawMotion {
                    id: m.id.clone(),
                    action: m.action.to_string(),
                    topic: m.topic.clone(),
                })
                .collect(),
            labels: self.labels.clone(),
            general_copas: Some(self.general_copa_ids.iter().cloned().collect()),
        };
        serde_json::to_string_pretty(&raw).expect("dataset serialization cannot fail")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Dataset::from_json_str(&text, &path.display().to_string())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string()).map_err(|e| Error::io(path, e))
    }

    /// Copy of the dataset with one motion and its labels removed.
    pub fn without_motion(&self, motion_id: &str) -> Result<Self> {
        if !self.motion_index.contains_key(motion_id) {
            return Err(Error::validation(motion_id, "no such motion"));
        }
        let motions = self
            .motions
            .iter()
            .filter(|m| m.id != motion_id)
            .cloned()
            .collect();
        let labels = self
            .labels
            .iter()
            .filter(|l| l.motion != motion_id)
            .cloned()
            .collect();
        Dataset::new(
            self.actions.clone(),
            motions,
            self.copa_specs(),
            labels,
            Some(self.general_copa_ids.iter().cloned().collect()),
        )
    }

    fn copa_specs(&self) -> Vec<CopaSpec> {
        self.copas
            .iter()
            .map(|c| CopaSpec {
                id: c.id.clone(),
                name: c.name.clone(),
                claims: c.claims.to_vec(),
                topic_related: c.topic_related,
                manual_titles: c.manual_titles.clone(),
            })
            .collect()
    }

    pub fn actions(&self) -> &ActionRegistry {
        &self.actions
    }

    pub fn motions(&self) -> &[Motion] {
        &self.motions
    }

    pub fn copas(&self) -> &[Copa] {
        &self.copas
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn general_copa_ids(&self) -> &BTreeSet<String> {
        &self.general_copa_ids
    }

    pub fn is_general(&self, copa_id: &str) -> bool {
        self.general_copa_ids.contains(copa_id)
    }

    pub fn motion(&self, id: &str) -> Option<&Motion> {
        self.motion_index.get(id).map(|&i| &self.motions[i])
    }

    pub fn copa(&self, id: &str) -> Option<&Copa> {
        self.copa_index.get(id).map(|&i| &self.copas[i])
    }

    pub fn motion_position(&self, id: &str) -> Option<usize> {
        self.motion_index.get(id).copied()
    }

    pub fn copa_position(&self, id: &str) -> Option<usize> {
        self.copa_index.get(id).copied()
    }

    pub fn is_match(&self, motion_id: &str, copa_id: &str) -> bool {
        match (self.motion_index.get(motion_id), self.copa_index.get(copa_id)) {
            (Some(&m), Some(&c)) => self.pairs.contains(&(m, c)),
            _ => false,
        }
    }

    /// Match test by positions in [`Dataset::motions`] and [`Dataset::copas`].
    pub fn is_match_at(&self, motion: usize, copa: usize) -> bool {
        self.pairs.contains(&(motion, copa))
    }

    /// CoPAs included in an analysis, optionally dropping the general ones.
    pub fn included_copas(&self, exclude_general: bool) -> impl Iterator<Item = &Copa> {
        self.copas
            .iter()
            .filter(move |c| !(exclude_general && self.is_general(&c.id)))
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = r#"{
      "actions": [{"id": "ban", "surface": "ban"}, {"id": "legalize", "surface": "legalize"}],
      "copas": [
        {"id": "black_market", "name": "Black market", "topic_related": false, "manual_titles": [],
         "claims": [{"stance": "pro", "template": "Banning [TOPIC] creates a black market"},
                    {"stance": "con", "template": "[TOPIC] can be policed effectively"}]},
        {"id": "health", "name": "Public health", "topic_related": true, "manual_titles": ["Public health"],
         "claims": [{"stance": "pro", "template": "Public health comes first"},
                    {"stance": "con", "template": "Adults may take risks"}]}
      ],
      "motions": [
        {"id": "m1", "action": "ban", "topic": "smoking"},
        {"id": "m2", "action": "legalize", "topic": "cannabis"},
        {"id": "m3", "action": "ban", "topic": "alcohol"}
      ],
      "labels": [
        {"motion": "m1", "copa": "health"},
        {"motion": "m2", "copa": "black_market", "claim_stance_pro_means_support": true},
        {"motion": "m3", "copa": "black_market"},
        {"motion": "m3", "copa": "health"}
      ]
    }"#;

    #[test]
    fn loads_toy_dataset() {
        let ds = Dataset::from_json_str(TOY, "toy").unwrap();
        assert_eq!(ds.motions().len(), 3);
        assert_eq!(ds.copas().len(), 2);
        assert_eq!(ds.labels().len(), 4);
        assert!(ds.is_match("m3", "health"));
        assert!(!ds.is_match("m1", "black_market"));
        assert_eq!(
            ds.copa("health").unwrap().motion_ids,
            ["m1", "m3"].iter().map(|s| s.to_string()).collect()
        );
        assert!(ds.general_copa_ids().is_empty());
    }

    #[test]
    fn dangling_label_names_the_motion() {
        let bad = TOY.replace(
            r#"{"motion": "m1", "copa": "health"}"#,
            r#"{"motion": "m99", "copa": "health"}"#,
        );
        match Dataset::from_json_str(&bad, "toy") {
            Err(Error::Validation { record, .. }) => assert_eq!(record, "m99"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_action_and_bad_claims() {
        let bad = TOY.replace(r#""action": "legalize""#, r#""action": "subsidize""#);
        assert!(matches!(
            Dataset::from_json_str(&bad, "toy"),
            Err(Error::Validation { record, .. }) if record == "m2"
        ));
        let bad = TOY.replace(
            r#"{"stance": "con", "template": "Adults may take risks"}"#,
            r#"{"stance": "pro", "template": "Adults may take risks"}"#,
        );
        assert!(matches!(
            Dataset::from_json_str(&bad, "toy"),
            Err(Error::Validation { record, .. }) if record == "health"
        ));
        let bad = TOY.replace(r#""manual_titles": ["Public health"]"#, r#""manual_titles": []"#);
        assert!(Dataset::from_json_str(&bad, "toy").is_err());
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(
            Dataset::from_json_str("{ not json", "toy"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn duplicate_action_topic_pair_rejected() {
        let bad = TOY.replace(r#""topic": "alcohol""#, r#""topic": "smoking""#);
        assert!(matches!(
            Dataset::from_json_str(&bad, "toy"),
            Err(Error::Validation { record, .. }) if record == "m3"
        ));
    }

    #[test]
    fn default_general_copas_match_by_name() {
        let ds = fixtures::dataset(
            &["ban"],
            &[("m1", "ban", "x")],
            &["Conservatism", "fixable", "Other"],
            &[],
        );
        let general: Vec<_> = ds.general_copa_ids().iter().cloned().collect();
        assert_eq!(general, vec!["Conservatism", "fixable"]);
    }

    #[test]
    fn explicit_general_copas_must_exist() {
        let bad = TOY.replace(r#""labels""#, r#""general_copas": ["nope"], "labels""#);
        assert!(matches!(
            Dataset::from_json_str(&bad, "toy"),
            Err(Error::Validation { record, .. }) if record == "nope"
        ));
    }

    #[test]
    fn save_load_round_trip() {
        let ds = Dataset::from_json_str(TOY, "toy").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.json");
        ds.save(&path).unwrap();
        assert_eq!(Dataset::load(&path).unwrap(), ds);
    }

    #[test]
    fn without_motion_drops_labels() {
        let ds = Dataset::from_json_str(TOY, "toy").unwrap();
        let fold = ds.without_motion("m3").unwrap();
        assert_eq!(fold.motions().len(), 2);
        assert_eq!(fold.labels().len(), 2);
        assert!(!fold.copa("health").unwrap().motion_ids.contains("m3"));
    }

    #[test]
    fn action_id_shape() {
        assert!(ActionId::parse("brings_more_harm_than_good").is_ok());
        assert!(ActionId::parse("").is_err());
        assert!(ActionId::parse("Ban").is_err());
        assert!(ActionId::parse("ban smoking").is_err());
    }
}
