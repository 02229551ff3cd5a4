use serde::Serialize;

use super::{ActionRegistry, Claim, Copa, Motion, Stance};
use crate::error::{Error, Result};

/// Placeholder replaced by the motion topic when a claim is applied.
pub const TOPIC_TOKEN: &str = "[TOPIC]";

const DEFAULT_LEAD: &str = "we should";

pub fn instantiate_claim(claim: &Claim, motion: &Motion) -> String {
    claim.template.replace(TOPIC_TOKEN, &motion.topic)
}

/// Major premise, minor premise, conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Syllogism {
    pub major: String,
    pub minor: String,
    pub conclusion: String,
}

impl std::fmt::Display for Syllogism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.major)?;
        writeln!(f, "{}", self.minor)?;
        write!(f, "{}", self.conclusion)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SyllogismOptions {
    /// Replaces the generic "<topic> relates to <CoPA name>" minor premise.
    pub minor_override: Option<String>,
    /// Subject and modal of the conclusion, `we should` when unset.
    pub conclusion_lead: Option<String>,
}

fn terminate(mut line: String) -> String {
    let line_trimmed = line.trim_end();
    if !line_trimmed.ends_with(['.', '!', '?']) {
        line.truncate(line_trimmed.len());
        line.push('.');
    }
    line
}

pub fn build_syllogism(
    motion: &Motion,
    copa: &Copa,
    stance: Stance,
    actions: &ActionRegistry,
    options: &SyllogismOptions,
) -> Result<Syllogism> {
    let claim = copa.claim(stance).ok_or_else(|| Error::UnknownStance {
        copa: copa.id.clone(),
        stance: stance.to_string(),
    })?;
    let major = terminate(instantiate_claim(claim, motion));
    let minor = terminate(match &options.minor_override {
        Some(m) => m.clone(),
        None => format!("{} relates to {}", motion.topic, copa.name),
    });
    let lead = options.conclusion_lead.as_deref().unwrap_or(DEFAULT_LEAD);
    let conclusion = format!(
        "Therefore, {lead} {} {}.",
        actions.surface(&motion.action),
        motion.topic
    );
    Ok(Syllogism {
        major,
        minor,
        conclusion,
    })
}
