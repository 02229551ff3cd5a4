//! Pre-extracted Wikipedia link statistics and related-title enrichment.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::hypergeom::hypergeom_ln_pvalue;
use super::tfidf::TfIdfModel;
use crate::error::{Error, Result};

/// Default number of enriched titles kept per topic.
pub const RELATED_TITLES_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Article {
    /// Linked title -> number of links to it inside the article.
    #[serde(default)]
    pub link_counts: BTreeMap<String, u64>,
    /// Terms occurring in the article body.
    #[serde(default)]
    pub body_terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Background {
    /// Link counts aggregated over a pool of random articles.
    #[serde(default)]
    pub link_counts: HashMap<String, u64>,
    pub total_links: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WikiCorpus {
    #[serde(default)]
    pub articles: BTreeMap<String, Article>,
    #[serde(default)]
    pub background: Background,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelatedTitle {
    pub title: String,
    pub ln_pvalue: f64,
}

impl RelatedTitle {
    pub fn pvalue(&self) -> f64 {
        self.ln_pvalue.exp()
    }
}

impl WikiCorpus {
    /// Lowercases every title and term, merging counts that collide, and
    /// checks the background totals.
    pub fn new(articles: BTreeMap<String, Article>, background: Background) -> Result<Self> {
        let mut norm_articles: BTreeMap<String, Article> = BTreeMap::new();
        for (topic, a) in articles {
            let entry = norm_articles.entry(topic.to_lowercase()).or_default();
            for (title, n) in a.link_counts {
                *entry.link_counts.entry(title.to_lowercase()).or_default() += n;
            }
            let mut terms: BTreeSet<String> = entry.body_terms.drain(..).collect();
            terms.extend(a.body_terms.iter().map(|t| t.to_lowercase()));
            entry.body_terms = terms.into_iter().collect();
        }
        let mut link_counts: HashMap<String, u64> = HashMap::new();
        for (title, n) in background.link_counts {
            *link_counts.entry(title.to_lowercase()).or_default() += n;
        }
        if let Some((title, n)) = link_counts.iter().find(|(_, &n)| n > background.total_links) {
            return Err(Error::validation(
                title,
                format!(
                    "background count {n} exceeds total_links {}",
                    background.total_links
                ),
            ));
        }
        Ok(WikiCorpus {
            articles: norm_articles,
            background: Background {
                link_counts,
                total_links: background.total_links,
            },
        })
    }

    pub fn from_json_str(text: &str, context: &str) -> Result<Self> {
        let raw: WikiCorpus = serde_json::from_str(text).map_err(|e| Error::Parse {
            context: context.to_string(),
            message: e.to_string(),
        })?;
        WikiCorpus::new(raw.articles, raw.background)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, &path.display().to_string())
    }

    pub fn article(&self, topic: &str) -> Option<&Article> {
        self.articles.get(&topic.to_lowercase())
    }

    /// Document-frequency model over the article bodies.
    pub fn tfidf(&self) -> TfIdfModel {
        TfIdfModel::fit(self.articles.values().map(|a| a.body_terms.iter()))
    }
}

/// Titles linked from the topic's article, most over-represented first.
///
/// Each title is scored by the upper-tail hypergeometric probability of its
/// in-article link count, with the article's links added to the background
/// pool as the population. Ties are broken by title.
pub fn topic_related_titles(topic: &str, corpus: &WikiCorpus, cap: usize) -> Result<Vec<RelatedTitle>> {
    let article = corpus
        .article(topic)
        .ok_or_else(|| Error::UnknownTopic(topic.to_string()))?;
    let n: u64 = article.link_counts.values().sum();
    let big_n = n + corpus.background.total_links;
    let mut scored = article
        .link_counts
        .iter()
        .filter(|(_, &k)| k > 0)
        .map(|(title, &k)| {
            let bg = corpus.background.link_counts.get(title).copied().unwrap_or(0);
            Ok(RelatedTitle {
                title: title.clone(),
                ln_pvalue: hypergeom_ln_pvalue(k, n, k + bg, big_n)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| {
        a.ln_pvalue
            .total_cmp(&b.ln_pvalue)
            .then_with(|| a.title.cmp(&b.title))
    });
    scored.truncate(cap);
    Ok(scored)
}

/// Mean idf of the given titles that occur in the topic article's body; 0
/// when none do or the article is missing.
pub fn avg_idf_in_article<T: AsRef<str>>(
    copa_titles: &[T],
    topic: &str,
    corpus: &WikiCorpus,
    tfidf: &TfIdfModel,
) -> f64 {
    let Some(article) = corpus.article(topic) else {
        return 0.0;
    };
    let present: BTreeSet<String> = copa_titles
        .iter()
        .map(|t| t.as_ref().to_lowercase())
        .filter(|t| article.body_terms.binary_search(t).is_ok())
        .collect();
    if present.is_empty() {
        return 0.0;
    }
    present.iter().map(|t| tfidf.idf(t)).sum::<f64>() / present.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn article(links: &[(&str, u64)], terms: &[&str]) -> Article {
        Article {
            link_counts: links.iter().map(|(t, n)| (t.to_string(), *n)).collect(),
            body_terms: terms.iter().map(|t| t.to_string()).collect(),
        }
    }

    fn corpus(articles: Vec<(&str, Article)>, bg: &[(&str, u64)], total: u64) -> WikiCorpus {
        WikiCorpus::new(
            articles.into_iter().map(|(t, a)| (t.to_string(), a)).collect(),
            Background {
                link_counts: bg.iter().map(|(t, n)| (t.to_string(), *n)).collect(),
                total_links: total,
            },
        )
        .unwrap()
    }

    #[test]
    fn single_link() {
        let c = corpus(
            vec![("Smoking", article(&[("Tobacco", 2)], &[]))],
            &[("Tobacco", 1)],
            10,
        );
        let t = topic_related_titles("smoking", &c, 10).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].title, "tobacco");
    }

    #[test]
    fn unknown_topic() {
        let c = corpus(vec![], &[], 0);
        assert!(matches!(
            topic_related_titles("x", &c, 10),
            Err(Error::UnknownTopic(_))
        ));
    }

    #[test]
    fn ties_break_lexicographically() {
        let c = corpus(
            vec![("t", article(&[("zeta", 1), ("alpha", 1), ("mid", 3)], &[]))],
            &[("zeta", 2), ("alpha", 2), ("mid", 0)],
            20,
        );
        let titles: Vec<_> = topic_related_titles("t", &c, 10)
            .unwrap()
            .into_iter()
            .map(|r| r.title)
            .collect();
        assert_eq!(titles, vec!["mid", "alpha", "zeta"]);
    }

    #[test]
    fn background_total_checked() {
        let err = WikiCorpus::new(
            BTreeMap::new(),
            Background {
                link_counts: [("a".to_string(), 5)].into_iter().collect(),
                total_links: 4,
            },
        );
        assert!(err.is_err());
    }

    #[test]
    fn avg_idf_cases() {
        // 4 documents; "solar power" in 1 of them, "climate" in 2
        let c = corpus(
            vec![
                ("Solar energy", article(&[], &["solar power", "climate", "sun"])),
                ("b", article(&[], &["climate"])),
                ("c", article(&[], &["sun"])),
                ("d", article(&[], &["wind"])),
            ],
            &[],
            0,
        );
        let m = c.tfidf();
        assert_eq!(avg_idf_in_article(&["nothing"], "solar energy", &c, &m), 0.0);
        assert_eq!(avg_idf_in_article(&["climate"], "missing", &c, &m), 0.0);
        let v = avg_idf_in_article(&["Solar power", "Climate", "Ocean"], "Solar energy", &c, &m);
        let oracle = ((4.0f64 / 1.0).ln() + (4.0f64 / 2.0).ln()) / 2.0;
        assert!((v - oracle).abs() < 1e-15);
    }
}
