//! Similarity primitives: term and set similarity under three measures,
//! tf-idf, and hypergeometric title enrichment.

mod embedding;
mod hypergeom;
mod tfidf;
mod wiki;

pub use embedding::{embed_term, EmbeddingStore};
pub use hypergeom::{hypergeom_ln_pvalue, hypergeom_pvalue};
pub use tfidf::TfIdfModel;
pub use wiki::{
    avg_idf_in_article, topic_related_titles, Article, Background, RelatedTitle, WikiCorpus,
    RELATED_TITLES_CAP,
};

use serde::{Deserialize, Serialize};

/// Lowercased alphanumeric tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SimKind {
    /// Cosine over the primary embedding table, mapped to `[0, 1]`.
    Embedding,
    /// Same measure over a second, independently trained table.
    EmbeddingAlt,
    /// Cosine of tf-idf vectors of each term's representative document.
    TfIdf,
}

impl SimKind {
    pub const ALL: [SimKind; 3] = [SimKind::Embedding, SimKind::EmbeddingAlt, SimKind::TfIdf];

    pub fn tag(self) -> &'static str {
        match self {
            SimKind::Embedding => "emb",
            SimKind::EmbeddingAlt => "emb_alt",
            SimKind::TfIdf => "tfidf",
        }
    }
}

/// Stores backing the similarity measures. Every store is optional; a
/// measure whose store is missing reports every term as unrepresentable.
#[derive(Debug, Clone, Default)]
pub struct SimContext {
    pub embeddings: Option<EmbeddingStore>,
    pub alt_embeddings: Option<EmbeddingStore>,
    pub wiki: Option<WikiCorpus>,
    pub tfidf: Option<TfIdfModel>,
}

impl SimContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_embeddings(mut self, store: EmbeddingStore) -> Self {
        self.embeddings = Some(store);
        self
    }

    pub fn with_alt_embeddings(mut self, store: EmbeddingStore) -> Self {
        self.alt_embeddings = Some(store);
        self
    }

    /// Attaches a corpus and fits the tf-idf model over its article bodies.
    pub fn with_wiki(mut self, corpus: WikiCorpus) -> Self {
        self.tfidf = Some(corpus.tfidf());
        self.wiki = Some(corpus);
        self
    }

    pub fn related_titles(&self, topic: &str) -> Vec<String> {
        self.wiki
            .as_ref()
            .and_then(|w| topic_related_titles(topic, w, RELATED_TITLES_CAP).ok())
            .map(|ts| ts.into_iter().map(|t| t.title).collect())
            .unwrap_or_default()
    }

    fn represent(&self, kind: SimKind, term: &str) -> Option<Repr> {
        match kind {
            SimKind::Embedding => embed_term(self.embeddings.as_ref()?, term).map(Repr::Dense),
            SimKind::EmbeddingAlt => embed_term(self.alt_embeddings.as_ref()?, term).map(Repr::Dense),
            SimKind::TfIdf => {
                let model = self.tfidf.as_ref()?;
                let article = self.wiki.as_ref().and_then(|w| w.article(term));
                match article {
                    Some(a) => model.vectorize(&a.body_terms),
                    None => model.vectorize(&tokenize(term)),
                }
                .map(Repr::Sparse)
            }
        }
    }
}

enum Repr {
    Dense(Vec<f64>),
    Sparse(Vec<(String, f64)>),
}

impl Repr {
    fn similarity(&self, other: &Repr) -> f64 {
        match (self, other) {
            (Repr::Dense(a), Repr::Dense(b)) => {
                let cos: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                ((cos + 1.0) / 2.0).clamp(0.0, 1.0)
            }
            (Repr::Sparse(a), Repr::Sparse(b)) => tfidf::sparse_dot(a, b).clamp(0.0, 1.0),
            _ => unreachable!("representations of one kind share a variant"),
        }
    }
}

/// Similarity of two terms in `[0, 1]`, `None` if either is unrepresentable.
pub fn term_similarity(kind: SimKind, a: &str, b: &str, ctx: &SimContext) -> Option<f64> {
    let ra = ctx.represent(kind, a)?;
    let rb = ctx.represent(kind, b)?;
    Some(ra.similarity(&rb))
}

/// Mean term similarity over all pairs `A x B`, skipping unrepresentable
/// pairs; 0 when nothing is left.
///
/// Pair values are summed in sorted order so the result is exactly symmetric
/// in its arguments.
pub fn set_similarity<S: AsRef<str>, T: AsRef<str>>(
    kind: SimKind,
    a: &[S],
    b: &[T],
    ctx: &SimContext,
) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let ra: Vec<Repr> = a.iter().filter_map(|t| ctx.represent(kind, t.as_ref())).collect();
    let rb: Vec<Repr> = b.iter().filter_map(|t| ctx.represent(kind, t.as_ref())).collect();
    let mut values: Vec<f64> = ra
        .iter()
        .flat_map(|x| rb.iter().map(move |y| x.similarity(y)))
        .collect();
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn toy_store(seed_vectors: &[(&str, [f64; 2])]) -> EmbeddingStore {
        EmbeddingStore::new(2, seed_vectors.iter().map(|(w, v)| (*w, v.to_vec()))).unwrap()
    }

    #[test]
    fn self_similarity_is_one() {
        let ctx = SimContext::new().with_embeddings(toy_store(&[("smoking", [0.3, -2.0])]));
        assert_eq!(
            term_similarity(SimKind::Embedding, "smoking", "smoking", &ctx),
            Some(1.0)
        );
    }

    #[test]
    fn orthogonal_vectors_map_to_half() {
        let ctx = SimContext::new().with_embeddings(toy_store(&[("x", [1.0, 0.0]), ("y", [0.0, 1.0])]));
        assert_eq!(term_similarity(SimKind::Embedding, "x", "y", &ctx), Some(0.5));
        assert_eq!(term_similarity(SimKind::Embedding, "x", "zzz", &ctx), None);
        assert_eq!(term_similarity(SimKind::EmbeddingAlt, "x", "x", &ctx), None);
    }

    #[test]
    fn tfidf_matches_brute_force_cosine() {
        // three documents; "solar" and "wind" have no articles and fall back to their own tokens
        let corpus = WikiCorpus::new(
            [
                ("d1", vec!["energy", "sun"]),
                ("d2", vec!["energy", "wind"]),
                ("d3", vec!["tax"]),
            ]
            .into_iter()
            .map(|(t, terms)| {
                (
                    t.to_string(),
                    Article {
                        link_counts: BTreeMap::new(),
                        body_terms: terms.into_iter().map(String::from).collect(),
                    },
                )
            })
            .collect(),
            Background::default(),
        )
        .unwrap();
        let ctx = SimContext::new().with_wiki(corpus);
        let got = term_similarity(SimKind::TfIdf, "sun energy", "energy wind", &ctx).unwrap();

        // oracle: explicit vectors over vocabulary [energy, sun, tax, wind]
        let idf = |df: f64| (3.0f64 / df).ln();
        let a = [idf(2.0), idf(1.0), 0.0, 0.0];
        let b = [idf(2.0), 0.0, 0.0, idf(1.0)];
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((got - dot / (na * nb)).abs() < 1e-12);

        // a term with an article uses the article body
        let d1 = term_similarity(SimKind::TfIdf, "d1", "sun energy", &ctx).unwrap();
        assert!((d1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn set_similarity_edge_cases() {
        let ctx = SimContext::new().with_embeddings(toy_store(&[("x", [1.0, 0.0]), ("y", [0.0, 1.0])]));
        let empty: [&str; 0] = [];
        assert_eq!(set_similarity(SimKind::Embedding, &empty, &["y"], &ctx), 0.0);
        assert_eq!(set_similarity(SimKind::Embedding, &["x"], &["x"], &ctx), 1.0);
        assert_eq!(set_similarity(SimKind::Embedding, &["q"], &["x"], &ctx), 0.0);
        // unknown pairs are skipped, not averaged in as zero
        assert_eq!(set_similarity(SimKind::Embedding, &["x", "q"], &["y"], &ctx), 0.5);
    }

    fn word(i: usize) -> String {
        format!("w{i}")
    }

    proptest! {
        #[test]
        fn set_similarity_equals_double_loop(
            vecs in proptest::collection::vec(proptest::array::uniform2(-1.0f64..1.0), 8),
            a in proptest::collection::vec(0usize..10, 0..5),
            b in proptest::collection::vec(0usize..10, 0..6),
        ) {
            // words w8, w9 are unknown to the store
            let store = EmbeddingStore::new(2, vecs.iter().enumerate().map(|(i, v)| (word(i), v.to_vec()))).unwrap();
            let ctx = SimContext::new().with_embeddings(store);
            let a: Vec<String> = a.into_iter().map(word).collect();
            let b: Vec<String> = b.into_iter().map(word).collect();
            let got = set_similarity(SimKind::Embedding, &a, &b, &ctx);

            let mut sum = 0.0;
            let mut count = 0usize;
            for x in &a {
                for y in &b {
                    if let Some(s) = term_similarity(SimKind::Embedding, x, y, &ctx) {
                        sum += s;
                        count += 1;
                    }
                }
            }
            let oracle = if count == 0 { 0.0 } else { sum / count as f64 };
            prop_assert!((got - oracle).abs() < 1e-12);
            prop_assert_eq!(got, set_similarity(SimKind::Embedding, &b, &a, &ctx));
        }

        #[test]
        fn term_similarity_symmetric_and_embeddings_unit(
            vecs in proptest::collection::vec(proptest::array::uniform2(-5.0f64..5.0), 4),
            i in 0usize..4, j in 0usize..4,
        ) {
            let store = EmbeddingStore::new(2, vecs.iter().enumerate().map(|(k, v)| (word(k), v.to_vec()))).unwrap();
            if let Some(v) = embed_term(&store, &word(i)) {
                let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                prop_assert!((n - 1.0).abs() < 1e-9);
            }
            let ctx = SimContext::new().with_embeddings(store);
            let ab = term_similarity(SimKind::Embedding, &word(i), &word(j), &ctx);
            let ba = term_similarity(SimKind::Embedding, &word(j), &word(i), &ctx);
            prop_assert_eq!(ab, ba);
            if let Some(s) = ab {
                prop_assert!((0.0..=1.0).contains(&s));
            }
        }
    }
}
