use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

/// Document frequencies over a fixed collection.
///
/// `idf(t) = ln(n_docs / df(t))`, and `ln(n_docs)` for terms never seen.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TfIdfModel {
    n_docs: usize,
    df: HashMap<String, usize>,
}

impl TfIdfModel {
    /// Each document is a bag of already-normalized terms.
    pub fn fit<D, T>(docs: D) -> Self
    where
        D: IntoIterator<Item = T>,
        T: IntoIterator,
        T::Item: AsRef<str>,
    {
        let mut df: HashMap<String, usize> = HashMap::new();
        let mut n_docs = 0;
        for doc in docs {
            n_docs += 1;
            let unique: HashSet<String> = doc.into_iter().map(|t| t.as_ref().to_string()).collect();
            for t in unique {
                *df.entry(t).or_default() += 1;
            }
        }
        TfIdfModel { n_docs, df }
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn idf(&self, term: &str) -> f64 {
        if self.n_docs == 0 {
            return 0.0;
        }
        let df = self.df.get(term).copied().unwrap_or(0).max(1);
        (self.n_docs as f64 / df as f64).ln()
    }

    /// Unit-length tf-idf vector of a bag of terms, sorted by term. `None`
    /// when every weight is zero.
    pub fn vectorize<T: AsRef<str>>(&self, bag: &[T]) -> Option<Vec<(String, f64)>> {
        let mut tf: BTreeMap<&str, f64> = BTreeMap::new();
        for t in bag {
            *tf.entry(t.as_ref()).or_default() += 1.0;
        }
        let weighted: Vec<(String, f64)> = tf
            .into_iter()
            .map(|(t, f)| (t.to_string(), f * self.idf(t)))
            .filter(|(_, w)| *w > 0.0)
            .collect();
        let norm = weighted.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        Some(weighted.into_iter().map(|(t, w)| (t, w / norm)).collect())
    }
}

/// Dot product of two term-sorted sparse vectors.
pub(crate) fn sparse_dot(a: &[(String, f64)], b: &[(String, f64)]) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}
