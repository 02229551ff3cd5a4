use serde::Serialize;

use super::Dataset;

/// Descriptive statistics over the match relation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CopaStats {
    pub motion_count: usize,
    pub copa_ids: Vec<String>,
    /// Number of member motions, aligned with `copa_ids`.
    pub sizes: Vec<usize>,
    /// Fraction of motions matched to at least one included CoPA.
    pub covered_fraction: f64,
    /// Included labels per motion, averaged over all motions.
    pub mean_memberships: f64,
    pub max_memberships: usize,
    /// `overlap[i][j] = |M_i ∩ M_j| / |M_i|`, zero rows for empty CoPAs.
    pub overlap: Vec<Vec<f64>>,
}

impl CopaStats {
    pub fn size_of(&self, copa_id: &str) -> Option<usize> {
        self.copa_ids
            .iter()
            .position(|c| c == copa_id)
            .map(|i| self.sizes[i])
    }
}

pub fn copa_stats(ds: &Dataset, exclude_general: bool) -> CopaStats {
    let copas: Vec<_> = ds.included_copas(exclude_general).collect();
    let mut per_motion = vec![0usize; ds.motions().len()];
    for c in &copas {
        for m in &c.motion_ids {
            if let Some(i) = ds.motion_position(m) {
                per_motion[i] += 1;
            }
        }
    }
    let n = ds.motions().len();
    let covered = per_motion.iter().filter(|&&k| k > 0).count();
    let total: usize = per_motion.iter().sum();
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };

    let overlap = copas
        .iter()
        .map(|a| {
            copas
                .iter()
                .map(|b| {
                    ratio(
                        a.motion_ids.intersection(&b.motion_ids).count(),
                        a.motion_ids.len(),
                    )
                })
                .collect()
        })
        .collect();

    CopaStats {
        motion_count: n,
        copa_ids: copas.iter().map(|c| c.id.clone()).collect(),
        sizes: copas.iter().map(|c| c.motion_ids.len()).collect(),
        covered_fraction: ratio(covered, n),
        mean_memberships: ratio(total, n),
        max_memberships: per_motion.iter().copied().max().unwrap_or(0),
        overlap,
    }
}
