use serde::Serialize;

use super::ThresholdGrid;
use crate::classifiers::ScoreMatrix;
use crate::kb::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageP1Point {
    pub threshold: f64,
    pub coverage: f64,
    pub p_at_1: f64,
}

/// Matrix columns that take part in an analysis.
fn included_columns(scores: &ScoreMatrix, ds: &Dataset, exclude_general: bool) -> Vec<usize> {
    (0..scores.n_copas())
        .filter(|&c| !(exclude_general && ds.is_general(&scores.copa_ids[c])))
        .collect()
}

/// Pair-level precision and recall at each threshold.
///
/// A pair is predicted when its score is at least the threshold. Recall is
/// taken against every label of the included CoPAs, whether or not the
/// method scored them. Thresholds with no predicted pair are omitted.
pub fn pr_curve(
    scores: &ScoreMatrix,
    ds: &Dataset,
    exclude_general: bool,
    grid: &ThresholdGrid,
) -> Vec<PrPoint> {
    let cols = included_columns(scores, ds, exclude_general);
    let total_matches = ds
        .labels()
        .iter()
        .filter(|l| !(exclude_general && ds.is_general(&l.copa)))
        .count();
    // (score, is_match) for every non-abstaining pair
    let mut scored: Vec<(f64, bool)> = Vec::new();
    for (m, mid) in scores.motion_ids.iter().enumerate() {
        for &c in &cols {
            if let Some(v) = scores.get(m, c).value() {
                scored.push((v, ds.is_match(mid, &scores.copa_ids[c])));
            }
        }
    }
    grid.values()
        .iter()
        .filter_map(|&t| {
            let (predicted, tp) = scored
                .iter()
                .filter(|(v, _)| *v >= t)
                .fold((0usize, 0usize), |(p, tp), &(_, y)| (p + 1, tp + usize::from(y)));
            (predicted > 0).then(|| PrPoint {
                threshold: t,
                precision: tp as f64 / predicted as f64,
                recall: if total_matches == 0 {
                    0.0
                } else {
                    tp as f64 / total_matches as f64
                },
            })
        })
        .collect()
}

/// Precision of each motion's top CoPA against the fraction of motions with
/// any CoPA at or above the threshold. Ties for the top go to the smaller
/// CoPA id. Thresholds covering no motion are omitted.
pub fn p_at_1_curve(
    scores: &ScoreMatrix,
    ds: &Dataset,
    exclude_general: bool,
    grid: &ThresholdGrid,
) -> Vec<CoverageP1Point> {
    let cols = included_columns(scores, ds, exclude_general);
    let n_motions = scores.n_motions();
    let tops: Vec<(f64, bool)> = scores
        .motion_ids
        .iter()
        .enumerate()
        .filter_map(|(m, mid)| {
            let mut best: Option<(f64, usize)> = None;
            for &c in &cols {
                let Some(v) = scores.get(m, c).value() else {
                    continue;
                };
                let better = match best {
                    None => true,
                    Some((bv, bc)) => v > bv || (v == bv && scores.copa_ids[c] < scores.copa_ids[bc]),
                };
                if better {
                    best = Some((v, c));
                }
            }
            best.map(|(v, c)| (v, ds.is_match(mid, &scores.copa_ids[c])))
        })
        .collect();
    grid.values()
        .iter()
        .filter_map(|&t| {
            let (covered, hits) = tops
                .iter()
                .filter(|(v, _)| *v >= t)
                .fold((0usize, 0usize), |(n, h), &(_, y)| (n + 1, h + usize::from(y)));
            (covered > 0).then(|| CoverageP1Point {
                threshold: t,
                coverage: covered as f64 / n_motions as f64,
                p_at_1: hits as f64 / covered as f64,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Baseline {
    pub copa_id: String,
    pub precision: f64,
}

/// Precision of always predicting the largest included CoPA (ties by id).
pub fn baseline_largest(ds: &Dataset, exclude_general: bool) -> Option<Baseline> {
    if ds.motions().is_empty() {
        return None;
    }
    let largest = ds.included_copas(exclude_general).min_by(|a, b| {
        b.motion_ids
            .len()
            .cmp(&a.motion_ids.len())
            .then_with(|| a.id.cmp(&b.id))
    })?;
    Some(Baseline {
        copa_id: largest.id.clone(),
        precision: largest.motion_ids.len() as f64 / ds.motions().len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::Score;
    use crate::kb::fixtures::dataset;

    fn toy() -> Dataset {
        dataset(
            &["ban"],
            &[("m1", "ban", "a"), ("m2", "ban", "b"), ("m3", "ban", "c")],
            &["Framework", "c1", "c2"],
            &[("m1", "c1"), ("m2", "c2"), ("m3", "Framework"), ("m3", "c1")],
        )
    }

    fn matrix(ds: &Dataset, f: impl Fn(usize, usize) -> Score) -> ScoreMatrix {
        let mut m = ScoreMatrix::for_dataset("t", ds);
        for i in 0..m.n_motions() {
            for c in 0..m.n_copas() {
                m.set(i, c, f(i, c)).unwrap();
            }
        }
        m
    }

    #[test]
    fn perfect_scorer() {
        let ds = toy();
        let m = matrix(&ds, |i, c| {
            Score::Value(if ds.is_match_at(i, c) { 1.0 } else { 0.0 })
        });
        let grid = ThresholdGrid::new(vec![0.5]).unwrap();
        assert_eq!(
            pr_curve(&m, &ds, false, &grid),
            vec![PrPoint {
                threshold: 0.5,
                precision: 1.0,
                recall: 1.0
            }]
        );
        let p1 = p_at_1_curve(&m, &ds, false, &grid);
        assert_eq!(
            p1,
            vec![CoverageP1Point {
                threshold: 0.5,
                coverage: 1.0,
                p_at_1: 1.0
            }]
        );
    }

    #[test]
    fn all_abstain_has_no_points() {
        let ds = toy();
        let m = ScoreMatrix::for_dataset("t", &ds);
        assert!(pr_curve(&m, &ds, false, &ThresholdGrid::default()).is_empty());
        assert!(p_at_1_curve(&m, &ds, false, &ThresholdGrid::default()).is_empty());
    }

    #[test]
    fn threshold_above_scores_is_omitted() {
        let ds = toy();
        let m = matrix(&ds, |_, _| Score::Value(0.3));
        let grid = ThresholdGrid::new(vec![0.2, 0.9]).unwrap();
        let p1 = p_at_1_curve(&m, &ds, false, &grid);
        assert_eq!(p1.len(), 1);
        // all tied: top CoPA is "Framework" (smallest id), matching only m3
        assert_eq!(p1[0].p_at_1, 1.0 / 3.0);
    }

    #[test]
    fn general_exclusion_changes_denominators() {
        let ds = toy();
        let m = matrix(&ds, |_, c| Score::Value(if c == 0 { 0.9 } else { 0.1 }));
        let grid = ThresholdGrid::new(vec![0.5]).unwrap();
        assert!(pr_curve(&m, &ds, true, &grid).is_empty());
        let all = pr_curve(&m, &ds, false, &grid);
        assert_eq!(all[0].recall, 0.25);
        let low = ThresholdGrid::new(vec![0.0]).unwrap();
        let excl = pr_curve(&m, &ds, true, &low);
        assert_eq!(excl[0].recall, 1.0);
        assert_eq!(excl[0].precision, 3.0 / 6.0);
    }

    #[test]
    fn baseline_cases() {
        let ds = toy();
        let b = baseline_largest(&ds, false).unwrap();
        assert_eq!(b.copa_id, "c1");
        assert!((b.precision - 2.0 / 3.0).abs() < 1e-15);
        let sizes = dataset(
            &["ban"],
            &(0..10)
                .map(|i| {
                    (
                        ["m0", "m1", "m2", "m3", "m4", "m5", "m6", "m7", "m8", "m9"][i],
                        "ban",
                        ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"][i],
                    )
                })
                .collect::<Vec<_>>(),
            &["big", "small"],
            &[
                ("m0", "big"),
                ("m1", "big"),
                ("m2", "big"),
                ("m3", "big"),
                ("m4", "small"),
                ("m5", "small"),
            ],
        );
        assert_eq!(baseline_largest(&sizes, false).unwrap().precision, 0.4);
        let all = dataset(&["ban"], &[("m1", "ban", "a")], &["c"], &[("m1", "c")]);
        assert_eq!(baseline_largest(&all, false).unwrap().precision, 1.0);
    }
}
