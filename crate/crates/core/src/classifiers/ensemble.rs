use super::{Score, ScoreMatrix};
use crate::error::{Error, Result};

/// Elementwise max over the non-abstaining inputs.
pub fn ensemble_scores(rows: &[&[Score]]) -> Vec<Score> {
    let n = rows.first().map_or(0, |r| r.len());
    (0..n)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r[c].value())
                .reduce(f64::max)
                .map_or(Score::Abstain, Score::Value)
        })
        .collect()
}

/// Max-ensemble of score matrices over identical motion and CoPA ids.
pub fn ensemble(matrices: &[ScoreMatrix]) -> Result<ScoreMatrix> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::Domain("ensemble needs at least one matrix".into()))?;
    if let Some(bad) = matrices
        .iter()
        .find(|m| m.motion_ids != first.motion_ids || m.copa_ids != first.copa_ids)
    {
        return Err(Error::Domain(format!(
            "matrix `{}` does not share ids with `{}`",
            bad.method, first.method
        )));
    }
    let mut out = ScoreMatrix::abstaining("ensemble", first.motion_ids.clone(), first.copa_ids.clone());
    for m in 0..first.n_motions() {
        let rows: Vec<&[Score]> = matrices.iter().map(|x| x.row(m)).collect();
        out.set_row(m, &ensemble_scores(&rows))?;
    }
    Ok(out)
}
