//! Leave-one-motion-out evaluation and the curves computed from its scores.

mod curves;
mod kappa;
mod loo;
pub mod report;

pub use curves::{baseline_largest, p_at_1_curve, pr_curve, Baseline, CoverageP1Point, PrPoint};
pub use kappa::cohen_kappa;
pub use loo::{eligible, leave_one_out, EvalConfig, LooOutput};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Score thresholds swept by the curves; strictly increasing within `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ThresholdGrid(Vec<f64>);

impl ThresholdGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("threshold grid is empty".into()));
        }
        if values.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::Domain("thresholds must lie in [0, 1]".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("thresholds must be strictly increasing".into()));
        }
        Ok(ThresholdGrid(values))
    }

    /// `0, 1/steps, ..., 1`.
    pub fn uniform(steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Domain("grid needs at least one step".into()));
        }
        Self::new((0..=steps).map(|i| i as f64 / steps as f64).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl Default for ThresholdGrid {
    fn default() -> Self {
        ThresholdGrid::uniform(100).expect("static grid is valid")
    }
}

impl TryFrom<Vec<f64>> for ThresholdGrid {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        ThresholdGrid::new(v)
    }
}

impl From<ThresholdGrid> for Vec<f64> {
    fn from(g: ThresholdGrid) -> Self {
        g.0
    }
}
