//! Cross-track error statistics and comparison tables.

use alloc::vec::Vec;

use crate::cpg::AmplitudeMode;
use crate::error::Error;
use crate::guidance::GuidanceMode;
use crate::simcore::{TrialLog, TrialResult};

/// Cross-track samples in log order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorSeries {
    pub samples: Vec<f64>,
}

impl ErrorSeries {
    pub fn new(samples: Vec<f64>) -> Self {
        ErrorSeries { samples }
    }

    /// Logged cross-track errors with `t >= warmup` seconds.
    pub fn from_log(log: &TrialLog, warmup: f64) -> Self {
        ErrorSeries {
            samples: log
                .rows
                .iter()
                .filter(|r| r.t >= warmup)
                .map(|r| r.y_e)
                .collect(),
        }
    }

    pub fn rmse(&self) -> Result<f64, Error> {
        rmse(&self.samples)
    }

    pub fn mae(&self) -> Result<f64, Error> {
        mae(&self.samples)
    }
}

/// Root mean square of `samples`.
pub fn rmse(samples: &[f64]) -> Result<f64, Error> {
    if samples.is_empty() {
        return Err(Error::EmptySeries);
    }
    let sq: f64 = samples.iter().map(|e| e * e).sum();
    Ok(libm::sqrt(sq / samples.len() as f64))
}

/// Mean absolute value of `samples`.
pub fn mae(samples: &[f64]) -> Result<f64, Error> {
    if samples.is_empty() {
        return Err(Error::EmptySeries);
    }
    let abs: f64 = samples.iter().map(|e| libm::fabs(*e)).sum();
    Ok(abs / samples.len() as f64)
}

/// Sweep cell identifier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialKey {
    pub guidance: GuidanceMode,
    pub amplitude: AmplitudeMode,
    /// Look-ahead distance in body lengths.
    pub delta_multiple: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonRow {
    pub key: TrialKey,
    pub rmse: f64,
    pub mae: f64,
    pub completed: bool,
    pub sim_seconds: f64,
}

/// One row per trial, ordered by guidance mode, amplitude mode, then
/// look-ahead multiple.
pub fn aggregate<'a, I>(results: I) -> Vec<ComparisonRow>
where
    I: IntoIterator<Item = (TrialKey, &'a TrialResult)>,
{
    let mut rows: Vec<ComparisonRow> = results
        .into_iter()
        .map(|(key, r)| ComparisonRow {
            key,
            rmse: r.rmse,
            mae: r.mae,
            completed: r.completed,
            sim_seconds: r.sim_seconds(),
        })
        .collect();
    rows.sort_by(|a, b| {
        a.key
            .guidance
            .cmp(&b.key.guidance)
            .then(a.key.amplitude.cmp(&b.key.amplitude))
            .then(a.key.delta_multiple.total_cmp(&b.key.delta_multiple))
    });
    rows
}
