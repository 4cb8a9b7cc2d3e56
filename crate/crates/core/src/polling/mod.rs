//! Pattern polling: every analyzer votes for the grid points its pattern occurrences cover,
//! the weighted vote counts form a salience curve, and the curve's smoothed critical points
//! are taken as pattern boundaries.

mod boundaries;
mod curve;
mod savgol;
mod train;

pub use boundaries::{extract_boundaries, BoundarySet, PpParams};
pub use curve::{polling_curve, AlgorithmWeights, PollingCurve};
pub use savgol::{savgol_coefficients, savgol_smooth};
pub use train::{train_pp, Objective, ParamGrid, TrainConfig, TrainOutcome, TrainingPiece};

use std::ops::Sub;

use crate::error::{invalid, Result};

/// Forward differences: `first[t] = v[t+1] - v[t]`, `second[t] = first[t+1] - first[t]`.
pub fn derivatives<T>(values: &[T]) -> Result<(Vec<T>, Vec<T>)>
where
    T: Copy + Sub<Output = T>,
{
    if values.len() < 3 {
        return Err(invalid(format!("derivatives need at least 3 values, got {}", values.len())));
    }
    let first: Vec<T> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let second: Vec<T> = first.windows(2).map(|w| w[1] - w[0]).collect();
    Ok((first, second))
}
