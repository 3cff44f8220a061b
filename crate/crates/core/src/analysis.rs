//! Post-hoc performance analysis: hitting times, expected running time, and
//! fixed-target ECDF curves over best-so-far trajectories.

use crate::error::{Error, Result};
use crate::instruments::Improvement;

/// First evaluation index at which the best-so-far fitness reached `target`,
/// if any.
pub fn hitting_time(improvements: &[Improvement], target: f64) -> Option<u64> {
    improvements
        .iter()
        .find(|imp| imp.fitness <= target)
        .map(|imp| imp.eval_index)
}

/// Expected running time: `sum_i min(t_i, B) / #{t_i < inf}`. Runs that never
/// hit the target contribute the full budget; with zero successes the result
/// is the `+inf` sentinel.
pub fn ert(hitting_times: &[Option<u64>], budget: u64) -> Result<f64> {
    if hitting_times.is_empty() {
        return Err(Error::UndefinedInput("ERT over zero runs"));
    }
    let successes = hitting_times.iter().filter(|t| t.is_some()).count();
    if successes == 0 {
        return Ok(f64::INFINITY);
    }
    let total: u64 = hitting_times
        .iter()
        .map(|t| t.map_or(budget, |v| v.min(budget)))
        .sum();
    Ok(total as f64 / successes as f64)
}

/// 51 logarithmically spaced precision targets from 1e-8 up to 1e2.
pub fn default_targets() -> Vec<f64> {
    (0..51).map(|k| 10f64.powf(-8.0 + 0.2 * k as f64)).collect()
}

/// Default sampling grid for cosine-similarity ECDFs: 201 points on [-1, 1].
pub fn default_cs_grid() -> Vec<f64> {
    (0..201).map(|k| -1.0 + 0.01 * k as f64).collect()
}

/// Fraction of (run, target) pairs achieved, as a step function of the
/// evaluation count. One point per evaluation where at least one pair is
/// first hit.
pub fn fixed_target_ecdf<T: AsRef<[Improvement]>>(
    runs: &[T],
    targets: &[f64],
) -> Vec<(u64, f64)> {
    let total = runs.len() * targets.len();
    if total == 0 {
        return Vec::new();
    }
    let mut hits: Vec<u64> = runs
        .iter()
        .flat_map(|run| {
            targets
                .iter()
                .filter_map(|&t| hitting_time(run.as_ref(), t))
        })
        .collect();
    hits.sort_unstable();
    let mut curve: Vec<(u64, f64)> = Vec::new();
    for (k, eval) in hits.iter().enumerate() {
        let frac = (k + 1) as f64 / total as f64;
        match curve.last_mut() {
            Some(last) if last.0 == *eval => last.1 = frac,
            _ => curve.push((*eval, frac)),
        }
    }
    curve
}
