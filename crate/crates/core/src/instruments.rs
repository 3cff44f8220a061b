//! Run-time measurement: correction disruptiveness, population diversity,
//! and infeasibility rates.
//!
//! A [`RunLog`] collects three streams while an engine runs: one
//! [`CorrectionRecord`] per infeasible trial, one [`GenRecord`] per
//! generation (generation 0 snapshots the initial population with zero
//! trials), and best-so-far improvements at evaluation resolution. The
//! derived statistics live here as free functions so they can also be
//! applied to logs read back from disk.

use serde::{Deserialize, Serialize};

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::population::Population;

/// One corrected (initially infeasible) trial vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionRecord {
    /// 1-based objective-evaluation index of the trial.
    pub eval_index: u64,
    pub generation: u64,
    pub n_corrected: usize,
    /// Disruptiveness `cos(d, d_C)`; `None` when a step vector had zero norm.
    pub cosine: Option<f64>,
}

/// Per-generation aggregates. `infeasible_components` and
/// `components_generated` feed `violation_frequency`; the CSV schema keeps
/// the six report columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenRecord {
    pub generation: u64,
    pub diversity: f64,
    pub infeasible_trials: u64,
    pub trials: u64,
    pub best_fitness: f64,
    pub pop_size: usize,
    pub infeasible_components: u64,
    pub components_generated: u64,
}

/// End-of-run accounting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Proportion of infeasible solutions: trials with at least one
    /// corrected component over total trials.
    pub final_pois: f64,
    pub total_infeasible_components: u64,
    pub total_components_generated: u64,
}

/// A best-so-far improvement: the run's incumbent fitness dropped to
/// `fitness` at `eval_index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub eval_index: u64,
    pub fitness: f64,
}

/// Which streams an engine should populate. Generation records are always
/// kept; they are one row per generation and feed the summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstrumentSet {
    pub record_corrections: bool,
    pub record_improvements: bool,
}

impl Default for InstrumentSet {
    fn default() -> Self {
        Self {
            record_corrections: true,
            record_improvements: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub corrections: Vec<CorrectionRecord>,
    pub generations: Vec<GenRecord>,
    pub improvements: Vec<Improvement>,
}

impl RunLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_correction(&mut self, rec: CorrectionRecord) {
        if let Some(last) = self.corrections.last() {
            assert!(
                rec.eval_index > last.eval_index,
                "correction eval_index must be strictly increasing"
            );
        }
        self.corrections.push(rec);
    }

    pub fn push_generation(&mut self, rec: GenRecord) {
        self.generations.push(rec);
    }

    pub fn push_improvement(&mut self, rec: Improvement) {
        self.improvements.push(rec);
    }

    pub fn total_trials(&self) -> u64 {
        self.generations.iter().map(|g| g.trials).sum()
    }

    pub fn total_infeasible_trials(&self) -> u64 {
        self.generations.iter().map(|g| g.infeasible_trials).sum()
    }

    /// Recorded cosine values in trial order.
    pub fn cosines(&self) -> Vec<f64> {
        self.corrections.iter().filter_map(|c| c.cosine).collect()
    }

    pub fn summary(&self) -> Summary {
        let trials = self.total_trials();
        let final_pois = if trials == 0 {
            0.0
        } else {
            self.total_infeasible_trials() as f64 / trials as f64
        };
        Summary {
            final_pois,
            total_infeasible_components: self
                .generations
                .iter()
                .map(|g| g.infeasible_components)
                .sum(),
            total_components_generated: self
                .generations
                .iter()
                .map(|g| g.components_generated)
                .sum(),
        }
    }
}

/// Mean over dimensions of the population standard deviation (divisor `N`)
/// of each component.
pub fn diversity(pop: &Population, domain: &BoxDomain) -> Result<f64> {
    let n_pop = pop.len();
    if n_pop < 2 {
        return Err(Error::UndefinedInput(
            "diversity of a population with fewer than 2 members",
        ));
    }
    let dim = domain.n();
    for m in &pop.members {
        if m.x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.x.len(),
            });
        }
    }
    let nf = n_pop as f64;
    let mut acc = 0.0;
    for i in 0..dim {
        // Variance is translation invariant; pivoting on the first member
        // makes it exactly zero for identical populations.
        let pivot = pop.members[0].x[i];
        let mean: f64 = pop.members.iter().map(|m| m.x[i] - pivot).sum::<f64>() / nf;
        let var: f64 = pop
            .members
            .iter()
            .map(|m| (m.x[i] - pivot - mean).powi(2))
            .sum::<f64>()
            / nf;
        acc += var.sqrt();
    }
    Ok(acc / dim as f64)
}

/// Generation records that actually produced trials (the generation-0 init
/// snapshot has none).
fn trial_gens(log: &RunLog) -> impl Iterator<Item = &GenRecord> {
    log.generations.iter().filter(|g| g.trials > 0)
}

/// Moving average over `window` generations of the per-generation infeasible
/// fraction.
pub fn windowed_pois(log: &RunLog, window: usize) -> Result<Vec<(u64, f64)>> {
    if window < 1 {
        return Err(Error::Config("window must be >= 1".into()));
    }
    let fracs: Vec<(u64, f64)> = trial_gens(log)
        .map(|g| (g.generation, g.infeasible_trials as f64 / g.trials as f64))
        .collect();
    Ok(fracs
        .iter()
        .enumerate()
        .map(|(k, &(gen, _))| {
            let lo = k + 1 - window.min(k + 1);
            let slice = &fracs[lo..=k];
            let mean = slice.iter().map(|&(_, f)| f).sum::<f64>() / slice.len() as f64;
            (gen, mean)
        })
        .collect())
}

/// Running fraction of infeasible trials among all trials generated so far.
pub fn cumulative_pois(log: &RunLog) -> Vec<(u64, f64)> {
    let mut infeasible = 0u64;
    let mut trials = 0u64;
    trial_gens(log)
        .map(|g| {
            infeasible += g.infeasible_trials;
            trials += g.trials;
            (g.generation, infeasible as f64 / trials as f64)
        })
        .collect()
}

/// Total infeasible components over total components generated within the
/// first `horizon_generations` trial generations.
pub fn violation_frequency(log: &RunLog, horizon_generations: usize) -> Result<f64> {
    let gens: Vec<&GenRecord> = trial_gens(log).collect();
    if horizon_generations > gens.len() {
        return Err(Error::Config(format!(
            "horizon {horizon_generations} exceeds {} recorded trial generations",
            gens.len()
        )));
    }
    let slice = &gens[..horizon_generations];
    let comps: u64 = slice.iter().map(|g| g.components_generated).sum();
    if comps == 0 {
        return Err(Error::UndefinedInput(
            "violation frequency over zero generated components",
        ));
    }
    let infeasible: u64 = slice.iter().map(|g| g.infeasible_components).sum();
    Ok(infeasible as f64 / comps as f64)
}

/// Empirical CDF of `values` sampled at `grid`: fraction of values `<= x`.
pub fn cs_ecdf(values: &[f64], grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::UndefinedInput("ECDF of an empty sample"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("ECDF values are never NaN"));
    let n = sorted.len() as f64;
    Ok(grid
        .iter()
        .map(|&x| {
            let count = sorted.partition_point(|&v| v <= x);
            (x, count as f64 / n)
        })
        .collect())
}
