//! DE mutation and crossover operators.
//!
//! Mutants follow Storn & Price (1997) rand/1 and the current-to-pbest/1
//! strategy of SHADE; crossover is binomial or exponential. All index
//! sampling is rejection from uniform integers, so operators are pure given
//! their `RngStream`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::Population;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Crossover {
    Bin,
    Exp,
}

impl std::fmt::Display for Crossover {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Crossover::Bin => "bin",
            Crossover::Exp => "exp",
        })
    }
}

/// Classic DE control parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeParams {
    pub f: f64,
    pub cr: f64,
    pub crossover: Crossover,
}

impl DeParams {
    pub fn new(f: f64, cr: f64, crossover: Crossover) -> Result<Self> {
        if !f.is_finite() || f <= 0.0 || f > 2.0 {
            return Err(Error::Config(format!("F must lie in (0, 2], got {f}")));
        }
        if !cr.is_finite() || !(0.0..=1.0).contains(&cr) {
            return Err(Error::Config(format!("Cr must lie in [0, 1], got {cr}")));
        }
        Ok(Self { f, cr, crossover })
    }
}

/// Uniform index in `0..n` avoiding `exclude`, by rejection.
fn draw_index(n: usize, exclude: &[usize], rng: &mut RngStream) -> usize {
    debug_assert!(exclude.len() < n);
    loop {
        let j = rng.index(n);
        if !exclude.contains(&j) {
            return j;
        }
    }
}

/// `x_{r1} + F (x_{r2} - x_{r3})` with `r1, r2, r3` and the target all distinct.
pub fn mutate_rand1(
    pop: &Population,
    target_index: usize,
    f: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let n = pop.len();
    if n < 4 {
        return Err(Error::Config(format!(
            "rand/1 needs at least 4 individuals, got {n}"
        )));
    }
    if target_index >= n {
        return Err(Error::Contract("target index out of range"));
    }
    let r1 = draw_index(n, &[target_index], rng);
    let r2 = draw_index(n, &[target_index, r1], rng);
    let r3 = draw_index(n, &[target_index, r1, r2], rng);
    let (x1, x2, x3) = (
        &pop.members[r1].x,
        &pop.members[r2].x,
        &pop.members[r3].x,
    );
    Ok(x1
        .iter()
        .zip(x2)
        .zip(x3)
        .map(|((a, b), c)| a + f * (b - c))
        .collect())
}

/// `x_i + F (x_pbest - x_i) + F (x_{r1} - x~_{r2})`.
///
/// `ranked` must hold the population indices sorted by ascending fitness;
/// `x_pbest` is uniform among the `ceil(p * N)` best (it may coincide with
/// the target, matching the degenerate pool at `ceil(p * N) = 1`). `r1` comes
/// from the population and `r2` from population-plus-archive, both distinct
/// from the target and from each other.
pub fn mutate_current_to_pbest1(
    pop: &Population,
    ranked: &[usize],
    archive: &[Vec<f64>],
    target_index: usize,
    f: f64,
    p: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let n = pop.len();
    if ranked.len() != n {
        return Err(Error::Contract("ranking length differs from population"));
    }
    if target_index >= n {
        return Err(Error::Contract("target index out of range"));
    }
    if !(0.0..=1.0).contains(&p) || p <= 0.0 {
        return Err(Error::Config(format!("p must lie in (0, 1], got {p}")));
    }
    if n < 3 {
        return Err(Error::Config(format!(
            "current-to-pbest/1 needs at least 3 individuals, got {n}"
        )));
    }
    let pool = ((p * n as f64).ceil() as usize).clamp(1, n);
    let pbest = ranked[rng.index(pool)];
    let r1 = draw_index(n, &[target_index], rng);
    let r2 = draw_index(n + archive.len(), &[target_index, r1], rng);

    let xi = &pop.members[target_index].x;
    let xp = &pop.members[pbest].x;
    let x1 = &pop.members[r1].x;
    let x2: &[f64] = if r2 < n {
        &pop.members[r2].x
    } else {
        &archive[r2 - n]
    };
    Ok((0..xi.len())
        .map(|j| xi[j] + f * (xp[j] - xi[j]) + f * (x1[j] - x2[j]))
        .collect())
}

/// Binomial crossover: each component takes the mutant with probability `Cr`,
/// and `j_rand` guarantees at least one mutant component.
pub fn crossover_bin(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    if target.len() != mutant.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            got: mutant.len(),
        });
    }
    let n = target.len();
    let j_rand = rng.index(n);
    Ok((0..n)
        .map(|j| {
            if j == j_rand || rng.uniform() < cr {
                mutant[j]
            } else {
                target[j]
            }
        })
        .collect())
}

/// Exponential crossover: one circularly-contiguous block of mutant
/// components, extended while successive uniform draws fall below `Cr`.
pub fn crossover_exp(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    if target.len() != mutant.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            got: mutant.len(),
        });
    }
    let n = target.len();
    let mut trial = target.to_vec();
    let mut j = rng.index(n);
    let mut copied = 0;
    loop {
        trial[j] = mutant[j];
        copied += 1;
        if copied == n || rng.uniform() >= cr {
            break;
        }
        j = (j + 1) % n;
    }
    Ok(trial)
}

/// Probability that a given trial component originates from the mutant.
///
/// BIN: `Cr (1 - 1/n) + 1/n`. EXP: `(1 - Cr^n) / (n (1 - Cr))`, with the
/// `Cr -> 1` limit equal to 1.
pub fn mutation_probability(crossover: Crossover, cr: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("dimension must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&cr) {
        return Err(Error::Config(format!("Cr must lie in [0, 1], got {cr}")));
    }
    let nf = n as f64;
    Ok(match crossover {
        Crossover::Bin => cr * (1.0 - 1.0 / nf) + 1.0 / nf,
        Crossover::Exp => {
            if cr == 1.0 {
                1.0
            } else {
                (1.0 - cr.powi(n as i32)) / (nf * (1.0 - cr))
            }
        }
    })
}
