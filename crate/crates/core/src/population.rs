//! Populations, individuals, and the evaluation budget.

use serde::{Deserialize, Serialize};

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A candidate solution together with its cached objective value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: Vec<f64>,
    pub fitness: f64,
}

/// A fixed-size set of feasible individuals over a shared domain.
#[derive(Debug, Clone)]
pub struct Population {
    pub members: Vec<Individual>,
}

impl Population {
    /// Uniform initialisation inside `domain`. Fitness values are supplied by
    /// the caller so that budget accounting stays in one place.
    pub fn init<E>(domain: &BoxDomain, n: usize, rng: &mut RngStream, mut eval: E) -> Result<Self>
    where
        E: FnMut(&[f64]) -> Result<f64>,
    {
        if n < 4 {
            return Err(Error::Config(format!(
                "population size must be >= 4 for DE mutation, got {n}"
            )));
        }
        let mut members = Vec::with_capacity(n);
        for _ in 0..n {
            let x = domain.sample_uniform(rng);
            let fitness = eval(&x)?;
            members.push(Individual { x, fitness });
        }
        Ok(Self { members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the best (lowest-fitness) member. Ties break to the lowest index.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, m) in self.members.iter().enumerate().skip(1) {
            if m.fitness < self.members[best].fitness {
                best = i;
            }
        }
        best
    }

    pub fn best(&self) -> &Individual {
        &self.members[self.best_index()]
    }

    /// Member indices sorted by ascending fitness. Stable, so equal fitness
    /// preserves member order.
    pub fn ranked_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.members[a]
                .fitness
                .partial_cmp(&self.members[b].fitness)
                .expect("fitness values are never NaN")
        });
        idx
    }
}

/// Counts objective evaluations against a fixed maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    max: u64,
    used: u64,
}

impl Budget {
    pub fn new(max_evaluations: u64) -> Result<Self> {
        if max_evaluations == 0 {
            return Err(Error::Config("budget must be positive".into()));
        }
        Ok(Self {
            max: max_evaluations,
            used: 0,
        })
    }

    /// Consumes one evaluation, returning the 1-based index of that evaluation.
    pub fn consume(&mut self) -> Result<u64> {
        if self.used >= self.max {
            return Err(Error::BudgetExhausted(self.max));
        }
        self.used += 1;
        Ok(self.used)
    }

    pub fn max(&self) -> u64 {
        self.max
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.max - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.max
    }
}
