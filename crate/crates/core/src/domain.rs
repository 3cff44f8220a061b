//! Box domains: Cartesian products of closed intervals `[a_i, b_i]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Which bound a component violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Lower,
    Upper,
}

/// A box-constrained search domain. Boundary points are feasible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::Config("domain dimensionality must be >= 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (i, (a, b)) in lower.iter().zip(&upper).enumerate() {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(Error::Config(format!(
                    "bounds must be finite with lower < upper, got [{a}, {b}] at component {i}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[a, b]^n`.
    pub fn cube(n: usize, a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a; n], vec![b; n])
    }

    pub fn unit(n: usize) -> Self {
        Self::cube(n, 0.0, 1.0).expect("unit cube is valid")
    }

    pub fn n(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// True iff `a_i <= x_i <= b_i` for every component.
    pub fn is_feasible(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((v, a), b)| *v >= *a && *v <= *b))
    }

    /// Indices of out-of-bounds components, with the violated side.
    pub fn infeasible_components(&self, x: &[f64]) -> Result<Vec<(usize, Side)>> {
        self.check_dim(x)?;
        let mut out = Vec::new();
        for (i, v) in x.iter().enumerate() {
            if *v < self.lower[i] {
                out.push((i, Side::Lower));
            } else if *v > self.upper[i] {
                out.push((i, Side::Upper));
            }
        }
        Ok(out)
    }

    pub fn sample_uniform(&self, rng: &mut RngStream) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| rng.uniform_in(*a, *b))
            .collect()
    }
}
