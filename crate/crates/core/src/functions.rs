//! Objective functions: the stochastic flat landscape `f0` and a small
//! shifted suite on `[-5, 5]^n`.
//!
//! `f0(x) ~ U(0, 1)` afresh on every call, independent of `x`; it removes
//! selection pressure so that boundary effects can be observed in isolation.
//! The suite functions are classic separable/ridge/multimodal shapes with a
//! per-instance shift `s` drawn uniformly in `[-4, 4]^n` (instance 0 keeps
//! `s = 0`); `linear_slope` uses only the sign pattern of the draw and puts
//! its optimum on a domain corner. All suite minima equal 0.

use serde::{Deserialize, Serialize};

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionId {
    F0,
    Sphere,
    Ellipsoidal,
    LinearSlope,
    Rosenbrock,
    Rastrigin,
    Katsuura,
}

impl FunctionId {
    pub const ALL: [FunctionId; 7] = [
        FunctionId::F0,
        FunctionId::Sphere,
        FunctionId::Ellipsoidal,
        FunctionId::LinearSlope,
        FunctionId::Rosenbrock,
        FunctionId::Rastrigin,
        FunctionId::Katsuura,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionId::F0 => "f0",
            FunctionId::Sphere => "sphere",
            FunctionId::Ellipsoidal => "ellipsoidal",
            FunctionId::LinearSlope => "linear_slope",
            FunctionId::Rosenbrock => "rosenbrock",
            FunctionId::Rastrigin => "rastrigin",
            FunctionId::Katsuura => "katsuura",
        }
    }
}

impl std::str::FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FunctionId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown function id: {s}")))
    }
}

impl std::fmt::Display for FunctionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Anything an engine can optimise. `rng` is consumed only by stochastic
/// objectives; deterministic ones ignore it.
pub trait Objective {
    fn domain(&self) -> &BoxDomain;
    fn eval(&self, x: &[f64], rng: &mut RngStream) -> f64;
}

/// A plain function over a domain, for tests and custom landscapes.
pub struct FnObjective<F: Fn(&[f64]) -> f64> {
    pub domain: BoxDomain,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64> Objective for FnObjective<F> {
    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn eval(&self, x: &[f64], _rng: &mut RngStream) -> f64 {
        (self.f)(x)
    }
}

/// A concrete benchmark instance: id, dimension, domain, and shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveFunction {
    pub id: FunctionId,
    pub n: usize,
    pub instance: u64,
    domain: BoxDomain,
    /// Shift `s` for suite functions; empty for `f0`.
    shift: Vec<f64>,
}

impl ObjectiveFunction {
    /// The flat stochastic landscape on `[0, 1]^n`.
    pub fn f0(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("dimension must be >= 1".into()));
        }
        Ok(Self {
            id: FunctionId::F0,
            n,
            instance: 0,
            domain: BoxDomain::unit(n),
            shift: Vec::new(),
        })
    }

    /// A shifted suite function on `[-5, 5]^n`.
    pub fn suite(id: FunctionId, n: usize, instance: u64) -> Result<Self> {
        if id == FunctionId::F0 {
            return Err(Error::Config(
                "f0 is not a suite function; use ObjectiveFunction::f0".into(),
            ));
        }
        if n == 0 {
            return Err(Error::Config("dimension must be >= 1".into()));
        }
        if id == FunctionId::Rosenbrock && n < 2 {
            return Err(Error::Config("rosenbrock needs n >= 2".into()));
        }
        let mut shift = vec![0.0; n];
        if instance > 0 {
            let mut rng = RngStream::new(instance).child(id.name(), instance);
            for v in &mut shift {
                *v = rng.uniform_in(-4.0, 4.0);
            }
        }
        if id == FunctionId::LinearSlope {
            for v in &mut shift {
                *v = if *v >= 0.0 { 5.0 } else { -5.0 };
            }
        }
        Ok(Self {
            id,
            n,
            instance,
            domain: BoxDomain::cube(n, -5.0, 5.0)?,
            shift,
        })
    }

    /// Constructor over every id, for configuration-driven callers.
    pub fn new(id: FunctionId, n: usize, instance: u64) -> Result<Self> {
        match id {
            FunctionId::F0 => Self::f0(n),
            _ => Self::suite(id, n, instance),
        }
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// Location of the global minimum; `None` for `f0` (every point is a
    /// fresh uniform draw).
    pub fn optimum_location(&self) -> Option<Vec<f64>> {
        match self.id {
            FunctionId::F0 => None,
            _ => Some(self.shift.clone()),
        }
    }

    /// Known minimum value: 0 for every suite function, `None` for `f0`.
    pub fn optimum_value(&self) -> Option<f64> {
        match self.id {
            FunctionId::F0 => None,
            _ => Some(0.0),
        }
    }
}

impl Objective for ObjectiveFunction {
    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn eval(&self, x: &[f64], rng: &mut RngStream) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        let s = &self.shift;
        match self.id {
            FunctionId::F0 => rng.uniform(),
            FunctionId::Sphere => x.iter().zip(s).map(|(v, si)| (v - si).powi(2)).sum(),
            FunctionId::Ellipsoidal => {
                let n = self.n;
                x.iter()
                    .zip(s)
                    .enumerate()
                    .map(|(i, (v, si))| {
                        let e = if n > 1 {
                            6.0 * i as f64 / (n as f64 - 1.0)
                        } else {
                            0.0
                        };
                        10f64.powf(e) * (v - si).powi(2)
                    })
                    .sum()
            }
            FunctionId::LinearSlope => x
                .iter()
                .zip(s)
                .map(|(v, si)| 5.0 * si.abs() - si * v)
                .sum(),
            FunctionId::Rosenbrock => {
                let z: Vec<f64> = x.iter().zip(s).map(|(v, si)| v - si + 1.0).collect();
                (0..self.n - 1)
                    .map(|i| {
                        100.0 * (z[i] * z[i] - z[i + 1]).powi(2) + (z[i] - 1.0).powi(2)
                    })
                    .sum()
            }
            FunctionId::Rastrigin => {
                let nf = self.n as f64;
                10.0 * nf
                    + x.iter()
                        .zip(s)
                        .map(|(v, si)| {
                            let z = v - si;
                            z * z - 10.0 * (2.0 * std::f64::consts::PI * z).cos()
                        })
                        .sum::<f64>()
            }
            FunctionId::Katsuura => {
                let nf = self.n as f64;
                let scale = 10.0 / (nf * nf);
                let exp = 10.0 / nf.powf(1.2);
                let prod: f64 = x
                    .iter()
                    .zip(s)
                    .enumerate()
                    .map(|(i, (v, si))| {
                        let z = v - si;
                        let inner: f64 = (1..=32)
                            .map(|j| {
                                let t = 2f64.powi(j) * z;
                                (t - t.round()).abs() / 2f64.powi(j)
                            })
                            .sum();
                        (1.0 + (i as f64 + 1.0) * inner).powf(exp)
                    })
                    .product();
                scale * prod - scale
            }
        }
    }
}
