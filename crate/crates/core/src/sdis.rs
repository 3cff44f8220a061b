//! Strategies of Dealing with Infeasible Solutions (SDIS).
//!
//! DE mutation can place trial components outside the box domain; with
//! `F <= 1` every violation lands in `[2a-b, a) ∪ (b, 2b-a]`. Each strategy
//! maps a violating component `z` back into `[a, b]`, per component:
//!
//! * `sat`  - saturation: clamp to the violated bound.
//! * `mir`  - mirroring: reflect off the bound, `2b - z` (upper) or `2a - z`
//!   (lower), re-applied while still outside.
//! * `tor`  - toroidal wrap: re-enter from the opposite bound, `a + (z - b)`
//!   (upper) or `b - (a - z)` (lower).
//! * `uni`  - uniform resampling over `[a, b]`.
//! * `hvb`  - halfway to violated bound: midpoint of the *target* component
//!   and the violated bound, `(x + b) / 2` or `(x + a) / 2`.
//! * `cotn` - Normal draw centred on the violated bound with
//!   `sigma = sigma_factor * (b - a)`, rejection-resampled until feasible.
//!
//! Mirroring and toroidal correction are conjugate: for a single-step
//! violation, `c_mir(z) + c_tor(z) = a + b` exactly.
//!
//! [`apply_sdis`] corrects a whole trial vector and reports the cosine
//! similarity between the pre-correction mutation step `d = z - x` and the
//! corrected step `d_C = c(z) - x`, the per-trial disruptiveness measure used
//! throughout the instrumentation layer.

use serde::{Deserialize, Serialize};

use crate::domain::{BoxDomain, Side};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Re-application cap for mirroring and toroidal wrapping. Violations deeper
/// than `|b - a|` only arise with F > 1; after the cap the component is
/// saturated.
const REWRAP_CAP: usize = 10;

/// The six correction strategies, in the fixed alphabetical order used for
/// reports and grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SdisKind {
    Cotn,
    Hvb,
    Mir,
    Sat,
    Tor,
    Uni,
}

impl SdisKind {
    pub const ALL: [SdisKind; 6] = [
        SdisKind::Cotn,
        SdisKind::Hvb,
        SdisKind::Mir,
        SdisKind::Sat,
        SdisKind::Tor,
        SdisKind::Uni,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SdisKind::Cotn => "cotn",
            SdisKind::Hvb => "hvb",
            SdisKind::Mir => "mir",
            SdisKind::Sat => "sat",
            SdisKind::Tor => "tor",
            SdisKind::Uni => "uni",
        }
    }
}

impl std::str::FromStr for SdisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cotn" => Ok(SdisKind::Cotn),
            "hvb" => Ok(SdisKind::Hvb),
            "mir" => Ok(SdisKind::Mir),
            "sat" => Ok(SdisKind::Sat),
            "tor" => Ok(SdisKind::Tor),
            "uni" => Ok(SdisKind::Uni),
            other => Err(Error::Parse(format!("unknown SDIS kind: {other}"))),
        }
    }
}

impl std::fmt::Display for SdisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A configured correction operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sdis {
    pub kind: SdisKind,
    /// `sigma = cotn_sigma_factor * (b - a)` for the `cotn` strategy.
    /// Ignored by the other five.
    pub cotn_sigma_factor: f64,
}

pub const DEFAULT_COTN_SIGMA_FACTOR: f64 = 1.0 / 3.0;

impl Sdis {
    pub fn new(kind: SdisKind) -> Self {
        Self {
            kind,
            cotn_sigma_factor: DEFAULT_COTN_SIGMA_FACTOR,
        }
    }

    pub fn with_sigma_factor(kind: SdisKind, cotn_sigma_factor: f64) -> Result<Self> {
        if !cotn_sigma_factor.is_finite() || cotn_sigma_factor <= 0.0 {
            return Err(Error::Config(format!(
                "cotn sigma factor must be finite and positive, got {cotn_sigma_factor}"
            )));
        }
        Ok(Self {
            kind,
            cotn_sigma_factor,
        })
    }
}

/// The result of correcting one trial vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionOutcome {
    pub corrected: Vec<f64>,
    /// Number of components that were infeasible and got corrected.
    pub n_corrected: usize,
    /// `cos(d, d_C)` clamped to `[-1, 1]`; `None` when the trial was feasible
    /// or either step vector has zero norm.
    pub cosine: Option<f64>,
}

/// Corrects a single component `z` that violates `side` of `[a, b]`.
/// `x` is the corresponding component of the target individual.
pub fn correct_component(
    sdis: Sdis,
    a: f64,
    b: f64,
    x: f64,
    z: f64,
    side: Side,
    rng: &mut RngStream,
) -> f64 {
    debug_assert!(a < b);
    debug_assert!(match side {
        Side::Lower => z < a,
        Side::Upper => z > b,
    });
    match sdis.kind {
        SdisKind::Sat => match side {
            Side::Lower => a,
            Side::Upper => b,
        },
        SdisKind::Mir => {
            let mut v = z;
            for _ in 0..REWRAP_CAP {
                if v < a {
                    v = 2.0 * a - v;
                } else if v > b {
                    v = 2.0 * b - v;
                } else {
                    return v;
                }
            }
            v.clamp(a, b)
        }
        SdisKind::Tor => {
            let mut v = z;
            for _ in 0..REWRAP_CAP {
                if v < a {
                    v = b - (a - v);
                } else if v > b {
                    v = a + (v - b);
                } else {
                    return v;
                }
            }
            v.clamp(a, b)
        }
        SdisKind::Uni => rng.uniform_in(a, b),
        SdisKind::Hvb => match side {
            Side::Lower => (x + a) / 2.0,
            Side::Upper => (x + b) / 2.0,
        },
        SdisKind::Cotn => {
            let bound = match side {
                Side::Lower => a,
                Side::Upper => b,
            };
            let sigma = sdis.cotn_sigma_factor * (b - a);
            loop {
                let v = rng.normal(bound, sigma);
                if (a..=b).contains(&v) {
                    return v;
                }
            }
        }
    }
}

/// Corrects `trial` against `domain`, measuring disruptiveness relative to
/// `target`. Feasible components pass through unchanged.
pub fn apply_sdis(
    sdis: Sdis,
    domain: &BoxDomain,
    target: &[f64],
    trial: &[f64],
    rng: &mut RngStream,
) -> Result<CorrectionOutcome> {
    if target.len() != domain.n() {
        return Err(Error::DimensionMismatch {
            expected: domain.n(),
            got: target.len(),
        });
    }
    let violations = domain.infeasible_components(trial)?;
    if violations.is_empty() {
        return Ok(CorrectionOutcome {
            corrected: trial.to_vec(),
            n_corrected: 0,
            cosine: None,
        });
    }
    let mut corrected = trial.to_vec();
    for &(i, side) in &violations {
        corrected[i] = correct_component(
            sdis,
            domain.lower()[i],
            domain.upper()[i],
            target[i],
            trial[i],
            side,
            rng,
        );
    }
    let d: Vec<f64> = trial.iter().zip(target).map(|(z, x)| z - x).collect();
    let d_c: Vec<f64> = corrected.iter().zip(target).map(|(c, x)| c - x).collect();
    let cosine = cosine_similarity(&d, &d_c).ok();
    Ok(CorrectionOutcome {
        corrected,
        n_corrected: violations.len(),
        cosine,
    })
}

/// Cosine similarity `u . v / (|u| |v|)`, clamped to `[-1, 1]`.
/// Undefined (an error) when either vector has zero norm.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::UndefinedInput(
            "cosine similarity of a zero-norm vector",
        ));
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}
