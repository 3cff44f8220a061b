//! Differential evolution with swappable box-constraint handling.
//!
//! DE mutation routinely pushes trial components outside the search box;
//! what happens next is decided by a Strategy of Dealing with Infeasible
//! Solutions (SDIS). This crate treats that correction step as a first-class
//! operator next to mutation and crossover, instruments how much it disturbs
//! the search, and ships the closed-form predictions needed to check the
//! measurements against theory:
//!
//! * [`sdis`] - six component-wise corrections (saturation, mirroring,
//!   toroidal wrap, uniform resampling, halfway-to-bound, bound-centred
//!   normal resampling) plus the cosine disruptiveness measure.
//! * [`variation`] - rand/1 and current-to-pbest/1 mutation, binomial and
//!   exponential crossover, and the mutant-component probability `p_m`.
//! * [`engines`] - DE/rand/1/{bin,exp}, SHADE, and L-SHADE loops with
//!   budget-exact termination and per-trial instrumentation.
//! * [`functions`] - the selection-pressure-free stochastic landscape `f0`
//!   and a small shifted benchmark suite on `[-5, 5]^n`.
//! * [`instruments`] - run logs, diversity, violation frequency, and the
//!   proportion-of-infeasible-solutions (POIS) statistics.
//! * [`theory`] - violation-probability recursion, corrected-component
//!   moments, the beta variance term, and randomized proposition checks.
//! * [`analysis`] - hitting times, expected running time (ERT), and
//!   fixed-target ECDF curves.
//! * [`logio`] - versioned CSV/JSON run bundles with exact float round-trip.
//!
//! Determinism is strict: every run is a pure function of its seed. Child
//! RNG streams ([`rng::RngStream::child`]) derive from the parent seed, not
//! the parent state, so algorithm decisions and stochastic objective draws
//! never interleave.

pub mod analysis;
pub mod domain;
pub mod engines;
pub mod error;
pub mod functions;
pub mod instruments;
pub mod logio;
pub mod population;
pub mod rng;
pub mod sdis;
pub mod theory;
pub mod variation;

pub use analysis::{default_cs_grid, default_targets, ert, fixed_target_ecdf, hitting_time};
pub use domain::{BoxDomain, Side};
pub use engines::{run, EngineConfig, EngineKind, RunResult, ShadeState};
pub use error::{Error, Result};
pub use functions::{FnObjective, FunctionId, Objective, ObjectiveFunction};
pub use instruments::{
    cs_ecdf, cumulative_pois, diversity, violation_frequency, windowed_pois, CorrectionRecord,
    GenRecord, Improvement, InstrumentSet, RunLog, Summary,
};
pub use population::{Budget, Individual, Population};
pub use rng::{derive_seed, RngStream};
pub use sdis::{
    apply_sdis, correct_component, cosine_similarity, CorrectionOutcome, Sdis, SdisKind,
};
pub use variation::{
    crossover_bin, crossover_exp, mutate_current_to_pbest1, mutate_rand1, mutation_probability,
    Crossover, DeParams,
};
