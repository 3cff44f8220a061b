//! Optimisation loops: DE/rand/1/{bin,exp} (Storn & Price 1997), SHADE, and
//! L-SHADE (Tanabe & Fukunaga 2013/2014), all with a swappable SDIS and full
//! instrumentation.
//!
//! Every engine runs the same synchronous generational skeleton: trials for
//! all targets are built from the generation-start population, corrected by
//! the configured SDIS, evaluated, and accepted by greedy 1-to-1 selection
//! (trial replaces target on `fitness <= target`, so flat landscapes accept
//! everything). The run terminates exactly at budget exhaustion; a final
//! partial generation trials only as many targets as evaluations remain.
//!
//! Randomness is split into two child streams of the run seed: `"algo"` for
//! every operator decision and `"f0"` for stochastic objectives, so the
//! search trajectory of deterministic objectives is unaffected by how often
//! the objective draws.

use serde::{Deserialize, Serialize};

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::functions::Objective;
use crate::instruments::{CorrectionRecord, GenRecord, Improvement, InstrumentSet, RunLog};
use crate::population::{Budget, Individual, Population};
use crate::rng::RngStream;
use crate::sdis::{apply_sdis, Sdis, SdisKind, DEFAULT_COTN_SIGMA_FACTOR};
use crate::variation::{
    crossover_bin, crossover_exp, mutate_current_to_pbest1, mutate_rand1, Crossover, DeParams,
};

pub const LSHADE_N_MIN: usize = 4;
pub const LSHADE_DEFAULT_H: usize = 6;
/// Upper end of SHADE's per-individual `p ~ U(p_min, 0.2)` draw.
pub const SHADE_P_MAX: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    DeRand1,
    Shade,
    Lshade,
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EngineKind::DeRand1 => "de_rand1",
            EngineKind::Shade => "shade",
            EngineKind::Lshade => "lshade",
        })
    }
}

/// One run's full configuration. `n` is the (initial) population size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub engine: EngineKind,
    /// F/Cr/crossover, required for `de_rand1` and rejected otherwise
    /// (SHADE variants self-adapt).
    #[serde(default)]
    pub params: Option<DeParams>,
    pub n: usize,
    pub sdis: SdisKind,
    pub max_evaluations: u64,
    pub seed: u64,
    /// SHADE memory size. Defaults: `n` for SHADE, 6 for L-SHADE.
    #[serde(default)]
    pub h: Option<usize>,
    /// Archive capacity. Defaults to the current population size.
    #[serde(default)]
    pub archive_size: Option<usize>,
    /// Lower end of the `p ~ U(p_min, 0.2)` draw. Defaults to
    /// `min(2/N, 0.2)` with the current population size.
    #[serde(default)]
    pub p_min: Option<f64>,
    #[serde(default)]
    pub cotn_sigma_factor: Option<f64>,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::Config(format!(
                "population size must be >= 4, got {}",
                self.n
            )));
        }
        if self.max_evaluations < self.n as u64 {
            return Err(Error::Config(format!(
                "budget {} cannot evaluate the initial population of {}",
                self.max_evaluations, self.n
            )));
        }
        match self.engine {
            EngineKind::DeRand1 => {
                let p = self
                    .params
                    .ok_or_else(|| Error::Config("de_rand1 requires params".into()))?;
                DeParams::new(p.f, p.cr, p.crossover)?;
            }
            EngineKind::Shade | EngineKind::Lshade => {
                if self.params.is_some() {
                    return Err(Error::Config(
                        "SHADE variants self-adapt F and Cr; params must be absent".into(),
                    ));
                }
            }
        }
        if let Some(h) = self.h {
            if h == 0 {
                return Err(Error::Config("memory size H must be >= 1".into()));
            }
        }
        if let Some(p) = self.p_min {
            if !(p > 0.0 && p <= SHADE_P_MAX) {
                return Err(Error::Config(format!(
                    "p_min must lie in (0, {SHADE_P_MAX}], got {p}"
                )));
            }
        }
        if let Some(s) = self.cotn_sigma_factor {
            Sdis::with_sigma_factor(self.sdis, s)?;
        }
        Ok(())
    }

    fn sdis(&self) -> Sdis {
        Sdis {
            kind: self.sdis,
            cotn_sigma_factor: self
                .cotn_sigma_factor
                .unwrap_or(DEFAULT_COTN_SIGMA_FACTOR),
        }
    }
}

/// SHADE's success-history state.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadeState {
    pub memory_f: Vec<f64>,
    pub memory_cr: Vec<f64>,
    pub memory_index: usize,
    pub archive: Vec<Vec<f64>>,
}

impl ShadeState {
    /// All memory slots start at 0.5.
    pub fn new(h: usize) -> Self {
        Self {
            memory_f: vec![0.5; h],
            memory_cr: vec![0.5; h],
            memory_index: 0,
            archive: Vec::new(),
        }
    }

    /// Appends a replaced parent, evicting a uniformly random entry when the
    /// archive is at capacity.
    pub fn push_archive(&mut self, parent: Vec<f64>, capacity: usize, rng: &mut RngStream) {
        if capacity == 0 {
            return;
        }
        if self.archive.len() < capacity {
            self.archive.push(parent);
        } else {
            let k = rng.index(self.archive.len());
            self.archive[k] = parent;
        }
    }

    /// Drops uniformly random entries until the archive fits `capacity`.
    pub fn shrink_archive(&mut self, capacity: usize, rng: &mut RngStream) {
        while self.archive.len() > capacity {
            let k = rng.index(self.archive.len());
            self.archive.swap_remove(k);
        }
    }
}

/// `F_i ~ Cauchy(mean, 0.1)`, resampled while non-positive, clamped at 1.
pub fn sample_shade_f(mean: f64, rng: &mut RngStream) -> f64 {
    loop {
        let f = rng.cauchy(mean, 0.1);
        if f > 0.0 {
            return f.min(1.0);
        }
    }
}

/// `Cr_i ~ Normal(mean, 0.1)`, clamped to `[0, 1]`.
pub fn sample_shade_cr(mean: f64, rng: &mut RngStream) -> f64 {
    rng.normal(mean, 0.1).clamp(0.0, 1.0)
}

/// Weighted Lehmer mean `sum(w F^2) / sum(w F)`.
pub fn weighted_lehmer_mean(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.is_empty() || values.len() != weights.len() {
        return Err(Error::Contract("Lehmer mean needs matched non-empty inputs"));
    }
    let num: f64 = values.iter().zip(weights).map(|(v, w)| w * v * v).sum();
    let den: f64 = values.iter().zip(weights).map(|(v, w)| w * v).sum();
    if den == 0.0 {
        return Err(Error::UndefinedInput("Lehmer mean with zero denominator"));
    }
    Ok(num / den)
}

/// Weighted arithmetic mean.
pub fn weighted_mean(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.is_empty() || values.len() != weights.len() {
        return Err(Error::Contract("weighted mean needs matched non-empty inputs"));
    }
    let den: f64 = weights.iter().sum();
    if den == 0.0 {
        return Err(Error::UndefinedInput("weighted mean with zero total weight"));
    }
    Ok(values.iter().zip(weights).map(|(v, w)| w * v).sum::<f64>() / den)
}

/// End-of-generation memory update. With no successes the memory and cursor
/// stay untouched.
pub fn shade_memory_update(
    state: &mut ShadeState,
    success_f: &[f64],
    success_cr: &[f64],
    improvements: &[f64],
) -> Result<()> {
    if success_f.is_empty() {
        return Ok(());
    }
    let k = state.memory_index;
    state.memory_f[k] = weighted_lehmer_mean(success_f, improvements)?;
    state.memory_cr[k] = weighted_mean(success_cr, improvements)?;
    state.memory_index = (k + 1) % state.memory_f.len();
    Ok(())
}

/// L-SHADE's linear population-size schedule.
pub fn lshade_target_size(used: u64, max_evaluations: u64, n_init: usize, n_min: usize) -> usize {
    let frac = 1.0 - used as f64 / max_evaluations as f64;
    let target = (n_min as f64 + (n_init as f64 - n_min as f64) * frac).round() as usize;
    target.clamp(n_min, n_init)
}

/// Everything a finished run exposes: the instrument log plus the final
/// population for invariant checks.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub log: RunLog,
    pub population: Population,
    pub evaluations_used: u64,
}

impl RunResult {
    pub fn best(&self) -> &Individual {
        self.population.best()
    }
}

struct RunState<'a> {
    sdis: Sdis,
    domain: &'a BoxDomain,
    algo: RngStream,
    fstream: RngStream,
    budget: Budget,
    log: RunLog,
    run_best: f64,
    instruments: InstrumentSet,
}

impl RunState<'_> {
    fn evaluate(
        &mut self,
        objective: &dyn Objective,
        x: &[f64],
        generation: u64,
        n_corrected: usize,
        cosine: Option<f64>,
    ) -> Result<(u64, f64)> {
        let eval_index = self.budget.consume()?;
        let fitness = objective.eval(x, &mut self.fstream);
        if n_corrected > 0 && self.instruments.record_corrections {
            self.log.push_correction(CorrectionRecord {
                eval_index,
                generation,
                n_corrected,
                cosine,
            });
        }
        if fitness < self.run_best {
            self.run_best = fitness;
            if self.instruments.record_improvements {
                self.log.push_improvement(Improvement {
                    eval_index,
                    fitness,
                });
            }
        }
        Ok((eval_index, fitness))
    }
}

/// Runs one engine to budget exhaustion.
pub fn run(
    config: &EngineConfig,
    objective: &dyn Objective,
    instruments: InstrumentSet,
) -> Result<RunResult> {
    config.validate()?;
    let domain = objective.domain();
    let master = RngStream::new(config.seed);
    let mut state = RunState {
        sdis: config.sdis(),
        domain,
        algo: master.child("algo", 0),
        fstream: master.child("f0", 0),
        budget: Budget::new(config.max_evaluations)?,
        log: RunLog::new(),
        run_best: f64::INFINITY,
        instruments,
    };

    let mut init_rng = state.algo.child("init", 0);
    let mut members = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let x = domain.sample_uniform(&mut init_rng);
        let (_, fitness) = state.evaluate(objective, &x, 0, 0, None)?;
        members.push(Individual { x, fitness });
    }
    let mut pop = Population { members };
    push_gen_record(&mut state, &pop, 0, GenCounts::default())?;

    let mut shade = match config.engine {
        EngineKind::DeRand1 => None,
        EngineKind::Shade => Some(ShadeState::new(config.h.unwrap_or(config.n))),
        EngineKind::Lshade => Some(ShadeState::new(config.h.unwrap_or(LSHADE_DEFAULT_H))),
    };

    let mut generation = 0u64;
    while !state.budget.is_exhausted() {
        generation += 1;
        let m = (state.budget.remaining() as usize).min(pop.len());
        let mut counts = GenCounts::default();
        let mut next = pop.members.clone();
        let ranked = pop.ranked_indices();
        let mut success_f = Vec::new();
        let mut success_cr = Vec::new();
        let mut success_w = Vec::new();
        let archive_cap = config.archive_size.unwrap_or(pop.len());

        for i in 0..m {
            let (trial, f_i, cr_i) = match config.engine {
                EngineKind::DeRand1 => {
                    let p = config.params.expect("validated");
                    let mutant = mutate_rand1(&pop, i, p.f, &mut state.algo)?;
                    let trial = match p.crossover {
                        Crossover::Bin => {
                            crossover_bin(&pop.members[i].x, &mutant, p.cr, &mut state.algo)?
                        }
                        Crossover::Exp => {
                            crossover_exp(&pop.members[i].x, &mutant, p.cr, &mut state.algo)?
                        }
                    };
                    (trial, p.f, p.cr)
                }
                EngineKind::Shade | EngineKind::Lshade => {
                    let st = shade.as_ref().expect("shade state");
                    let r = state.algo.index(st.memory_f.len());
                    let f_i = sample_shade_f(st.memory_f[r], &mut state.algo);
                    let cr_i = sample_shade_cr(st.memory_cr[r], &mut state.algo);
                    let p_lo = config
                        .p_min
                        .unwrap_or((2.0 / pop.len() as f64).min(SHADE_P_MAX));
                    let p_i = state.algo.uniform_in(p_lo.min(SHADE_P_MAX), SHADE_P_MAX);
                    let mutant = mutate_current_to_pbest1(
                        &pop,
                        &ranked,
                        &st.archive,
                        i,
                        f_i,
                        p_i,
                        &mut state.algo,
                    )?;
                    let trial = crossover_bin(&pop.members[i].x, &mutant, cr_i, &mut state.algo)?;
                    (trial, f_i, cr_i)
                }
            };

            let outcome = apply_sdis(
                state.sdis,
                domain,
                &pop.members[i].x,
                &trial,
                &mut state.algo,
            )?;
            // Components inherited from the target are not "generated";
            // only crossed-in mutant components can violate the box.
            counts.components_generated += trial
                .iter()
                .zip(&pop.members[i].x)
                .filter(|(t, x)| t != x)
                .count() as u64;
            counts.infeasible_components += outcome.n_corrected as u64;
            if outcome.n_corrected > 0 {
                counts.infeasible_trials += 1;
            }
            let (_, fitness) = state.evaluate(
                objective,
                &outcome.corrected,
                generation,
                outcome.n_corrected,
                outcome.cosine,
            )?;
            counts.trials += 1;

            let target_fitness = pop.members[i].fitness;
            if fitness < target_fitness {
                if let Some(st) = shade.as_mut() {
                    st.push_archive(pop.members[i].x.clone(), archive_cap, &mut state.algo);
                    success_f.push(f_i);
                    success_cr.push(cr_i);
                    success_w.push(target_fitness - fitness);
                }
            }
            if fitness <= target_fitness {
                next[i] = Individual {
                    x: outcome.corrected,
                    fitness,
                };
            }
        }

        pop = Population { members: next };
        if let Some(st) = shade.as_mut() {
            shade_memory_update(st, &success_f, &success_cr, &success_w)?;
        }
        if config.engine == EngineKind::Lshade {
            let target = lshade_target_size(
                state.budget.used(),
                state.budget.max(),
                config.n,
                LSHADE_N_MIN,
            );
            if pop.len() > target {
                let ranked = pop.ranked_indices();
                let mut kept: Vec<Individual> = ranked[..target]
                    .iter()
                    .map(|&k| pop.members[k].clone())
                    .collect();
                kept.shrink_to_fit();
                pop = Population { members: kept };
            }
            let st = shade.as_mut().expect("shade state");
            st.shrink_archive(config.archive_size.unwrap_or(pop.len()), &mut state.algo);
        }
        push_gen_record(&mut state, &pop, generation, counts)?;
    }

    debug_assert_eq!(state.budget.remaining(), 0);
    Ok(RunResult {
        log: state.log,
        population: pop,
        evaluations_used: state.budget.used(),
    })
}

#[derive(Default, Clone, Copy)]
struct GenCounts {
    trials: u64,
    infeasible_trials: u64,
    infeasible_components: u64,
    components_generated: u64,
}

fn push_gen_record(
    state: &mut RunState<'_>,
    pop: &Population,
    generation: u64,
    counts: GenCounts,
) -> Result<()> {
    let diversity = crate::instruments::diversity(pop, state.domain)?;
    state.log.push_generation(GenRecord {
        generation,
        diversity,
        infeasible_trials: counts.infeasible_trials,
        trials: counts.trials,
        best_fitness: pop.best().fitness,
        pop_size: pop.len(),
        infeasible_components: counts.infeasible_components,
        components_generated: counts.components_generated,
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{FnObjective, FunctionId, ObjectiveFunction};
    use approx::assert_abs_diff_eq;

    fn de_config(n: usize, budget: u64, seed: u64) -> EngineConfig {
        EngineConfig {
            engine: EngineKind::DeRand1,
            params: Some(DeParams::new(0.5, 0.5, Crossover::Bin).unwrap()),
            n,
            sdis: SdisKind::Mir,
            max_evaluations: budget,
            seed,
            h: None,
            archive_size: None,
            p_min: None,
            cotn_sigma_factor: None,
        }
    }

    fn sphere_obj(n: usize) -> ObjectiveFunction {
        ObjectiveFunction::suite(FunctionId::Sphere, n, 1).unwrap()
    }

    #[test]
    fn budget_equal_to_n_runs_zero_generations() {
        let cfg = de_config(10, 10, 1);
        let res = run(&cfg, &sphere_obj(3), InstrumentSet::default()).unwrap();
        assert_eq!(res.evaluations_used, 10);
        assert_eq!(res.log.generations.len(), 1);
        assert_eq!(res.log.generations[0].trials, 0);
        assert_eq!(res.log.total_trials(), 0);
    }

    #[test]
    fn terminates_exactly_at_budget() {
        // 10 init + 2 full generations + a 5-trial partial one.
        let cfg = de_config(10, 35, 2);
        let res = run(&cfg, &sphere_obj(3), InstrumentSet::default()).unwrap();
        assert_eq!(res.evaluations_used, 35);
        assert_eq!(res.log.total_trials(), 25);
        let last = res.log.generations.last().unwrap();
        assert_eq!(last.trials, 5);
    }

    #[test]
    fn replay_is_bit_identical() {
        let cfg = de_config(12, 500, 77);
        let obj = sphere_obj(4);
        let a = run(&cfg, &obj, InstrumentSet::default()).unwrap();
        let b = run(&cfg, &obj, InstrumentSet::default()).unwrap();
        assert_eq!(a.log, b.log);
        assert_eq!(a.population.members, b.population.members);
    }

    #[test]
    fn seeds_change_trajectories() {
        let obj = sphere_obj(4);
        let a = run(&de_config(12, 500, 1), &obj, InstrumentSet::default()).unwrap();
        let b = run(&de_config(12, 500, 2), &obj, InstrumentSet::default()).unwrap();
        assert_ne!(a.log, b.log);
    }

    #[test]
    fn best_fitness_is_non_increasing() {
        let cfg = de_config(10, 2000, 5);
        let res = run(&cfg, &sphere_obj(5), InstrumentSet::default()).unwrap();
        let best: Vec<f64> = res.log.generations.iter().map(|g| g.best_fitness).collect();
        for w in best.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in res.log.improvements.windows(2) {
            assert!(w[1].fitness < w[0].fitness);
            assert!(w[1].eval_index > w[0].eval_index);
        }
        assert_abs_diff_eq!(
            res.log.improvements.last().unwrap().fitness,
            res.best().fitness
        );
    }

    #[test]
    fn population_stays_feasible_and_evaluated() {
        for sdis in SdisKind::ALL {
            let mut cfg = de_config(8, 400, 11);
            cfg.sdis = sdis;
            let obj = sphere_obj(3);
            let res = run(&cfg, &obj, InstrumentSet::default()).unwrap();
            let mut frng = RngStream::new(0);
            for m in &res.population.members {
                assert!(obj.domain().is_feasible(&m.x).unwrap());
                assert_abs_diff_eq!(m.fitness, obj.eval(&m.x, &mut frng));
            }
        }
    }

    #[test]
    fn flat_objective_accepts_every_trial() {
        // On a constant landscape every trial replaces its target, so after
        // one generation no member carries the initial coordinates.
        let obj = FnObjective {
            domain: BoxDomain::unit(6),
            f: |_: &[f64]| 1.0,
        };
        let cfg = EngineConfig {
            params: Some(DeParams::new(0.9, 1.0, Crossover::Bin).unwrap()),
            ..de_config(10, 20, 3)
        };
        let res = run(&cfg, &obj, InstrumentSet::default()).unwrap();
        let mut init_rng = RngStream::new(cfg.seed).child("algo", 0).child("init", 0);
        for m in &res.population.members {
            let original = obj.domain.sample_uniform(&mut init_rng);
            assert_ne!(m.x, original);
        }
    }

    #[test]
    fn correction_records_reconcile_with_generation_counts() {
        let mut cfg = de_config(10, 600, 9);
        cfg.sdis = SdisKind::Uni;
        let obj = sphere_obj(4);
        let res = run(&cfg, &obj, InstrumentSet::default()).unwrap();
        assert_eq!(
            res.log.corrections.len() as u64,
            res.log.total_infeasible_trials()
        );
        let comp_sum: u64 = res.log.corrections.iter().map(|c| c.n_corrected as u64).sum();
        assert_eq!(comp_sum, res.log.summary().total_infeasible_components);
        for g in &res.log.generations {
            // Cr = 0.5: between 1 (j_rand) and all 4 components per trial.
            assert!(g.components_generated >= g.trials);
            assert!(g.components_generated <= g.trials * 4);
            assert!(g.infeasible_components <= g.components_generated);
            assert!(g.infeasible_trials <= g.trials);
        }

        // Cr = 1 crosses every component, so the count is exact.
        let mut full = de_config(10, 600, 9);
        full.sdis = SdisKind::Uni;
        full.params = Some(DeParams::new(0.5, 1.0, Crossover::Bin).unwrap());
        let res = run(&full, &obj, InstrumentSet::default()).unwrap();
        for g in &res.log.generations {
            assert_eq!(g.components_generated, g.trials * 4);
        }
    }

    #[test]
    fn instrument_flags_silence_streams() {
        let cfg = de_config(10, 300, 4);
        let obj = sphere_obj(3);
        let quiet = InstrumentSet {
            record_corrections: false,
            record_improvements: false,
        };
        let res = run(&cfg, &obj, quiet).unwrap();
        assert!(res.log.corrections.is_empty());
        assert!(res.log.improvements.is_empty());
        // Generation aggregates still carry the counts.
        assert!(res.log.total_trials() > 0);
        let noisy = run(&cfg, &obj, InstrumentSet::default()).unwrap();
        assert_eq!(noisy.log.generations, res.log.generations);
    }

    #[test]
    fn shade_runs_and_adapts() {
        let cfg = EngineConfig {
            engine: EngineKind::Shade,
            params: None,
            ..de_config(20, 4000, 21)
        };
        let res = run(&cfg, &sphere_obj(5), InstrumentSet::default()).unwrap();
        assert_eq!(res.evaluations_used, 4000);
        // SHADE should make real progress on a 5-D sphere with this budget.
        assert!(res.best().fitness < 1e-3, "best {}", res.best().fitness);
    }

    #[test]
    fn lshade_shrinks_to_n_min() {
        let cfg = EngineConfig {
            engine: EngineKind::Lshade,
            params: None,
            ..de_config(40, 3000, 22)
        };
        let res = run(&cfg, &sphere_obj(4), InstrumentSet::default()).unwrap();
        let sizes: Vec<usize> = res.log.generations.iter().map(|g| g.pop_size).collect();
        assert_eq!(sizes[0], 40);
        for w in sizes.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert_eq!(*sizes.last().unwrap(), LSHADE_N_MIN);
        assert_eq!(res.population.len(), LSHADE_N_MIN);
    }

    #[test]
    fn lshade_target_size_examples() {
        assert_eq!(lshade_target_size(0, 1000, 90, 4), 90);
        assert_eq!(lshade_target_size(1000, 1000, 90, 4), 4);
        let n_init = 18 * 10;
        let expect = (4.0 + (n_init as f64 - 4.0) / 2.0).round() as usize;
        assert_eq!(lshade_target_size(500, 1000, n_init, 4), expect);
    }

    #[test]
    fn shade_param_sampling_respects_ranges() {
        let mut rng = RngStream::new(31);
        for _ in 0..5000 {
            let f = sample_shade_f(0.5, &mut rng);
            assert!(f > 0.0 && f <= 1.0);
            let cr = sample_shade_cr(0.5, &mut rng);
            assert!((0.0..=1.0).contains(&cr));
        }
    }

    #[test]
    fn lehmer_mean_hand_case() {
        assert_abs_diff_eq!(
            weighted_lehmer_mean(&[0.2, 0.8], &[1.0, 1.0]).unwrap(),
            0.68
        );
        assert_abs_diff_eq!(weighted_lehmer_mean(&[0.7], &[3.0]).unwrap(), 0.7);
        assert!(weighted_lehmer_mean(&[], &[]).is_err());
    }

    #[test]
    fn memory_update_gated_on_successes() {
        let mut st = ShadeState::new(4);
        let before = st.clone();
        shade_memory_update(&mut st, &[], &[], &[]).unwrap();
        assert_eq!(st, before);
        shade_memory_update(&mut st, &[0.7], &[0.3], &[2.0]).unwrap();
        assert_abs_diff_eq!(st.memory_f[0], 0.7);
        assert_abs_diff_eq!(st.memory_cr[0], 0.3);
        assert_eq!(st.memory_index, 1);
    }

    #[test]
    fn memory_entries_stay_in_range_under_runs() {
        // Drive a SHADE run and re-derive the invariant through sampling:
        // entries written are Lehmer/arithmetic means of values in (0,1] and
        // [0,1] respectively.
        let mut st = ShadeState::new(2);
        let mut rng = RngStream::new(40);
        for _ in 0..200 {
            let k = 1 + rng.index(5);
            let f: Vec<f64> = (0..k).map(|_| sample_shade_f(st.memory_f[0], &mut rng)).collect();
            let cr: Vec<f64> = (0..k).map(|_| sample_shade_cr(st.memory_cr[0], &mut rng)).collect();
            let w: Vec<f64> = (0..k).map(|_| rng.uniform() + 1e-9).collect();
            shade_memory_update(&mut st, &f, &cr, &w).unwrap();
            for v in &st.memory_f {
                assert!(*v > 0.0 && *v <= 1.0, "memory_F out of range: {v}");
            }
            for v in &st.memory_cr {
                assert!((0.0..=1.0).contains(v), "memory_Cr out of range: {v}");
            }
        }
    }

    #[test]
    fn archive_eviction_respects_capacity() {
        let mut st = ShadeState::new(2);
        let mut rng = RngStream::new(50);
        for k in 0..100 {
            st.push_archive(vec![k as f64], 8, &mut rng);
            assert!(st.archive.len() <= 8);
        }
        assert_eq!(st.archive.len(), 8);
        st.shrink_archive(3, &mut rng);
        assert_eq!(st.archive.len(), 3);
    }

    #[test]
    fn config_validation_rejects_bad_setups() {
        let mut cfg = de_config(3, 100, 1);
        assert!(cfg.validate().is_err());
        cfg = de_config(10, 5, 1);
        assert!(cfg.validate().is_err());
        cfg = de_config(10, 100, 1);
        cfg.params = None;
        assert!(cfg.validate().is_err());
        cfg = EngineConfig {
            engine: EngineKind::Shade,
            ..de_config(10, 100, 1)
        };
        assert!(cfg.validate().is_err(), "SHADE with params must fail");
        cfg.params = None;
        assert!(cfg.validate().is_ok());
        cfg.p_min = Some(0.5);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn f0_keeps_algorithm_stream_separate() {
        // Same seed on f0 and on a deterministic stand-in: the search
        // decisions must coincide, so trial counts per generation match.
        let f0 = ObjectiveFunction::f0(4).unwrap();
        let stand_in = FnObjective {
            domain: BoxDomain::unit(4),
            f: |_: &[f64]| 0.5,
        };
        let cfg = EngineConfig {
            sdis: SdisKind::Sat,
            ..de_config(10, 200, 13)
        };
        let a = run(&cfg, &f0, InstrumentSet::default()).unwrap();
        let b = run(&cfg, &stand_in, InstrumentSet::default()).unwrap();
        // First generation sees identical populations and identical operator
        // draws, so the infeasibility counts of generation 1 agree.
        assert_eq!(
            a.log.generations[1].infeasible_components,
            b.log.generations[1].infeasible_components
        );
    }
}
