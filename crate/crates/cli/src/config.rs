//! Experiment specs: JSON grid definitions and their expansion into runs.
//!
//! A spec is a list of grid groups plus a master seed. Every group expands
//! to the cartesian product of its lists; the products of all groups are
//! concatenated in order. One expanded tuple is a *config*; each config is
//! repeated `runs` times, and every repetition gets its own seed derived
//! from the master seed and the run's global index, so inserting or removing
//! runs never silently reuses another run's stream.
//!
//! Example spec:
//!
//! ```json
//! {
//!   "master_seed": 42,
//!   "groups": [{
//!     "engine": "de_rand1",
//!     "n": [20], "f": [0.5], "cr": [0.05], "crossover": "bin",
//!     "sdis": ["sat", "mir"], "functions": ["f0"],
//!     "dimensions": [30], "instances": [0],
//!     "runs": 5, "budget_multiplier": 1000
//!   }]
//! }
//! ```

use std::path::PathBuf;

use boxde::{
    derive_seed, Crossover, DeParams, EngineConfig, EngineKind, Error, FunctionId, Result,
    SdisKind,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub groups: Vec<GridGroup>,
    pub master_seed: u64,
    /// Default output directory; `--out` and `$BOXDE_OUT_DIR` take
    /// precedence and fall back respectively.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

/// One grid block. `f`, `cr` and `crossover` apply to `de_rand1` only and
/// must be absent for the self-adaptive engines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridGroup {
    pub engine: EngineKind,
    /// Population sizes.
    pub n: Vec<usize>,
    #[serde(default)]
    pub f: Vec<f64>,
    #[serde(default)]
    pub cr: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossover: Option<Crossover>,
    pub sdis: Vec<SdisKind>,
    pub functions: Vec<FunctionId>,
    pub dimensions: Vec<usize>,
    /// Suite-function instances; `f0` ignores the value.
    pub instances: Vec<u64>,
    /// Repetitions per expanded config.
    pub runs: u32,
    /// Evaluation budget per run = `budget_multiplier * dimension`.
    pub budget_multiplier: u64,
}

/// One fully resolved run: a config tuple plus its repetition index and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    pub config_index: usize,
    pub run_index: u32,
    pub seed: u64,
    pub engine: EngineKind,
    pub n: usize,
    pub f: Option<f64>,
    pub cr: Option<f64>,
    pub crossover: Option<Crossover>,
    pub sdis: SdisKind,
    pub function: FunctionId,
    pub dimension: usize,
    pub instance: u64,
    pub budget: u64,
}

impl RunPlan {
    pub fn engine_config(&self) -> Result<EngineConfig> {
        let params = match (self.f, self.cr, self.crossover) {
            (Some(f), Some(cr), Some(cx)) => Some(DeParams::new(f, cr, cx)?),
            (None, None, None) => None,
            _ => {
                return Err(Error::Config(
                    "f, cr and crossover must be given together".into(),
                ))
            }
        };
        Ok(EngineConfig {
            engine: self.engine,
            params,
            n: self.n,
            sdis: self.sdis,
            max_evaluations: self.budget,
            seed: self.seed,
            h: None,
            archive_size: None,
            p_min: None,
            cotn_sigma_factor: None,
        })
    }
}

impl GridGroup {
    fn validate(&self, index: usize) -> Result<()> {
        let at = |msg: String| Error::Config(format!("group {index}: {msg}"));
        for (name, empty) in [
            ("n", self.n.is_empty()),
            ("sdis", self.sdis.is_empty()),
            ("functions", self.functions.is_empty()),
            ("dimensions", self.dimensions.is_empty()),
            ("instances", self.instances.is_empty()),
        ] {
            if empty {
                return Err(at(format!("{name} grid is empty")));
            }
        }
        if self.runs == 0 {
            return Err(at("runs must be >= 1".into()));
        }
        if self.budget_multiplier == 0 {
            return Err(at("budget_multiplier must be >= 1".into()));
        }
        if let Some(&n) = self.n.iter().find(|&&n| n < 4) {
            return Err(at(format!("population size must be >= 4, got {n}")));
        }
        if self.dimensions.contains(&0) {
            return Err(at("dimension must be >= 1".into()));
        }
        match self.engine {
            EngineKind::DeRand1 => {
                if self.f.is_empty() || self.cr.is_empty() {
                    return Err(at("de_rand1 needs non-empty f and cr grids".into()));
                }
                let cx = self
                    .crossover
                    .ok_or_else(|| at("de_rand1 needs a crossover".into()))?;
                for &f in &self.f {
                    for &cr in &self.cr {
                        DeParams::new(f, cr, cx).map_err(|e| at(e.to_string()))?;
                    }
                }
            }
            EngineKind::Shade | EngineKind::Lshade => {
                if !self.f.is_empty() || !self.cr.is_empty() || self.crossover.is_some() {
                    return Err(at(format!(
                        "{} self-adapts; f, cr and crossover must be absent",
                        self.engine
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of expanded configs (product of the grid sizes, runs excluded).
    fn config_count(&self) -> usize {
        let f_cr = match self.engine {
            EngineKind::DeRand1 => self.f.len() * self.cr.len(),
            _ => 1,
        };
        self.functions.len()
            * self.dimensions.len()
            * self.instances.len()
            * self.sdis.len()
            * self.n.len()
            * f_cr
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.groups.is_empty() {
            return Err(Error::Config("spec has no groups".into()));
        }
        for (i, g) in self.groups.iter().enumerate() {
            g.validate(i)?;
        }
        Ok(())
    }

    pub fn config_count(&self) -> usize {
        self.groups.iter().map(GridGroup::config_count).sum()
    }

    pub fn run_count(&self) -> usize {
        self.groups
            .iter()
            .map(|g| g.config_count() * g.runs as usize)
            .sum()
    }

    /// Expands to run plans in a fixed nesting order (functions, dimensions,
    /// instances, sdis, n, f, cr, runs), groups concatenated. Seeds depend
    /// only on the master seed and the global run index.
    pub fn expand(&self) -> Vec<RunPlan> {
        let mut plans = Vec::with_capacity(self.run_count());
        let mut config_index = 0usize;
        let mut global = 0u64;
        for g in &self.groups {
            let (fs, crs): (Vec<Option<f64>>, Vec<Option<f64>>) = match g.engine {
                EngineKind::DeRand1 => (
                    g.f.iter().copied().map(Some).collect(),
                    g.cr.iter().copied().map(Some).collect(),
                ),
                _ => (vec![None], vec![None]),
            };
            for &function in &g.functions {
                for &dimension in &g.dimensions {
                    for &instance in &g.instances {
                        for &sdis in &g.sdis {
                            for &n in &g.n {
                                for &f in &fs {
                                    for &cr in &crs {
                                        for run_index in 0..g.runs {
                                            plans.push(RunPlan {
                                                config_index,
                                                run_index,
                                                seed: derive_seed(self.master_seed, "run", global),
                                                engine: g.engine,
                                                n,
                                                f,
                                                cr,
                                                crossover: match g.engine {
                                                    EngineKind::DeRand1 => g.crossover,
                                                    _ => None,
                                                },
                                                sdis,
                                                function,
                                                dimension,
                                                instance,
                                                budget: g.budget_multiplier * dimension as u64,
                                            });
                                            global += 1;
                                        }
                                        config_index += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        plans
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn de_group() -> GridGroup {
        GridGroup {
            engine: EngineKind::DeRand1,
            n: vec![8],
            f: vec![0.5],
            cr: vec![0.1],
            crossover: Some(Crossover::Bin),
            sdis: vec![SdisKind::Sat],
            functions: vec![FunctionId::F0],
            dimensions: vec![5],
            instances: vec![0],
            runs: 1,
            budget_multiplier: 100,
        }
    }

    fn spec(groups: Vec<GridGroup>) -> ExperimentSpec {
        ExperimentSpec {
            groups,
            master_seed: 7,
            out_dir: None,
        }
    }

    #[test]
    fn full_study_grid_expands_to_1350_configs() {
        // 6 SDIS x 3 N x (10 Cr bin x 5 F + 5 Cr exp x 5 F).
        let f: Vec<f64> = vec![0.25, 0.5, 0.775, 0.9, 1.0];
        let cr_bin: Vec<f64> = (0..10).map(|k| 0.05 + 0.1 * k as f64).collect();
        let cr_exp: Vec<f64> = (0..5).map(|k| 0.1 + 0.2 * k as f64).collect();
        let base = GridGroup {
            n: vec![10, 50, 100],
            sdis: SdisKind::ALL.to_vec(),
            dimensions: vec![30],
            budget_multiplier: 1000,
            ..de_group()
        };
        let bin = GridGroup {
            f: f.clone(),
            cr: cr_bin,
            crossover: Some(Crossover::Bin),
            ..base.clone()
        };
        let exp = GridGroup {
            f,
            cr: cr_exp,
            crossover: Some(Crossover::Exp),
            ..base
        };
        let s = spec(vec![bin, exp]);
        s.validate().unwrap();
        assert_eq!(s.config_count(), 1350);
        assert_eq!(s.expand().len(), 1350);
    }

    #[test]
    fn runs_multiply_configs_and_get_distinct_seeds() {
        let mut g = de_group();
        g.sdis = vec![SdisKind::Sat, SdisKind::Mir];
        g.runs = 3;
        let s = spec(vec![g]);
        assert_eq!(s.config_count(), 2);
        let plans = s.expand();
        assert_eq!(plans.len(), 6);
        let mut seeds: Vec<u64> = plans.iter().map(|p| p.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 6);
        assert_eq!(plans[0].config_index, 0);
        assert_eq!(plans[3].config_index, 1);
        assert_eq!(plans[4].run_index, 1);
    }

    #[test]
    fn expansion_is_deterministic() {
        let s = spec(vec![de_group()]);
        assert_eq!(s.expand(), s.expand());
    }

    #[test]
    fn seeds_change_with_the_master_seed() {
        let a = spec(vec![de_group()]).expand();
        let mut s = spec(vec![de_group()]);
        s.master_seed = 8;
        let b = s.expand();
        assert_ne!(a[0].seed, b[0].seed);
    }

    #[test]
    fn invalid_grid_values_are_rejected_with_context() {
        let mut g = de_group();
        g.f = vec![0.5, -1.0];
        let err = spec(vec![g]).validate().unwrap_err().to_string();
        assert!(err.contains("group 0"), "{err}");

        let mut g = de_group();
        g.cr = vec![1.5];
        assert!(spec(vec![g]).validate().is_err());

        let mut g = de_group();
        g.f.clear();
        assert!(spec(vec![g]).validate().is_err());

        let mut g = de_group();
        g.n = vec![2];
        assert!(spec(vec![g]).validate().is_err());

        assert!(spec(Vec::new()).validate().is_err());
    }

    #[test]
    fn shade_groups_must_not_carry_de_params() {
        let mut g = de_group();
        g.engine = EngineKind::Shade;
        assert!(spec(vec![g]).validate().is_err());

        let g = GridGroup {
            engine: EngineKind::Lshade,
            f: Vec::new(),
            cr: Vec::new(),
            crossover: None,
            ..de_group()
        };
        let s = spec(vec![g]);
        s.validate().unwrap();
        let plans = s.expand();
        assert_eq!(plans.len(), 1);
        let cfg = plans[0].engine_config().unwrap();
        assert_eq!(cfg.engine, EngineKind::Lshade);
        assert!(cfg.params.is_none());
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_spec_fields_are_rejected() {
        let json = r#"{"groups": [], "master_seed": 1, "typo_field": 2}"#;
        assert!(serde_json::from_str::<ExperimentSpec>(json).is_err());
    }

    #[test]
    fn budget_is_multiplier_times_dimension() {
        let plans = spec(vec![de_group()]).expand();
        assert_eq!(plans[0].budget, 500);
    }
}
