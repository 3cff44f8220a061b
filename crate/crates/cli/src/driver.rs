//! Experiment execution: a bounded worker pool fans the expanded plans out,
//! one bundle directory per run, then a manifest binds every bundle to the
//! spec.
//!
//! Scheduling never touches results: each run's seed is fixed at expansion
//! time, runs share no state, and the manifest is assembled in plan order
//! after the pool drains. A failed run is recorded in its manifest entry and
//! leaves the other runs untouched.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use boxde::logio::{
    write_run_bundle, CORRECTIONS_FILE, GENERATIONS_FILE, IMPROVEMENTS_FILE, SUMMARY_FILE,
};
use boxde::{run, Error, InstrumentSet, ObjectiveFunction, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentSpec, RunPlan};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_SCHEMA: &str = "boxde-manifest-v1";

const BUNDLE_FILES: [&str; 4] = [
    CORRECTIONS_FILE,
    GENERATIONS_FILE,
    IMPROVEMENTS_FILE,
    SUMMARY_FILE,
];

/// `manifest.json`: the spec, its hash, and one entry per run. Every file a
/// successful run produced is listed in its entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub config_hash: String,
    pub total_runs: usize,
    pub failed_runs: usize,
    pub spec: ExperimentSpec,
    pub runs: Vec<ManifestRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRun {
    /// Bundle directory, relative to the output directory.
    pub dir: String,
    /// `"ok"` or `"failed: <message>"`.
    pub status: String,
    pub files: Vec<String>,
    pub plan: RunPlan,
}

pub struct Outcome {
    pub total: usize,
    pub failed: usize,
    pub manifest_path: PathBuf,
}

/// SHA-256 over the spec's canonical JSON, after any CLI overrides, so a
/// reader can verify which spec produced a log directory.
pub fn config_hash(spec: &ExperimentSpec) -> String {
    let canonical = serde_json::to_vec(spec).expect("spec serialises");
    let mut h = Sha256::new();
    h.update(&canonical);
    format!("{:x}", h.finalize())
}

pub fn run_dir_name(plan: &RunPlan) -> String {
    format!("cfg{:05}_run{:03}", plan.config_index, plan.run_index)
}

fn execute_plan(out: &Path, plan: &RunPlan) -> std::result::Result<(), String> {
    let obj = ObjectiveFunction::new(plan.function, plan.dimension, plan.instance)
        .map_err(|e| e.to_string())?;
    let cfg = plan.engine_config().map_err(|e| e.to_string())?;
    let result = run(&cfg, &obj, InstrumentSet::default()).map_err(|e| e.to_string())?;
    write_run_bundle(&out.join(run_dir_name(plan)), &result).map_err(|e| e.to_string())
}

fn execute_all(out: &Path, plans: &[RunPlan]) -> Vec<std::result::Result<(), String>> {
    plans.par_iter().map(|p| execute_plan(out, p)).collect()
}

pub fn run_experiment(
    spec: &ExperimentSpec,
    out: &Path,
    workers: Option<usize>,
) -> Result<Outcome> {
    spec.validate()?;
    let plans = spec.expand();
    fs::create_dir_all(out)?;
    let statuses = match workers {
        Some(k) => {
            if k == 0 {
                return Err(Error::Config("worker count must be >= 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?
                .install(|| execute_all(out, &plans))
        }
        None => execute_all(out, &plans),
    };
    let failed = statuses.iter().filter(|s| s.is_err()).count();
    let runs = plans
        .iter()
        .zip(&statuses)
        .map(|(plan, status)| ManifestRun {
            dir: run_dir_name(plan),
            status: match status {
                Ok(()) => "ok".into(),
                Err(msg) => format!("failed: {msg}"),
            },
            files: match status {
                Ok(()) => BUNDLE_FILES.iter().map(|f| f.to_string()).collect(),
                Err(_) => Vec::new(),
            },
            plan: plan.clone(),
        })
        .collect();
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.into(),
        config_hash: config_hash(spec),
        total_runs: plans.len(),
        failed_runs: failed,
        spec: spec.clone(),
        runs,
    };
    let manifest_path = out.join(MANIFEST_FILE);
    let json =
        serde_json::to_string_pretty(&manifest).map_err(|e| Error::Schema(e.to_string()))?;
    atomic_write(&manifest_path, json.as_bytes())?;
    Ok(Outcome {
        total: plans.len(),
        failed,
        manifest_path,
    })
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path)?;
    let m: Manifest = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
    if m.schema != MANIFEST_SCHEMA {
        return Err(Error::Schema(format!(
            "{}: unknown manifest schema '{}'",
            path.display(),
            m.schema
        )));
    }
    Ok(m)
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GridGroup;
    use boxde::logio::read_run_log;
    use boxde::{Crossover, EngineKind, FunctionId, SdisKind};

    fn tiny_spec() -> ExperimentSpec {
        ExperimentSpec {
            groups: vec![GridGroup {
                engine: EngineKind::DeRand1,
                n: vec![8],
                f: vec![0.5],
                cr: vec![0.2],
                crossover: Some(Crossover::Bin),
                sdis: vec![SdisKind::Mir],
                functions: vec![FunctionId::Sphere],
                dimensions: vec![3],
                instances: vec![1],
                runs: 3,
                budget_multiplier: 50,
            }],
            master_seed: 99,
            out_dir: None,
        }
    }

    fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
        let mut files = Vec::new();
        let mut stack = vec![dir.to_path_buf()];
        while let Some(d) = stack.pop() {
            for entry in fs::read_dir(&d).unwrap() {
                let p = entry.unwrap().path();
                if p.is_dir() {
                    stack.push(p);
                } else {
                    let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                    files.push((rel, fs::read(&p).unwrap()));
                }
            }
        }
        files.sort();
        files
    }

    #[test]
    fn one_config_three_runs_gives_three_bundles_and_a_manifest() {
        let out = tempfile::tempdir().unwrap();
        let outcome = run_experiment(&tiny_spec(), out.path(), Some(2)).unwrap();
        assert_eq!(outcome.total, 3);
        assert_eq!(outcome.failed, 0);
        let m = read_manifest(&outcome.manifest_path).unwrap();
        assert_eq!(m.total_runs, 3);
        assert_eq!(m.failed_runs, 0);
        assert_eq!(m.config_hash, config_hash(&tiny_spec()));
        assert_eq!(m.runs.len(), 3);
        for entry in &m.runs {
            assert_eq!(entry.status, "ok");
            assert_eq!(entry.files, BUNDLE_FILES);
            let bundle = out.path().join(&entry.dir);
            for f in &entry.files {
                assert!(bundle.join(f).is_file(), "{f} missing in {}", entry.dir);
            }
            let log = read_run_log(&bundle).unwrap();
            assert!(!log.generations.is_empty());
        }
        let seeds: Vec<u64> = m.runs.iter().map(|r| r.plan.seed).collect();
        assert_ne!(seeds[0], seeds[1]);
    }

    #[test]
    fn reruns_and_worker_counts_are_byte_identical() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let c = tempfile::tempdir().unwrap();
        run_experiment(&tiny_spec(), a.path(), Some(1)).unwrap();
        run_experiment(&tiny_spec(), b.path(), Some(3)).unwrap();
        run_experiment(&tiny_spec(), c.path(), None).unwrap();
        let bytes = dir_bytes(a.path());
        assert_eq!(bytes, dir_bytes(b.path()));
        assert_eq!(bytes, dir_bytes(c.path()));
        // Overwriting in place reproduces the same bytes too.
        run_experiment(&tiny_spec(), a.path(), Some(2)).unwrap();
        assert_eq!(bytes, dir_bytes(a.path()));
    }

    #[test]
    fn a_failing_run_is_recorded_and_leaves_the_rest_alone() {
        // rosenbrock needs n >= 2, so dimension 1 fails at construction.
        let mut spec = tiny_spec();
        spec.groups[0].functions = vec![FunctionId::Sphere, FunctionId::Rosenbrock];
        spec.groups[0].dimensions = vec![1];
        spec.groups[0].runs = 2;
        let out = tempfile::tempdir().unwrap();
        let outcome = run_experiment(&spec, out.path(), Some(2)).unwrap();
        assert_eq!(outcome.total, 4);
        assert_eq!(outcome.failed, 2);
        let m = read_manifest(&outcome.manifest_path).unwrap();
        assert_eq!(m.failed_runs, 2);
        let (ok, bad): (Vec<_>, Vec<_>) =
            m.runs.iter().partition(|r| r.status == "ok");
        assert_eq!(ok.len(), 2);
        assert_eq!(bad.len(), 2);
        for entry in ok {
            assert!(out.path().join(&entry.dir).join(SUMMARY_FILE).is_file());
        }
        for entry in bad {
            assert!(entry.status.starts_with("failed: "));
            assert!(entry.files.is_empty());
            assert!(!out.path().join(&entry.dir).exists());
        }
    }

    #[test]
    fn config_hash_tracks_spec_content() {
        let a = tiny_spec();
        let mut b = tiny_spec();
        b.master_seed += 1;
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a), config_hash(&a.clone()));
    }

    #[test]
    fn zero_workers_is_rejected() {
        let out = tempfile::tempdir().unwrap();
        assert!(run_experiment(&tiny_spec(), out.path(), Some(0)).is_err());
    }
}
