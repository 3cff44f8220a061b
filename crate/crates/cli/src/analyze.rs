//! Analysis subcommands: read run bundles back, emit small CSV summaries.
//!
//! Every summary starts with its own `# boxde-csv <name> v1` schema line;
//! bundle readers reject unknown schema versions before any row is parsed.
//! A directory argument containing `manifest.json` stands for all of its
//! successful runs, in manifest order; anything else is taken as a single
//! bundle. The `run` column holds the resolved bundle directory.

use std::fs;
use std::path::{Path, PathBuf};

use boxde::logio::{
    fmt_f64, read_corrections, read_generations, read_improvements, read_summary,
    CORRECTIONS_FILE, GENERATIONS_FILE, IMPROVEMENTS_FILE, SUMMARY_FILE,
};
use boxde::theory::{
    check_prop2, check_prop3, check_prop5, gen_prop2_instance, gen_prop3_instance,
    mirror_corrected_variance, violation_recursion, PropCheck, SAT_CORRECTED_VARIANCE,
    UNI_CORRECTED_VARIANCE,
};
use boxde::{
    cs_ecdf, default_cs_grid, default_targets, ert, fixed_target_ecdf, hitting_time, windowed_pois,
    BoxDomain, Improvement, Result, RngStream, RunLog,
};

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            use std::io::Write;
            match std::io::stdout().write_all(text.as_bytes()) {
                // A closed pipe (e.g. `| head`) is a normal way to stop
                // reading, not an error.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {
                    std::process::exit(0)
                }
                other => Ok(other?),
            }
        }
    }
}

/// Resolves each argument to bundle directories: an experiment directory
/// (one holding a manifest) contributes its `"ok"` runs in manifest order.
fn resolve_bundles(dirs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut bundles = Vec::new();
    for dir in dirs {
        let manifest_path = dir.join(crate::driver::MANIFEST_FILE);
        if manifest_path.is_file() {
            let manifest = crate::driver::read_manifest(&manifest_path)?;
            bundles.extend(
                manifest
                    .runs
                    .iter()
                    .filter(|r| r.status == "ok")
                    .map(|r| dir.join(&r.dir)),
            );
        } else {
            bundles.push(dir.clone());
        }
    }
    Ok(bundles)
}

/// Pooled ECDF of correction cosine similarities over the given bundles.
pub fn ecdf_cs(dirs: &[PathBuf], out: Option<&Path>) -> Result<()> {
    let mut values = Vec::new();
    for dir in &resolve_bundles(dirs)? {
        let records = read_corrections(&dir.join(CORRECTIONS_FILE))?;
        values.extend(records.iter().filter_map(|c| c.cosine));
    }
    let curve = cs_ecdf(&values, &default_cs_grid())?;
    let mut text = String::from("# boxde-csv cs_ecdf v1\nx,fraction\n");
    for (x, fraction) in curve {
        text.push_str(&format!("{},{}\n", fmt_f64(x), fmt_f64(fraction)));
    }
    emit(out, &text)
}

/// Fixed-target ECDF on the default 51-target grid.
pub fn ecdf_target(dirs: &[PathBuf], out: Option<&Path>) -> Result<()> {
    let runs: Vec<Vec<Improvement>> = resolve_bundles(dirs)?
        .iter()
        .map(|dir| read_improvements(&dir.join(IMPROVEMENTS_FILE)))
        .collect::<Result<_>>()?;
    let curve = fixed_target_ecdf(&runs, &default_targets());
    let mut text = String::from("# boxde-csv fixed_target_ecdf v1\nevaluations,fraction\n");
    for (evals, fraction) in curve {
        text.push_str(&format!("{evals},{}\n", fmt_f64(fraction)));
    }
    emit(out, &text)
}

/// Expected running time to `target` with per-run budget cap `budget`.
pub fn ert_summary(dirs: &[PathBuf], target: f64, budget: u64, out: Option<&Path>) -> Result<()> {
    let times: Vec<Option<u64>> = resolve_bundles(dirs)?
        .iter()
        .map(|dir| {
            read_improvements(&dir.join(IMPROVEMENTS_FILE))
                .map(|imps| hitting_time(&imps, target))
        })
        .collect::<Result<_>>()?;
    let successes = times.iter().filter(|t| t.is_some()).count();
    let value = ert(&times, budget)?;
    let text = format!(
        "# boxde-csv ert v1\ntarget,budget,runs,successes,ert\n{},{budget},{},{successes},{}\n",
        fmt_f64(target),
        times.len(),
        fmt_f64(value),
    );
    emit(out, &text)
}

/// Final POIS per bundle, or a windowed per-generation series.
pub fn pois(dirs: &[PathBuf], window: Option<usize>, out: Option<&Path>) -> Result<()> {
    let bundles = resolve_bundles(dirs)?;
    let text = match window {
        None => {
            let mut text = String::from("# boxde-csv pois v1\nrun,final_pois\n");
            for dir in &bundles {
                let summary = read_summary(&dir.join(SUMMARY_FILE))?;
                text.push_str(&format!(
                    "{},{}\n",
                    dir.display(),
                    fmt_f64(summary.final_pois)
                ));
            }
            text
        }
        Some(w) => {
            let mut text =
                String::from("# boxde-csv pois_windowed v1\nrun,generation,windowed_pois\n");
            for dir in &bundles {
                let log = RunLog {
                    corrections: Vec::new(),
                    generations: read_generations(&dir.join(GENERATIONS_FILE))?,
                    improvements: Vec::new(),
                };
                for (generation, value) in windowed_pois(&log, w)? {
                    text.push_str(&format!(
                        "{},{generation},{}\n",
                        dir.display(),
                        fmt_f64(value)
                    ));
                }
            }
            text
        }
    };
    emit(out, &text)
}

/// Per-generation population diversity per bundle.
pub fn diversity(dirs: &[PathBuf], out: Option<&Path>) -> Result<()> {
    let mut text = String::from("# boxde-csv diversity v1\nrun,generation,diversity\n");
    for dir in &resolve_bundles(dirs)? {
        for rec in read_generations(&dir.join(GENERATIONS_FILE))? {
            text.push_str(&format!(
                "{},{},{}\n",
                dir.display(),
                rec.generation,
                fmt_f64(rec.diversity)
            ));
        }
    }
    emit(out, &text)
}

/// Closed-form oracles plus randomized proposition suites. Returns whether
/// the suites that must be clean (Props. 3 and 5) were clean; Prop. 2
/// violations are expected (its preconditions do not cover steps
/// anti-aligned with their mirror correction) and are reported, not failed.
pub fn theory_check(instances: usize, seed: u64, out: Option<&Path>) -> Result<bool> {
    let mut text = String::from("# boxde-csv theory_check v1\ncheck,value\n");
    let mut row = |check: &str, value: String| {
        text.push_str(check);
        text.push(',');
        text.push_str(&value);
        text.push('\n');
    };

    for f in [0.25, 0.5, 0.775, 1.0] {
        let series = violation_recursion(f, 1)?;
        row(
            &format!("recursion_fixed_point_f={f}"),
            fmt_f64(series.fixed_point),
        );
    }
    for f in [0.5, 0.775, 1.0] {
        row(
            &format!("mirror_corrected_variance_f={f}"),
            fmt_f64(mirror_corrected_variance(f).value),
        );
    }
    row("sat_corrected_variance", fmt_f64(SAT_CORRECTED_VARIANCE));
    row("uni_corrected_variance", fmt_f64(UNI_CORRECTED_VARIANCE));

    let domain = BoxDomain::unit(4);
    let mut rng = RngStream::new(seed).child("theory-check", 0);
    let (mut held2, mut violated2, mut skipped2) = (0u64, 0u64, 0u64);
    for _ in 0..instances {
        let (x, z) = gen_prop2_instance(4, &mut rng);
        match check_prop2(&domain, &x, &z)? {
            PropCheck::Holds => held2 += 1,
            PropCheck::Violated(_) => violated2 += 1,
            PropCheck::Skipped(_) => skipped2 += 1,
        }
    }
    row("prop2_instances", instances.to_string());
    row("prop2_held", held2.to_string());
    row("prop2_violated", violated2.to_string());
    row("prop2_skipped", skipped2.to_string());

    let domain6 = BoxDomain::unit(6);
    let (mut held3, mut violated3, mut skipped3) = (0u64, 0u64, 0u64);
    for _ in 0..instances {
        let (x, z, interior) = gen_prop3_instance(6, &mut rng);
        match check_prop3(&domain6, &x, &z, interior)? {
            PropCheck::Holds => held3 += 1,
            PropCheck::Violated(_) => violated3 += 1,
            PropCheck::Skipped(_) => skipped3 += 1,
        }
    }
    row("prop3_instances", instances.to_string());
    row("prop3_held", held3.to_string());
    row("prop3_violated", violated3.to_string());
    row("prop3_skipped", skipped3.to_string());

    let mut max_abs_err: f64 = 0.0;
    for (theta1, theta2) in [(1.0, 2.0), (0.5, 3.0), (2.0, 2.0)] {
        let check = check_prop5(theta1, theta2, instances.max(1), &mut rng)?;
        row(
            &format!("prop5_p_exact_t1={theta1}_t2={theta2}"),
            fmt_f64(check.p_exact),
        );
        row(
            &format!("prop5_p_estimate_t1={theta1}_t2={theta2}"),
            fmt_f64(check.p_estimate),
        );
        max_abs_err = max_abs_err.max((check.p_estimate - check.p_exact).abs());
    }
    row("prop5_max_abs_err", fmt_f64(max_abs_err));

    emit(out, &text)?;
    // Six-sigma band for a Bernoulli mean at the requested sample size.
    let mc_tolerance = 6.0 * (0.25 / instances.max(1) as f64).sqrt();
    Ok(violated3 == 0 && max_abs_err <= mc_tolerance)
}
