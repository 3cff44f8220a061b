//! On-disk run bundles: versioned CSV streams plus a JSON summary.
//!
//! A bundle directory holds `corrections.csv`, `generations.csv`,
//! `improvements.csv`, and `summary.json`. Every CSV starts with a schema
//! line (`# boxde-csv <name> v1`); readers reject anything else, so analysis
//! tools never misinterpret columns. Floats are serialised with 17
//! significant digits and round-trip exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engines::RunResult;
use crate::error::{Error, Result};
use crate::instruments::{CorrectionRecord, GenRecord, Improvement, RunLog};

pub const CORRECTIONS_FILE: &str = "corrections.csv";
pub const GENERATIONS_FILE: &str = "generations.csv";
pub const IMPROVEMENTS_FILE: &str = "improvements.csv";
pub const SUMMARY_FILE: &str = "summary.json";

const CORRECTIONS_SCHEMA: &str = "# boxde-csv corrections v1";
const CORRECTIONS_HEADER: &str = "eval_index,generation,n_corrected,cosine";
const GENERATIONS_SCHEMA: &str = "# boxde-csv generations v1";
const GENERATIONS_HEADER: &str =
    "generation,diversity,infeasible_trials,trials,best_fitness,pop_size";
const IMPROVEMENTS_SCHEMA: &str = "# boxde-csv improvements v1";
const IMPROVEMENTS_HEADER: &str = "eval_index,best_fitness";

/// Exact-round-trip float formatting (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// The `summary.json` payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub schema: String,
    pub final_pois: f64,
    pub total_infeasible_components: u64,
    pub total_components_generated: u64,
    pub best_fitness: f64,
    pub evaluations_used: u64,
}

pub const SUMMARY_SCHEMA: &str = "boxde-summary-v1";

pub fn write_corrections(path: &Path, records: &[CorrectionRecord]) -> Result<()> {
    let mut out = String::new();
    out.push_str(CORRECTIONS_SCHEMA);
    out.push('\n');
    out.push_str(CORRECTIONS_HEADER);
    out.push('\n');
    for r in records {
        let cosine = r.cosine.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.eval_index, r.generation, r.n_corrected, cosine
        ));
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_generations(path: &Path, records: &[GenRecord]) -> Result<()> {
    let mut out = String::new();
    out.push_str(GENERATIONS_SCHEMA);
    out.push('\n');
    out.push_str(GENERATIONS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.generation,
            fmt_f64(r.diversity),
            r.infeasible_trials,
            r.trials,
            fmt_f64(r.best_fitness),
            r.pop_size
        ));
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_improvements(path: &Path, records: &[Improvement]) -> Result<()> {
    let mut out = String::new();
    out.push_str(IMPROVEMENTS_SCHEMA);
    out.push('\n');
    out.push_str(IMPROVEMENTS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!("{},{}\n", r.eval_index, fmt_f64(r.fitness)));
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_summary(path: &Path, result: &RunResult) -> Result<()> {
    let s = result.log.summary();
    let file = SummaryFile {
        schema: SUMMARY_SCHEMA.into(),
        final_pois: s.final_pois,
        total_infeasible_components: s.total_infeasible_components,
        total_components_generated: s.total_components_generated,
        best_fitness: result.best().fitness,
        evaluations_used: result.evaluations_used,
    };
    let json = serde_json::to_string_pretty(&file).map_err(|e| Error::Schema(e.to_string()))?;
    atomic_write(path, json.as_bytes())
}

/// Writes the complete four-file bundle into `dir` (created if missing).
pub fn write_run_bundle(dir: &Path, result: &RunResult) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_corrections(&dir.join(CORRECTIONS_FILE), &result.log.corrections)?;
    write_generations(&dir.join(GENERATIONS_FILE), &result.log.generations)?;
    write_improvements(&dir.join(IMPROVEMENTS_FILE), &result.log.improvements)?;
    write_summary(&dir.join(SUMMARY_FILE), result)
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

fn check_schema<'a>(
    lines: &mut impl Iterator<Item = &'a str>,
    schema: &str,
    header: &str,
    path: &Path,
) -> Result<()> {
    let got_schema = lines.next().unwrap_or_default();
    if got_schema != schema {
        return Err(Error::Schema(format!(
            "{}: expected '{schema}', found '{got_schema}'",
            path.display()
        )));
    }
    let got_header = lines.next().unwrap_or_default();
    if got_header != header {
        return Err(Error::Schema(format!(
            "{}: unexpected header '{got_header}'",
            path.display()
        )));
    }
    Ok(())
}

fn parse<T: std::str::FromStr>(field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what}: '{field}'")))
}

pub fn read_corrections(path: &Path) -> Result<Vec<CorrectionRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    check_schema(&mut lines, CORRECTIONS_SCHEMA, CORRECTIONS_HEADER, path)?;
    let mut out = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("bad corrections row: '{line}'")));
        }
        out.push(CorrectionRecord {
            eval_index: parse(fields[0], "eval_index")?,
            generation: parse(fields[1], "generation")?,
            n_corrected: parse(fields[2], "n_corrected")?,
            cosine: if fields[3].is_empty() {
                None
            } else {
                Some(parse(fields[3], "cosine")?)
            },
        });
    }
    Ok(out)
}

/// Reads the six report columns; the in-memory component counters are not
/// persisted and come back as zero.
pub fn read_generations(path: &Path) -> Result<Vec<GenRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    check_schema(&mut lines, GENERATIONS_SCHEMA, GENERATIONS_HEADER, path)?;
    let mut out = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!("bad generations row: '{line}'")));
        }
        out.push(GenRecord {
            generation: parse(fields[0], "generation")?,
            diversity: parse(fields[1], "diversity")?,
            infeasible_trials: parse(fields[2], "infeasible_trials")?,
            trials: parse(fields[3], "trials")?,
            best_fitness: parse(fields[4], "best_fitness")?,
            pop_size: parse(fields[5], "pop_size")?,
            infeasible_components: 0,
            components_generated: 0,
        });
    }
    Ok(out)
}

pub fn read_improvements(path: &Path) -> Result<Vec<Improvement>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    check_schema(&mut lines, IMPROVEMENTS_SCHEMA, IMPROVEMENTS_HEADER, path)?;
    let mut out = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::Parse(format!("bad improvements row: '{line}'")));
        }
        out.push(Improvement {
            eval_index: parse(fields[0], "eval_index")?,
            fitness: parse(fields[1], "best_fitness")?,
        });
    }
    Ok(out)
}

pub fn read_summary(path: &Path) -> Result<SummaryFile> {
    let text = fs::read_to_string(path)?;
    let file: SummaryFile =
        serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
    if file.schema != SUMMARY_SCHEMA {
        return Err(Error::Schema(format!(
            "{}: unknown summary schema '{}'",
            path.display(),
            file.schema
        )));
    }
    Ok(file)
}

/// Reads a full bundle back into a RunLog (component counters excepted).
pub fn read_run_log(dir: &Path) -> Result<RunLog> {
    Ok(RunLog {
        corrections: read_corrections(&dir.join(CORRECTIONS_FILE))?,
        generations: read_generations(&dir.join(GENERATIONS_FILE))?,
        improvements: read_improvements(&dir.join(IMPROVEMENTS_FILE))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::{run, EngineConfig, EngineKind};
    use crate::instruments::InstrumentSet;

    #[test]
    fn float_format_round_trips() {
        for v in [0.0, 1.0 / 3.0, -5.4321e-13, f64::MIN_POSITIVE, 123456.789] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn bundle_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = EngineConfig {
            engine: EngineKind::DeRand1,
            params: Some(crate::variation::DeParams::new(0.6, 0.4, crate::variation::Crossover::Bin).unwrap()),
            n: 8,
            sdis: crate::sdis::SdisKind::Uni,
            max_evaluations: 300,
            seed: 123,
            h: None,
            archive_size: None,
            p_min: None,
            cotn_sigma_factor: None,
        };
        let obj = crate::functions::ObjectiveFunction::suite(
            crate::functions::FunctionId::Sphere,
            3,
            1,
        )
        .unwrap();
        let result = run(&cfg, &obj, InstrumentSet::default()).unwrap();
        write_run_bundle(dir.path(), &result).unwrap();

        let log = read_run_log(dir.path()).unwrap();
        assert_eq!(log.corrections, result.log.corrections);
        assert_eq!(log.improvements, result.log.improvements);
        assert_eq!(log.generations.len(), result.log.generations.len());
        for (a, b) in log.generations.iter().zip(&result.log.generations) {
            assert_eq!(a.generation, b.generation);
            assert_eq!(a.diversity, b.diversity);
            assert_eq!(a.infeasible_trials, b.infeasible_trials);
            assert_eq!(a.trials, b.trials);
            assert_eq!(a.best_fitness, b.best_fitness);
            assert_eq!(a.pop_size, b.pop_size);
        }

        let summary = read_summary(&dir.path().join(SUMMARY_FILE)).unwrap();
        assert_eq!(summary.final_pois, result.log.summary().final_pois);
        assert_eq!(summary.evaluations_used, 300);
        assert_eq!(summary.best_fitness, result.best().fitness);
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let mut log = RunLog::new();
        log.push_correction(CorrectionRecord {
            eval_index: 11,
            generation: 1,
            n_corrected: 2,
            cosine: Some(1.0 / 3.0),
        });
        log.push_correction(CorrectionRecord {
            eval_index: 14,
            generation: 1,
            n_corrected: 1,
            cosine: None,
        });
        let path = dir.path().join(CORRECTIONS_FILE);
        write_corrections(&path, &log.corrections).unwrap();
        let first = fs::read(&path).unwrap();
        write_corrections(&path, &log.corrections).unwrap();
        assert_eq!(first, fs::read(&path).unwrap());
        assert_eq!(read_corrections(&path).unwrap(), log.corrections);
    }

    #[test]
    fn readers_reject_unknown_schemas() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(GENERATIONS_FILE);
        fs::write(&path, "# boxde-csv generations v9\ngeneration\n1\n").unwrap();
        assert!(matches!(
            read_generations(&path),
            Err(Error::Schema(_))
        ));
        let path2 = dir.path().join(CORRECTIONS_FILE);
        fs::write(&path2, format!("{CORRECTIONS_SCHEMA}\nwrong,header,row,x\n")).unwrap();
        assert!(matches!(read_corrections(&path2), Err(Error::Schema(_))));
        let path3 = dir.path().join(SUMMARY_FILE);
        fs::write(&path3, "{\"schema\":\"other\",\"final_pois\":0.0,\"total_infeasible_components\":0,\"total_components_generated\":0,\"best_fitness\":0.0,\"evaluations_used\":1}").unwrap();
        assert!(matches!(read_summary(&path3), Err(Error::Schema(_))));
    }

    #[test]
    fn readers_reject_malformed_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(IMPROVEMENTS_FILE);
        fs::write(
            &path,
            format!("{IMPROVEMENTS_SCHEMA}\n{IMPROVEMENTS_HEADER}\n1,abc\n"),
        )
        .unwrap();
        assert!(matches!(read_improvements(&path), Err(Error::Parse(_))));
    }
}
