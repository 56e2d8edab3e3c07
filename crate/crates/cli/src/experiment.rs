//! Orchestration of a sweep: landscapes and runs for every parameter point,
//! executed on a worker pool with per-job seeds.
//!
//! Seeds are derived with [`epigrn::seed::mix_seed`]:
//!
//! * landscapes of point `(B, K, C)`, landscape index `l`:
//!   `mix_seed(base, [1, K, C, l])`. B is deliberately absent, so every B
//!   value of a sweep is scored on the same landscapes.
//! * run `r` on that landscape: `mix_seed(base, [2, B, K, C, l, r])`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use epigrn::analysis::{aggregate_finals, Aggregate, FinalValues};
use epigrn::landscape::{NkLandscape, NkcsLandscape};
use epigrn::seed::rng_for;
use epigrn::{run_hill_climber, Landscapes, RunRecord, ScenarioKind};
use rayon::prelude::*;

use crate::config::{ExperimentSpec, Point};
use crate::error::{io_err, CliError, Result};

const LANDSCAPE_TAG: u64 = 1;
const RUN_TAG: u64 = 2;

pub const RUN_HEADER: [&str; 10] =
    ["scenario", "B", "K", "C", "landscape_idx", "run_idx", "generation", "fitness", "epi_nodes", "dev_steps"];
pub const SUMMARY_HEADER: [&str; 14] = [
    "scenario", "B", "K", "C", "runs", "fit_mean", "fit_min", "fit_max", "epi_mean", "epi_min", "epi_max", "d_mean",
    "d_min", "d_max",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub point: Point,
    pub landscape_idx: usize,
    pub run_idx: usize,
    pub record: RunRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scenario: String,
    pub point: Point,
    pub stats: Aggregate,
}

/// The landscape(s) for one (point, landscape index).
pub fn landscapes_for(spec: &ExperimentSpec, p: Point, landscape_idx: usize) -> Result<Landscapes> {
    let n = spec.evolution.n_traits;
    let mut rng = rng_for(spec.evolution.seed, &[LANDSCAPE_TAG, p.k as u64, p.c as u64, landscape_idx as u64]);
    Ok(match spec.scenario.kind {
        ScenarioKind::StaticSingle => Landscapes::Single(NkLandscape::generate(&mut rng, n, p.k)?),
        ScenarioKind::Switching => {
            let a = NkLandscape::generate(&mut rng, n, p.k)?;
            let b = NkLandscape::generate(&mut rng, n, p.k)?;
            Landscapes::Switching { a, b }
        }
        ScenarioKind::Multicell => {
            let mother = NkcsLandscape::generate(&mut rng, n, p.k, p.c, 1)?;
            let daughter = if spec.scenario.heterogeneous {
                NkcsLandscape::generate(&mut rng, n, p.k, p.c, 1)?
            } else {
                mother.clone()
            };
            Landscapes::Coupled { mother, daughter }
        }
    })
}

/// Run every (point, landscape, run) job. Output order is fixed, so the
/// result is independent of `threads`.
pub fn run_experiment(spec: &ExperimentSpec, threads: usize) -> Result<Vec<RunResult>> {
    spec.validate()?;
    let per_point = spec.protocol.landscapes_per_point * spec.protocol.runs_per_landscape;
    let mut landscape_jobs = Vec::new();
    for p in spec.points() {
        for l in 0..spec.protocol.landscapes_per_point {
            landscape_jobs.push((p, l));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    pool.install(|| {
        let landscapes: Vec<Landscapes> =
            landscape_jobs.par_iter().map(|&(p, l)| landscapes_for(spec, p, l)).collect::<Result<_>>()?;
        let jobs: Vec<(usize, usize)> = (0..landscape_jobs.len())
            .flat_map(|j| (0..spec.protocol.runs_per_landscape).map(move |r| (j, r)))
            .collect();
        debug_assert_eq!(jobs.len(), spec.points().len() * per_point);
        jobs.par_iter()
            .map(|&(j, r)| {
                let (p, l) = landscape_jobs[j];
                let params = spec.evolution_params(p);
                let cfg = spec.scenario_config(p);
                let coords = [RUN_TAG, p.b as u64, p.k as u64, p.c as u64, l as u64, r as u64];
                let mut rng = rng_for(spec.evolution.seed, &coords);
                let record = run_hill_climber(&params, &cfg, &landscapes[j], &mut rng)?;
                Ok(RunResult { point: p, landscape_idx: l, run_idx: r, record })
            })
            .collect()
    })
}

/// Aggregate final values per point, in point order.
pub fn summarise(label: &str, results: &[RunResult]) -> Result<Vec<SummaryRow>> {
    let mut points: Vec<Point> = Vec::new();
    for r in results {
        if !points.contains(&r.point) {
            points.push(r.point);
        }
    }
    points
        .into_iter()
        .map(|p| {
            let finals: Vec<FinalValues> =
                results.iter().filter(|r| r.point == p).map(|r| FinalValues::from(&r.record)).collect();
            Ok(SummaryRow { scenario: label.to_string(), point: p, stats: aggregate_finals(&finals)? })
        })
        .collect()
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Csv { path: path.to_path_buf(), msg: e.to_string() }
}

pub fn write_runs(path: &Path, label: &str, results: &[RunResult]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_runs_to(BufWriter::new(file), label, results).map_err(csv_err(path))
}

fn write_runs_to(out: impl Write, label: &str, results: &[RunResult]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUN_HEADER)?;
    for r in results {
        let rec = &r.record;
        for g in 0..rec.generations() {
            w.write_record([
                label.to_string(),
                r.point.b.to_string(),
                r.point.k.to_string(),
                r.point.c.to_string(),
                r.landscape_idx.to_string(),
                r.run_idx.to_string(),
                g.to_string(),
                rec.fitness[g].to_string(),
                rec.epi_nodes[g].to_string(),
                rec.dev_steps[g].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let mut write = || -> std::result::Result<(), csv::Error> {
        w.write_record(SUMMARY_HEADER)?;
        for row in rows {
            let s = &row.stats;
            let mut rec = vec![
                row.scenario.clone(),
                row.point.b.to_string(),
                row.point.k.to_string(),
                row.point.c.to_string(),
                s.runs.to_string(),
            ];
            for spread in [s.fitness, s.epi_nodes, s.dev_steps] {
                rec.extend([spread.mean.to_string(), spread.min.to_string(), spread.max.to_string()]);
            }
            w.write_record(rec)?;
        }
        w.flush()?;
        Ok(())
    };
    write().map_err(csv_err(path))
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let bad = |msg: String| CliError::Csv { path: path.to_path_buf(), msg };
    let headers = r.headers().map_err(csv_err(path))?.clone();
    if headers.iter().ne(SUMMARY_HEADER) {
        return Err(bad(format!("expected summary columns {}", SUMMARY_HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        let int = |i: usize| rec[i].parse::<usize>().map_err(|e| bad(format!("column {}: {e}", SUMMARY_HEADER[i])));
        let float = |i: usize| rec[i].parse::<f64>().map_err(|e| bad(format!("column {}: {e}", SUMMARY_HEADER[i])));
        let spread = |i: usize| -> Result<_> {
            Ok(epigrn::analysis::Spread { mean: float(i)?, min: float(i + 1)?, max: float(i + 2)? })
        };
        rows.push(SummaryRow {
            scenario: rec[0].to_string(),
            point: Point { b: int(1)?, k: int(2)?, c: int(3)? },
            stats: Aggregate { runs: int(4)?, fitness: spread(5)?, epi_nodes: spread(8)?, dev_steps: spread(11)? },
        });
    }
    Ok(rows)
}

/// Final-generation values of every run in a run CSV, keyed by point.
pub fn read_run_finals(path: &Path) -> Result<Vec<(Point, FinalValues)>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let bad = |msg: String| CliError::Csv { path: path.to_path_buf(), msg };
    let headers = r.headers().map_err(csv_err(path))?.clone();
    if headers.iter().ne(RUN_HEADER) {
        return Err(bad(format!("expected run columns {}", RUN_HEADER.join(","))));
    }
    // rows are grouped by run with generations ascending; keep the last row of each run
    let mut finals: Vec<((Point, usize, usize), FinalValues)> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        let int = |i: usize| rec[i].parse::<usize>().map_err(|e| bad(format!("column {}: {e}", RUN_HEADER[i])));
        let float = |i: usize| rec[i].parse::<f64>().map_err(|e| bad(format!("column {}: {e}", RUN_HEADER[i])));
        let key = (Point { b: int(1)?, k: int(2)?, c: int(3)? }, int(4)?, int(5)?);
        let value = FinalValues { fitness: float(7)?, epi_nodes: float(8)?, dev_steps: float(9)? };
        match finals.last_mut() {
            Some((k, v)) if *k == key => *v = value,
            _ => finals.push((key, value)),
        }
    }
    Ok(finals.into_iter().map(|((p, _, _), v)| (p, v)).collect())
}

#[derive(Debug)]
pub struct RunOutputs {
    pub runs_csv: PathBuf,
    pub summary_csv: PathBuf,
    pub results: Vec<RunResult>,
}

/// Run a spec and write `runs.csv` and `summary.csv` into its output
/// directory. Output files are created before any simulation starts.
pub fn cmd_run(spec: &ExperimentSpec, threads: usize) -> Result<RunOutputs> {
    spec.validate()?;
    let dir = &spec.output.dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let runs_csv = dir.join("runs.csv");
    let summary_csv = dir.join("summary.csv");
    for p in [&runs_csv, &summary_csv] {
        File::create(p).map_err(io_err(p))?;
    }
    let label = spec.label();
    let results = run_experiment(spec, threads)?;
    write_runs(&runs_csv, &label, &results)?;
    write_summary(&summary_csv, &summarise(&label, &results)?)?;
    Ok(RunOutputs { runs_csv, summary_csv, results })
}
