//! Per-point Welch comparison of two run files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use epigrn::analysis::{welch_t_test, FinalValues, WelchTest};

use crate::config::Point;
use crate::error::{io_err, CliError, Result};
use crate::experiment::read_run_finals;

pub const SIGNIFICANCE: f64 = 0.05;

pub const COMPARE_HEADER: [&str; 15] = [
    "B",
    "K",
    "C",
    "runs_a",
    "runs_b",
    "fit_mean_a",
    "fit_mean_b",
    "fit_t",
    "fit_p",
    "fit_significant",
    "epi_mean_a",
    "epi_mean_b",
    "epi_t",
    "epi_p",
    "epi_significant",
];

#[derive(Debug, Clone, PartialEq)]
pub struct MetricComparison {
    pub mean_a: f64,
    pub mean_b: f64,
    pub test: WelchTest,
}

impl MetricComparison {
    pub fn mean_difference(&self) -> f64 {
        self.mean_a - self.mean_b
    }

    pub fn significant(&self) -> bool {
        self.test.p < SIGNIFICANCE
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub point: Point,
    pub runs_a: usize,
    pub runs_b: usize,
    pub fitness: MetricComparison,
    pub epi_nodes: MetricComparison,
}

fn group(finals: &[(Point, FinalValues)]) -> BTreeMap<Point, Vec<FinalValues>> {
    let mut m: BTreeMap<Point, Vec<FinalValues>> = BTreeMap::new();
    for (p, v) in finals {
        m.entry(*p).or_default().push(*v);
    }
    m
}

fn metric(a: &[FinalValues], b: &[FinalValues], f: fn(&FinalValues) -> f64) -> Result<MetricComparison> {
    let xs: Vec<f64> = a.iter().map(f).collect();
    let ys: Vec<f64> = b.iter().map(f).collect();
    Ok(MetricComparison {
        mean_a: xs.iter().sum::<f64>() / xs.len() as f64,
        mean_b: ys.iter().sum::<f64>() / ys.len() as f64,
        test: welch_t_test(&xs, &ys)?,
    })
}

fn describe(points: &[&Point]) -> String {
    points.iter().map(|p| format!("(B={}, K={}, C={})", p.b, p.k, p.c)).collect::<Vec<_>>().join(", ")
}

/// Welch tests on final fitness and final epigenetic node count, per point.
pub fn compare_finals(a: &[(Point, FinalValues)], b: &[(Point, FinalValues)]) -> Result<Vec<ComparisonRow>> {
    let (ga, gb) = (group(a), group(b));
    let only_a: Vec<&Point> = ga.keys().filter(|p| !gb.contains_key(p)).collect();
    let only_b: Vec<&Point> = gb.keys().filter(|p| !ga.contains_key(p)).collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        return Err(CliError::Mismatch(format!(
            "parameter points differ; missing from second: [{}]; missing from first: [{}]",
            describe(&only_a),
            describe(&only_b)
        )));
    }
    ga.iter()
        .map(|(p, xs)| {
            let ys = &gb[p];
            Ok(ComparisonRow {
                point: *p,
                runs_a: xs.len(),
                runs_b: ys.len(),
                fitness: metric(xs, ys, |v| v.fitness)?,
                epi_nodes: metric(xs, ys, |v| v.epi_nodes)?,
            })
        })
        .collect()
}

pub fn cmd_compare(runs_a: &Path, runs_b: &Path) -> Result<Vec<ComparisonRow>> {
    compare_finals(&read_run_finals(runs_a)?, &read_run_finals(runs_b)?)
}

pub fn write_comparison(out: impl std::io::Write, rows: &[ComparisonRow]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPARE_HEADER)?;
    for r in rows {
        let mut rec = vec![
            r.point.b.to_string(),
            r.point.k.to_string(),
            r.point.c.to_string(),
            r.runs_a.to_string(),
            r.runs_b.to_string(),
        ];
        for m in [&r.fitness, &r.epi_nodes] {
            rec.extend([
                m.mean_a.to_string(),
                m.mean_b.to_string(),
                m.test.t.to_string(),
                m.test.p.to_string(),
                m.significant().to_string(),
            ]);
        }
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_comparison_file(path: &Path, rows: &[ComparisonRow]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_comparison(BufWriter::new(file), rows).map_err(|e| CliError::Csv { path: path.into(), msg: e.to_string() })
}
