//! Attractor survey of random classical networks across connectivities.

use epigrn::analysis::{detect_cycle, CycleReport};
use epigrn::evolution::{random_genome, EvolutionParams};
use epigrn::seed::rng_for;

use crate::error::Result;

const ATTRACTOR_TAG: u64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorRow {
    pub b: usize,
    pub genome_idx: usize,
    pub report: CycleReport,
}

#[derive(Debug, Clone)]
pub struct SurveySpec {
    pub r_nodes: usize,
    pub n_traits: usize,
    pub b_list: Vec<usize>,
    pub genomes: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl Default for SurveySpec {
    fn default() -> Self {
        Self { r_nodes: 100, n_traits: 10, b_list: vec![1, 2, 3, 4, 5], genomes: 50, horizon: 10_000, seed: 1 }
    }
}

/// Random genomes without epigenetic nodes, arbitrary start states, run
/// under the all-0 input until their first repeated state.
pub fn survey(spec: &SurveySpec) -> Result<Vec<AttractorRow>> {
    let mut rows = Vec::new();
    for &b in &spec.b_list {
        let params = EvolutionParams {
            r_nodes: spec.r_nodes,
            n_traits: spec.n_traits,
            b_connectivity: b,
            epigenetics_enabled: false,
            ..Default::default()
        };
        for genome_idx in 0..spec.genomes {
            let mut rng = rng_for(spec.seed, &[ATTRACTOR_TAG, b as u64, genome_idx as u64]);
            let g = random_genome(&mut rng, &params)?;
            let report = detect_cycle(&g, &vec![false; spec.n_traits], spec.horizon)?;
            rows.push(AttractorRow { b, genome_idx, report });
        }
    }
    Ok(rows)
}

/// A cycle length where "no repeat within the horizon" ranks above every
/// detected length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CycleLength {
    Finite(usize),
    Truncated,
}

impl From<&CycleReport> for CycleLength {
    fn from(r: &CycleReport) -> Self {
        if r.truncated {
            CycleLength::Truncated
        } else {
            CycleLength::Finite(r.cycle_length)
        }
    }
}

/// Lower median of the cycle lengths surveyed at connectivity `b`.
pub fn median_cycle_length(rows: &[AttractorRow], b: usize) -> Option<CycleLength> {
    let mut lens: Vec<CycleLength> = rows.iter().filter(|r| r.b == b).map(|r| (&r.report).into()).collect();
    lens.sort();
    lens.get(lens.len().checked_sub(1)? / 2).copied()
}

pub fn write_survey(out: impl std::io::Write, rows: &[AttractorRow]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["B", "genome_idx", "transient", "cycle_length", "truncated"])?;
    for r in rows {
        w.write_record([
            r.b.to_string(),
            r.genome_idx.to_string(),
            r.report.transient_length.to_string(),
            r.report.cycle_length.to_string(),
            r.report.truncated.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
