//! Measurements on networks and runs: attractor detection, methylation
//! rhythm statistics, Welch's two-sample t-test and run aggregation.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{param, Result};
use crate::evolution::RunRecord;
use crate::network::{check_step_args, init_state, step_into, CellState, Genome};
use crate::scenarios::ActivityTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    /// Steps taken before the first state of the attractor was reached.
    pub transient_length: usize,
    /// Attractor period; 0 when `truncated`.
    pub cycle_length: usize,
    /// The horizon ran out before any state repeated.
    pub truncated: bool,
}

/// Pack (states, methylated) into words. Methylation is part of the
/// dynamical state, so it is part of the fingerprint.
fn fingerprint(s: &CellState) -> Vec<u64> {
    let mut words = vec![0u64; (2 * s.len()).div_ceil(64)];
    for (i, &b) in s.states.iter().chain(&s.methylated).enumerate() {
        words[i / 64] |= (b as u64) << (i % 64);
    }
    words
}

/// Run the genome from its start state under a constant input for at most
/// `horizon` steps, stopping at the first revisited state.
pub fn detect_cycle(g: &Genome, input: &[bool], horizon: usize) -> Result<CycleReport> {
    let start = init_state(g, None, true)?;
    detect_cycle_from(g, start, input, horizon)
}

pub fn detect_cycle_from(g: &Genome, start: CellState, input: &[bool], horizon: usize) -> Result<CycleReport> {
    if horizon == 0 {
        return param("horizon must be at least 1");
    }
    check_step_args(g, &start, input, None)?;
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    seen.insert(fingerprint(&start), 0);
    let mut cur = start;
    let mut next = cur.clone();
    for t in 1..=horizon {
        step_into(g, &cur, input, None, &mut next);
        std::mem::swap(&mut cur, &mut next);
        if let Some(&first) = seen.get(&fingerprint(&cur)) {
            return Ok(CycleReport { transient_length: first, cycle_length: t - first, truncated: false });
        }
        seen.insert(fingerprint(&cur), t);
    }
    Ok(CycleReport { transient_length: horizon, cycle_length: 0, truncated: true })
}

/// A maximal run of constant methylation status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub methylated: bool,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EpiActivityStats {
    pub window: usize,
    /// Run-length encoding of each epigenetic node's methylation series.
    pub per_node: BTreeMap<usize, Vec<Interval>>,
    /// Interval length -> count, methylated intervals.
    pub on_histogram: BTreeMap<usize, usize>,
    /// Interval length -> count, unmethylated intervals.
    pub off_histogram: BTreeMap<usize, usize>,
}

impl EpiActivityStats {
    /// Nodes whose mark changed at least once in the window.
    pub fn switching_nodes(&self) -> impl Iterator<Item = (&usize, &Vec<Interval>)> {
        self.per_node.iter().filter(|(_, iv)| iv.len() > 1)
    }

    /// Most common on/off interval length among switching nodes (smallest
    /// length on ties), or `None` when no node switches.
    pub fn modal_interval_length(&self) -> Option<usize> {
        let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
        for (_, ivs) in self.switching_nodes() {
            for iv in ivs {
                *hist.entry(iv.length).or_default() += 1;
            }
        }
        let best = hist.values().copied().max()?;
        hist.into_iter().find(|&(_, c)| c == best).map(|(len, _)| len)
    }
}

fn run_lengths(series: impl Iterator<Item = bool>) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::new();
    for m in series {
        match out.last_mut() {
            Some(last) if last.methylated == m => last.length += 1,
            _ => out.push(Interval { methylated: m, length: 1 }),
        }
    }
    out
}

/// Run-length encode the methylation series of every epigenetic node over
/// the traced window.
pub fn epi_activity(trace: &ActivityTrace) -> Result<EpiActivityStats> {
    if trace.methylation.is_empty() {
        return param("activity trace is empty");
    }
    let mut stats = EpiActivityStats { window: trace.methylation.len(), ..Default::default() };
    for &node in &trace.epi_nodes {
        let ivs = run_lengths(trace.methylation.iter().map(|m| m[node]));
        for iv in &ivs {
            let hist = if iv.methylated { &mut stats.on_histogram } else { &mut stats.off_histogram };
            *hist.entry(iv.length).or_default() += 1;
        }
        stats.per_node.insert(node, ivs);
    }
    Ok(stats)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    /// Two-tailed.
    pub p: f64,
    /// Both samples had zero variance; `p` is 1 for equal means, else 0.
    pub degenerate: bool,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    if xs.iter().all(|&x| x == xs[0]) {
        return (xs[0], 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Welch's unequal-variance t-test with Satterthwaite degrees of freedom.
///
/// The two-tailed p-value is `I_{df/(df+t^2)}(df/2, 1/2)`, the regularised
/// incomplete beta function form of the Student t tail.
pub fn welch_t_test(xs: &[f64], ys: &[f64]) -> Result<WelchTest> {
    if xs.len() < 2 || ys.len() < 2 {
        return param(format!("Welch test needs two samples of at least 2, got {} and {}", xs.len(), ys.len()));
    }
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let (mx, vx) = mean_var(xs);
    let (my, vy) = mean_var(ys);
    let (ax, ay) = (vx / nx, vy / ny);
    let se2 = ax + ay;
    if se2 == 0.0 {
        let diff = mx - my;
        return Ok(if diff == 0.0 {
            WelchTest { t: 0.0, df: nx + ny - 2.0, p: 1.0, degenerate: true }
        } else {
            WelchTest { t: diff.signum() * f64::INFINITY, df: nx + ny - 2.0, p: 0.0, degenerate: true }
        });
    }
    let t = (mx - my) / se2.sqrt();
    let df = se2 * se2 / (ax * ax / (nx - 1.0) + ay * ay / (ny - 1.0));
    let p = beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0);
    Ok(WelchTest { t, df, p, degenerate: false })
}

/// Mean, min and max of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // guard the rounding of the mean against the extremes
        Some(Self { mean: mean.clamp(min, max), min, max })
    }
}

/// End-of-run values of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalValues {
    pub fitness: f64,
    pub epi_nodes: f64,
    pub dev_steps: f64,
}

impl From<&RunRecord> for FinalValues {
    fn from(r: &RunRecord) -> Self {
        Self {
            fitness: r.final_fitness(),
            epi_nodes: r.final_epi_nodes() as f64,
            dev_steps: r.final_dev_steps() as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: usize,
    pub fitness: Spread,
    pub epi_nodes: Spread,
    pub dev_steps: Spread,
}

pub fn aggregate_finals(finals: &[FinalValues]) -> Result<Aggregate> {
    let col = |f: fn(&FinalValues) -> f64| finals.iter().map(f).collect::<Vec<_>>();
    let (Some(fitness), Some(epi_nodes), Some(dev_steps)) =
        (Spread::of(&col(|v| v.fitness)), Spread::of(&col(|v| v.epi_nodes)), Spread::of(&col(|v| v.dev_steps)))
    else {
        return param("cannot aggregate an empty set of runs");
    };
    Ok(Aggregate { runs: finals.len(), fitness, epi_nodes, dev_steps })
}

/// Summary over the final generation of each run.
pub fn aggregate(records: &[RunRecord]) -> Result<Aggregate> {
    aggregate_finals(&records.iter().map(FinalValues::from).collect::<Vec<_>>())
}
