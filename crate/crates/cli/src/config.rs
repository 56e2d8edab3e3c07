//! Experiment configuration documents.
//!
//! A config is a JSON object with four optional sections; every omitted key
//! takes its default (R=100, N=10, 30,000 generations, 100 scored cycles,
//! 10 landscapes x 10 runs per parameter point). Unknown keys are rejected.
//!
//! ```json
//! {
//!   "scenario":  {"kind": "static_single", "cycles": 100, "heritable": false,
//!                 "reset_states": true, "heterogeneous": true, "development": false},
//!   "evolution": {"R": 100, "N": 10, "B_list": [1,2,3,4,5], "K_list": [2], "C_list": [1],
//!                 "generations": 30000, "seed": 1, "epigenetics": true,
//!                 "initial_epi_fraction": 0.0},
//!   "protocol":  {"landscapes_per_point": 10, "runs_per_landscape": 10},
//!   "output":    {"dir": "results"}
//! }
//! ```

use std::path::PathBuf;

use epigrn::network::MAX_CONNECTIVITY;
use epigrn::{EvolutionParams, ScenarioConfig, ScenarioKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const MAX_K: usize = 5;
pub const MAX_C: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub kind: ScenarioKind,
    pub cycles: usize,
    /// Defaults to on for `switching`, off otherwise.
    pub heritable: Option<bool>,
    pub reset_states: bool,
    pub heterogeneous: bool,
    pub development: bool,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            kind: ScenarioKind::StaticSingle,
            cycles: 100,
            heritable: None,
            reset_states: true,
            heterogeneous: true,
            development: false,
        }
    }
}

impl ScenarioSection {
    pub fn heritable(&self) -> bool {
        self.heritable.unwrap_or(self.kind == ScenarioKind::Switching)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionSection {
    #[serde(rename = "R")]
    pub r_nodes: usize,
    #[serde(rename = "N")]
    pub n_traits: usize,
    #[serde(rename = "B_list")]
    pub b_list: Vec<usize>,
    #[serde(rename = "K_list")]
    pub k_list: Vec<usize>,
    /// Only meaningful for multicell; defaults to `[1]` there and is
    /// collapsed to `[0]` for single-cell scenarios.
    #[serde(rename = "C_list")]
    pub c_list: Option<Vec<usize>>,
    pub generations: usize,
    pub seed: u64,
    pub epigenetics: bool,
    pub initial_epi_fraction: f64,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        Self {
            r_nodes: 100,
            n_traits: 10,
            b_list: vec![1, 2, 3, 4, 5],
            k_list: vec![2],
            c_list: None,
            generations: 30_000,
            seed: 1,
            epigenetics: true,
            initial_epi_fraction: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolSection {
    pub landscapes_per_point: usize,
    pub runs_per_landscape: usize,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self { landscapes_per_point: 10, runs_per_landscape: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("results") }
    }
}

/// A complete experiment: one scenario swept over B x K x C.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub scenario: ScenarioSection,
    pub evolution: EvolutionSection,
    pub protocol: ProtocolSection,
    pub output: OutputSection,
}

/// One (B, K, C) combination of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub b: usize,
    pub k: usize,
    pub c: usize,
}

fn range_err(key: &str, value: impl std::fmt::Display, allowed: &str) -> CliError {
    CliError::Range { key: key.into(), value: value.to_string(), allowed: allowed.into() }
}

fn check_list(key: &str, list: &[usize], lo: usize, hi: usize) -> Result<()> {
    if list.is_empty() {
        return Err(CliError::Config(format!("{key} must not be empty")));
    }
    match list.iter().find(|&&v| v < lo || v > hi) {
        Some(v) => Err(range_err(key, v, &format!("{lo}..={hi}"))),
        None => Ok(()),
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let spec: ExperimentSpec = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let ev = &self.evolution;
        let sc = &self.scenario;
        if ev.n_traits == 0 {
            return Err(range_err("evolution.N", 0, ">= 1"));
        }
        if ev.r_nodes < 3 * ev.n_traits {
            return Err(range_err("evolution.R", ev.r_nodes, &format!(">= 3N = {}", 3 * ev.n_traits)));
        }
        check_list("evolution.B_list", &ev.b_list, 1, MAX_CONNECTIVITY.min(ev.r_nodes - 1))?;
        check_list("evolution.K_list", &ev.k_list, 0, MAX_K.min(ev.n_traits - 1))?;
        check_list("evolution.C_list", &self.c_values(), 0, MAX_C.min(ev.n_traits))?;
        if ev.generations == 0 {
            return Err(range_err("evolution.generations", 0, ">= 1"));
        }
        if !(0.0..=1.0).contains(&ev.initial_epi_fraction) {
            return Err(range_err("evolution.initial_epi_fraction", ev.initial_epi_fraction, "0..=1"));
        }
        if sc.cycles == 0 {
            return Err(range_err("scenario.cycles", 0, ">= 1"));
        }
        if sc.kind == ScenarioKind::Switching && !sc.cycles.is_multiple_of(2) {
            return Err(range_err("scenario.cycles", sc.cycles, "even for switching"));
        }
        if self.protocol.landscapes_per_point == 0 {
            return Err(range_err("protocol.landscapes_per_point", 0, ">= 1"));
        }
        if self.protocol.runs_per_landscape == 0 {
            return Err(range_err("protocol.runs_per_landscape", 0, ">= 1"));
        }
        Ok(())
    }

    fn c_values(&self) -> Vec<usize> {
        match (&self.scenario.kind, &self.evolution.c_list) {
            (ScenarioKind::Multicell, Some(cs)) => cs.clone(),
            (ScenarioKind::Multicell, None) => vec![1],
            _ => vec![0],
        }
    }

    /// Sweep points in (B, K, C) order, duplicates removed.
    pub fn points(&self) -> Vec<Point> {
        let mut pts = Vec::new();
        for &b in &self.evolution.b_list {
            for &k in &self.evolution.k_list {
                for c in self.c_values() {
                    let p = Point { b, k, c };
                    if !pts.contains(&p) {
                        pts.push(p);
                    }
                }
            }
        }
        pts
    }

    pub fn scenario_config(&self, p: Point) -> ScenarioConfig {
        let sc = &self.scenario;
        let multicell = sc.kind == ScenarioKind::Multicell;
        ScenarioConfig {
            kind: sc.kind,
            cycles: sc.cycles,
            heritable: sc.heritable(),
            reset_states: sc.reset_states,
            heterogeneous: sc.heterogeneous,
            development_enabled: sc.development,
            n_traits: self.evolution.n_traits,
            k: p.k,
            c: if multicell { p.c } else { 0 },
            s: multicell as usize,
        }
    }

    pub fn evolution_params(&self, p: Point) -> EvolutionParams {
        let ev = &self.evolution;
        EvolutionParams {
            r_nodes: ev.r_nodes,
            n_traits: ev.n_traits,
            b_connectivity: p.b,
            generations: ev.generations,
            development_enabled: self.scenario.development,
            heritable_epigenetics: self.scenario.heritable(),
            reset_states: self.scenario.reset_states,
            epigenetics_enabled: ev.epigenetics,
            initial_epi_fraction: ev.initial_epi_fraction,
            seed: ev.seed,
        }
    }

    /// Label written to the `scenario` column: the kind plus any
    /// non-default switches.
    pub fn label(&self) -> String {
        let sc = &self.scenario;
        let mut label = sc.kind.as_str().to_string();
        if sc.heritable() {
            label.push_str("+heritable");
        }
        if !sc.reset_states {
            label.push_str("+keep_states");
        }
        if sc.kind == ScenarioKind::Multicell && !sc.heterogeneous {
            label.push_str("+homogeneous");
        }
        if sc.development {
            label.push_str("+development");
        }
        if !self.evolution.epigenetics {
            label.push_str("+no_epigenetics");
        }
        label
    }
}
