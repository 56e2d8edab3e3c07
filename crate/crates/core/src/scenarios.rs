//! Evaluation regimes that turn a genome into a scalar fitness.
//!
//! Every regime runs `D` unscored development cycles followed by
//! `cycles` scored cycles, and reports the mean per-cycle landscape fitness
//! together with the final cell state(s) (for heritable runs) and, from the
//! public `eval_*` functions, an [`ActivityTrace`] per cell.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::landscape::{NkLandscape, NkcsLandscape};
use crate::network::{check_step_args, init_state, step_into, CellState, Genome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    StaticSingle,
    Switching,
    Multicell,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::StaticSingle => "static_single",
            ScenarioKind::Switching => "switching",
            ScenarioKind::Multicell => "multicell",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub cycles: usize,
    pub heritable: bool,
    pub reset_states: bool,
    /// Multicell only: mother and daughter score on different landscapes.
    pub heterogeneous: bool,
    pub development_enabled: bool,
    pub n_traits: usize,
    pub k: usize,
    /// Multicell only.
    pub c: usize,
    /// Multicell only; must be 1.
    pub s: usize,
}

impl ScenarioConfig {
    pub fn new(kind: ScenarioKind, n_traits: usize, k: usize) -> Self {
        Self {
            kind,
            cycles: 100,
            heritable: kind == ScenarioKind::Switching,
            reset_states: true,
            heterogeneous: true,
            development_enabled: false,
            n_traits,
            k,
            c: if kind == ScenarioKind::Multicell { 1 } else { 0 },
            s: if kind == ScenarioKind::Multicell { 1 } else { 0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cycles == 0 {
            return param("cycles must be at least 1");
        }
        match self.kind {
            ScenarioKind::Switching if !self.cycles.is_multiple_of(2) => {
                param(format!("switching needs an even cycle count, got {}", self.cycles))
            }
            ScenarioKind::Multicell if self.s != 1 => {
                Err(Error::Unsupported(format!("multicell evaluation supports exactly one partner, got S={}", self.s)))
            }
            _ => Ok(()),
        }
    }
}

/// The landscape(s) a scenario scores against.
#[derive(Debug, Clone, PartialEq)]
pub enum Landscapes {
    Single(NkLandscape),
    /// Landscape A (input all-0) and landscape B (input all-1).
    Switching {
        a: NkLandscape,
        b: NkLandscape,
    },
    /// Equal for the homogeneous variant.
    Coupled {
        mother: NkcsLandscape,
        daughter: NkcsLandscape,
    },
}

impl Landscapes {
    pub(crate) fn check_for(&self, cfg: &ScenarioConfig) -> Result<()> {
        let n_ok = match (cfg.kind, self) {
            (ScenarioKind::StaticSingle, Landscapes::Single(l)) => l.n() == cfg.n_traits,
            (ScenarioKind::Switching, Landscapes::Switching { a, b }) => a.n() == cfg.n_traits && b.n() == cfg.n_traits,
            (ScenarioKind::Multicell, Landscapes::Coupled { mother, daughter }) => {
                if mother.s() != 1 || daughter.s() != 1 {
                    return Err(Error::Unsupported("multicell landscapes must couple to S=1 partner".into()));
                }
                mother.n() == cfg.n_traits && daughter.n() == cfg.n_traits
            }
            (kind, _) => return param(format!("landscapes do not match a {} scenario", kind.as_str())),
        };
        if !n_ok {
            return param(format!("landscape N differs from scenario N={}", cfg.n_traits));
        }
        Ok(())
    }
}

/// Which half of a switching life comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    AFirst,
    BFirst,
}

impl Order {
    pub fn flip(self) -> Self {
        match self {
            Order::AFirst => Order::BFirst,
            Order::BFirst => Order::AFirst,
        }
    }
}

/// Per scored cycle: trait bits, the full methylation bitmap, and that
/// cycle's fitness contribution.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ActivityTrace {
    /// Epigenetic nodes of the evaluated genome.
    pub epi_nodes: Vec<usize>,
    pub traits: Vec<Vec<bool>>,
    pub methylation: Vec<Vec<bool>>,
    pub scores: Vec<f64>,
}

impl ActivityTrace {
    fn for_genome(g: &Genome, cycles: usize) -> Self {
        Self {
            epi_nodes: g.epi_nodes(),
            traits: Vec::with_capacity(cycles),
            methylation: Vec::with_capacity(cycles),
            scores: Vec::with_capacity(cycles),
        }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    /// One state per cell: `[cell]` or `[mother, daughter]`.
    pub finals: Vec<CellState>,
    /// Parallel to `finals`; empty when evaluated without tracing.
    pub traces: Vec<ActivityTrace>,
}

trait Recorder {
    fn record(&mut self, g: &Genome, cells: [&CellState; 2], n_cells: usize, score: f64);
}

struct NoTrace;

impl Recorder for NoTrace {
    #[inline]
    fn record(&mut self, _: &Genome, _: [&CellState; 2], _: usize, _: f64) {}
}

impl Recorder for Vec<ActivityTrace> {
    fn record(&mut self, g: &Genome, cells: [&CellState; 2], n_cells: usize, score: f64) {
        for (trace, cell) in self.iter_mut().zip(cells).take(n_cells) {
            trace.traits.push(cell.states[g.trait_ids()].to_vec());
            trace.methylation.push(cell.methylated.clone());
            trace.scores.push(score);
        }
    }
}

fn start(g: &Genome, inherited: Option<&CellState>, cfg: &ScenarioConfig) -> Result<CellState> {
    init_state(g, inherited, cfg.reset_states)
}

/// A single cell stepping through a sequence of (input, landscape) phases.
struct SingleCell<'g> {
    g: &'g Genome,
    cur: CellState,
    next: CellState,
}

impl<'g> SingleCell<'g> {
    fn new(g: &'g Genome, s: CellState) -> Self {
        Self { g, next: s.clone(), cur: s }
    }

    #[inline]
    fn step(&mut self, input: &[bool]) {
        step_into(self.g, &self.cur, input, None, &mut self.next);
        std::mem::swap(&mut self.cur, &mut self.next);
    }

    fn run_scored(
        &mut self,
        input: &[bool],
        land: &NkLandscape,
        cycles: usize,
        sum: &mut f64,
        rec: &mut impl Recorder,
    ) {
        for _ in 0..cycles {
            self.step(input);
            let f = land.score(&self.cur.states[self.g.trait_ids()]);
            rec.record(self.g, [&self.cur, &self.cur], 1, f);
            *sum += f;
        }
    }
}

fn static_single(
    g: &Genome,
    land: &NkLandscape,
    inherited: Option<&CellState>,
    cfg: &ScenarioConfig,
    rec: &mut impl Recorder,
) -> Result<(f64, Vec<CellState>)> {
    let zeros = vec![false; g.n_inputs()];
    let s = start(g, inherited, cfg)?;
    check_step_args(g, &s, &zeros, None)?;
    let mut cell = SingleCell::new(g, s);
    for _ in 0..g.dev_steps() {
        cell.step(&zeros);
    }
    let mut sum = 0.0;
    cell.run_scored(&zeros, land, cfg.cycles, &mut sum, rec);
    Ok((sum / cfg.cycles as f64, vec![cell.cur]))
}

fn switching(
    g: &Genome,
    a: &NkLandscape,
    b: &NkLandscape,
    order: Order,
    inherited: Option<&CellState>,
    cfg: &ScenarioConfig,
    rec: &mut impl Recorder,
) -> Result<(f64, Vec<CellState>)> {
    let zeros = vec![false; g.n_inputs()];
    let ones = vec![true; g.n_inputs()];
    let (first, second) = match order {
        Order::AFirst => ((&zeros, a), (&ones, b)),
        Order::BFirst => ((&ones, b), (&zeros, a)),
    };
    let s = start(g, inherited, cfg)?;
    check_step_args(g, &s, &zeros, None)?;
    let mut cell = SingleCell::new(g, s);
    for _ in 0..g.dev_steps() {
        cell.step(first.0);
    }
    let half = cfg.cycles / 2;
    let mut sum = 0.0;
    cell.run_scored(first.0, first.1, half, &mut sum, rec);
    cell.run_scored(second.0, second.1, half, &mut sum, rec);
    Ok((sum / cfg.cycles as f64, vec![cell.cur]))
}

#[allow(clippy::too_many_arguments)]
fn multicell(
    g: &Genome,
    land_m: &NkcsLandscape,
    land_d: &NkcsLandscape,
    inherited_m: Option<&CellState>,
    inherited_d: Option<&CellState>,
    cfg: &ScenarioConfig,
    rec: &mut impl Recorder,
) -> Result<(f64, Vec<CellState>)> {
    if land_m.s() != 1 || land_d.s() != 1 {
        return Err(Error::Unsupported("multicell evaluation needs S=1 landscapes".into()));
    }
    let zeros = vec![false; g.n_inputs()];
    let traits = g.trait_ids();
    let mut mother = start(g, inherited_m, cfg)?;
    let mut daughter = start(g, inherited_d, cfg)?;
    check_step_args(g, &mother, &zeros, None)?;
    let mut spare = mother.clone();

    // mother reads the daughter's pre-step traits, the daughter then reads
    // the mother's freshly updated ones
    let mut macro_step = |mother: &mut CellState, daughter: &mut CellState| {
        step_into(g, mother, &zeros, Some(&daughter.states[traits.clone()]), &mut spare);
        std::mem::swap(mother, &mut spare);
        step_into(g, daughter, &zeros, Some(&mother.states[traits.clone()]), &mut spare);
        std::mem::swap(daughter, &mut spare);
    };
    for _ in 0..g.dev_steps() {
        macro_step(&mut mother, &mut daughter);
    }
    let mut sum = 0.0;
    for _ in 0..cfg.cycles {
        macro_step(&mut mother, &mut daughter);
        let (tm, td) = (&mother.states[traits.clone()], &daughter.states[traits.clone()]);
        let f = 0.5 * (land_m.score(tm, &[td]) + land_d.score(td, &[tm]));
        rec.record(g, [&mother, &daughter], 2, f);
        sum += f;
    }
    Ok((sum / cfg.cycles as f64, vec![mother, daughter]))
}

fn expect_kind(cfg: &ScenarioConfig, kind: ScenarioKind) -> Result<()> {
    cfg.validate()?;
    if cfg.kind != kind {
        return param(format!("expected a {} scenario, got {}", kind.as_str(), cfg.kind.as_str()));
    }
    Ok(())
}

fn check_n(g: &Genome, n: usize) -> Result<()> {
    if g.n_traits() != n {
        return param(format!("genome has N={} traits, landscape has N={n}", g.n_traits()));
    }
    Ok(())
}

/// One cell under a constant all-0 input, scored on a single NK landscape.
pub fn eval_static_single(
    g: &Genome,
    land: &NkLandscape,
    inherited: Option<&CellState>,
    cfg: &ScenarioConfig,
) -> Result<Evaluation> {
    expect_kind(cfg, ScenarioKind::StaticSingle)?;
    check_n(g, land.n())?;
    let mut traces = vec![ActivityTrace::for_genome(g, cfg.cycles)];
    let (fitness, finals) = static_single(g, land, inherited, cfg, &mut traces)?;
    Ok(Evaluation { fitness, finals, traces })
}

/// One cell whose life is split in two halves: input all-0 scored on `a` and
/// input all-1 scored on `b`, in the given order. State carries across the
/// switch.
pub fn eval_switching(
    g: &Genome,
    a: &NkLandscape,
    b: &NkLandscape,
    order: Order,
    inherited: Option<&CellState>,
    cfg: &ScenarioConfig,
) -> Result<Evaluation> {
    expect_kind(cfg, ScenarioKind::Switching)?;
    check_n(g, a.n())?;
    check_n(g, b.n())?;
    let mut traces = vec![ActivityTrace::for_genome(g, cfg.cycles)];
    let (fitness, finals) = switching(g, a, b, order, inherited, cfg, &mut traces)?;
    Ok(Evaluation { fitness, finals, traces })
}

/// Mother and daughter clones coupled through their partner ports, updated
/// alternately; fitness per macro-cycle is the mean of both cells' NKCS
/// fitness.
pub fn eval_multicell(
    g: &Genome,
    land_m: &NkcsLandscape,
    land_d: &NkcsLandscape,
    inherited_m: Option<&CellState>,
    inherited_d: Option<&CellState>,
    cfg: &ScenarioConfig,
) -> Result<Evaluation> {
    expect_kind(cfg, ScenarioKind::Multicell)?;
    check_n(g, land_m.n())?;
    check_n(g, land_d.n())?;
    let mut traces = vec![ActivityTrace::for_genome(g, cfg.cycles), ActivityTrace::for_genome(g, cfg.cycles)];
    let (fitness, finals) = multicell(g, land_m, land_d, inherited_m, inherited_d, cfg, &mut traces)?;
    Ok(Evaluation { fitness, finals, traces })
}

fn inherited_cell(inherited: Option<&[CellState]>, i: usize) -> Result<Option<&CellState>> {
    match inherited {
        None => Ok(None),
        Some(cells) => {
            cells.get(i).map(Some).ok_or_else(|| Error::Parameter(format!("inherited state for cell {i} missing")))
        }
    }
}

fn dispatch(
    g: &Genome,
    cfg: &ScenarioConfig,
    lands: &Landscapes,
    inherited: Option<&[CellState]>,
    order: Order,
    rec: &mut impl Recorder,
) -> Result<(f64, Vec<CellState>)> {
    cfg.validate()?;
    lands.check_for(cfg)?;
    check_n(g, cfg.n_traits)?;
    match lands {
        Landscapes::Single(land) => static_single(g, land, inherited_cell(inherited, 0)?, cfg, rec),
        Landscapes::Switching { a, b } => switching(g, a, b, order, inherited_cell(inherited, 0)?, cfg, rec),
        Landscapes::Coupled { mother, daughter } => {
            multicell(g, mother, daughter, inherited_cell(inherited, 0)?, inherited_cell(inherited, 1)?, cfg, rec)
        }
    }
}

/// Evaluate under whichever regime `cfg` names, with per-cell traces.
pub fn evaluate(
    g: &Genome,
    cfg: &ScenarioConfig,
    lands: &Landscapes,
    inherited: Option<&[CellState]>,
    order: Order,
) -> Result<Evaluation> {
    let cells = if cfg.kind == ScenarioKind::Multicell { 2 } else { 1 };
    let mut traces = vec![ActivityTrace::for_genome(g, cfg.cycles); cells];
    let (fitness, finals) = dispatch(g, cfg, lands, inherited, order, &mut traces)?;
    Ok(Evaluation { fitness, finals, traces })
}

pub(crate) fn evaluate_untraced(
    g: &Genome,
    cfg: &ScenarioConfig,
    lands: &Landscapes,
    inherited: Option<&[CellState]>,
    order: Order,
) -> Result<Evaluation> {
    let (fitness, finals) = dispatch(g, cfg, lands, inherited, order, &mut NoTrace)?;
    Ok(Evaluation { fitness, finals, traces: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    use crate::evolution::{random_genome, EvolutionParams};
    use crate::network::NodeGene;
    use crate::SimRng;

    fn small_params(b: usize) -> EvolutionParams {
        EvolutionParams { r_nodes: 30, n_traits: 4, b_connectivity: b, initial_epi_fraction: 0.5, ..Default::default() }
    }

    #[test]
    fn config_validation() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::Switching, 4, 1);
        cfg.cycles = 99;
        assert!(matches!(cfg.validate(), Err(Error::Parameter(_))));
        let mut cfg = ScenarioConfig::new(ScenarioKind::Multicell, 4, 1);
        cfg.s = 2;
        assert!(matches!(cfg.validate(), Err(Error::Unsupported(_))));
        let mut cfg = ScenarioConfig::new(ScenarioKind::StaticSingle, 4, 1);
        cfg.cycles = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn frozen_traits_score_exactly() {
        // R=6, N=2: nodes 2 and 3 copy each other (both on), trait 4 copies
        // node 3 and trait 5 copies input 0, so the traits sit at (1, 0)
        let copy = |i: usize, start: bool| NodeGene {
            start_state: start,
            function_table: 0b10,
            inputs: vec![i],
            epi_flag: false,
            epi_inputs: vec![],
            epi_table: 0,
        };
        let nodes = vec![copy(1, false), copy(0, false), copy(3, true), copy(2, true), copy(3, true), copy(0, false)];
        let g = Genome::new(nodes, 2, 0).unwrap();
        let land = NkLandscape::generate(&mut SimRng::seed_from_u64(1), 2, 1).unwrap();
        let cfg = ScenarioConfig::new(ScenarioKind::StaticSingle, 2, 1);
        let ev = eval_static_single(&g, &land, None, &cfg).unwrap();
        assert!((ev.fitness - land.fitness(&[true, false]).unwrap()).abs() < 1e-14);
        assert_eq!(ev.traces[0].len(), 100);
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let mut rng = SimRng::seed_from_u64(2);
        let g = random_genome(&mut rng, &small_params(2)).unwrap();
        let land = NkLandscape::generate(&mut rng, 5, 1).unwrap();
        let cfg = ScenarioConfig::new(ScenarioKind::StaticSingle, 4, 1);
        assert!(eval_static_single(&g, &land, None, &cfg).is_err());
        let land = NkLandscape::generate(&mut rng, 4, 1).unwrap();
        let sw = ScenarioConfig::new(ScenarioKind::Switching, 4, 1);
        assert!(eval_static_single(&g, &land, None, &sw).is_err());
        assert!(evaluate(&g, &cfg, &Landscapes::Switching { a: land.clone(), b: land.clone() }, None, Order::AFirst)
            .is_err());
        let nkcs = NkcsLandscape::generate(&mut rng, 4, 1, 1, 2).unwrap();
        let mc = ScenarioConfig::new(ScenarioKind::Multicell, 4, 1);
        assert!(matches!(eval_multicell(&g, &nkcs, &nkcs, None, None, &mc), Err(Error::Unsupported(_))));
    }

    #[test]
    fn switching_halves_recombine() {
        let mut rng = SimRng::seed_from_u64(3);
        let g = random_genome(&mut rng, &small_params(3)).unwrap();
        let a = NkLandscape::generate(&mut rng, 4, 2).unwrap();
        let b = NkLandscape::generate(&mut rng, 4, 2).unwrap();
        let cfg = ScenarioConfig::new(ScenarioKind::Switching, 4, 2);
        let ev = eval_switching(&g, &a, &b, Order::AFirst, None, &cfg).unwrap();
        let s = &ev.traces[0].scores;
        let first: f64 = s[..50].iter().sum::<f64>() / 50.0;
        let second: f64 = s[50..].iter().sum::<f64>() / 50.0;
        assert!((ev.fitness - (first + second) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn traced_and_untraced_agree() {
        let mut rng = SimRng::seed_from_u64(4);
        for kind in [ScenarioKind::StaticSingle, ScenarioKind::Switching, ScenarioKind::Multicell] {
            let g = random_genome(&mut rng, &small_params(4)).unwrap();
            let cfg = ScenarioConfig::new(kind, 4, 1);
            let lands = match kind {
                ScenarioKind::StaticSingle => Landscapes::Single(NkLandscape::generate(&mut rng, 4, 1).unwrap()),
                ScenarioKind::Switching => Landscapes::Switching {
                    a: NkLandscape::generate(&mut rng, 4, 1).unwrap(),
                    b: NkLandscape::generate(&mut rng, 4, 1).unwrap(),
                },
                ScenarioKind::Multicell => Landscapes::Coupled {
                    mother: NkcsLandscape::generate(&mut rng, 4, 1, 1, 1).unwrap(),
                    daughter: NkcsLandscape::generate(&mut rng, 4, 1, 1, 1).unwrap(),
                },
            };
            let a = evaluate(&g, &cfg, &lands, None, Order::BFirst).unwrap();
            let b = evaluate_untraced(&g, &cfg, &lands, None, Order::BFirst).unwrap();
            assert_eq!(a.fitness, b.fitness);
            assert_eq!(a.finals, b.finals);
        }
    }
}
